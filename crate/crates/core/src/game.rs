//! The decomposition game: a challenger declares scales, a defender strategy
//! answers each with a certificate, and the defender wins once the current
//! family's mesh is at most the declared bound.

use crate::decomposition::{
    compose_certificates, defend, verify_certificate, DecompositionCertificate,
    DecompositionError, Level, Strategy,
};
use crate::metric::MetricFamily;
use crate::scalar::Scalar;

pub const DEFAULT_MAX_TURNS: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameStatus {
    InProgress,
    DefenderWon,
    DefenderStuck { reason: String },
}

impl GameStatus {
    pub fn is_finished(&self) -> bool {
        !matches!(self, GameStatus::InProgress)
    }

    pub fn label(&self) -> &'static str {
        match self {
            GameStatus::InProgress => "in_progress",
            GameStatus::DefenderWon => "defender_won",
            GameStatus::DefenderStuck { .. } => "defender_stuck",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Turn<S> {
    pub r: S,
    pub certificate: DecompositionCertificate<S>,
    /// Mesh of the resulting family `certificate.target`.
    pub mesh: S,
}

impl<S: Scalar> Turn<S> {
    pub fn family(&self) -> &MetricFamily<S> {
        &self.certificate.target
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GameError {
    #[error("session is finished")]
    SessionFinished,
    #[error("challenge scale must be positive")]
    InvalidScale,
    #[error("bound must be nonnegative")]
    InvalidBound,
    #[error("max_turns must be positive")]
    InvalidMaxTurns,
    #[error("defender failed: {0}")]
    StrategyFailed(String),
    #[error("defender produced an invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("transcript has no turns")]
    EmptyTranscript,
    #[error("turn certificates do not chain: {0}")]
    ComposeMismatch(String),
}

#[derive(Debug, Clone)]
pub struct GameSession<S> {
    pub id: u64,
    pub initial: MetricFamily<S>,
    pub bound: S,
    pub strategy: Strategy<S>,
    pub max_turns: u32,
    pub turns: Vec<Turn<S>>,
    pub status: GameStatus,
}

impl<S: Scalar> GameSession<S> {
    /// Opens a session; it is won at once if `family` already has mesh at
    /// most `bound`.
    pub fn start(
        id: u64,
        family: MetricFamily<S>,
        bound: S,
        strategy: Strategy<S>,
        max_turns: u32,
    ) -> Result<Self, GameError> {
        if bound < S::zero() {
            return Err(GameError::InvalidBound);
        }
        if max_turns == 0 {
            return Err(GameError::InvalidMaxTurns);
        }
        let status = if family.mesh().le_tol(bound) {
            GameStatus::DefenderWon
        } else {
            GameStatus::InProgress
        };
        Ok(GameSession {
            id,
            initial: family,
            bound,
            strategy,
            max_turns,
            turns: Vec::new(),
            status,
        })
    }

    /// The family the next challenge applies to.
    pub fn current(&self) -> &MetricFamily<S> {
        self.turns.last().map_or(&self.initial, Turn::family)
    }

    pub fn current_mesh(&self) -> S {
        self.turns
            .last()
            .map_or_else(|| self.initial.mesh(), |t| t.mesh)
    }

    /// Runs the defender at scale `r` on the current family.
    ///
    /// A strategy failure leaves the session `DefenderStuck` and is also
    /// returned as an error. Reaching `max_turns` without a win also ends
    /// the session as stuck.
    pub fn challenge(&mut self, r: S) -> Result<&Turn<S>, GameError> {
        if self.status.is_finished() {
            return Err(GameError::SessionFinished);
        }
        if r <= S::zero() {
            return Err(GameError::InvalidScale);
        }
        let certificate = match defend(self.current(), r, &self.strategy) {
            Ok(c) => c,
            Err(e) => {
                let reason = e.to_string();
                self.status = GameStatus::DefenderStuck {
                    reason: reason.clone(),
                };
                return Err(GameError::StrategyFailed(reason));
            }
        };
        let report = verify_certificate(&certificate);
        if !report.valid {
            let reason = format!("{:?}", report.violation);
            self.status = GameStatus::DefenderStuck {
                reason: format!("invalid certificate: {reason}"),
            };
            return Err(GameError::InvalidCertificate(reason));
        }
        let mesh = certificate.mesh();
        self.turns.push(Turn {
            r,
            certificate,
            mesh,
        });
        if mesh.le_tol(self.bound) {
            self.status = GameStatus::DefenderWon;
        } else if self.turns.len() >= self.max_turns as usize {
            self.status = GameStatus::DefenderStuck {
                reason: "turn limit reached".into(),
            };
        }
        Ok(self.turns.last().expect("just pushed"))
    }
}

/// Scripted challenger policies.
#[derive(Debug, Clone, PartialEq)]
pub enum Challenger<S> {
    Constant(S),
    /// `r_k = r * lambda^k`.
    Geometric { r: S, lambda: S },
    /// The listed scales in order, then stop.
    Script(Vec<S>),
}

impl<S: Scalar> Challenger<S> {
    pub fn scale(&self, k: usize) -> Option<S> {
        match self {
            Challenger::Constant(r) => Some(*r),
            Challenger::Geometric { r, lambda } => {
                Some((0..k).fold(*r, |acc, _| acc * *lambda))
            }
            Challenger::Script(v) => v.get(k).copied(),
        }
    }
}

/// Plays `challenger` against the session until it finishes or the script
/// runs out. Strategy failures end the session and are not errors here.
pub fn play<S: Scalar>(
    session: &mut GameSession<S>,
    challenger: &Challenger<S>,
) -> Result<(), GameError> {
    while !session.status.is_finished() {
        let Some(r) = challenger.scale(session.turns.len()) else {
            break;
        };
        match session.challenge(r) {
            Ok(_) | Err(GameError::StrategyFailed(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ReplayReport<S> {
    pub composed: DecompositionCertificate<S>,
    pub valid: bool,
    /// Composed `r` equals the smallest turn scale.
    pub r_matches: bool,
    /// Composed `n + 1` equals the product of the turn `n_k + 1`.
    pub n_matches: bool,
    pub expected_n: Level,
    pub mesh: S,
}

/// Chains every turn certificate into one certificate from the initial
/// family to the final one.
pub fn replay_transcript<S: Scalar>(
    session: &GameSession<S>,
) -> Result<ReplayReport<S>, GameError> {
    let mut turns = session.turns.iter();
    let first = turns.next().ok_or(GameError::EmptyTranscript)?;
    let mut composed = first.certificate.clone();
    let mut expected: Option<Level> = Some(first.certificate.n + 1);
    let mut r_min = first.certificate.r;
    for t in turns {
        composed = compose_certificates(&composed, &t.certificate).map_err(|e| match e {
            DecompositionError::SourceMismatch(m) => GameError::ComposeMismatch(m),
            other => GameError::ComposeMismatch(other.to_string()),
        })?;
        expected = expected.and_then(|p| p.checked_mul(t.certificate.n + 1));
        r_min = r_min.min_s(t.certificate.r);
    }
    let expected_n = expected.map_or(Level::MAX, |p| p - 1);
    Ok(ReplayReport {
        valid: verify_certificate(&composed).valid,
        r_matches: composed.r == r_min,
        n_matches: composed.n == expected_n,
        expected_n,
        mesh: composed.mesh(),
        composed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::line;
    use crate::Exact;

    fn q(v: i64) -> Exact {
        Exact::from_integer(v)
    }

    #[test]
    fn singletons_win_at_once() {
        let l = line::<Exact>("Z", 5).into_ref();
        let s = GameSession::start(0, MetricFamily::singletons(l), q(0), Strategy::net_then_grave(), 32)
            .unwrap();
        assert_eq!(s.status, GameStatus::DefenderWon);
        assert!(s.turns.is_empty());
    }

    #[test]
    fn small_scale_gives_singletons() {
        let l = line::<Exact>("Z", 10).into_ref();
        let mut s =
            GameSession::start(1, MetricFamily::single(l), q(0), Strategy::Singletons, 32).unwrap();
        assert_eq!(s.status, GameStatus::InProgress);
        s.challenge(Exact::new(1, 2)).unwrap();
        assert_eq!(s.status, GameStatus::DefenderWon);
        assert!(matches!(s.challenge(q(1)), Err(GameError::SessionFinished)));
    }

    #[test]
    fn constant_challenger_on_line100() {
        let l = line::<Exact>("line100", 100).into_ref();
        let mut s =
            GameSession::start(2, MetricFamily::single(l), q(5), Strategy::net_then_grave(), 16)
                .unwrap();
        play(&mut s, &Challenger::Constant(q(2))).unwrap();
        assert_eq!(s.status, GameStatus::DefenderWon);
        let meshes: Vec<Exact> = s.turns.iter().map(|t| t.mesh).collect();
        assert!(meshes.windows(2).all(|w| w[1] <= w[0]));
        let rep = replay_transcript(&s).unwrap();
        assert!(rep.valid && rep.r_matches && rep.n_matches);
        assert!(rep.mesh <= q(5));
    }

    #[test]
    fn stuck_and_turn_limit() {
        let l = line::<Exact>("Z", 10).into_ref();
        let mut s =
            GameSession::start(3, MetricFamily::single(l.clone()), q(0), Strategy::Singletons, 4)
                .unwrap();
        assert!(matches!(s.challenge(q(1)), Err(GameError::StrategyFailed(_))));
        assert!(matches!(s.status, GameStatus::DefenderStuck { .. }));

        let mut s =
            GameSession::start(4, MetricFamily::single(l), q(0), Strategy::net_then_grave(), 1)
                .unwrap();
        s.challenge(q(1)).unwrap();
        assert_eq!(
            s.status,
            GameStatus::DefenderStuck {
                reason: "turn limit reached".into()
            }
        );
    }

    #[test]
    fn invalid_inputs() {
        let l = line::<Exact>("Z", 10).into_ref();
        let mut s =
            GameSession::start(5, MetricFamily::single(l), q(1), Strategy::net_then_grave(), 8)
                .unwrap();
        assert_eq!(s.challenge(q(0)).unwrap_err(), GameError::InvalidScale);
        assert_eq!(replay_transcript(&s).unwrap_err(), GameError::EmptyTranscript);
    }
}
