use std::fmt;
use std::str::FromStr;

use crate::covers::Cover;
use crate::decomposition::certificate::{DecompositionCertificate, Level, MemberLevels};
use crate::decomposition::grave::grave_construct_levels;
use crate::decomposition::oracle::{exhaustive_decompose, MAX_ORACLE_POINTS};
use crate::decomposition::DecompositionError;
use crate::metric::{max_separated_net, Member, MetricFamily};
use crate::point_set::PointSet;
use crate::scalar::{half, two, Extent, Scalar};

/// Ball cover of one member around a maximal `2r`-separated net.
#[derive(Debug, Clone)]
pub struct NetCover<S> {
    pub net: PointSet,
    pub cover: Cover<S>,
    pub multiplicity: usize,
    pub lebesgue: Extent<S>,
}

/// For each member: the greedy maximal `2r`-separated net and the cover by
/// closed `4r`-balls around it. Every point is within `2r` of the net, so
/// the Lebesgue number is at least `r`.
pub fn net_cover_strategy<S: Scalar>(family: &MetricFamily<S>, r: S) -> Vec<NetCover<S>> {
    family.members().iter().map(|m| net_cover(m, r)).collect()
}

fn net_cover<S: Scalar>(member: &Member<S>, r: S) -> NetCover<S> {
    let net = max_separated_net(&member.space, &member.points, two::<S>() * r);
    let radius = two::<S>() * two::<S>() * r;
    let elements = net
        .iter()
        .map(|z| member.space.closed_ball(z, radius, &member.points))
        .collect();
    let cover = Cover::on(member.space.clone(), member.points.clone(), elements)
        .expect("balls around a maximal net cover the member");
    NetCover {
        net,
        multiplicity: cover.multiplicity(),
        lebesgue: cover.lebesgue_number(),
        cover,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyName {
    NetThenGrave,
    Singletons,
    OracleSmall,
}

impl StrategyName {
    pub const ALL: [StrategyName; 3] = [
        StrategyName::NetThenGrave,
        StrategyName::Singletons,
        StrategyName::OracleSmall,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyName::NetThenGrave => "net_then_grave",
            StrategyName::Singletons => "singletons",
            StrategyName::OracleSmall => "oracle_small",
        }
    }
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategyName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| format!("unknown strategy '{s}'"))
    }
}

/// A defender policy with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy<S> {
    /// Net-ball covers at net scales `r/2 * growth^j`, `j < max_steps`,
    /// feeding the first scale whose cover satisfies the cover-to-
    /// decomposition preconditions.
    NetThenGrave { growth: u32, max_steps: u32 },
    /// Every point its own part; needs all pairs more than `r` apart.
    Singletons,
    /// Exhaustive search for an `(r, n)`-decomposition with parts of
    /// diameter at most `diameter_bound`.
    OracleSmall { n: Level, diameter_bound: S },
}

impl<S: Scalar> Strategy<S> {
    pub fn net_then_grave() -> Self {
        Strategy::NetThenGrave {
            growth: 2,
            max_steps: 32,
        }
    }

    pub fn name(&self) -> StrategyName {
        match self {
            Strategy::NetThenGrave { .. } => StrategyName::NetThenGrave,
            Strategy::Singletons => StrategyName::Singletons,
            Strategy::OracleSmall { .. } => StrategyName::OracleSmall,
        }
    }
}

/// Produces an `(r, n)`-decomposition of `family` using `strategy`.
pub fn defend<S: Scalar>(
    family: &MetricFamily<S>,
    r: S,
    strategy: &Strategy<S>,
) -> Result<DecompositionCertificate<S>, DecompositionError> {
    if r <= S::zero() {
        return Err(DecompositionError::NonPositiveScale);
    }
    match strategy {
        Strategy::Singletons => singletons(family, r),
        Strategy::NetThenGrave { growth, max_steps } => {
            net_then_grave(family, r, *growth, *max_steps)
        }
        Strategy::OracleSmall { n, diameter_bound } => {
            oracle_small(family, r, *n, *diameter_bound)
        }
    }
}

fn singletons<S: Scalar>(
    family: &MetricFamily<S>,
    r: S,
) -> Result<DecompositionCertificate<S>, DecompositionError> {
    for (i, m) in family.members().iter().enumerate() {
        if let Some(gap) = m.space.min_positive_gap(&m.points) {
            if gap.le_tol(r) {
                return Err(DecompositionError::StrategyFailed(format!(
                    "member {i} has points at distance {gap}, not more than r = {r}"
                )));
            }
        }
    }
    Ok(DecompositionCertificate::singletons(family.clone(), r))
}

fn net_then_grave<S: Scalar>(
    family: &MetricFamily<S>,
    r: S,
    growth: u32,
    max_steps: u32,
) -> Result<DecompositionCertificate<S>, DecompositionError> {
    if growth < 2 {
        return Err(DecompositionError::StrategyFailed(
            "net scale growth factor must be at least 2".into(),
        ));
    }
    let factor = S::from_int(growth as i64);
    let mut members = Vec::with_capacity(family.len());
    let mut n: Level = 0;
    for (i, member) in family.members().iter().enumerate() {
        let mut scale = r * half();
        let mut found = None;
        for _ in 0..max_steps {
            let nc = net_cover(member, scale);
            let slots = nc.multiplicity as Level;
            if nc.lebesgue.at_least(S::from_int(slots as i64) * r) {
                // A rung sitting exactly on the bound can still be refused.
                match grave_construct_levels(&nc.cover, r, slots - 1) {
                    Ok(levels) => {
                        found = Some((levels, slots - 1));
                        break;
                    }
                    Err(DecompositionError::PreconditionFailed { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            scale = scale * factor;
        }
        let (levels, member_n) = found.ok_or_else(|| {
            DecompositionError::StrategyFailed(format!(
                "member {i}: no net scale within {max_steps} steps reaches the Lebesgue bound"
            ))
        })?;
        n = n.max(member_n);
        members.push(levels);
    }
    Ok(DecompositionCertificate::new(family.clone(), r, n, members))
}

fn oracle_small<S: Scalar>(
    family: &MetricFamily<S>,
    r: S,
    n: Level,
    bound: S,
) -> Result<DecompositionCertificate<S>, DecompositionError> {
    let mut members: Vec<MemberLevels> = Vec::with_capacity(family.len());
    for (i, m) in family.members().iter().enumerate() {
        if m.len() > MAX_ORACLE_POINTS {
            return Err(DecompositionError::StrategyFailed(format!(
                "member {i} has {} points, above the oracle limit {MAX_ORACLE_POINTS}",
                m.len()
            )));
        }
        let verdict = exhaustive_decompose(&m.space, &m.points, r, n, bound)?;
        let witness = verdict.witness.ok_or_else(|| {
            DecompositionError::StrategyFailed(format!(
                "member {i} has no ({r}, {n})-decomposition with parts of diameter <= {bound}; best is {}",
                verdict.min_worst_diameter
            ))
        })?;
        members.extend(witness.members);
    }
    Ok(DecompositionCertificate::new(family.clone(), r, n, members))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::verify_certificate;
    use crate::metric::line;
    use crate::Exact;

    fn q(v: i64) -> Exact {
        Exact::from_integer(v)
    }

    #[test]
    fn net_cover_on_a_segment() {
        let l = line::<Exact>("Z", 21).into_ref();
        let covers = net_cover_strategy(&MetricFamily::single(l), q(2));
        let nc = &covers[0];
        assert_eq!(nc.net, PointSet::new(vec![0, 4, 8, 12, 16, 20]));
        assert!(nc.multiplicity <= 81);
        assert!(nc.lebesgue.at_least(q(2)));
    }

    #[test]
    fn single_point_member() {
        let l = line::<Exact>("Z", 1).into_ref();
        let covers = net_cover_strategy(&MetricFamily::single(l), q(3));
        assert_eq!(covers[0].multiplicity, 1);
    }

    #[test]
    fn singletons_policy() {
        let l = line::<Exact>("Z", 6).into_ref();
        let fam = MetricFamily::singletons(l.clone());
        let cert = defend(&fam, q(100), &Strategy::Singletons).unwrap();
        assert!(verify_certificate(&cert).valid);
        assert_eq!(cert.mesh(), q(0));
        let whole = MetricFamily::single(l);
        assert!(defend(&whole, Exact::new(1, 2), &Strategy::Singletons).is_ok());
        assert!(matches!(
            defend(&whole, q(1), &Strategy::Singletons),
            Err(DecompositionError::StrategyFailed(_))
        ));
    }

    #[test]
    fn net_then_grave_on_a_segment() {
        let l = line::<Exact>("Z", 31).into_ref();
        let cert = defend(&MetricFamily::single(l), q(1), &Strategy::net_then_grave()).unwrap();
        assert!(verify_certificate(&cert).valid);
        assert!(cert.n <= 80);
    }

    #[test]
    fn oracle_policy_matches_oracle() {
        let l = line::<Exact>("Z", 6).into_ref();
        let fam = MetricFamily::single(l.clone());
        let strat = Strategy::OracleSmall {
            n: 1,
            diameter_bound: q(1),
        };
        let verdict = exhaustive_decompose(&l, &l.points(), q(2), 1, q(1)).unwrap();
        assert_eq!(defend(&fam, q(2), &strat).is_ok(), verdict.decomposable);
        let lax = Strategy::OracleSmall {
            n: 1,
            diameter_bound: q(2),
        };
        let verdict = exhaustive_decompose(&l, &l.points(), q(2), 1, q(2)).unwrap();
        assert_eq!(defend(&fam, q(2), &lax).is_ok(), verdict.decomposable);
    }
}
