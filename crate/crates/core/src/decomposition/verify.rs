use std::collections::BTreeSet;
use std::fmt;

use crate::decomposition::certificate::{DecompositionCertificate, Level};
use crate::point_set::PointId;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum CertificateViolation<S> {
    NonPositiveScale,
    MemberCountMismatch { expected: usize, found: usize },
    LevelOutOfRange { member: usize, level: Level },
    PartOutsideMember { member: usize, level: Level, point: PointId },
    Uncovered { member: usize, point: PointId },
    OverlappingParts { member: usize, level: Level, point: PointId },
    PartsTooClose {
        member: usize,
        level: Level,
        p: PointId,
        q: PointId,
        dist: S,
    },
    PartNotInTarget { member: usize, level: Level, part: usize },
    ExtraTargetMember { index: usize },
}

impl<S: Scalar> fmt::Display for CertificateViolation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CertificateViolation::*;
        match self {
            NonPositiveScale => write!(f, "scale r must be positive"),
            MemberCountMismatch { expected, found } => {
                write!(f, "expected {expected} member decompositions, found {found}")
            }
            LevelOutOfRange { member, level } => {
                write!(f, "member {member} uses level {level} beyond n")
            }
            PartOutsideMember {
                member,
                level,
                point,
            } => write!(
                f,
                "member {member} level {level}: point {point} is not in the member"
            ),
            Uncovered { member, point } => {
                write!(f, "member {member}: point {point} is in no level")
            }
            OverlappingParts {
                member,
                level,
                point,
            } => write!(
                f,
                "member {member} level {level}: point {point} lies in two parts"
            ),
            PartsTooClose {
                member,
                level,
                p,
                q,
                dist,
            } => write!(
                f,
                "member {member} level {level}: points {p} and {q} of different parts are at distance {dist}, not more than r"
            ),
            PartNotInTarget {
                member,
                level,
                part,
            } => write!(
                f,
                "member {member} level {level}: part {part} is not a target member"
            ),
            ExtraTargetMember { index } => {
                write!(f, "target member {index} is not a part of the decomposition")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport<S> {
    pub valid: bool,
    pub violation: Option<CertificateViolation<S>>,
    pub parts: usize,
    pub mesh: S,
}

/// Exhaustively checks every certificate invariant and reports the first
/// violation found.
pub fn verify_certificate<S: Scalar>(cert: &DecompositionCertificate<S>) -> CertificateReport<S> {
    let violation = first_violation(cert);
    CertificateReport {
        valid: violation.is_none(),
        violation,
        parts: cert.part_count(),
        mesh: cert.mesh(),
    }
}

fn first_violation<S: Scalar>(cert: &DecompositionCertificate<S>) -> Option<CertificateViolation<S>> {
    use CertificateViolation::*;
    if cert.r <= S::zero() {
        return Some(NonPositiveScale);
    }
    let source = cert.source.members();
    if source.len() != cert.members.len() {
        return Some(MemberCountMismatch {
            expected: source.len(),
            found: cert.members.len(),
        });
    }
    let target_keys: BTreeSet<_> = cert.target.members().iter().map(|m| m.key()).collect();
    let mut used = BTreeSet::new();
    for (mi, (member, levels)) in source.iter().zip(&cert.members).enumerate() {
        let space = &member.space;
        let mut covered = vec![false; space.len()];
        for (level, parts) in levels.levels() {
            if level > cert.n {
                return Some(LevelOutOfRange { member: mi, level });
            }
            let mut owner: Vec<Option<usize>> = vec![None; space.len()];
            let mut level_points = Vec::new();
            for (pi, part) in parts.iter().enumerate() {
                let key = (space.id(), part);
                if !target_keys.contains(&key) {
                    return Some(PartNotInTarget {
                        member: mi,
                        level,
                        part: pi,
                    });
                }
                used.insert(key);
                for p in part.iter() {
                    if !member.points.contains(p) {
                        return Some(PartOutsideMember {
                            member: mi,
                            level,
                            point: p,
                        });
                    }
                    if owner[p].is_some() {
                        return Some(OverlappingParts {
                            member: mi,
                            level,
                            point: p,
                        });
                    }
                    owner[p] = Some(pi);
                    covered[p] = true;
                    level_points.push(p);
                }
            }
            level_points.sort_unstable();
            for (i, &p) in level_points.iter().enumerate() {
                for &q in &level_points[i + 1..] {
                    if owner[p] != owner[q] {
                        let dist = space.dist(p, q);
                        if dist.le_tol(cert.r) {
                            return Some(PartsTooClose {
                                member: mi,
                                level,
                                p,
                                q,
                                dist,
                            });
                        }
                    }
                }
            }
        }
        if let Some(point) = member.points.iter().find(|p| !covered[*p]) {
            return Some(Uncovered { member: mi, point });
        }
    }
    cert.target
        .members()
        .iter()
        .position(|m| !used.contains(&m.key()))
        .map(|index| ExtraTargetMember { index })
}
