use std::collections::BTreeMap;

use crate::decomposition::certificate::{DecompositionCertificate, MemberLevels};
use crate::decomposition::DecompositionError;
use crate::point_set::PointSet;
use crate::scalar::Scalar;

/// Chains `X ->(r,m) Y` and `Y ->(s,n) Z` into `X ->(min(r,s), (m+1)(n+1)-1) Z`.
///
/// A point on outer level `i` inside a part decomposed by `inner` on level
/// `k` lands on composed level `i * (n + 1) + k`.
pub fn compose_certificates<S: Scalar>(
    outer: &DecompositionCertificate<S>,
    inner: &DecompositionCertificate<S>,
) -> Result<DecompositionCertificate<S>, DecompositionError> {
    if !inner.source.same_members(&outer.target) {
        return Err(DecompositionError::SourceMismatch(format!(
            "inner source '{}' ({} members) is not the outer target '{}' ({} members)",
            inner.source.id,
            inner.source.len(),
            outer.target.id,
            outer.target.len()
        )));
    }
    let index: BTreeMap<(&str, &PointSet), usize> = inner
        .source
        .members()
        .iter()
        .enumerate()
        .map(|(i, m)| (m.key(), i))
        .collect();
    let stride = inner.n.checked_add(1).ok_or(DecompositionError::LevelOverflow)?;
    let n = outer
        .n
        .checked_add(1)
        .and_then(|m| m.checked_mul(stride))
        .map(|p| p - 1)
        .ok_or(DecompositionError::LevelOverflow)?;

    let mut members = Vec::with_capacity(outer.members.len());
    for (mi, levels) in outer.members.iter().enumerate() {
        let space_id = outer.source.members()[mi].space.id();
        let mut out = MemberLevels::new();
        for (i, part) in levels.parts() {
            let j = *index.get(&(space_id, part)).ok_or_else(|| {
                DecompositionError::SourceMismatch(format!(
                    "outer part {part:?} of member {mi} is not decomposed by the inner certificate"
                ))
            })?;
            for (k, sub) in inner.members[j].parts() {
                out.push(i * stride + k, sub.clone());
            }
        }
        members.push(out);
    }
    let r = outer.r.min_s(inner.r);
    let mut composed = DecompositionCertificate::new(outer.source.clone(), r, n, members);
    composed.target.id = inner.target.id.clone();
    Ok(composed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::verify_certificate;
    use crate::metric::{line, MetricFamily};
    use crate::Exact;

    fn q(v: i64) -> Exact {
        Exact::from_integer(v)
    }

    /// `{0..15}` split at level 0/1 into alternating blocks of four.
    fn blocks() -> DecompositionCertificate<Exact> {
        let l = line::<Exact>("Z", 16).into_ref();
        let mut levels = MemberLevels::new();
        for b in 0..4 {
            levels.push((b % 2) as u64, PointSet::range(4 * b, 4 * b + 3));
        }
        DecompositionCertificate::new(MetricFamily::single(l), q(4), 1, vec![levels])
    }

    #[test]
    fn two_level_chain_has_n_three() {
        let outer = blocks();
        assert!(verify_certificate(&outer).valid);
        // Split each block of four into alternating pairs.
        let members = outer
            .target
            .members()
            .iter()
            .map(|m| {
                let start = m.points.first().unwrap();
                let mut l = MemberLevels::new();
                l.push(0, PointSet::range(start, start + 1));
                l.push(1, PointSet::range(start + 2, start + 3));
                l
            })
            .collect();
        let inner = DecompositionCertificate::new(outer.target.clone(), q(1), 1, members);
        assert!(verify_certificate(&inner).valid);
        let c = compose_certificates(&outer, &inner).unwrap();
        assert_eq!(c.n, 3);
        assert_eq!(c.r, q(1));
        assert!(verify_certificate(&c).valid, "{:?}", verify_certificate(&c));
    }

    #[test]
    fn identity_inner_is_neutral() {
        let outer = blocks();
        let id = DecompositionCertificate::identity(outer.target.clone(), q(9));
        let c = compose_certificates(&outer, &id).unwrap();
        assert!(c.same_decomposition(&outer));
    }

    #[test]
    fn mismatched_chain_is_rejected() {
        let outer = blocks();
        let other = DecompositionCertificate::identity(outer.source.clone(), q(1));
        assert!(matches!(
            compose_certificates(&outer, &other),
            Err(DecompositionError::SourceMismatch(_))
        ));
    }
}
