use std::collections::{BTreeMap, BTreeSet};

use crate::covers::{interior, Cover};
use crate::decomposition::certificate::{DecompositionCertificate, Level, MemberLevels};
use crate::decomposition::{DecompositionError, Precondition};
use crate::metric::{FiniteMetricSpace, Member, MetricFamily};
use crate::point_set::PointSet;
use crate::scalar::{from_usize, Extent, Scalar};

/// Turns a cover with multiplicity `<= n+1` and Lebesgue number
/// `L >= (n+1) r` into an `(r, n)`-decomposition of its domain.
///
/// With `U_i` the distinct `(i+1)`-fold intersections of cover elements and
/// `S_i` the union of `Int_{t_i}(U)` over `U_i`, level `i` consists of the
/// nonempty pieces `Int_{t_i}(U) \ S_{i+1}`, where
/// `t_i = (n+1-i) r + delta` and `delta = min(L - (n+1) r, r)`. Every piece
/// lies inside some cover element.
///
/// The slack matters only on the top level. With open-ball interiors and
/// `delta = 0`, two top-level pieces can sit exactly `r` apart, which is not
/// `r`-disjoint. When `L = (n+1) r` exactly and that happens, the cover is
/// rejected as failing the Lebesgue precondition.
pub fn grave_construct<S: Scalar>(
    cover: &Cover<S>,
    r: S,
    n: Level,
) -> Result<DecompositionCertificate<S>, DecompositionError> {
    let levels = grave_construct_levels(cover, r, n)?;
    let member = Member {
        space: cover.space().clone(),
        points: cover.domain().clone(),
    };
    let family = MetricFamily::new(format!("{}/domain", cover.space().id()), vec![member]);
    Ok(DecompositionCertificate::new(family, r, n, vec![levels]))
}

/// Levels produced by [`grave_construct`] for one cover, without wrapping them
/// in a certificate.
pub fn grave_construct_levels<S: Scalar>(
    cover: &Cover<S>,
    r: S,
    n: Level,
) -> Result<MemberLevels, DecompositionError> {
    if r <= S::zero() {
        return Err(DecompositionError::NonPositiveScale);
    }
    let slots = n + 1;
    let mult = cover.multiplicity();
    if mult as u64 > slots {
        return Err(DecompositionError::PreconditionFailed {
            which: Precondition::Multiplicity,
            measured: mult.to_string(),
            required: format!("<= {slots}"),
        });
    }
    let needed = S::from_int(slots as i64) * r;
    let lebesgue = cover.lebesgue_number();
    if !lebesgue.at_least(needed) {
        return Err(DecompositionError::PreconditionFailed {
            which: Precondition::Lebesgue,
            measured: lebesgue.finite().map(|v| v.to_string()).unwrap_or_default(),
            required: format!(">= {needed}"),
        });
    }
    let delta = match lebesgue {
        Extent::Unbounded => r,
        Extent::Finite(l) if l.gt_tol(needed) => (l - needed).min_s(r),
        Extent::Finite(_) => S::zero(),
    };
    // slots <= multiplicity bound <= number of elements, so this fits.
    let n = n as usize;
    let intersections = fold_intersections(cover, n);

    let space = cover.space();
    let domain = cover.domain();
    let shrink = |i: usize| from_usize::<S>(n + 1 - i) * r + delta;

    // interiors[i][k] = Int_{t_i}(U) for the k-th set of U_i.
    let interiors: Vec<Vec<PointSet>> = intersections
        .iter()
        .enumerate()
        .map(|(i, sets)| {
            sets.iter()
                .map(|u| interior(space, domain, u, shrink(i)))
                .collect()
        })
        .collect();
    let unions: Vec<PointSet> = interiors
        .iter()
        .map(|ints| ints.iter().fold(PointSet::default(), |acc, s| acc.union(s)))
        .collect();

    let mut out = MemberLevels::new();
    for i in 0..=n {
        let next = unions.get(i + 1).cloned().unwrap_or_default();
        let mut seen = BTreeSet::new();
        for piece in &interiors[i] {
            let piece = piece.difference(&next);
            if !piece.is_empty() && seen.insert(piece.clone()) {
                out.push(i as Level, piece);
            }
        }
    }
    if delta == S::zero() {
        if let Some(dist) = top_level_gap(space, out.level(n as Level), r) {
            return Err(DecompositionError::PreconditionFailed {
                which: Precondition::Lebesgue,
                measured: needed.to_string(),
                required: format!("> {needed} (top-level pieces {dist} apart)"),
            });
        }
    }
    Ok(out)
}

/// Distance between two distinct pieces that is at most `r`, if any.
fn top_level_gap<S: Scalar>(space: &FiniteMetricSpace<S>, parts: &[PointSet], r: S) -> Option<S> {
    for (i, a) in parts.iter().enumerate() {
        for b in &parts[i + 1..] {
            for p in a.iter() {
                for q in b.iter() {
                    let d = space.dist(p, q);
                    if d.le_tol(r) {
                        return Some(d);
                    }
                }
            }
        }
    }
    None
}

/// Distinct nonempty intersections of `i+1` distinct elements, `i = 0..=n`.
///
/// A set `P` is such an intersection exactly when the fewest elements
/// intersecting to `P` is at most `i+1` and at least `i+1` elements contain
/// `P`: extra elements containing `P` leave the intersection unchanged. The
/// fewest-elements count comes from a breadth-first search over distinct
/// intersections, which stays small where enumerating index subsets would
/// blow up with the multiplicity.
fn fold_intersections<S: Scalar>(cover: &Cover<S>, n: usize) -> Vec<Vec<PointSet>> {
    let elements = cover.elements();
    let mut fewest: BTreeMap<PointSet, usize> = BTreeMap::new();
    let mut frontier: BTreeSet<PointSet> = elements.iter().cloned().collect();
    for set in &frontier {
        fewest.insert(set.clone(), 1);
    }
    for size in 2..=n + 1 {
        let mut next = BTreeSet::new();
        for set in &frontier {
            for e in elements {
                let cut = set.intersection(e);
                if !cut.is_empty() && !fewest.contains_key(&cut) {
                    next.insert(cut);
                }
            }
        }
        for set in &next {
            fewest.insert(set.clone(), size);
        }
        frontier = next;
    }
    let mut out: Vec<Vec<PointSet>> = vec![Vec::new(); n + 1];
    for (set, min_size) in fewest {
        let first = set.first().expect("intersections are nonempty");
        let containing = cover
            .containing(first)
            .into_iter()
            .filter(|&e| set.is_subset(&elements[e]))
            .count();
        for size in min_size..=containing.min(n + 1) {
            out[size - 1].push(set.clone());
        }
    }
    out
}
