use petgraph::unionfind::UnionFind;

use crate::metric::space::FiniteMetricSpace;
use crate::point_set::{PointId, PointSet};
use crate::scalar::Scalar;

/// Splits `subset` into the classes of the transitive closure of
/// `d(p,q) <= r`. Classes are returned ordered by their smallest point.
///
/// Distinct classes are pairwise more than `r` apart and no class can be
/// split further without breaking that property.
pub fn r_components<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    subset: &PointSet,
    r: S,
) -> Vec<PointSet> {
    let pts = subset.as_slice();
    let mut uf = UnionFind::<usize>::new(pts.len());
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if space.dist(pts[i], pts[j]).le_tol(r) {
                uf.union(i, j);
            }
        }
    }
    let labels = uf.into_labeling();
    let mut classes: Vec<(usize, Vec<PointId>)> = Vec::new();
    for (i, root) in labels.into_iter().enumerate() {
        match classes.iter_mut().find(|(r, _)| *r == root) {
            Some((_, v)) => v.push(pts[i]),
            None => classes.push((root, vec![pts[i]])),
        }
    }
    classes.into_iter().map(|(_, v)| PointSet::new(v)).collect()
}

/// Greedy maximal `spacing`-separated subset of `subset`, visiting points by
/// ascending id. Every chosen pair is at distance `>= spacing` and every
/// point of `subset` lies within `< spacing` of a chosen point.
pub fn max_separated_net<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    subset: &PointSet,
    spacing: S,
) -> PointSet {
    let mut net: Vec<PointId> = Vec::new();
    for p in subset.iter() {
        if net.iter().all(|&z| space.dist(p, z).ge_tol(spacing)) {
            net.push(p);
        }
    }
    PointSet::new(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::space::line;
    use crate::Exact;

    fn q(v: i64) -> Exact {
        Exact::from_integer(v)
    }

    #[test]
    fn components_with_large_gaps() {
        let l = line::<Exact>("Z", 10);
        let parts = r_components(&l, &PointSet::new(vec![0, 3, 6, 9]), q(2));
        assert_eq!(parts.len(), 4);
        assert!(parts.iter().all(|p| p.len() == 1));
    }

    #[test]
    fn components_chain() {
        let l = line::<Exact>("Z", 12);
        let parts = r_components(&l, &PointSet::new(vec![0, 1, 2, 10, 11]), q(1));
        assert_eq!(
            parts,
            vec![PointSet::new(vec![0, 1, 2]), PointSet::new(vec![10, 11])]
        );
    }

    #[test]
    fn net_examples() {
        let l = line::<Exact>("Z", 11);
        assert_eq!(
            max_separated_net(&l, &PointSet::singleton(4), q(3)),
            PointSet::singleton(4)
        );
        assert_eq!(
            max_separated_net(&l, &l.points(), q(4)),
            PointSet::new(vec![0, 4, 8])
        );
    }
}
