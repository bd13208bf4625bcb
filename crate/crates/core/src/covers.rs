//! Covers of a (sub)space and their statistics: multiplicity,
//! `d`-multiplicity, Lebesgue number, mesh, and the `lambda`-enlargement.
//!
//! Balls are open: `B_d(x) = {y : d(x,y) < d}`. The `d`-multiplicity counts
//! the elements an open `d`-ball *meets*.

use crate::metric::{FiniteMetricSpace, MetricError, SpaceRef};
use crate::point_set::{PointId, PointSet};
use crate::scalar::{Extent, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoverError {
    #[error("cover element {0} is empty")]
    EmptyElement(usize),
    #[error("point {0} is not covered")]
    Uncovered(PointId),
    #[error("element {element} contains point {point} outside the covered domain")]
    OutsideDomain { element: usize, point: PointId },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Indexed subsets whose union is the covered domain (by default the whole
/// space). All statistics use the metric restricted to the domain.
#[derive(Debug, Clone)]
pub struct Cover<S> {
    space: SpaceRef<S>,
    domain: PointSet,
    elements: Vec<PointSet>,
}

impl<S: Scalar> Cover<S> {
    pub fn new(space: SpaceRef<S>, elements: Vec<PointSet>) -> Result<Self, CoverError> {
        let domain = space.points();
        Self::on(space, domain, elements)
    }

    /// Cover of the subspace `domain`.
    pub fn on(
        space: SpaceRef<S>,
        domain: PointSet,
        elements: Vec<PointSet>,
    ) -> Result<Self, CoverError> {
        if domain.is_empty() {
            return Err(MetricError::EmptySubset.into());
        }
        space.check_subset(&domain)?;
        let mut hit = vec![false; space.len()];
        for (i, e) in elements.iter().enumerate() {
            if e.is_empty() {
                return Err(CoverError::EmptyElement(i));
            }
            for p in e.iter() {
                if !domain.contains(p) {
                    return Err(CoverError::OutsideDomain {
                        element: i,
                        point: p,
                    });
                }
                hit[p] = true;
            }
        }
        if let Some(p) = domain.iter().find(|p| !hit[*p]) {
            return Err(CoverError::Uncovered(p));
        }
        Ok(Cover {
            space,
            domain,
            elements,
        })
    }

    pub fn space(&self) -> &SpaceRef<S> {
        &self.space
    }

    pub fn domain(&self) -> &PointSet {
        &self.domain
    }

    pub fn elements(&self) -> &[PointSet] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Indices of the elements containing `x`.
    pub fn containing(&self, x: PointId) -> Vec<usize> {
        (0..self.elements.len())
            .filter(|&i| self.elements[i].contains(x))
            .collect()
    }

    /// Largest number of elements sharing a point.
    pub fn multiplicity(&self) -> usize {
        let mut count = vec![0usize; self.space.len()];
        for e in &self.elements {
            for p in e.iter() {
                count[p] += 1;
            }
        }
        self.domain.iter().map(|p| count[p]).max().unwrap_or(0)
    }

    /// Largest number of elements met by an open ball `B_d(x)`.
    pub fn d_multiplicity(&self, d: S) -> usize {
        self.ball_multiplicity(|dist| dist.lt_tol(d))
    }

    /// As [`Cover::d_multiplicity`] with closed balls `d(x,y) <= d`. This is
    /// the count that bounds the multiplicity of [`Cover::enlarge`].
    pub fn closed_d_multiplicity(&self, d: S) -> usize {
        self.ball_multiplicity(|dist| dist.le_tol(d))
    }

    fn ball_multiplicity(&self, within: impl Fn(S) -> bool) -> usize {
        self.domain
            .iter()
            .map(|x| {
                self.elements
                    .iter()
                    .filter(|e| e.iter().any(|y| within(self.space.dist(x, y))))
                    .count()
            })
            .max()
            .unwrap_or(0)
    }

    /// `min_x max_U d(x, domain \ U)`; `Unbounded` when an element is the
    /// whole domain. Every open ball of radius at most this value lies in
    /// some element.
    pub fn lebesgue_number(&self) -> Extent<S> {
        if self.elements.iter().any(|e| e.len() == self.domain.len()) {
            return Extent::Unbounded;
        }
        let complements: Vec<PointSet> = self
            .elements
            .iter()
            .map(|e| self.domain.difference(e))
            .collect();
        let mut best: Option<S> = None;
        for x in self.domain.iter() {
            let local = complements
                .iter()
                .filter_map(|c| self.space.set_distance(x, c))
                .fold(S::zero(), S::max_s);
            best = Some(best.map_or(local, |b| b.min_s(local)));
        }
        Extent::Finite(best.unwrap_or_else(S::zero))
    }

    /// Local Lebesgue value at `x`: `max_U d(x, domain \ U)`.
    pub fn lebesgue_at(&self, x: PointId) -> Extent<S> {
        let mut best = Extent::Finite(S::zero());
        for e in &self.elements {
            let comp = self.domain.difference(e);
            let v = match self.space.set_distance(x, &comp) {
                Some(d) => Extent::Finite(d),
                None => Extent::Unbounded,
            };
            best = best.max(v);
        }
        best
    }

    /// Largest element diameter.
    pub fn mesh(&self) -> S {
        self.elements
            .iter()
            .map(|e| self.space.diameter(e))
            .fold(S::zero(), S::max_s)
    }

    /// Replaces every element `V` by `V^lambda = {x : d(x, V) <= lambda}`.
    pub fn enlarge(&self, lambda: S) -> Cover<S> {
        let elements = self
            .elements
            .iter()
            .map(|e| neighborhood(&self.space, &self.domain, e, lambda))
            .collect();
        Cover {
            space: self.space.clone(),
            domain: self.domain.clone(),
            elements,
        }
    }
}

/// Closed neighborhood `{x in domain : d(x, set) <= radius}`.
pub fn neighborhood<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    domain: &PointSet,
    set: &PointSet,
    radius: S,
) -> PointSet {
    domain
        .iter()
        .filter(|&x| {
            space
                .set_distance(x, set)
                .is_some_and(|d| d.le_tol(radius))
        })
        .collect()
}

/// `Int_d(U) = {x in domain : B_d(x) subset U}` for the open ball.
pub fn interior<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    domain: &PointSet,
    set: &PointSet,
    d: S,
) -> PointSet {
    let complement = domain.difference(set);
    set.iter()
        .filter(|&x| {
            space
                .set_distance(x, &complement)
                .is_none_or(|dist| dist.ge_tol(d))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::line;
    use crate::Exact;

    fn q(v: i64) -> Exact {
        Exact::from_integer(v)
    }

    fn cover(len: usize, elements: Vec<PointSet>) -> Cover<Exact> {
        Cover::new(line::<Exact>("Z", len).into_ref(), elements).unwrap()
    }

    #[test]
    fn multiplicity_examples() {
        let partition = cover(6, vec![PointSet::range(0, 2), PointSet::range(3, 5)]);
        assert_eq!(partition.multiplicity(), 1);
        let overlap = cover(5, vec![PointSet::range(0, 2), PointSet::range(2, 4)]);
        assert_eq!(overlap.multiplicity(), 2);
    }

    #[test]
    fn d_multiplicity_examples() {
        let c = cover(7, vec![PointSet::range(0, 2), PointSet::range(4, 6), PointSet::singleton(3)]);
        // Small radius: the ball is the point itself.
        assert_eq!(c.d_multiplicity(Exact::new(1, 2)), c.multiplicity());
        let two = Cover::on(
            line::<Exact>("Z", 7).into_ref(),
            PointSet::new(vec![0, 1, 2, 4, 5, 6]),
            vec![PointSet::range(0, 2), PointSet::range(4, 6)],
        )
        .unwrap();
        assert_eq!(two.d_multiplicity(q(100)), 2);
    }

    #[test]
    fn d_multiplicity_open_ball_meets_both() {
        let two = Cover::on(
            line::<Exact>("Z", 7).into_ref(),
            PointSet::new(vec![0, 1, 2, 4, 5, 6]),
            vec![PointSet::range(0, 2), PointSet::range(4, 6)],
        )
        .unwrap();
        assert_eq!(two.d_multiplicity(Exact::new(5, 2)), 2);
        assert_eq!(two.d_multiplicity(Exact::new(3, 2)), 1);
        // With 3 covered by its own element, B_2.5(3) = {1..5} meets all three.
        let c = cover(
            7,
            vec![PointSet::range(0, 2), PointSet::range(4, 6), PointSet::singleton(3)],
        );
        assert_eq!(c.d_multiplicity(Exact::new(5, 2)), 3);
    }

    #[test]
    fn lebesgue_examples() {
        let full = cover(5, vec![PointSet::range(0, 4), PointSet::range(0, 1)]);
        assert_eq!(full.lebesgue_number(), Extent::Unbounded);
        let overlap = cover(5, vec![PointSet::range(0, 2), PointSet::range(2, 4)]);
        assert_eq!(overlap.lebesgue_number(), Extent::Finite(q(1)));
        assert_eq!(overlap.lebesgue_at(2), Extent::Finite(q(1)));
        let halves = cover(10, vec![PointSet::range(0, 4), PointSet::range(5, 9)]);
        assert_eq!(halves.lebesgue_number(), Extent::Finite(q(1)));
    }

    #[test]
    fn enlargement_examples() {
        let l = line::<Exact>("Z", 10).into_ref();
        let all = l.points();
        let grown: Vec<PointSet> = [PointSet::singleton(0), PointSet::singleton(9)]
            .iter()
            .map(|s| neighborhood(&l, &all, s, q(4)))
            .collect();
        assert_eq!(grown, vec![PointSet::range(0, 4), PointSet::range(5, 9)]);

        let c = cover(10, vec![PointSet::range(0, 4), PointSet::range(5, 9)]);
        let same = c.enlarge(Exact::new(1, 2));
        assert_eq!(same.elements(), c.elements());
    }

    #[test]
    fn enlargement_counts_closed_ball_contacts() {
        // The open 1-ball around any point is the point itself, so the open
        // 1-multiplicity is 1, yet the closed 1-enlargement overlaps at 2,3.
        let c = cover(6, vec![PointSet::range(0, 2), PointSet::range(3, 5)]);
        assert_eq!(c.d_multiplicity(q(1)), 1);
        let e = c.enlarge(q(1));
        assert_eq!(e.multiplicity(), 2);
        assert_eq!(c.closed_d_multiplicity(q(1)), 2);
        assert!(e.lebesgue_number().at_least(q(1)));
    }

    #[test]
    fn interior_shrinks() {
        let l = line::<Exact>("Z", 10).into_ref();
        let all = l.points();
        let u = PointSet::range(0, 5);
        assert_eq!(interior(&l, &all, &u, q(1)), u);
        assert_eq!(interior(&l, &all, &u, q(2)), PointSet::range(0, 4));
        assert_eq!(interior(&l, &all, &u, q(3)), PointSet::range(0, 3));
        assert_eq!(interior(&l, &all, &all, q(100)), all);
    }

    #[test]
    fn invalid_covers() {
        let l = line::<Exact>("Z", 4).into_ref();
        assert_eq!(
            Cover::new(l.clone(), vec![PointSet::range(0, 2)]).unwrap_err(),
            CoverError::Uncovered(3)
        );
        assert_eq!(
            Cover::new(l.clone(), vec![PointSet::range(0, 3), PointSet::default()]).unwrap_err(),
            CoverError::EmptyElement(1)
        );
        assert!(matches!(
            Cover::on(l, PointSet::range(0, 1), vec![PointSet::range(0, 2)]),
            Err(CoverError::OutsideDomain { .. })
        ));
    }
}
