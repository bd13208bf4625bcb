use std::collections::BTreeSet;

use crate::metric::space::{MetricError, SpaceRef};
use crate::point_set::PointSet;
use crate::scalar::Scalar;

/// A subset of a parent space, carrying the restricted metric.
#[derive(Debug, Clone)]
pub struct Member<S> {
    pub space: SpaceRef<S>,
    pub points: PointSet,
}

impl<S: Scalar> Member<S> {
    pub fn new(space: SpaceRef<S>, points: PointSet) -> Result<Self, MetricError> {
        if points.is_empty() {
            return Err(MetricError::EmptySubset);
        }
        space.check_subset(&points)?;
        Ok(Member { space, points })
    }

    pub fn whole(space: SpaceRef<S>) -> Self {
        let points = space.points();
        Member { space, points }
    }

    pub fn diameter(&self) -> S {
        self.space.diameter(&self.points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Identity key: parent space id plus canonical point list.
    pub fn key(&self) -> (&str, &PointSet) {
        (self.space.id(), &self.points)
    }

    pub fn same_as(&self, other: &Member<S>) -> bool {
        self.key() == other.key()
    }
}

/// An ordered collection of subspaces. Duplicate members are permitted.
#[derive(Debug, Clone)]
pub struct MetricFamily<S> {
    pub id: String,
    members: Vec<Member<S>>,
    labels: Vec<String>,
}

impl<S: Scalar> MetricFamily<S> {
    pub fn new(id: impl Into<String>, members: Vec<Member<S>>) -> Self {
        let labels = (0..members.len()).map(|i| i.to_string()).collect();
        MetricFamily {
            id: id.into(),
            members,
            labels,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        if labels.len() == self.members.len() {
            self.labels = labels;
        }
        self
    }

    /// One-member family holding the whole space.
    pub fn single(space: SpaceRef<S>) -> Self {
        let id = format!("{{{}}}", space.id());
        MetricFamily::new(id, vec![Member::whole(space)])
    }

    /// Family of every singleton of the space.
    pub fn singletons(space: SpaceRef<S>) -> Self {
        let members = space
            .points()
            .iter()
            .map(|p| Member {
                space: space.clone(),
                points: PointSet::singleton(p),
            })
            .collect();
        MetricFamily::new(format!("singletons({})", space.id()), members)
    }

    /// Deduplicated family sorted by `(space id, points)`.
    pub fn canonical(id: impl Into<String>, members: Vec<Member<S>>) -> Self {
        let mut members = members;
        members.sort_by(|a, b| a.key().cmp(&b.key()));
        members.dedup_by(|a, b| a.same_as(b));
        MetricFamily::new(id, members)
    }

    pub fn members(&self) -> &[Member<S>] {
        &self.members
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, member: &Member<S>) -> Option<usize> {
        self.members.iter().position(|m| m.same_as(member))
    }

    fn key_set(&self) -> BTreeSet<(&str, &PointSet)> {
        self.members.iter().map(Member::key).collect()
    }

    /// Equality of the member sets, ignoring ids, labels and order.
    pub fn same_members(&self, other: &MetricFamily<S>) -> bool {
        self.key_set() == other.key_set()
    }

    /// Supremum of member diameters.
    pub fn mesh(&self) -> S {
        mesh(self)
    }
}

/// `max` over members of the member diameter; zero for an empty family.
pub fn mesh<S: Scalar>(family: &MetricFamily<S>) -> S {
    family
        .members()
        .iter()
        .map(Member::diameter)
        .fold(S::zero(), S::max_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::space::line;
    use crate::Exact;

    #[test]
    fn mesh_examples() {
        let l = line::<Exact>("Z", 12).into_ref();
        let singles = MetricFamily::singletons(l.clone());
        assert_eq!(mesh(&singles), Exact::from_integer(0));

        let fam = MetricFamily::new(
            "f",
            vec![
                Member::new(l.clone(), PointSet::range(0, 2)).unwrap(),
                Member::new(l.clone(), PointSet::new(vec![5, 9])).unwrap(),
            ],
        );
        assert_eq!(mesh(&fam), Exact::from_integer(4));

        let intervals = MetricFamily::new(
            "intervals",
            (0..=7)
                .map(|k| Member::new(l.clone(), PointSet::range(0, k)).unwrap())
                .collect(),
        );
        assert_eq!(mesh(&intervals), Exact::from_integer(7));
    }

    #[test]
    fn members_reject_empty_or_foreign_points() {
        let l = line::<Exact>("Z", 3).into_ref();
        assert_eq!(
            Member::new(l.clone(), PointSet::default()).unwrap_err(),
            MetricError::EmptySubset
        );
        assert!(matches!(
            Member::new(l, PointSet::new(vec![7])),
            Err(MetricError::PointOutOfRange { .. })
        ));
    }

    #[test]
    fn canonical_dedups_and_sorts() {
        let l = line::<Exact>("Z", 6).into_ref();
        let m = |a, b| Member::new(l.clone(), PointSet::range(a, b)).unwrap();
        let fam = MetricFamily::canonical("c", vec![m(3, 5), m(0, 1), m(3, 5)]);
        assert_eq!(fam.len(), 2);
        assert_eq!(fam.members()[0].points, PointSet::range(0, 1));
    }
}
