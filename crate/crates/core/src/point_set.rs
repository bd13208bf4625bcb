use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

/// Dense index of a point inside its parent space.
pub type PointId = usize;

/// A sorted, duplicate-free set of point ids.
///
/// Sorted storage doubles as the canonical form used for part identity and
/// lexicographic family ordering.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PointSet(Vec<PointId>);

impl PointSet {
    pub fn new(mut ids: Vec<PointId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        PointSet(ids)
    }

    pub fn range(start: PointId, end_inclusive: PointId) -> Self {
        PointSet((start..=end_inclusive).collect())
    }

    pub fn all(len: usize) -> Self {
        PointSet((0..len).collect())
    }

    pub fn singleton(p: PointId) -> Self {
        PointSet(vec![p])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = PointId> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[PointId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<PointId> {
        self.0
    }

    pub fn first(&self) -> Option<PointId> {
        self.0.first().copied()
    }

    pub fn max_id(&self) -> Option<PointId> {
        self.0.last().copied()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.iter().all(|p| other.contains(p))
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().any(|p| large.contains(p))
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet(self.iter().filter(|p| other.contains(*p)).collect())
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        PointSet(self.iter().filter(|p| !other.contains(*p)).collect())
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend(self.iter());
        v.extend(other.iter());
        PointSet::new(v)
    }
}

impl FromIterator<PointId> for PointSet {
    fn from_iter<I: IntoIterator<Item = PointId>>(iter: I) -> Self {
        PointSet::new(iter.into_iter().collect())
    }
}

impl From<Vec<PointId>> for PointSet {
    fn from(v: Vec<PointId>) -> Self {
        PointSet::new(v)
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Vec::<PointId>::deserialize(d).map(PointSet::new)
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}
