use std::collections::BTreeMap;

use crate::metric::{Member, MetricFamily};
use crate::point_set::{PointId, PointSet};
use crate::scalar::Scalar;

/// Level index. Composition multiplies level counts, so indices can get
/// large while most levels stay empty.
pub type Level = u64;

/// Levels of one decomposed member: sparse map from level index to the
/// parts on that level, each level's parts in lexicographic order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MemberLevels {
    levels: BTreeMap<Level, Vec<PointSet>>,
}

impl MemberLevels {
    pub fn new() -> Self {
        MemberLevels::default()
    }

    /// Builds from dense levels (index = position); empty parts are dropped.
    pub fn from_dense(levels: Vec<Vec<PointSet>>) -> Self {
        let mut out = MemberLevels::new();
        for (i, parts) in levels.into_iter().enumerate() {
            for p in parts {
                out.push(i as Level, p);
            }
        }
        out
    }

    pub fn push(&mut self, level: Level, part: PointSet) {
        if part.is_empty() {
            return;
        }
        let parts = self.levels.entry(level).or_default();
        let pos = parts.binary_search(&part).unwrap_or_else(|e| e);
        parts.insert(pos, part);
    }

    pub fn level(&self, level: Level) -> &[PointSet] {
        self.levels.get(&level).map_or(&[], Vec::as_slice)
    }

    /// Nonempty levels in ascending order.
    pub fn levels(&self) -> impl Iterator<Item = (Level, &[PointSet])> {
        self.levels.iter().map(|(l, p)| (*l, p.as_slice()))
    }

    pub fn parts(&self) -> impl Iterator<Item = (Level, &PointSet)> {
        self.levels
            .iter()
            .flat_map(|(l, ps)| ps.iter().map(move |p| (*l, p)))
    }

    pub fn part_count(&self) -> usize {
        self.levels.values().map(Vec::len).sum()
    }

    pub fn max_level(&self) -> Option<Level> {
        self.levels.keys().next_back().copied()
    }

    pub fn covered(&self) -> PointSet {
        self.parts().flat_map(|(_, p)| p.iter()).collect()
    }

    /// Lowest level and part index holding each point.
    pub fn assignment(&self) -> BTreeMap<PointId, (Level, usize)> {
        let mut out = BTreeMap::new();
        for (level, parts) in self.levels() {
            for (j, part) in parts.iter().enumerate() {
                for p in part.iter() {
                    out.entry(p).or_insert((level, j));
                }
            }
        }
        out
    }
}

/// An `(r, n)`-decomposition of every member of `source`: each member is the
/// union of levels `0..=n`, each level a union of pairwise `r`-disjoint
/// parts, and every part is a member of `target`.
#[derive(Debug, Clone)]
pub struct DecompositionCertificate<S> {
    pub source: MetricFamily<S>,
    pub r: S,
    pub n: Level,
    pub members: Vec<MemberLevels>,
    pub target: MetricFamily<S>,
}

impl<S: Scalar> DecompositionCertificate<S> {
    /// Assembles a certificate whose target is the canonical family of all
    /// parts. Nothing is verified here.
    pub fn new(source: MetricFamily<S>, r: S, n: Level, members: Vec<MemberLevels>) -> Self {
        let target = Self::parts_family(&source, &members);
        DecompositionCertificate {
            source,
            r,
            n,
            members,
            target,
        }
    }

    /// Assembles a certificate with an explicit target family.
    pub fn with_target(
        source: MetricFamily<S>,
        r: S,
        n: Level,
        members: Vec<MemberLevels>,
        target: MetricFamily<S>,
    ) -> Self {
        DecompositionCertificate {
            source,
            r,
            n,
            members,
            target,
        }
    }

    fn parts_family(source: &MetricFamily<S>, members: &[MemberLevels]) -> MetricFamily<S> {
        let parts = source
            .members()
            .iter()
            .zip(members)
            .flat_map(|(m, levels)| {
                levels.parts().map(move |(_, p)| Member {
                    space: m.space.clone(),
                    points: p.clone(),
                })
            })
            .collect();
        MetricFamily::canonical(format!("{}/parts", source.id), parts)
    }

    /// Every member is its own single part on level 0.
    pub fn identity(family: MetricFamily<S>, r: S) -> Self {
        let members = family
            .members()
            .iter()
            .map(|m| {
                let mut l = MemberLevels::new();
                l.push(0, m.points.clone());
                l
            })
            .collect();
        Self::new(family, r, 0, members)
    }

    /// Every point is its own part on level 0.
    pub fn singletons(family: MetricFamily<S>, r: S) -> Self {
        let members = family
            .members()
            .iter()
            .map(|m| {
                let mut l = MemberLevels::new();
                for p in m.points.iter() {
                    l.push(0, PointSet::singleton(p));
                }
                l
            })
            .collect();
        Self::new(family, r, 0, members)
    }

    pub fn part_count(&self) -> usize {
        self.members.iter().map(MemberLevels::part_count).sum()
    }

    /// Largest part diameter.
    pub fn mesh(&self) -> S {
        self.target.mesh()
    }

    /// Parts of one member as target-style members.
    pub fn member_parts(&self, index: usize) -> impl Iterator<Item = (Level, Member<S>)> + '_ {
        let space = self.source.members()[index].space.clone();
        self.members[index].parts().map(move |(l, p)| {
            (
                l,
                Member {
                    space: space.clone(),
                    points: p.clone(),
                },
            )
        })
    }

    /// Same `r`, `n`, source members and per-member levels.
    pub fn same_decomposition(&self, other: &DecompositionCertificate<S>) -> bool {
        self.r == other.r
            && self.n == other.n
            && self.source.members().len() == other.source.members().len()
            && self
                .source
                .members()
                .iter()
                .zip(other.source.members())
                .all(|(a, b)| a.same_as(b))
            && self.members == other.members
    }
}
