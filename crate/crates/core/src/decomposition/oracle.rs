use crate::decomposition::certificate::{DecompositionCertificate, Level, MemberLevels};
use crate::decomposition::DecompositionError;
use crate::metric::{Member, MetricFamily, SpaceRef};
use crate::point_set::PointSet;
use crate::scalar::Scalar;

/// Largest member the exhaustive oracle accepts.
pub const MAX_ORACLE_POINTS: usize = 14;

#[derive(Debug, Clone)]
pub struct OracleVerdict<S> {
    pub decomposable: bool,
    /// Present exactly when `decomposable`; the lexicographically smallest
    /// optimal level coloring.
    pub witness: Option<DecompositionCertificate<S>>,
    pub min_worst_diameter: S,
}

/// Decides whether `points` admits an `(r, n)`-decomposition with every part
/// of diameter at most `d`.
///
/// Only level colorings matter: within a level, splitting into the exact
/// `r`-components is forced and minimizes diameters. Colorings are searched
/// up to relabeling of levels (each level first used in order), which keeps
/// the lexicographically smallest optimum, with branch and bound on the
/// partial worst diameter.
pub fn exhaustive_decompose<S: Scalar>(
    space: &SpaceRef<S>,
    points: &PointSet,
    r: S,
    n: Level,
    d: S,
) -> Result<OracleVerdict<S>, DecompositionError> {
    if r <= S::zero() {
        return Err(DecompositionError::NonPositiveScale);
    }
    if points.len() > MAX_ORACLE_POINTS {
        return Err(DecompositionError::TooLarge {
            points: points.len(),
            max: MAX_ORACLE_POINTS,
        });
    }
    let member = Member::new(space.clone(), points.clone())
        .map_err(|e| DecompositionError::SourceMismatch(e.to_string()))?;
    let pts = points.as_slice();
    let k = pts.len();
    let dist: Vec<Vec<S>> = pts
        .iter()
        .map(|&p| pts.iter().map(|&q| space.dist(p, q)).collect())
        .collect();
    let labels = (n.saturating_add(1)).min(k as u64) as usize;

    let mut search = Search {
        dist: &dist,
        r,
        labels,
        coloring: vec![0; k],
        best: None,
    };
    let mut comps = vec![Vec::new(); labels];
    search.descend(0, 0, S::zero(), &mut comps);
    let (worst, coloring) = search.best.expect("at least one coloring exists");

    let decomposable = worst.le_tol(d);
    let witness = decomposable.then(|| {
        let mut levels = MemberLevels::new();
        for level in 0..labels {
            let chosen: Vec<usize> = (0..k).filter(|&i| coloring[i] == level).collect();
            for class in components(&dist, r, &chosen) {
                levels.push(level as Level, class.iter().map(|&i| pts[i]).collect());
            }
        }
        let family = MetricFamily::new(format!("{}/oracle", space.id()), vec![member]);
        DecompositionCertificate::new(family, r, n, vec![levels])
    });
    Ok(OracleVerdict {
        decomposable,
        witness,
        min_worst_diameter: worst,
    })
}

/// A component under construction: member bitmask and diameter.
type Comp<S> = (u32, S);

struct Search<'a, S> {
    dist: &'a [Vec<S>],
    r: S,
    labels: usize,
    coloring: Vec<usize>,
    best: Option<(S, Vec<usize>)>,
}

impl<S: Scalar> Search<'_, S> {
    fn descend(&mut self, i: usize, used: usize, worst: S, comps: &mut [Vec<Comp<S>>]) {
        if let Some((b, _)) = &self.best {
            // Later colorings are lexicographically larger, so ties lose.
            if worst >= *b {
                return;
            }
        }
        if i == self.coloring.len() {
            self.best = Some((worst, self.coloring.clone()));
            return;
        }
        let open = (used + 1).min(self.labels);
        for level in 0..open {
            self.coloring[i] = level;
            let saved = comps[level].clone();
            let grown = self.insert(&mut comps[level], i);
            self.descend(i + 1, used.max(level + 1), worst.max_s(grown), comps);
            comps[level] = saved;
        }
    }

    /// Adds point `i` to a level, merging every component within `r`, and
    /// returns the diameter of the merged component.
    fn insert(&self, level: &mut Vec<Comp<S>>, i: usize) -> S {
        let mut mask = 1u32 << i;
        let mut diam = S::zero();
        let mut kept = Vec::with_capacity(level.len());
        let mut merged: Vec<Comp<S>> = Vec::new();
        for &(m, dm) in level.iter() {
            if bits(m).any(|j| self.dist[i][j].le_tol(self.r)) {
                merged.push((m, dm));
            } else {
                kept.push((m, dm));
            }
        }
        for &(m, dm) in &merged {
            diam = diam.max_s(dm);
            for j in bits(m) {
                for l in bits(mask) {
                    diam = diam.max_s(self.dist[j][l]);
                }
            }
            mask |= m;
        }
        kept.push((mask, diam));
        *level = kept;
        diam
    }
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |b| mask & (1 << b) != 0)
}

/// `r`-components of `chosen` (indices into `dist`), ordered by first index.
fn components<S: Scalar>(dist: &[Vec<S>], r: S, chosen: &[usize]) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &i in chosen {
        let (near, far): (Vec<_>, Vec<_>) = classes
            .into_iter()
            .partition(|c| c.iter().any(|&j| dist[i][j].le_tol(r)));
        let mut merged: Vec<usize> = near.into_iter().flatten().collect();
        merged.push(i);
        merged.sort_unstable();
        classes = far;
        classes.push(merged);
    }
    classes.sort();
    classes
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
    fn separated_points_are_trivially_decomposable() {
        let l = line::<Exact>("Z", 8).into_ref();
        let pts = PointSet::new(vec![0, 3, 6]);
        let v = exhaustive_decompose(&l, &pts, q(2), 0, q(0)).unwrap();
        assert!(v.decomposable);
        assert_eq!(v.min_worst_diameter, q(0));
        assert!(verify_certificate(v.witness.as_ref().unwrap()).valid);
    }

    #[test]
    fn eight_points_on_two_levels() {
        let l = line::<Exact>("Z", 8).into_ref();
        let v = exhaustive_decompose(&l, &l.points(), q(1), 1, q(1)).unwrap();
        assert!(v.decomposable);
        // Alternating single points already works: each level is 1-separated.
        assert_eq!(v.min_worst_diameter, q(0));
        let w = v.witness.unwrap();
        assert!(verify_certificate(&w).valid);
        assert_eq!(w.members[0].level(0).len(), 4);

        // Alternating blocks of two, as a hand-built coloring, also pass.
        let mut blocks = MemberLevels::new();
        for b in 0..4 {
            blocks.push(b % 2, PointSet::range(2 * b as usize, 2 * b as usize + 1));
        }
        let cert = DecompositionCertificate::new(w.source.clone(), q(1), 1, vec![blocks]);
        assert!(verify_certificate(&cert).valid);
        assert_eq!(cert.mesh(), q(1));
    }

    #[test]
    fn single_level_is_connected() {
        let l = line::<Exact>("Z", 8).into_ref();
        let no = exhaustive_decompose(&l, &l.points(), q(2), 0, q(6)).unwrap();
        assert!(!no.decomposable);
        assert!(no.witness.is_none());
        assert_eq!(no.min_worst_diameter, q(7));
        let yes = exhaustive_decompose(&l, &l.points(), q(2), 0, q(7)).unwrap();
        assert!(yes.decomposable);
    }

    #[test]
    fn too_many_points() {
        let l = line::<Exact>("Z", 20).into_ref();
        assert!(matches!(
            exhaustive_decompose(&l, &l.points(), q(1), 1, q(1)),
            Err(DecompositionError::TooLarge { points: 20, .. })
        ));
    }
}
