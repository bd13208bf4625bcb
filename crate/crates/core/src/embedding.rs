//! Finite-dimensional feature maps: the unit-norm / small-variation /
//! decay checks, and gluing per-part maps with square-root weights of a
//! partition of unity.

use std::collections::BTreeMap;

use crate::covers::neighborhood;
use crate::metric::SpaceRef;
use crate::point_set::{PointId, PointSet};
use crate::scalar::{Scalar, F64_TOLERANCE};

/// Euclidean feature vectors on a set of points.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub dim: usize,
    pub vectors: BTreeMap<PointId, Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmbeddingError {
    #[error("vector of point {point} has length {len}, expected {dim}")]
    DimensionMismatch { point: PointId, len: usize, dim: usize },
    #[error("weight axiom ({which}) fails at point {point}")]
    WeightAxiomViolated { which: WeightAxiom, point: PointId },
    #[error("part {part} violates condition ({which})")]
    PartConditionViolated { part: usize, which: PartCondition },
    #[error("expected one weight per part: {parts} parts, {found} weights at point {point}")]
    WeightCount {
        point: PointId,
        parts: usize,
        found: usize,
    },
    #[error("R and epsilon must be positive")]
    NonPositiveParameter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightAxiom {
    /// Weights sum to one.
    Sum,
    /// Weights vanish off their part.
    Support,
    /// Small total variation on `R`-close pairs.
    Variation,
}

impl std::fmt::Display for WeightAxiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WeightAxiom::Sum => "a",
            WeightAxiom::Support => "b",
            WeightAxiom::Variation => "c",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartCondition {
    /// The map is defined on the whole enlarged part.
    Domain,
    UnitNorm,
    Variation,
}

impl std::fmt::Display for PartCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PartCondition::Domain => "domain",
            PartCondition::UnitNorm => "i",
            PartCondition::Variation => "ii",
        })
    }
}

impl FeatureMap {
    pub fn new(dim: usize, vectors: BTreeMap<PointId, Vec<f64>>) -> Result<Self, EmbeddingError> {
        if let Some((&point, v)) = vectors.iter().find(|(_, v)| v.len() != dim) {
            return Err(EmbeddingError::DimensionMismatch {
                point,
                len: v.len(),
                dim,
            });
        }
        Ok(FeatureMap { dim, vectors })
    }

    /// The same unit vector `e_axis` at every point of `domain`.
    pub fn constant(domain: &PointSet, dim: usize, axis: usize) -> Self {
        let mut e = vec![0.0; dim];
        e[axis] = 1.0;
        FeatureMap {
            dim,
            vectors: domain.iter().map(|p| (p, e.clone())).collect(),
        }
    }

    /// Point `i` of `domain` goes to the `i`-th standard basis vector.
    pub fn orthonormal(domain: &PointSet) -> Self {
        let dim = domain.len();
        FeatureMap {
            dim,
            vectors: domain
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let mut e = vec![0.0; dim];
                    e[i] = 1.0;
                    (p, e)
                })
                .collect(),
        }
    }

    pub fn domain(&self) -> PointSet {
        self.vectors.keys().copied().collect()
    }

    /// The vector at `p`, or zero off the domain.
    pub fn at(&self, p: PointId) -> Vec<f64> {
        self.vectors
            .get(&p)
            .cloned()
            .unwrap_or_else(|| vec![0.0; self.dim])
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    /// Every vector has norm 1 within tolerance.
    pub unit_norm: bool,
    pub worst_norm_error: f64,
    /// `||xi(x) - xi(y)|| <= epsilon` whenever `d(x,y) <= R`.
    pub small_variation: bool,
    pub worst_variation: Option<(PointId, PointId, f64)>,
    /// For each `S`, the largest `|<xi(x), xi(y)>|` over pairs at distance
    /// at least `S`; zero when there are none.
    pub decay_profile: Vec<(f64, f64)>,
}

/// Checks unit norms and small variation at scale `r_close` on all pairs,
/// and reports the inner-product decay profile on `s_grid`.
pub fn check_dg_criterion<S: Scalar>(
    space: &SpaceRef<S>,
    map: &FeatureMap,
    r_close: S,
    epsilon: f64,
    s_grid: &[f64],
) -> CriterionReport {
    let worst_norm_error = map
        .vectors
        .values()
        .map(|v| (norm(v) - 1.0).abs())
        .fold(0.0, f64::max);
    let pts: Vec<(PointId, &Vec<f64>)> = map.vectors.iter().map(|(p, v)| (*p, v)).collect();
    let mut worst_variation: Option<(PointId, PointId, f64)> = None;
    let mut profile = vec![0.0f64; s_grid.len()];
    for (i, &(x, vx)) in pts.iter().enumerate() {
        for &(y, vy) in &pts[i + 1..] {
            let d = space.dist(x, y);
            if d.le_tol(r_close) {
                let var = distance(vx, vy);
                if worst_variation.is_none_or(|w| var > w.2) {
                    worst_variation = Some((x, y, var));
                }
            }
            let df = d.to_f64().unwrap_or(f64::INFINITY);
            let ip = inner(vx, vy).abs();
            for (slot, &s) in profile.iter_mut().zip(s_grid) {
                if df >= s - F64_TOLERANCE {
                    *slot = slot.max(ip);
                }
            }
        }
    }
    CriterionReport {
        unit_norm: worst_norm_error <= F64_TOLERANCE,
        worst_norm_error,
        small_variation: worst_variation.is_none_or(|w| w.2 <= epsilon + F64_TOLERANCE),
        worst_variation,
        decay_profile: s_grid.iter().copied().zip(profile).collect(),
    }
}

/// Partition-of-unity weights: `weights[x][j]` is the weight of part `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionWeights {
    pub parts: Vec<PointSet>,
    pub weights: BTreeMap<PointId, Vec<f64>>,
}

impl PartitionWeights {
    /// `phi_j(x) = d(x, U_j^c) / sum_k d(x, U_k^c)` within `domain`, or the
    /// uniform weight on parts equal to the whole domain.
    pub fn distance_ratio<S: Scalar>(
        space: &SpaceRef<S>,
        domain: &PointSet,
        parts: Vec<PointSet>,
    ) -> Self {
        let full: Vec<usize> = (0..parts.len())
            .filter(|&j| domain.is_subset(&parts[j]))
            .collect();
        let complements: Vec<PointSet> = parts.iter().map(|u| domain.difference(u)).collect();
        let weights = domain
            .iter()
            .map(|x| {
                let raw: Vec<f64> = if full.is_empty() {
                    complements
                        .iter()
                        .map(|c| {
                            space
                                .set_distance(x, c)
                                .and_then(|d| d.to_f64())
                                .unwrap_or(0.0)
                        })
                        .collect()
                } else {
                    (0..parts.len())
                        .map(|j| if full.contains(&j) { 1.0 } else { 0.0 })
                        .collect()
                };
                let total: f64 = raw.iter().sum();
                (x, raw.into_iter().map(|w| w / total).collect())
            })
            .collect();
        PartitionWeights { parts, weights }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlueReport {
    pub eta: FeatureMap,
    /// Offset of each part's block inside `eta`.
    pub blocks: Vec<usize>,
    pub max_norm_error: f64,
    pub worst_variation: Option<(PointId, PointId, f64)>,
    pub variation_ok: bool,
    pub decay_profile: Vec<(f64, f64)>,
}

/// Glues per-part maps into `eta(x) = (sqrt(phi_j(x)) xi_j(x))_j`.
///
/// Checks that the weights sum to one, vanish off their parts and vary by
/// at most `epsilon^2/4` on `R`-close pairs, and that each `xi_j` is unit
/// norm with variation at most `epsilon/2` on the closed `R`-neighborhood
/// of its part (it is taken as zero outside it).
pub fn glue_embeddings<S: Scalar>(
    space: &SpaceRef<S>,
    domain: &PointSet,
    weights: &PartitionWeights,
    xis: &[FeatureMap],
    r_close: S,
    epsilon: f64,
    s_grid: &[f64],
) -> Result<GlueReport, EmbeddingError> {
    if r_close <= S::zero() || epsilon <= 0.0 {
        return Err(EmbeddingError::NonPositiveParameter);
    }
    let parts = &weights.parts;
    if xis.len() != parts.len() {
        return Err(EmbeddingError::WeightCount {
            point: domain.first().unwrap_or(0),
            parts: parts.len(),
            found: xis.len(),
        });
    }
    let phi = |x: PointId| -> Result<&Vec<f64>, EmbeddingError> {
        let w = weights.weights.get(&x).ok_or(EmbeddingError::WeightAxiomViolated {
            which: WeightAxiom::Sum,
            point: x,
        })?;
        if w.len() != parts.len() {
            return Err(EmbeddingError::WeightCount {
                point: x,
                parts: parts.len(),
                found: w.len(),
            });
        }
        Ok(w)
    };
    for x in domain.iter() {
        let w = phi(x)?;
        if (w.iter().sum::<f64>() - 1.0).abs() > F64_TOLERANCE || w.iter().any(|v| *v < 0.0) {
            return Err(EmbeddingError::WeightAxiomViolated {
                which: WeightAxiom::Sum,
                point: x,
            });
        }
        if (0..parts.len()).any(|j| w[j] > 0.0 && !parts[j].contains(x)) {
            return Err(EmbeddingError::WeightAxiomViolated {
                which: WeightAxiom::Support,
                point: x,
            });
        }
    }
    let pts = domain.as_slice();
    let variation_cap = epsilon * epsilon / 4.0;
    for (i, &x) in pts.iter().enumerate() {
        for &y in &pts[i + 1..] {
            if space.dist(x, y).le_tol(r_close) {
                let (wx, wy) = (phi(x)?, phi(y)?);
                let total: f64 = wx.iter().zip(wy).map(|(a, b)| (a - b).abs()).sum();
                if total > variation_cap + F64_TOLERANCE {
                    return Err(EmbeddingError::WeightAxiomViolated {
                        which: WeightAxiom::Variation,
                        point: x,
                    });
                }
            }
        }
    }
    for (j, (part, xi)) in parts.iter().zip(xis).enumerate() {
        let enlarged = neighborhood(space, domain, part, r_close);
        let fail = |which| EmbeddingError::PartConditionViolated { part: j, which };
        if !enlarged.iter().all(|p| xi.vectors.contains_key(&p)) {
            return Err(fail(PartCondition::Domain));
        }
        let restricted = FeatureMap {
            dim: xi.dim,
            vectors: enlarged.iter().map(|p| (p, xi.at(p))).collect(),
        };
        let rep = check_dg_criterion(space, &restricted, r_close, epsilon / 2.0, &[]);
        if !rep.unit_norm {
            return Err(fail(PartCondition::UnitNorm));
        }
        if !rep.small_variation {
            return Err(fail(PartCondition::Variation));
        }
    }

    let mut blocks = Vec::with_capacity(xis.len());
    let mut dim = 0;
    for xi in xis {
        blocks.push(dim);
        dim += xi.dim;
    }
    let mut vectors = BTreeMap::new();
    for x in domain.iter() {
        let w = phi(x)?;
        let mut v = Vec::with_capacity(dim);
        for (j, xi) in xis.iter().enumerate() {
            let s = w[j].sqrt();
            v.extend(xi.at(x).into_iter().map(|c| s * c));
        }
        vectors.insert(x, v);
    }
    let eta = FeatureMap { dim, vectors };
    let rep = check_dg_criterion(space, &eta, r_close, epsilon, s_grid);
    Ok(GlueReport {
        eta,
        blocks,
        max_norm_error: rep.worst_norm_error,
        variation_ok: rep.small_variation,
        worst_variation: rep.worst_variation,
        decay_profile: rep.decay_profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::line;
    use crate::Exact;

    fn q(v: i64) -> Exact {
        Exact::from_integer(v)
    }

    #[test]
    fn constant_map_never_decays() {
        let l = line::<Exact>("Z", 10).into_ref();
        let map = FeatureMap::constant(&l.points(), 2, 0);
        let rep = check_dg_criterion(&l, &map, q(1), 0.1, &[1.0, 5.0, 9.0]);
        assert!(rep.unit_norm && rep.small_variation);
        assert!(rep.decay_profile.iter().all(|(_, v)| *v == 1.0));
    }

    #[test]
    fn orthonormal_map_decays_but_varies() {
        let l = line::<Exact>("Z", 6).into_ref();
        let map = FeatureMap::orthonormal(&l.points());
        let rep = check_dg_criterion(&l, &map, q(1), 1.0, &[0.5, 1.0, 3.0]);
        assert!(rep.unit_norm);
        assert!(!rep.small_variation);
        assert!((rep.worst_variation.unwrap().2 - 2f64.sqrt()).abs() < 1e-12);
        assert!(rep.decay_profile.iter().all(|(_, v)| *v == 0.0));
    }

    #[test]
    fn single_part_glue_is_identity() {
        let l = line::<Exact>("Z", 8).into_ref();
        let all = l.points();
        let weights = PartitionWeights::distance_ratio(&l, &all, vec![all.clone()]);
        let xi = FeatureMap::constant(&all, 3, 1);
        let rep = glue_embeddings(&l, &all, &weights, std::slice::from_ref(&xi), q(1), 1.0, &[]).unwrap();
        assert_eq!(rep.eta, xi);
    }

    #[test]
    fn two_intervals() {
        let l = line::<Exact>("Z", 30).into_ref();
        let all = l.points();
        let parts = vec![PointSet::range(0, 19), PointSet::range(10, 29)];
        let weights = PartitionWeights::distance_ratio(&l, &all, parts.clone());
        assert!((weights.weights[&15][0] - 5.0 / 11.0).abs() < 1e-15);
        let xis = vec![
            FeatureMap::constant(&PointSet::range(0, 20), 2, 0),
            FeatureMap::constant(&PointSet::range(9, 29), 2, 1),
        ];
        let rep = glue_embeddings(&l, &all, &weights, &xis, q(1), 1.0, &[1.0, 10.0, 25.0]).unwrap();
        assert!(rep.max_norm_error < 1e-9);
        assert!(rep.variation_ok);
        let profile: Vec<f64> = rep.decay_profile.iter().map(|p| p.1).collect();
        assert!(profile.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn weight_axioms_are_checked() {
        let l = line::<Exact>("Z", 4).into_ref();
        let all = l.points();
        let parts = vec![PointSet::range(0, 1), PointSet::range(2, 3)];
        let mut weights = PartitionWeights::distance_ratio(&l, &all, parts);
        weights.weights.insert(0, vec![0.5, 0.5]);
        let xis = vec![FeatureMap::constant(&all, 1, 0), FeatureMap::constant(&all, 1, 0)];
        assert!(matches!(
            glue_embeddings(&l, &all, &weights, &xis, q(1), 1.0, &[]),
            Err(EmbeddingError::WeightAxiomViolated {
                which: WeightAxiom::Support,
                point: 0
            })
        ));
    }
}
