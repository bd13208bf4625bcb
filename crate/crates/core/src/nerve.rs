//! Uniform simplicial complexes with the global `l1` metric on barycentric
//! coordinates, nerves of covers, the distance-ratio partition of unity,
//! Lipschitz measurement and star covers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::Rng;

use crate::covers::Cover;
use crate::metric::SpaceRef;
use crate::point_set::{PointId, PointSet};
use crate::scalar::{from_usize, two, Extent, Scalar};

pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NerveError {
    #[error("coordinates must be nonnegative and sum to 1 (sum is {0})")]
    NotBarycentric(String),
    #[error("support {0:?} is not a simplex of the complex")]
    NotASimplex(Vec<VertexId>),
    #[error("multiplicity {measured} exceeds n+1 = {allowed}")]
    Multiplicity { measured: usize, allowed: usize },
    #[error("Lebesgue number {measured} is below the required {required}")]
    Lebesgue { measured: String, required: String },
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("Lipschitz constant {measured} exceeds {allowed}")]
    LipschitzTooLarge { measured: String, allowed: String },
    #[error("star cover check failed: {0}")]
    StarCover(String),
}

/// A finite simplicial complex stored by its facets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformComplex {
    vertices: Vec<VertexId>,
    facets: Vec<Vec<VertexId>>,
}

impl UniformComplex {
    /// Complex spanned by `simplices`, keeping only the maximal ones.
    pub fn new(simplices: impl IntoIterator<Item = Vec<VertexId>>) -> Self {
        let mut all: BTreeSet<Vec<VertexId>> = BTreeSet::new();
        for mut s in simplices {
            s.sort_unstable();
            s.dedup();
            if !s.is_empty() {
                all.insert(s);
            }
        }
        let mut by_size: Vec<Vec<VertexId>> = all.into_iter().collect();
        by_size.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let mut facets: Vec<Vec<VertexId>> = Vec::new();
        for s in by_size {
            if !facets.iter().any(|f| is_sub(&s, f)) {
                facets.push(s);
            }
        }
        facets.sort();
        let vertices: BTreeSet<VertexId> = facets.iter().flatten().copied().collect();
        UniformComplex {
            vertices: vertices.into_iter().collect(),
            facets,
        }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Vec<VertexId>] {
        &self.facets
    }

    /// `max facet size - 1`; zero for the empty complex.
    pub fn dim(&self) -> usize {
        self.facets.iter().map(Vec::len).max().unwrap_or(1) - 1
    }

    pub fn contains_simplex(&self, simplex: &[VertexId]) -> bool {
        let mut s = simplex.to_vec();
        s.sort_unstable();
        s.dedup();
        self.facets.iter().any(|f| is_sub(&s, f))
    }

    /// Every nonempty face of every facet, without repeats.
    pub fn simplices(&self) -> Vec<Vec<VertexId>> {
        let mut out = BTreeSet::new();
        for f in &self.facets {
            for mask in 1u64..(1u64 << f.len()) {
                out.insert(
                    (0..f.len())
                        .filter(|b| mask & (1 << b) != 0)
                        .map(|b| f[b])
                        .collect::<Vec<_>>(),
                );
            }
        }
        out.into_iter().collect()
    }

    /// Edges of the 1-skeleton as a dot graph.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph nerve {\n");
        for v in &self.vertices {
            let _ = writeln!(out, "  {v};");
        }
        let mut edges = BTreeSet::new();
        for f in &self.facets {
            for (i, &a) in f.iter().enumerate() {
                for &b in &f[i + 1..] {
                    edges.insert((a, b));
                }
            }
        }
        for (a, b) in edges {
            let _ = writeln!(out, "  {a} -- {b};");
        }
        out.push_str("}\n");
        out
    }
}

fn is_sub(a: &[VertexId], b: &[VertexId]) -> bool {
    a.iter().all(|v| b.binary_search(v).is_ok())
}

/// A point of a complex in sparse barycentric coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoint<S> {
    coords: BTreeMap<VertexId, S>,
}

impl<S: Scalar> ComplexPoint<S> {
    /// Validates nonnegativity and unit sum; zero coordinates are dropped.
    pub fn new(coords: BTreeMap<VertexId, S>) -> Result<Self, NerveError> {
        let sum = coords.values().fold(S::zero(), |a, &b| a + b);
        if coords.values().any(|v| *v < S::zero()) || !sum.eq_tol(S::one()) {
            return Err(NerveError::NotBarycentric(sum.to_string()));
        }
        Ok(ComplexPoint {
            coords: coords.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        })
    }

    pub fn vertex(v: VertexId) -> Self {
        ComplexPoint {
            coords: [(v, S::one())].into_iter().collect(),
        }
    }

    pub fn barycenter(simplex: &[VertexId]) -> Self {
        let w = S::one() / from_usize::<S>(simplex.len());
        ComplexPoint {
            coords: simplex.iter().map(|&v| (v, w)).collect(),
        }
    }

    pub fn coord(&self, v: VertexId) -> S {
        self.coords.get(&v).copied().unwrap_or_else(S::zero)
    }

    pub fn coords(&self) -> &BTreeMap<VertexId, S> {
        &self.coords
    }

    pub fn support(&self) -> Vec<VertexId> {
        self.coords.keys().copied().collect()
    }

    pub fn max_coordinate(&self) -> S {
        self.coords.values().copied().fold(S::zero(), S::max_s)
    }
}

/// `sum_v |a_v - b_v|` over the union of supports.
pub fn l1_distance<S: Scalar>(a: &ComplexPoint<S>, b: &ComplexPoint<S>) -> S {
    let keys: BTreeSet<VertexId> = a.coords.keys().chain(b.coords.keys()).copied().collect();
    keys.into_iter()
        .map(|v| (a.coord(v) - b.coord(v)).abs())
        .fold(S::zero(), |x, y| x + y)
}

/// A map from points of a space into a complex.
#[derive(Debug, Clone)]
pub struct ComplexMap<S> {
    pub space: SpaceRef<S>,
    pub complex: UniformComplex,
    pub values: BTreeMap<PointId, ComplexPoint<S>>,
}

impl<S: Scalar> ComplexMap<S> {
    pub fn new(
        space: SpaceRef<S>,
        complex: UniformComplex,
        values: BTreeMap<PointId, ComplexPoint<S>>,
    ) -> Result<Self, NerveError> {
        for p in values.values() {
            let support = p.support();
            if !complex.contains_simplex(&support) {
                return Err(NerveError::NotASimplex(support));
            }
        }
        Ok(ComplexMap {
            space,
            complex,
            values,
        })
    }

    pub fn domain(&self) -> PointSet {
        self.values.keys().copied().collect()
    }

    pub fn get(&self, p: PointId) -> Option<&ComplexPoint<S>> {
        self.values.get(&p)
    }
}

/// Nerve: one vertex per cover element, a simplex for every set of elements
/// with a common point.
pub fn nerve_of_cover<S: Scalar>(cover: &Cover<S>) -> UniformComplex {
    UniformComplex::new(cover.domain().iter().map(|x| cover.containing(x)))
}

/// `(2n+2)(2n+3)/epsilon`, the Lebesgue number the partition of unity needs.
pub fn required_lebesgue<S: Scalar>(n: usize, epsilon: S) -> S {
    from_usize::<S>(2 * n + 2) * from_usize::<S>(2 * n + 3) / epsilon
}

/// `phi_U(x) = d(x, U^c) / sum_V d(x, V^c)` into the nerve. When some element
/// is the whole domain, every such element gets equal weight everywhere.
pub fn partition_of_unity_map<S: Scalar>(
    cover: &Cover<S>,
    epsilon: S,
    n: usize,
) -> Result<ComplexMap<S>, NerveError> {
    if epsilon <= S::zero() {
        return Err(NerveError::NonPositiveEpsilon);
    }
    let measured = cover.multiplicity();
    if measured > n + 1 {
        return Err(NerveError::Multiplicity {
            measured,
            allowed: n + 1,
        });
    }
    let required = required_lebesgue(n, epsilon);
    let lebesgue = cover.lebesgue_number();
    if !lebesgue.at_least(required) {
        return Err(NerveError::Lebesgue {
            measured: lebesgue.finite().map(|v| v.to_string()).unwrap_or_default(),
            required: required.to_string(),
        });
    }
    Ok(distance_ratio_map(cover))
}

/// The distance-ratio map without the precondition checks.
pub fn distance_ratio_map<S: Scalar>(cover: &Cover<S>) -> ComplexMap<S> {
    let space = cover.space();
    let domain = cover.domain();
    let full: Vec<VertexId> = (0..cover.len())
        .filter(|&i| cover.elements()[i].len() == domain.len())
        .collect();
    let complements: Vec<PointSet> = cover
        .elements()
        .iter()
        .map(|e| domain.difference(e))
        .collect();
    let mut values = BTreeMap::new();
    for x in domain.iter() {
        let point = if full.is_empty() {
            let raw: Vec<(VertexId, S)> = complements
                .iter()
                .enumerate()
                .filter_map(|(i, c)| {
                    let d = space.set_distance(x, c).unwrap_or_else(S::zero);
                    (d > S::zero()).then_some((i, d))
                })
                .collect();
            let total = raw.iter().fold(S::zero(), |a, (_, d)| a + *d);
            ComplexPoint {
                coords: raw.into_iter().map(|(i, d)| (i, d / total)).collect(),
            }
        } else {
            ComplexPoint::barycenter(&full)
        };
        values.insert(x, point);
    }
    ComplexMap {
        space: space.clone(),
        complex: nerve_of_cover(cover),
        values,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzReport<S> {
    /// `max d1(phi x, phi y) / d(x, y)` over distinct pairs; zero for a
    /// single point.
    pub constant: S,
    pub worst: Option<(PointId, PointId)>,
}

/// Exhaustive Lipschitz constant of a complex map.
pub fn lipschitz_constant<S: Scalar>(map: &ComplexMap<S>) -> LipschitzReport<S> {
    let pts: Vec<(PointId, &ComplexPoint<S>)> = map.values.iter().map(|(p, v)| (*p, v)).collect();
    let mut best = S::zero();
    let mut worst = None;
    for (i, &(x, fx)) in pts.iter().enumerate() {
        for &(y, fy) in &pts[i + 1..] {
            let ratio = l1_distance(fx, fy) / map.space.dist(x, y);
            if ratio > best {
                best = ratio;
                worst = Some((x, y));
            }
        }
    }
    LipschitzReport {
        constant: best,
        worst,
    }
}

/// Open star cover of a complex, checked on sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct StarCoverReport<S> {
    /// Facet indices making up each vertex's star.
    pub stars: BTreeMap<VertexId, Vec<usize>>,
    /// `1/(n+1)`, or unbounded for a single vertex.
    pub bound: Extent<S>,
    pub tested: usize,
    /// Smallest max-coordinate over tested points.
    pub min_max_coordinate: S,
    /// Smallest exact local Lebesgue value `2 max_v x_v` over tested points.
    pub min_local_lebesgue: Extent<S>,
    pub passed: bool,
}

/// Star cover of `complex` for dimension bound `n`. Tests all simplex
/// barycenters plus `extra` points: each must have a coordinate at least
/// `1/(n+1)`, so its star contains the `l1`-ball of radius `1/(n+1)`.
pub fn star_cover<S: Scalar>(
    complex: &UniformComplex,
    n: usize,
    extra: &[ComplexPoint<S>],
) -> Result<StarCoverReport<S>, NerveError> {
    if complex.dim() > n {
        return Err(NerveError::StarCover(format!(
            "complex has dimension {} > {n}",
            complex.dim()
        )));
    }
    let mut stars: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
    for (i, f) in complex.facets().iter().enumerate() {
        for &v in f {
            stars.entry(v).or_default().push(i);
        }
    }
    let single = complex.vertices().len() == 1;
    let threshold = S::one() / from_usize::<S>(n + 1);
    let mut tested = 0;
    let mut min_max = S::one();
    let mut min_local = Extent::Unbounded;
    let mut passed = true;
    let barycenters = complex
        .simplices()
        .into_iter()
        .map(|s| ComplexPoint::barycenter(&s));
    for p in barycenters.chain(extra.iter().cloned()) {
        if !complex.contains_simplex(&p.support()) {
            return Err(NerveError::NotASimplex(p.support()));
        }
        tested += 1;
        let m = p.max_coordinate();
        min_max = min_max.min_s(m);
        if !single {
            min_local = min_local.min(Extent::Finite(two::<S>() * m));
        }
        passed &= m.ge_tol(threshold);
    }
    Ok(StarCoverReport {
        stars,
        bound: if single {
            Extent::Unbounded
        } else {
            Extent::Finite(threshold)
        },
        tested,
        min_max_coordinate: min_max,
        min_local_lebesgue: min_local,
        passed,
    })
}

/// Uniform random points on random faces, with integer weights normalized
/// so exact scalars stay exact.
pub fn random_complex_points<S: Scalar, R: Rng>(
    complex: &UniformComplex,
    count: usize,
    rng: &mut R,
) -> Vec<ComplexPoint<S>> {
    let facets = complex.facets();
    if facets.is_empty() {
        return Vec::new();
    }
    (0..count)
        .map(|_| {
            let f = &facets[rng.random_range(0..facets.len())];
            let weights: Vec<i64> = f.iter().map(|_| rng.random_range(0..=1000)).collect();
            let weights = if weights.iter().all(|w| *w == 0) {
                vec![1; f.len()]
            } else {
                weights
            };
            let total = S::from_int(weights.iter().sum());
            ComplexPoint {
                coords: f
                    .iter()
                    .zip(&weights)
                    .filter(|(_, w)| **w > 0)
                    .map(|(&v, &w)| (v, S::from_int(w) / total))
                    .collect(),
            }
        })
        .collect()
}

/// Preimages of open vertex stars, `{x : phi(x)_v > 0}`. Requires the map
/// to be `1/((n+1) r)`-Lipschitz with `n` the complex dimension; the result
/// then has multiplicity at most `n+1` and Lebesgue number above `r`, both
/// of which are measured and enforced.
pub fn pullback_star_cover<S: Scalar>(map: &ComplexMap<S>, r: S) -> Result<Cover<S>, NerveError> {
    let n = map.complex.dim();
    let allowed = S::one() / (from_usize::<S>(n + 1) * r);
    let lip = lipschitz_constant(map).constant;
    if lip.gt_tol(allowed) {
        return Err(NerveError::LipschitzTooLarge {
            measured: lip.to_string(),
            allowed: allowed.to_string(),
        });
    }
    let elements: Vec<PointSet> = map
        .complex
        .vertices()
        .iter()
        .map(|&v| {
            map.values
                .iter()
                .filter(|(_, p)| p.coord(v) > S::zero())
                .map(|(x, _)| *x)
                .collect::<PointSet>()
        })
        .filter(|e| !e.is_empty())
        .collect();
    let cover = Cover::on(map.space.clone(), map.domain(), elements)
        .map_err(|e| NerveError::StarCover(e.to_string()))?;
    if cover.multiplicity() > n + 1 {
        return Err(NerveError::StarCover(format!(
            "multiplicity {} exceeds {}",
            cover.multiplicity(),
            n + 1
        )));
    }
    let lebesgue = cover.lebesgue_number();
    if !lebesgue.exceeds(r) {
        return Err(NerveError::StarCover(format!(
            "Lebesgue number {:?} is not above {r}",
            lebesgue.finite()
        )));
    }
    Ok(cover)
}
