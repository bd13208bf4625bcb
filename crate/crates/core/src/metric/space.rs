use std::sync::Arc;

use crate::point_set::{PointId, PointSet};
use crate::scalar::Scalar;

/// Shared handle to a space; families and certificates cite points of the
/// parent space instead of copying metrics.
pub type SpaceRef<S> = Arc<FiniteMetricSpace<S>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

/// Where a space's distances come from.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceSource<S> {
    Matrix(Vec<Vec<S>>),
    Points {
        coords: Vec<Vec<S>>,
        norm: Norm,
    },
    /// `sum_i w_i |x_i - y_i|`; default weights are `w_i = i` (1-based).
    WeightedL1 {
        coords: Vec<Vec<S>>,
        weights: Option<Vec<S>>,
    },
    /// Undirected weighted graph with the shortest-path metric.
    Graph {
        vertices: usize,
        edges: Vec<(PointId, PointId, S)>,
    },
    /// Integer grid `{0..d_1-1} x ... x {0..d_k-1}`, first coordinate slowest.
    Grid {
        dims: Vec<usize>,
        norm: Norm,
    },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("a metric space needs at least one point")]
    Empty,
    #[error("distance matrix row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("d({p},{p}) = {value} is not zero")]
    NonzeroDiagonal { p: PointId, value: String },
    #[error("d({p},{q}) is negative")]
    Negative { p: PointId, q: PointId },
    #[error("d({p},{q}) differs from d({q},{p})")]
    Asymmetric { p: PointId, q: PointId },
    #[error("distinct points {p} and {q} are at distance zero")]
    ZeroDistance { p: PointId, q: PointId },
    #[error("triangle inequality fails: d({p},{q}) > d({p},{s}) + d({s},{q})")]
    MetricViolation { p: PointId, q: PointId, s: PointId },
    #[error("graph is disconnected: no path from {from} to {to}")]
    DisconnectedGraph { from: PointId, to: PointId },
    #[error("edge ({a},{b}) is invalid: {reason}")]
    InvalidEdge {
        a: PointId,
        b: PointId,
        reason: &'static str,
    },
    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("weight {index} is not positive")]
    NonPositiveWeight { index: usize },
    #[error("distance d({p},{q}) is irrational and cannot be held exactly")]
    InexactDistance { p: PointId, q: PointId },
    #[error("point {point} out of range for a space of {len} points")]
    PointOutOfRange { point: PointId, len: usize },
    #[error("subset is empty")]
    EmptySubset,
}

/// A finite metric space with a dense, fully materialized distance table.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace<S> {
    id: String,
    label: Option<String>,
    len: usize,
    dist: Vec<S>,
    coords: Option<Vec<Vec<S>>>,
    source: Option<SpaceSource<S>>,
}

impl<S: Scalar> FiniteMetricSpace<S> {
    /// Builds a space from a distance matrix, verifying every metric axiom.
    pub fn from_matrix(id: impl Into<String>, rows: &[Vec<S>]) -> Result<Self, MetricError> {
        let n = rows.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare {
                    row,
                    len: r.len(),
                    expected: n,
                });
            }
        }
        for p in 0..n {
            if !rows[p][p].is_zero() {
                return Err(MetricError::NonzeroDiagonal {
                    p,
                    value: rows[p][p].to_string(),
                });
            }
            for q in 0..n {
                if rows[p][q] < S::zero() {
                    return Err(MetricError::Negative { p, q });
                }
                if !rows[p][q].eq_tol(rows[q][p]) {
                    return Err(MetricError::Asymmetric { p, q });
                }
                if p != q && !rows[p][q].gt_tol(S::zero()) {
                    return Err(MetricError::ZeroDistance { p, q });
                }
            }
        }
        for p in 0..n {
            for q in p + 1..n {
                for s in 0..n {
                    if s == p || s == q {
                        continue;
                    }
                    if rows[p][q].gt_tol(rows[p][s] + rows[s][q]) {
                        return Err(MetricError::MetricViolation { p, q, s });
                    }
                }
            }
        }
        let dist = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Ok(FiniteMetricSpace {
            id: id.into(),
            label: None,
            len: n,
            dist,
            coords: None,
            source: None,
        })
    }

    /// Builds a space from any supported source.
    pub fn build(id: impl Into<String>, source: &SpaceSource<S>) -> Result<Self, MetricError> {
        let id = id.into();
        let space = match source {
            SpaceSource::Matrix(rows) => Self::from_matrix(id, rows),
            SpaceSource::Points { coords, norm } => {
                let dim = check_dims(coords)?;
                let weights = vec![S::one(); dim];
                Self::from_coords(id, coords, &weights, *norm)
            }
            SpaceSource::WeightedL1 { coords, weights } => {
                let dim = check_dims(coords)?;
                let weights = match weights {
                    Some(w) => {
                        if w.len() != dim {
                            return Err(MetricError::DimensionMismatch {
                                index: 0,
                                found: w.len(),
                                expected: dim,
                            });
                        }
                        w.clone()
                    }
                    None => (1..=dim as i64).map(S::from_int).collect(),
                };
                if let Some(index) = weights.iter().position(|w| *w <= S::zero()) {
                    return Err(MetricError::NonPositiveWeight { index });
                }
                Self::from_coords(id, coords, &weights, Norm::L1)
            }
            SpaceSource::Graph { vertices, edges } => Self::from_graph(id, *vertices, edges),
            SpaceSource::Grid { dims, norm } => {
                let coords = grid_coords::<S>(dims);
                check_dims(&coords)?;
                let weights = vec![S::one(); dims.len()];
                Self::from_coords(id, &coords, &weights, *norm)
            }
        }?;
        Ok(FiniteMetricSpace {
            source: Some(source.clone()),
            ..space
        })
    }

    /// The description this space was built from, if any. Spaces built
    /// directly from a matrix have none.
    pub fn source(&self) -> Option<&SpaceSource<S>> {
        self.source.as_ref()
    }

    fn from_coords(
        id: String,
        coords: &[Vec<S>],
        weights: &[S],
        norm: Norm,
    ) -> Result<Self, MetricError> {
        let n = coords.len();
        let mut dist = vec![S::zero(); n * n];
        for p in 0..n {
            for q in p + 1..n {
                let d = norm_distance(&coords[p], &coords[q], weights, norm)
                    .ok_or(MetricError::InexactDistance { p, q })?;
                if !d.gt_tol(S::zero()) {
                    return Err(MetricError::ZeroDistance { p, q });
                }
                dist[p * n + q] = d;
                dist[q * n + p] = d;
            }
        }
        Ok(FiniteMetricSpace {
            id,
            label: None,
            len: n,
            dist,
            coords: Some(coords.to_vec()),
            source: None,
        })
    }

    /// All-pairs shortest paths (Floyd-Warshall) over an undirected graph.
    fn from_graph(
        id: String,
        n: usize,
        edges: &[(PointId, PointId, S)],
    ) -> Result<Self, MetricError> {
        if n == 0 {
            return Err(MetricError::Empty);
        }
        let mut table: Vec<Option<S>> = vec![None; n * n];
        for p in 0..n {
            table[p * n + p] = Some(S::zero());
        }
        for &(a, b, w) in edges {
            if a >= n || b >= n {
                return Err(MetricError::InvalidEdge {
                    a,
                    b,
                    reason: "endpoint out of range",
                });
            }
            if a == b {
                return Err(MetricError::InvalidEdge {
                    a,
                    b,
                    reason: "self loop",
                });
            }
            if !w.gt_tol(S::zero()) {
                return Err(MetricError::InvalidEdge {
                    a,
                    b,
                    reason: "weight must be positive",
                });
            }
            for (i, j) in [(a, b), (b, a)] {
                let slot = &mut table[i * n + j];
                *slot = Some(slot.map_or(w, |old| old.min_s(w)));
            }
        }
        for k in 0..n {
            for i in 0..n {
                let Some(ik) = table[i * n + k] else { continue };
                for j in 0..n {
                    let Some(kj) = table[k * n + j] else { continue };
                    let via = ik + kj;
                    let slot = &mut table[i * n + j];
                    if slot.is_none_or(|cur| via < cur) {
                        *slot = Some(via);
                    }
                }
            }
        }
        let mut dist = Vec::with_capacity(n * n);
        for (idx, d) in table.into_iter().enumerate() {
            match d {
                Some(d) => dist.push(d),
                None => {
                    return Err(MetricError::DisconnectedGraph {
                        from: idx / n,
                        to: idx % n,
                    })
                }
            }
        }
        Ok(FiniteMetricSpace {
            id,
            label: None,
            len: n,
            dist,
            coords: None,
            source: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Attaches display coordinates; used for rendering only.
    pub fn with_coords(mut self, coords: Vec<Vec<S>>) -> Self {
        if coords.len() == self.len {
            self.coords = Some(coords);
        }
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn into_ref(self) -> SpaceRef<S> {
        Arc::new(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn coords(&self) -> Option<&[Vec<S>]> {
        self.coords.as_deref()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn points(&self) -> PointSet {
        PointSet::all(self.len)
    }

    #[inline]
    pub fn dist(&self, p: PointId, q: PointId) -> S {
        self.dist[p * self.len + q]
    }

    pub fn matrix(&self) -> Vec<Vec<S>> {
        self.dist.chunks(self.len).map(|r| r.to_vec()).collect()
    }

    pub fn check_subset(&self, set: &PointSet) -> Result<(), MetricError> {
        match set.max_id() {
            Some(p) if p >= self.len => Err(MetricError::PointOutOfRange {
                point: p,
                len: self.len,
            }),
            _ => Ok(()),
        }
    }

    /// Largest pairwise distance inside `set` (zero for singletons).
    pub fn diameter(&self, set: &PointSet) -> S {
        let pts = set.as_slice();
        let mut best = S::zero();
        for (i, &p) in pts.iter().enumerate() {
            for &q in &pts[i + 1..] {
                best = best.max_s(self.dist(p, q));
            }
        }
        best
    }

    /// `dist(x, set)`, or `None` for the empty set.
    pub fn set_distance(&self, x: PointId, set: &PointSet) -> Option<S> {
        set.iter().map(|p| self.dist(x, p)).reduce(S::min_s)
    }

    /// Distance between two sets; `None` if either is empty.
    pub fn sets_distance(&self, a: &PointSet, b: &PointSet) -> Option<S> {
        a.iter()
            .filter_map(|p| self.set_distance(p, b))
            .reduce(S::min_s)
    }

    /// Open ball `{y in within : d(x,y) < radius}`.
    pub fn open_ball(&self, x: PointId, radius: S, within: &PointSet) -> PointSet {
        PointSet::new(
            within
                .iter()
                .filter(|&y| self.dist(x, y).lt_tol(radius))
                .collect(),
        )
    }

    /// Closed ball `{y in within : d(x,y) <= radius}`.
    pub fn closed_ball(&self, x: PointId, radius: S, within: &PointSet) -> PointSet {
        PointSet::new(
            within
                .iter()
                .filter(|&y| self.dist(x, y).le_tol(radius))
                .collect(),
        )
    }

    /// Smallest distance between distinct points of `set`.
    pub fn min_positive_gap(&self, set: &PointSet) -> Option<S> {
        let pts = set.as_slice();
        let mut best: Option<S> = None;
        for (i, &p) in pts.iter().enumerate() {
            for &q in &pts[i + 1..] {
                let d = self.dist(p, q);
                best = Some(best.map_or(d, |b| b.min_s(d)));
            }
        }
        best
    }
}

fn check_dims<S>(coords: &[Vec<S>]) -> Result<usize, MetricError> {
    let dim = coords.first().ok_or(MetricError::Empty)?.len();
    for (index, c) in coords.iter().enumerate() {
        if c.len() != dim {
            return Err(MetricError::DimensionMismatch {
                index,
                found: c.len(),
                expected: dim,
            });
        }
    }
    Ok(dim)
}

fn norm_distance<S: Scalar>(a: &[S], b: &[S], weights: &[S], norm: Norm) -> Option<S> {
    let diffs = a.iter().zip(b).zip(weights).map(|((x, y), w)| *w * (*x - *y).abs());
    match norm {
        Norm::L1 => Some(diffs.fold(S::zero(), |acc, d| acc + d)),
        Norm::LInf => Some(diffs.fold(S::zero(), S::max_s)),
        Norm::L2 => diffs.fold(S::zero(), |acc, d| acc + d * d).sqrt_exact(),
    }
}

/// Lattice coordinates of a grid, first axis slowest.
pub fn grid_coords<S: Scalar>(dims: &[usize]) -> Vec<Vec<S>> {
    let total: usize = dims.iter().product();
    (0..total)
        .map(|mut idx| {
            let mut c = vec![S::zero(); dims.len()];
            for axis in (0..dims.len()).rev() {
                c[axis] = S::from_int((idx % dims[axis]) as i64);
                idx /= dims[axis];
            }
            c
        })
        .collect()
}

/// Integer segment `{0, 1, ..., len-1}`.
pub fn line<S: Scalar>(id: impl Into<String>, len: usize) -> FiniteMetricSpace<S> {
    FiniteMetricSpace::build(
        id,
        &SpaceSource::Grid {
            dims: vec![len],
            norm: Norm::L1,
        },
    )
    .expect("a nonempty segment is a metric space")
}

/// Integer grid with the l1 (graph) metric.
pub fn grid<S: Scalar>(id: impl Into<String>, dims: &[usize]) -> FiniteMetricSpace<S> {
    FiniteMetricSpace::build(
        id,
        &SpaceSource::Grid {
            dims: dims.to_vec(),
            norm: Norm::L1,
        },
    )
    .expect("a nonempty grid is a metric space")
}

/// `{0..side-1}^dim` with the weighted metric `sum_i i * |x_i - y_i|`.
pub fn weighted_l1_cube<S: Scalar>(
    id: impl Into<String>,
    side: usize,
    dim: usize,
) -> FiniteMetricSpace<S> {
    let dims = vec![side; dim];
    FiniteMetricSpace::build(
        id,
        &SpaceSource::WeightedL1 {
            coords: grid_coords(&dims),
            weights: None,
        },
    )
    .expect("a nonempty cube is a metric space")
}

/// Complete binary tree of the given depth with unit edges (root is 0).
pub fn binary_tree<S: Scalar>(id: impl Into<String>, depth: u32) -> FiniteMetricSpace<S> {
    let n = (1usize << (depth + 1)) - 1;
    let edges = (1..n).map(|c| ((c - 1) / 2, c, S::one())).collect();
    FiniteMetricSpace::build(id, &SpaceSource::Graph { vertices: n, edges })
        .expect("a tree is connected")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Exact;

    fn q(v: i64) -> Exact {
        Exact::from_integer(v)
    }

    #[test]
    fn one_point_matrix() {
        let s = FiniteMetricSpace::from_matrix("one", &[vec![q(0)]]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.diameter(&s.points()), q(0));
    }

    #[test]
    fn weighted_l1_example() {
        let s: FiniteMetricSpace<Exact> = weighted_l1_cube("cube", 2, 3);
        // (0,0,0) is index 0 and (1,1,1) is index 7.
        assert_eq!(s.dist(0, 7), q(6));
        // (0,0,1) differs in the third coordinate only.
        assert_eq!(s.dist(0, 1), q(3));
        assert_eq!(s.dist(0, 4), q(1));
    }

    #[test]
    fn triangle_violation_is_reported() {
        let m = vec![
            vec![q(0), q(1), q(5)],
            vec![q(1), q(0), q(1)],
            vec![q(5), q(1), q(0)],
        ];
        assert_eq!(
            FiniteMetricSpace::from_matrix("bad", &m),
            Err(MetricError::MetricViolation { p: 0, q: 2, s: 1 })
        );
    }

    #[test]
    fn matrix_axioms_rejected() {
        let asym = vec![vec![q(0), q(1)], vec![q(2), q(0)]];
        assert!(matches!(
            FiniteMetricSpace::from_matrix("a", &asym),
            Err(MetricError::Asymmetric { .. })
        ));
        let pseudo = vec![vec![q(0), q(0)], vec![q(0), q(0)]];
        assert!(matches!(
            FiniteMetricSpace::from_matrix("p", &pseudo),
            Err(MetricError::ZeroDistance { .. })
        ));
        let ragged = vec![vec![q(0), q(1)], vec![q(1)]];
        assert!(matches!(
            FiniteMetricSpace::from_matrix("r", &ragged),
            Err(MetricError::NotSquare { .. })
        ));
        assert_eq!(
            FiniteMetricSpace::<Exact>::from_matrix("e", &[]),
            Err(MetricError::Empty)
        );
    }

    #[test]
    fn graph_geodesics() {
        let src = SpaceSource::Graph {
            vertices: 4,
            edges: vec![(0, 1, q(1)), (1, 2, q(2)), (2, 3, q(1)), (0, 3, q(10))],
        };
        let s = FiniteMetricSpace::build("g", &src).unwrap();
        assert_eq!(s.dist(0, 3), q(4));
        assert_eq!(s.dist(3, 0), q(4));
        let disconnected = SpaceSource::Graph {
            vertices: 3,
            edges: vec![(0, 1, q(1))],
        };
        assert!(matches!(
            FiniteMetricSpace::build("d", &disconnected),
            Err(MetricError::DisconnectedGraph { .. })
        ));
    }

    #[test]
    fn euclidean_points_need_float_unless_exact() {
        let coords = vec![vec![q(0), q(0)], vec![q(3), q(4)]];
        let s = FiniteMetricSpace::build(
            "p",
            &SpaceSource::Points {
                coords: coords.clone(),
                norm: Norm::L2,
            },
        )
        .unwrap();
        assert_eq!(s.dist(0, 1), q(5));
        let irrational = vec![vec![q(0), q(0)], vec![q(1), q(1)]];
        assert!(matches!(
            FiniteMetricSpace::build(
                "p",
                &SpaceSource::Points {
                    coords: irrational,
                    norm: Norm::L2
                }
            ),
            Err(MetricError::InexactDistance { .. })
        ));
        let f = FiniteMetricSpace::<f64>::build(
            "pf",
            &SpaceSource::Points {
                coords: vec![vec![0.0, 0.0], vec![1.0, 1.0]],
                norm: Norm::L2,
            },
        )
        .unwrap();
        assert!((f.dist(0, 1) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn grid_ordering_is_row_major() {
        let g: FiniteMetricSpace<Exact> = grid("g", &[5, 5]);
        let c = g.coords().unwrap();
        assert_eq!(c[4], vec![q(0), q(4)]);
        assert_eq!(c[5], vec![q(1), q(0)]);
        assert_eq!(g.dist(0, 24), q(8));
    }

    #[test]
    fn tree_depths() {
        let t: FiniteMetricSpace<Exact> = binary_tree("t", 3);
        assert_eq!(t.len(), 15);
        assert_eq!(t.dist(7, 14), q(6));
    }

    #[test]
    fn balls_are_open_or_closed() {
        let l: FiniteMetricSpace<Exact> = line("l", 10);
        let all = l.points();
        assert_eq!(l.open_ball(5, q(2), &all), PointSet::range(4, 6));
        assert_eq!(l.closed_ball(5, q(2), &all), PointSet::range(3, 7));
    }
}
