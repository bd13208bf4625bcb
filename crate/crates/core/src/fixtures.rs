//! Bundled spaces used by tests, the CLI and the game service.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::covers::Cover;
use crate::embedding::{FeatureMap, PartitionWeights};
use crate::metric::{
    binary_tree, grid, line, weighted_l1_cube, FiniteMetricSpace, Norm, SpaceRef, SpaceSource,
};
use crate::point_set::PointSet;
use crate::scalar::Scalar;

/// Names accepted by [`fixture`]. `lineN` and `gridAxB` also work for other
/// sizes.
pub const FIXTURE_NAMES: &[&str] = &[
    "singleton",
    "line8",
    "line16",
    "line32",
    "line64",
    "line100",
    "grid5x5",
    "grid8x8",
    "grid16x16",
    "cube3_weighted",
    "binary_tree",
];

/// Largest space a name pattern may request.
const MAX_FIXTURE_POINTS: usize = 4096;

pub fn fixture<S: Scalar>(name: &str) -> Option<FiniteMetricSpace<S>> {
    let space = match name {
        "singleton" => line(name, 1),
        "cube3_weighted" => weighted_l1_cube(name, 3, 3),
        "binary_tree" => binary_tree(name, 4),
        _ => {
            if let Some(n) = name.strip_prefix("line").and_then(|n| n.parse::<usize>().ok()) {
                if n == 0 || n > MAX_FIXTURE_POINTS {
                    return None;
                }
                line(name, n)
            } else {
                let (a, b) = name.strip_prefix("grid")?.split_once('x')?;
                let (a, b): (usize, usize) = (a.parse().ok()?, b.parse().ok()?);
                if a == 0 || b == 0 || a * b > MAX_FIXTURE_POINTS {
                    return None;
                }
                grid(name, &[a, b])
            }
        }
    };
    Some(space.with_label(describe(name)))
}

fn describe(name: &str) -> String {
    match name {
        "singleton" => "one point".into(),
        "cube3_weighted" => "{0,1,2}^3 with d = |dx| + 2|dy| + 3|dz|".into(),
        "binary_tree" => "complete binary tree of depth 4, unit edges".into(),
        n if n.starts_with("line") => format!("integer segment of {} points", &n[4..]),
        n => format!("integer grid {} with the l1 metric", &n[4..]),
    }
}

/// Bundled covers accepted by [`cover_fixture`].
pub const COVER_FIXTURE_NAMES: &[&str] = &["line10_overlap", "line20_thirds"];

pub fn cover_fixture<S: Scalar>(name: &str) -> Option<Cover<S>> {
    let (len, elements) = match name {
        "line10_overlap" => (10, vec![PointSet::range(0, 5), PointSet::range(3, 9)]),
        "line20_thirds" => (
            20,
            vec![PointSet::range(0, 8), PointSet::range(5, 14), PointSet::range(11, 19)],
        ),
        _ => return None,
    };
    let space = line::<S>(format!("line{len}"), len).into_ref();
    Some(Cover::new(space, elements).expect("bundled covers cover their space"))
}

/// `{0, s, 2s, ..., (len-1)s}` on the real line.
pub fn scaled_line<S: Scalar>(id: &str, len: usize, spacing: S) -> FiniteMetricSpace<S> {
    let coords = (0..len).map(|i| vec![S::from_int(i as i64) * spacing]).collect();
    FiniteMetricSpace::build(id, &SpaceSource::Points { coords, norm: Norm::L1 })
        .expect("distinct points on a line")
}

/// `a x b` grid with spacing `s` and the l1 metric.
pub fn scaled_grid<S: Scalar>(id: &str, a: usize, b: usize, spacing: S) -> FiniteMetricSpace<S> {
    let coords = (0..a * b)
        .map(|i| {
            vec![
                S::from_int((i / b) as i64) * spacing,
                S::from_int((i % b) as i64) * spacing,
            ]
        })
        .collect();
    FiniteMetricSpace::build(id, &SpaceSource::Points { coords, norm: Norm::L1 })
        .expect("distinct grid points")
}

/// Shortest-path metric of a complete graph on `n` vertices with integer
/// edge weights drawn uniformly from `1..=max_weight`.
pub fn random_metric<S: Scalar>(id: &str, n: usize, max_weight: i64, seed: u64) -> FiniteMetricSpace<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            edges.push((a, b, S::from_int(rng.random_range(1..=max_weight))));
        }
    }
    FiniteMetricSpace::build(id, &SpaceSource::Graph { vertices: n, edges })
        .expect("complete graphs are connected")
}

/// Two overlapping intervals of a 30-point segment with constant per-part
/// feature maps, for gluing.
pub struct TwoIntervals<S> {
    pub space: SpaceRef<S>,
    pub parts: Vec<PointSet>,
    pub weights: PartitionWeights,
    pub xis: Vec<FeatureMap>,
    pub r: S,
    pub epsilon: f64,
}

pub fn two_intervals<S: Scalar>() -> TwoIntervals<S> {
    let space = line::<S>("two_intervals", 30).into_ref();
    let all = space.points();
    let parts = vec![PointSet::range(0, 19), PointSet::range(10, 29)];
    let weights = PartitionWeights::distance_ratio(&space, &all, parts.clone());
    // Each map is defined on the 1-neighborhood of its part.
    let xis = vec![
        FeatureMap::constant(&PointSet::range(0, 20), 2, 0),
        FeatureMap::constant(&PointSet::range(9, 29), 2, 1),
    ];
    TwoIntervals {
        space,
        parts,
        weights,
        xis,
        r: S::one(),
        epsilon: 1.0,
    }
}
