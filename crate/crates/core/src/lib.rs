//! Computational coarse geometry on finite metric spaces.
//!
//! The crate builds and checks `(r, n)`-decomposition certificates, composes
//! and transports them along maps, converts covers with controlled
//! multiplicity and Lebesgue number into decompositions, builds nerves with
//! Lipschitz partitions of unity, certifies large-scale doubling, glues
//! per-part feature maps, and runs the decomposition game.
//!
//! Every algorithm is generic over [`Scalar`]: exact rationals
//! ([`Exact`]) for integral or rational inputs, `f64`/`f32` otherwise.

pub mod covers;
pub mod decomposition;
pub mod doubling;
pub mod embedding;
pub mod fixtures;
pub mod game;
pub mod json;
pub mod metric;
pub mod nerve;
pub mod point_set;
pub mod scalar;

pub use point_set::{PointId, PointSet};
pub use scalar::{Extent, Scalar};

/// Exact rational scalar.
pub type Exact = num_rational::Rational64;

pub type ExactSpace = metric::FiniteMetricSpace<Exact>;
pub type FloatSpace = metric::FiniteMetricSpace<f64>;
pub type ExactFamily = metric::MetricFamily<Exact>;
pub type FloatFamily = metric::MetricFamily<f64>;
pub type ExactCover = covers::Cover<Exact>;
pub type FloatCover = covers::Cover<f64>;
pub type ExactCertificate = decomposition::DecompositionCertificate<Exact>;
pub type FloatCertificate = decomposition::DecompositionCertificate<f64>;
pub type ExactSession = game::GameSession<Exact>;
pub type FloatSession = game::GameSession<f64>;
