//! Finite metric spaces, families of subspaces, maps between families and
//! the scale-`r` primitives (components, separated nets) used everywhere else.

pub mod family;
pub mod map;
pub mod ops;
pub mod space;

pub use family::{mesh, Member, MetricFamily};
pub use map::{
    verify_family_map, Bound, FamilyMap, FamilyMapReport, MapError, MemberMap, PairViolation,
    PiecewiseLinear,
};
pub use ops::{max_separated_net, r_components};
pub use space::{
    binary_tree, grid, grid_coords, line, weighted_l1_cube, FiniteMetricSpace, MetricError, Norm,
    SpaceRef, SpaceSource,
};
