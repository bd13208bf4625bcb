//! `(r, n)`-decomposition certificates: the data model, an exhaustive
//! verifier, composition of chains, construction from covers, transport
//! along coarse embeddings and expansions, defender strategies and a
//! brute-force oracle for small spaces.

mod certificate;
mod compose;
mod grave;
mod oracle;
mod strategy;
mod transport;
mod verify;

use std::fmt;

pub use certificate::{DecompositionCertificate, Level, MemberLevels};
pub use compose::compose_certificates;
pub use grave::{grave_construct, grave_construct_levels};
pub use oracle::{exhaustive_decompose, OracleVerdict, MAX_ORACLE_POINTS};
pub use strategy::{defend, net_cover_strategy, NetCover, Strategy, StrategyName};
pub use transport::{pullback_certificate, pushforward_expansion, SelfMap};
pub use verify::{verify_certificate, CertificateReport, CertificateViolation};

use crate::point_set::PointId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precondition {
    Multiplicity,
    Lebesgue,
}

impl fmt::Display for Precondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precondition::Multiplicity => write!(f, "multiplicity"),
            Precondition::Lebesgue => write!(f, "lebesgue"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecompositionError {
    #[error("families do not chain: {0}")]
    SourceMismatch(String),
    #[error("{which} precondition failed: measured {measured}, required {required}")]
    PreconditionFailed {
        which: Precondition,
        measured: String,
        required: String,
    },
    #[error("certificate scale {cert_r} is below rho(r) = {needed}")]
    ScaleTooSmall { cert_r: String, needed: String },
    #[error("point {point} of source member {member} has no image")]
    UnmappedPoint { member: usize, point: PointId },
    #[error("map violates its coarse bounds: {0}")]
    MapNotCoarse(String),
    #[error("map does not scale d({x},{y}) by the expansion factor")]
    NotAnExpansion { x: PointId, y: PointId },
    #[error("expansion factor must exceed 1")]
    InvalidFactor,
    #[error("the image of point {point} leaves the host space")]
    ImageEscapesSpace { point: PointId },
    #[error("strategy failed: {0}")]
    StrategyFailed(String),
    #[error("{points} points exceed the oracle limit of {max}")]
    TooLarge { points: usize, max: usize },
    #[error("scale r must be positive")]
    NonPositiveScale,
    #[error("composed level index overflows")]
    LevelOverflow,
}
