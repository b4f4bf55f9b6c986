//! Quasi-exact quantum error correction.
//!
//! The crate provides four layers that build on each other:
//!
//! * [`channels`]: completely positive maps, instruments, Choi matrices,
//!   and distance measures;
//! * [`qec`]: exact and approximate recovery synthesis from the code
//!   matrix, complementary channels, and encoding error;
//! * [`vbs`]: SU(d) valence-bond-solid chains: the Lie-algebra toolkit,
//!   matrix-product contraction, the bulk/edge/holographic code families,
//!   their error models, logical gates, and readout;
//! * [`quasi`] and [`gatecell`]: scaling sweeps, strong/weak
//!   classification, quasi distances and thresholds, and the
//!   coarse-grained gate-cell partitions.
//!
//! Everything is double precision and deterministic: stochastic routines
//! take explicit seeds and report them back.

pub mod acceptance;
pub mod channels;
pub mod gatecell;
pub mod linalg;
pub mod qec;
pub mod quasi;
pub mod vbs;

/// Book chapters as documentation-tested modules.
pub mod book;

pub use linalg::{fidelity, trace_distance, CMat, CVec};

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("Kraus list must be nonempty")]
    EmptyKrausList,
    #[error("matrix is not positive semi-definite: {0}")]
    NotPositive(String),
    #[error("branch sum is not trace preserving")]
    NotTracePreserving,
    #[error("invalid mixing weights: {0}")]
    InvalidWeights(String),
    #[error("input is not a Hermitian projector")]
    NotProjector,
    #[error("noise is degenerate: {0}")]
    DegenerateNoise(String),
    #[error("unsupported parameter: {0}")]
    Unsupported(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("system size exceeds the dense-solver limit: {0}")]
    SizeLimit(String),
    #[error("probe frame is singular")]
    SingularFrame,
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
