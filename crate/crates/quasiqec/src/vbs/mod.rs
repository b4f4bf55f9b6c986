//! SU(d) valence-bond-solid codes: the Lie-algebra toolkit, the
//! adjoint-chain model, matrix-product contraction, the three code
//! families, local error models with recovery, logical gates, readout,
//! and dense cross-checks.

pub mod mps;
pub mod decode;
pub mod dense;
pub mod gates;
pub mod readout;
pub mod recover;
pub mod su;

pub use mps::{build_code, BoundaryKind, Insertion, Loc, MpsCode};
pub use su::{chi, ground_energy, su_basis, transfer_spectrum, SuBasis, TransferSpectrum};
