//! Slice-map amplification of completely bounded maps on matrix algebras.
//!
//! For a linear map `Φ` on `M_m`, the amplification `χ(Φ)` on `M_m ⊗ M_n`
//! is the unique map satisfying `L_τ(χ(Φ)(u)) = Φ(L_τ(u))` for every
//! functional `τ` on `M_n`, where `L_τ` is the left slice map. This crate
//! constructs it, cross-checks it against the blockwise amplification, and
//! ships a randomized harness for the algebraic identities it satisfies.

pub mod amplification;
pub mod duality;
pub mod error;
pub mod linalg;
pub mod superop;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, FactorDims, C64};
