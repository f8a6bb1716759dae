//! Spectral certificates for randomness extractors, classical and quantum.
//!
//! A seeded family is certified by the top eigenvalue of `ψ†ψ − τ†τ`, where ψ
//! is the extractor map and τ the map to the uniform output. The crate builds
//! these maps for function families and unitary families, computes the
//! certificates, and checks the implied error bounds against exact
//! conditional min-entropies obtained from a semidefinite program.

pub mod certificate;
pub mod classical;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod formats;
pub mod gf2n;
pub mod harness;
pub mod numerics;
pub mod quantum;
pub mod report;

pub use certificate::{epsilon_for_k, ErrorBound, Mode, SpectralCertificate};
pub use error::{Error, Result};
