//! Spectral certificates shared by the classical and quantum extractor families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether the seed register is part of the extractor output.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Strong,
    Weak,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Strong => "strong",
            Mode::Weak => "weak",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strong" => Ok(Mode::Strong),
            "weak" => Ok(Mode::Weak),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

/// `λ₁(ψ†ψ − τ†τ)` together with `λ₂(ψ†ψ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralCertificate {
    pub lambda1_diff: f64,
    pub lambda2_psi: f64,
    /// Every family member maps the uniform input to the uniform output.
    pub balanced: bool,
}

/// Extraction error implied by a certificate at a given min-entropy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBound {
    /// `ε = λ₁ · |M| · |D| / 2ᵏ`
    pub epsilon: f64,
    /// `2√ε`, the guarantee against quantum side information
    pub quantum_error: f64,
}

/// Rearranges the spectral condition `λ₁ ≤ 2ᵏ ε / (|M||D|)` for ε. `d` is the
/// seed length in bits and may be fractional.
pub fn epsilon_for_k(cert: &SpectralCertificate, k: f64, m: u32, d: f64) -> ErrorBound {
    epsilon_from_lambda(cert.lambda1_diff, k, m, d)
}

pub fn epsilon_from_lambda(lambda1: f64, k: f64, m: u32, d: f64) -> ErrorBound {
    let epsilon = lambda1.max(0.0) * 2f64.powi(m as i32) * 2f64.powf(d) * 2f64.powf(-k);
    ErrorBound { epsilon, quantum_error: 2.0 * epsilon.sqrt() }
}
