//! Small-scale look at short-seed extraction: a handful of Haar unitaries
//! applied to random flat quantum sources.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{reduced_output_sqrt, UnitaryFamily};
use crate::entropy::integer_entropy;
use crate::error::{Error, Result};
use crate::numerics::{haar_unitary, trace_norm, trial_rng, CMatrix, C64};

pub const MAX_SHORTSEED_QUBITS: u32 = 6;
pub const MAX_SHORTSEED_FAMILY: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShortseedParams {
    pub n: u32,
    pub k: f64,
    pub m: u32,
    /// number of unitaries
    pub t: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortseedOutcome {
    /// per-trial `(1/t) Σ_i ‖tr_E[U_i ρ U_i†] − 1_M/|M|‖₁`
    pub errors: Vec<f64>,
    pub mean_error: f64,
    pub max_error: f64,
    /// `|M|² 2⁻ᵏ / |N|`
    pub reference_epsilon: f64,
    /// `|M| / √(|N| 2ᵏ)`
    pub reference_error: f64,
    /// same average on the purification of each source, against `1_M/|M| ⊗ ρ_R`
    pub decoupling_errors: Vec<f64>,
    pub mean_decoupling_error: f64,
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Unitaries come from stream 0 of the seed, trial `j` from stream `j + 1`, so
/// the outcome is independent of scheduling.
pub fn shortseed_experiment(p: &ShortseedParams) -> Result<ShortseedOutcome> {
    if p.n > MAX_SHORTSEED_QUBITS {
        return Err(Error::Overflow(format!("short-seed experiment needs n <= {MAX_SHORTSEED_QUBITS}")));
    }
    if p.t == 0 || p.t > MAX_SHORTSEED_FAMILY {
        return Err(Error::InvalidArgument(format!("need 1 <= t <= {MAX_SHORTSEED_FAMILY}")));
    }
    let k = integer_entropy(p.k)?;
    if k < 0 || k as u32 > p.n || p.m > p.n {
        return Err(Error::InvalidArgument(format!("need 0 <= k <= n and m <= n, got n={}, k={k}, m={}", p.n, p.m)));
    }
    let mut rng = trial_rng(p.seed, 0);
    let fam = UnitaryFamily::haar(p.n, p.m, p.t, &mut rng)?;
    let (dn, dm) = (fam.dim_n(), fam.dim_m());
    let de = dn / dm;
    let rank = 1usize << k;
    let scale = C64::new(1.0 / (rank as f64).sqrt(), 0.0);
    let mixed_m = CMatrix::identity(dm).scale(1.0 / dm as f64);
    let target_mr = CMatrix::identity(dm * rank).scale(1.0 / (dm * rank) as f64);

    let results: Vec<(f64, f64)> = (0..p.trials)
        .into_par_iter()
        .map(|j| {
            let mut rng = trial_rng(p.seed, j as u64 + 1);
            let basis = haar_unitary(dn, &mut rng);
            // ρ = A A† with A the first 2ᵏ basis columns scaled by 2^{-k/2}
            let a: DMatrix<C64> = basis.data().columns(0, rank).into_owned() * scale;
            let mut err = 0.0;
            let mut dec = 0.0;
            for u in fam.unitaries() {
                err += trace_norm(&(&reduced_output_sqrt(u, &a, dm) - &mixed_m));
                // purification Σ_j A|j⟩ ⊗ |j⟩ reduced to M ⊗ R
                let b = u.data() * &a;
                let joint = CMatrix::from_fn(dm * rank, dm * rank, |p_, q_| {
                    let (x, r) = (p_ / rank, p_ % rank);
                    let (y, s) = (q_ / rank, q_ % rank);
                    (0..de).map(|e| b[(x * de + e, r)] * b[(y * de + e, s)].conj()).sum()
                });
                dec += trace_norm(&(&joint - &target_mr));
            }
            (err / p.t as f64, dec / p.t as f64)
        })
        .collect();

    let errors: Vec<f64> = results.iter().map(|r| r.0).collect();
    let decoupling_errors: Vec<f64> = results.iter().map(|r| r.1).collect();
    let reference_epsilon = (dm * dm) as f64 * 2f64.powi(-k) / dn as f64;
    Ok(ShortseedOutcome {
        mean_error: mean(&errors),
        max_error: errors.iter().copied().fold(0.0, f64::max),
        reference_epsilon,
        reference_error: reference_epsilon.sqrt(),
        mean_decoupling_error: mean(&decoupling_errors),
        errors,
        decoupling_errors,
    })
}
