//! Monte-Carlo soundness checks: draw states whose conditional min-entropy
//! is certified by the SDP dual, run the extractor, and compare with the
//! spectral bound.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::{epsilon_for_k, ErrorBound, SpectralCertificate};
use crate::classical::{quantum_proof_error, spectral_certificate, FunctionFamily};
use crate::entropy::{hmin_cond, BipartiteState, StateKind};
use crate::error::{Error, Result};
use crate::numerics::{random_density, random_pure, tensor, trial_rng, CMatrix, Rng};
use crate::quantum::{decoupling_error, q_spectral_certificate, UnitaryFamily};

/// Rejection-sampling budget per requested state.
pub const MAX_ATTEMPTS: usize = 5000;

/// Relative slack when comparing a measured error with its bound.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialRecord {
    pub index: usize,
    pub error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hmin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoupling_error: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct VerifyOutcome {
    pub certificate: SpectralCertificate,
    pub bound: ErrorBound,
    pub trials: Vec<TrialRecord>,
    pub violations: usize,
}

pub fn exceeds(error: f64, bound: f64) -> bool {
    error > bound * (1.0 + BOUND_SLACK) + BOUND_SLACK
}

fn mix(a: &CMatrix, b: &CMatrix, w: f64) -> CMatrix {
    (&a.scale(1.0 - w) + &b.scale(w)).hermitian_part()
}

fn maximally_mixed_with(state: &BipartiteState) -> CMatrix {
    let dn = state.dim_n();
    CMatrix::new(tensor(&CMatrix::identity(dn).scale(1.0 / dn as f64), &state.marginal_r()).into_inner())
}

/// Random distribution; the exponent spreads draws between peaked and flat.
fn random_probs(len: usize, rng: &mut Rng) -> Vec<f64> {
    let a: f64 = rng.random_range(0.0..4.0);
    let raw: Vec<f64> = (0..len).map(|_| rng.random::<f64>().powf(a)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

fn random_cc(dim_n: usize, dim_r: usize, rng: &mut Rng) -> Result<BipartiteState> {
    let flat = random_probs(dim_n * dim_r, rng);
    let joint: Vec<Vec<f64>> = flat.chunks(dim_r).map(<[f64]>::to_vec).collect();
    BipartiteState::classical_classical(&joint)
}

fn random_cq(dim_n: usize, dim_r: usize, rng: &mut Rng) -> Result<BipartiteState> {
    let probs = random_probs(dim_n, rng);
    let conds: Vec<CMatrix> = (0..dim_n)
        .map(|_| {
            let rank = rng.random_range(1..=dim_r);
            random_density(dim_r, rank, rng)
        })
        .collect();
    BipartiteState::classical_quantum(&probs, &conds)
}

fn random_qq(dim_n: usize, dim_r: usize, rng: &mut Rng) -> Result<BipartiteState> {
    let dim = dim_n * dim_r;
    let rho = match rng.random_range(0..3) {
        0 => {
            let v = random_pure(dim, rng);
            CMatrix::outer(&v, &v)
        }
        1 => {
            let rank = rng.random_range(1..=dim);
            random_density(dim, rank, rng)
        }
        _ => {
            let a = random_density(dim_n, rng.random_range(1..=dim_n), rng);
            let b = random_density(dim_r, rng.random_range(1..=dim_r), rng);
            CMatrix::new(tensor(&a, &b).into_inner())
        }
    };
    BipartiteState::new(rho.hermitian_part(), dim_n, dim_r, StateKind::QuantumQuantum)
}

/// Random state of the given kind: product, pure or mixed for `qq`, random
/// conditionals of random rank for `cq`, a random joint distribution for `cc`.
pub fn random_state(kind: StateKind, dim_n: usize, dim_r: usize, rng: &mut Rng) -> Result<BipartiteState> {
    match kind {
        StateKind::ClassicalClassical => random_cc(dim_n, dim_r, rng),
        StateKind::ClassicalQuantum => random_cq(dim_n, dim_r, rng),
        StateKind::QuantumQuantum => random_qq(dim_n, dim_r, rng),
    }
}

/// Draws `(1−w)·σ + w·(1_N/|N| ⊗ σ_R)` with random σ and `w ∈ [0,1)` until the
/// certified `H_min(N|R)` reaches `k`. Returns the state and that value.
pub fn sample_certified_state(
    kind: StateKind,
    dim_n: usize,
    dim_r: usize,
    k: f64,
    rng: &mut Rng,
) -> Result<(BipartiteState, f64)> {
    for _ in 0..MAX_ATTEMPTS {
        let sigma = random_state(kind, dim_n, dim_r, rng)?;
        let w: f64 = rng.random();
        let rho = mix(sigma.rho(), &maximally_mixed_with(&sigma), w);
        let state = BipartiteState::new(rho, dim_n, dim_r, sigma.kind())?;
        let (h, _) = hmin_cond(&state)?;
        if h >= k {
            return Ok((state, h));
        }
    }
    Err(Error::Infeasible(format!("no state with certified H_min >= {k} in {MAX_ATTEMPTS} draws")))
}

fn finish(certificate: SpectralCertificate, bound: ErrorBound, trials: Vec<TrialRecord>) -> VerifyOutcome {
    let violations = trials.iter().filter(|t| exceeds(t.error, bound.quantum_error)).count();
    VerifyOutcome { certificate, bound, trials, violations }
}

/// Quantum-proof soundness of a classical family on cq states with
/// `H_min(N|R) ≥ k`; the error is compared with `2√ε`.
pub fn verify_classical(fam: &FunctionFamily, k: f64, trials: usize, seed: u64, dim_r: usize) -> Result<VerifyOutcome> {
    let certificate = spectral_certificate(fam)?;
    let bound = epsilon_for_k(&certificate, k, fam.m(), fam.d());
    let records = (0..trials)
        .into_par_iter()
        .map(|j| {
            let mut rng = trial_rng(seed, j as u64);
            let (state, h) = sample_certified_state(StateKind::ClassicalQuantum, fam.input_size(), dim_r, k, &mut rng)?;
            let error = quantum_proof_error(fam, &state)?;
            Ok(TrialRecord { index: j, error, hmin: Some(h), decoupling_error: None })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(certificate, bound, records))
}

/// Decoupling soundness of a unitary family on states with
/// `H_min(N|R) ≥ k`. When `k ≤ −log|N|` and `|R| = |N|`, trial 0 is the
/// maximally entangled state.
pub fn verify_quantum(fam: &UnitaryFamily, k: f64, trials: usize, seed: u64, dim_r: usize) -> Result<VerifyOutcome> {
    let certificate = q_spectral_certificate(fam)?;
    let bound = epsilon_for_k(&certificate, k, fam.m(), fam.d());
    let include_entangled = dim_r == fam.dim_n() && k <= -(fam.n() as f64);
    let states = (0..trials)
        .into_par_iter()
        .map(|j| {
            if j == 0 && include_entangled {
                let s = BipartiteState::maximally_entangled(dim_r);
                let (h, _) = hmin_cond(&s)?;
                return Ok((s, h));
            }
            let mut rng = trial_rng(seed, j as u64);
            sample_certified_state(StateKind::QuantumQuantum, fam.dim_n(), dim_r, k, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let records = states
        .iter()
        .enumerate()
        .map(|(j, (s, h))| {
            Ok(TrialRecord { index: j, error: decoupling_error(fam, s)?, hmin: Some(*h), decoupling_error: None })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(certificate, bound, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::hash_family;
    use crate::numerics::seeded_rng;

    #[test]
    fn sampled_states_meet_the_entropy_target() {
        let mut rng = seeded_rng(1);
        for (kind, dn, dr, k) in [
            (StateKind::ClassicalQuantum, 8, 2, 2.0),
            (StateKind::ClassicalClassical, 4, 2, 1.0),
            (StateKind::QuantumQuantum, 2, 2, 0.0),
            (StateKind::QuantumQuantum, 4, 2, -1.0),
        ] {
            let (s, h) = sample_certified_state(kind, dn, dr, k, &mut rng).unwrap();
            assert!(h >= k);
            assert_eq!(s.kind(), kind);
            assert_eq!((s.dim_n(), s.dim_r()), (dn, dr));
        }
    }

    #[test]
    fn unreachable_entropy_is_infeasible() {
        let mut rng = seeded_rng(2);
        let r = sample_certified_state(StateKind::ClassicalQuantum, 2, 1, 1.5, &mut rng);
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }

    #[test]
    fn small_classical_verification_run() {
        let fam = hash_family(3, 1).unwrap();
        let out = verify_classical(&fam, 2.0, 8, 5, 2).unwrap();
        assert_eq!(out.trials.len(), 8);
        assert_eq!(out.violations, 0);
        let again = verify_classical(&fam, 2.0, 8, 5, 2).unwrap();
        assert_eq!(out.trials, again.trials);
        assert!(verify_classical(&fam, 2.0, 0, 5, 2).unwrap().trials.is_empty());
    }

    #[test]
    fn entangled_trial_leads_negative_entropy_runs() {
        let mut rng = seeded_rng(3);
        let fam = UnitaryFamily::haar(1, 1, 4, &mut rng).unwrap();
        let out = verify_quantum(&fam, -1.0, 3, 9, 2).unwrap();
        assert!((out.trials[0].hmin.unwrap() + 1.0).abs() < 1e-6);
        assert_eq!(out.violations, 0);
    }
}
