//! Explicit input states that certify lower bounds on the seed of a
//! unitary family. Both are built from the first member `U_1`: they are
//! flat states that `U_1` maps onto a small set of output basis vectors.

use super::{q_spectral_certificate, reduced_output, UnitaryFamily};
use crate::classical::{seed_bound_formula, witness_support};
use crate::entropy::{h2_q, hmin_q, integer_entropy};
use crate::error::{Error, Result};
use crate::numerics::{trace_norm, CMatrix};

/// `c · Σ_{s<support} Σ_t U_1† |s t⟩⟨s t| U_1`.
fn pulled_back_projector(fam: &UnitaryFamily, support: usize, weight: f64) -> CMatrix {
    let de = fam.dim_e();
    let diag: Vec<f64> = (0..fam.dim_n()).map(|i| if i / de < support { weight } else { 0.0 }).collect();
    let u = &fam.unitaries()[0];
    let g = &(&u.adjoint() * &CMatrix::from_real_diagonal(&diag)) * u;
    g.hermitian_part()
}

fn output_distance(fam: &UnitaryFamily, u: &CMatrix, rho: &CMatrix) -> f64 {
    let dm = fam.dim_m();
    let mixed = CMatrix::identity(dm).scale(1.0 / dm as f64);
    trace_norm(&(&reduced_output(u, rho, dm) - &mixed))
}

/// Flat state with `H_min = n − 1` on which `U_1` alone misses uniform by
/// exactly 1 in trace norm.
#[derive(Clone, Debug)]
pub struct SingleUnitaryWitness {
    pub gamma: CMatrix,
    pub hmin: f64,
    /// `‖tr_E[U_1 γ U_1†] − 1_M/|M|‖₁`
    pub single_error: f64,
    /// `(1/|D|) Σ_i ‖tr_E[U_i γ U_i†] − 1_M/|M|‖₁`
    pub family_error: f64,
}

/// `γ = (2/|N|) Σ_{s<|M|/2} Σ_t U_1† |s t⟩⟨s t| U_1`.
pub fn single_unitary_witness(fam: &UnitaryFamily) -> Result<SingleUnitaryWitness> {
    if fam.m() == 0 {
        return Err(Error::Infeasible("witness needs at least one output qubit".into()));
    }
    let gamma = pulled_back_projector(fam, fam.dim_m() / 2, 2.0 / fam.dim_n() as f64);
    let single_error = output_distance(fam, &fam.unitaries()[0], &gamma);
    let family_error =
        fam.unitaries().iter().map(|u| output_distance(fam, u, &gamma)).sum::<f64>() / fam.seeds() as f64;
    Ok(SingleUnitaryWitness { hmin: hmin_q(&gamma)?, gamma, single_error, family_error })
}

#[derive(Clone, Debug)]
pub struct QuantumSeedBoundWitness {
    pub gamma: CMatrix,
    /// `|S| = ⌈2ᵏ |M| / |N|⌉`
    pub support_size: usize,
    pub h2: f64,
    /// `(2ᵏ/|D|²) · |S| · (1/|S| − 1/|M|)²`
    pub lower_bound: f64,
    /// `2ᵏ ‖(ψ − τ)(γ)‖₂²`
    pub rayleigh: f64,
    pub lambda1_diff: f64,
}

/// `γ = |M|/(|S||N|) Σ_{s<|S|} Σ_t U_1† |s t⟩⟨s t| U_1` for integer `k ≤ n`.
pub fn quantum_seed_bound_witness(fam: &UnitaryFamily, k: f64) -> Result<QuantumSeedBoundWitness> {
    let k = integer_entropy(k)?;
    if k > fam.n() as i32 {
        return Err(Error::Infeasible(format!("need k <= n, got k={k}")));
    }
    let support_size = witness_support(fam.n(), fam.m(), k);
    let weight = fam.dim_m() as f64 / (support_size * fam.dim_n()) as f64;
    let gamma = pulled_back_projector(fam, support_size, weight);

    let dm = fam.dim_m();
    let mixed = CMatrix::identity(dm).scale(1.0 / dm as f64);
    let seeds = fam.seeds() as f64;
    let dist: f64 =
        fam.unitaries().iter().map(|u| (&reduced_output(u, &gamma, dm) - &mixed).frobenius_sq()).sum::<f64>()
            / (seeds * seeds);
    let cert = q_spectral_certificate(fam)?;
    Ok(QuantumSeedBoundWitness {
        h2: h2_q(&gamma),
        support_size,
        lower_bound: seed_bound_formula(k, fam.seeds(), support_size, dm),
        rayleigh: 2f64.powi(k) * dist,
        lambda1_diff: cert.lambda1_diff,
        gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{epsilon_for_k, Mode};
    use crate::numerics::seeded_rng;
    use crate::quantum::clifford_family;

    #[test]
    fn single_unitary_error_is_one() {
        let mut rng = seeded_rng(1);
        for (n, m) in [(1, 1), (2, 1), (2, 2), (3, 2)] {
            let fam = UnitaryFamily::haar(n, m, 3, &mut rng).unwrap();
            let w = single_unitary_witness(&fam).unwrap();
            assert!((w.single_error - 1.0).abs() < 1e-9);
            assert!((w.hmin - (n as f64 - 1.0)).abs() < 1e-12);
            assert!((w.gamma.trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn clifford_family_error_within_certificate() {
        let fam = clifford_family(2).unwrap().with_output_qubits(1).unwrap();
        let w = single_unitary_witness(&fam).unwrap();
        let c = q_spectral_certificate(&fam).unwrap();
        let b = epsilon_for_k(&c, w.hmin.round(), 1, fam.d());
        assert!(w.family_error <= b.quantum_error + 1e-9);
    }

    #[test]
    fn seed_bound_chain_on_clifford() {
        let fam = clifford_family(2).unwrap().with_output_qubits(1).unwrap();
        for k in 0..=2 {
            let w = quantum_seed_bound_witness(&fam, k as f64).unwrap();
            assert!(w.lower_bound <= w.lambda1_diff + 1e-9);
            assert!(w.rayleigh <= w.lambda1_diff + 1e-9);
            assert!(w.h2 >= k as f64 - 1e-12);
        }
    }

    #[test]
    fn seed_bound_degenerates_at_full_entropy() {
        let fam = UnitaryFamily::new(2, 2, vec![CMatrix::identity(4)], Mode::Strong).unwrap();
        let w = quantum_seed_bound_witness(&fam, 2.0).unwrap();
        assert_eq!(w.support_size, 4);
        assert_eq!(w.lower_bound, 0.0);
        assert!(quantum_seed_bound_witness(&fam, 3.0).is_err());
        assert!(quantum_seed_bound_witness(&fam, 0.5).is_err());
    }
}
