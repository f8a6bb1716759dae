//! Randomized invariants of the public API.

use extractorlab::classical::{classical_error, hash_family, pairwise_permutations, spectral_certificate};
use extractorlab::entropy::{flat_decomposition, flat_source_on, hmin, hmin_cond, ClassicalState, StateKind};
use extractorlab::epsilon_for_k;
use extractorlab::formats::{parse_function_family, parse_state, parse_unitary_family};
use extractorlab::formats::{write_function_family, write_state, write_unitary_family};
use extractorlab::harness::random_state;
use extractorlab::numerics::{gaussian_matrix, partial_trace, random_density, seeded_rng, tensor, trace_norm, CMatrix};
use extractorlab::quantum::{clifford_family, q_spectral_certificate, Superop, UnitaryFamily};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_of_product_recovers_factors(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut rng = seeded_rng(seed);
        let a = random_density(da, da, &mut rng);
        let b = random_density(db, 1, &mut rng);
        let ab = tensor(&a, &b);
        prop_assert!((&partial_trace(&ab, &[0]).unwrap() - &a).max_abs() < 1e-12);
        prop_assert!((&partial_trace(&ab, &[1]).unwrap() - &b).max_abs() < 1e-12);
        prop_assert!((partial_trace(&ab, &[]).unwrap().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_sources_meet_the_bound(seed in any::<u64>(), m in 1u32..3, extra in 0u32..3) {
        let n = 4u32;
        let k = (m + extra).min(n);
        let fam = hash_family(n, m).unwrap();
        let cert = spectral_certificate(&fam).unwrap();
        let bound = epsilon_for_k(&cert, k as f64, m, fam.d());
        let mut rng = seeded_rng(seed);
        let mut inputs: Vec<usize> = (0..1usize << n).collect();
        rand::seq::SliceRandom::shuffle(inputs.as_mut_slice(), &mut rng);
        let p = flat_source_on(n, &inputs[..1 << k]).unwrap();
        let err = classical_error(&fam, &p).unwrap();
        prop_assert!(err <= bound.quantum_error + 1e-12, "error {} bound {}", err, bound.quantum_error);
    }

    #[test]
    fn flat_decomposition_reassembles(seed in any::<u64>(), parts in 1usize..5, k in 0u32..4) {
        // a mixture of flat k-sources has H_min >= k
        let mut rng = seeded_rng(seed);
        let size = 1usize << k;
        let mut probs = vec![0.0; 8];
        for _ in 0..parts {
            let mut inputs: Vec<usize> = (0..8).collect();
            rand::seq::SliceRandom::shuffle(inputs.as_mut_slice(), &mut rng);
            for &x in &inputs[..size] {
                probs[x] += 1.0 / (parts * size) as f64;
            }
        }
        let p = ClassicalState::new(probs.clone()).unwrap();
        let pieces = flat_decomposition(&p, k as f64).unwrap();
        let mut sum = [0.0; 8];
        let mut weight = 0.0;
        for (w, q) in &pieces {
            prop_assert!(*w >= 0.0);
            prop_assert!((hmin(q) - k as f64).abs() < 1e-12);
            weight += w;
            for (s, x) in sum.iter_mut().zip(q.probs()) { *s += w * x; }
        }
        prop_assert!((weight - 1.0).abs() < 1e-9);
        for (s, x) in sum.iter().zip(&probs) { prop_assert!((s - x).abs() < 1e-9); }
    }

    #[test]
    fn state_files_round_trip(seed in any::<u64>(), kind in 0usize..3, dn in 1usize..4, dr in 1usize..4) {
        let kind = [StateKind::ClassicalClassical, StateKind::ClassicalQuantum, StateKind::QuantumQuantum][kind];
        let s = random_state(kind, dn, dr, &mut seeded_rng(seed)).unwrap();
        let back = parse_state(&write_state(&s)).unwrap();
        prop_assert_eq!(back.kind(), kind);
        prop_assert_eq!((back.dim_n(), back.dim_r()), (dn, dr));
        prop_assert_eq!(back.rho().data(), s.rho().data());
    }

    #[test]
    fn unitary_files_round_trip(seed in any::<u64>(), n in 1u32..3, t in 1usize..4) {
        let fam = UnitaryFamily::haar(n, 1, t, &mut seeded_rng(seed)).unwrap();
        let back = parse_unitary_family(&write_unitary_family(&fam)).unwrap();
        prop_assert_eq!(back.seeds(), t);
        for (a, b) in back.unitaries().iter().zip(fam.unitaries()) {
            prop_assert_eq!(a.data(), b.data());
        }
    }

    #[test]
    fn hmin_cond_is_bounded_by_dimensions(seed in any::<u64>(), dn in 1usize..4, dr in 1usize..4) {
        let s = random_state(StateKind::QuantumQuantum, dn, dr, &mut seeded_rng(seed)).unwrap();
        let (h, _) = hmin_cond(&s).unwrap();
        prop_assert!(h <= (dn as f64).log2() + 1e-6);
        prop_assert!(h >= -(dn.min(dr) as f64).log2() - 1e-6);
    }
}

#[test]
fn function_files_round_trip() {
    for fam in [hash_family(3, 2).unwrap(), pairwise_permutations(3, 1).unwrap()] {
        let back = parse_function_family(&write_function_family(&fam)).unwrap();
        assert_eq!(back.tables(), fam.tables());
        assert_eq!(back.mode(), fam.mode());
    }
}

/// `‖ψ(X)‖₂² − ‖τ(X)‖₂² ≤ λ₁ ‖X‖₂²` on random operators.
#[test]
fn clifford_quadratic_form_respects_lambda1() {
    let fam = clifford_family(2).unwrap().with_output_qubits(1).unwrap();
    let lambda = q_spectral_certificate(&fam).unwrap().lambda1_diff;
    let psi = Superop::of_family(&fam).unwrap();
    let tau = Superop::ideal(2, 1, fam.seeds()).unwrap();
    let norm_sq = |blocks: Vec<CMatrix>| blocks.iter().map(CMatrix::frobenius_sq).sum::<f64>();
    let mut rng = seeded_rng(11);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..500 {
        let x = gaussian_matrix(4, 4, &mut rng);
        let form = norm_sq(psi.apply_blocks(&x)) - norm_sq(tau.apply_blocks(&x));
        let rhs = lambda * x.frobenius_sq();
        assert!(form <= rhs * (1.0 + 1e-9) + 1e-15, "{form} > {rhs}");
        worst = worst.max(form / rhs);
    }
    // the bound is tight on traceless operators, so random draws get close
    assert!(worst > 0.5, "ratio {worst}");
}

#[test]
fn trace_norm_of_state_difference_is_at_most_two() {
    let mut rng = seeded_rng(12);
    for _ in 0..50 {
        let a = random_density(4, 2, &mut rng);
        let b = random_density(4, 4, &mut rng);
        assert!(trace_norm(&(&a - &b)) <= 2.0 + 1e-12);
    }
}
