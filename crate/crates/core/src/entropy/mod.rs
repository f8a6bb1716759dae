//! Min-entropy and collision (Rényi-2) entropy of classical, classical-quantum
//! and fully quantum states.
//!
//! All logarithms are base 2. The conditional min-entropy is computed from the
//! guessing-probability SDP (see [`sdp`]) and reported as `-log₂` of the dual
//! value, which makes it a certified lower bound: a state accepted with
//! `hmin_cond(ρ) ≥ k` really has `H_min(N|R) ≥ k`.

pub mod sdp;

use nalgebra::DMatrix;
use rand::seq::index::sample;

pub use sdp::SdpCertificate;

use crate::error::{Error, Result};
use crate::numerics::{haar_unitary, hermitian_eigs, hermitian_power, partial_trace, tensor, CMatrix, Rng, C64};

/// Tolerance on the normalization of probability vectors and density operators.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted for a density operator.
pub const PSD_TOL: f64 = 1e-10;
/// Relative eigenvalue cutoff defining the support of `ρ_R`.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Largest `|N|·|R|` accepted by [`hmin_cond`].
pub const MAX_SDP_DIM: usize = 64;

/// Probability vector over an alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalState {
    probs: Vec<f64>,
}

impl ClassicalState {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidState("empty distribution".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidState(format!("negative or non-finite probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(size: usize) -> Self {
        Self { probs: vec![1.0 / size as f64; size] }
    }

    pub fn point_mass(size: usize, at: usize) -> Self {
        let mut probs = vec![0.0; size];
        probs[at] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Diagonal density operator with these probabilities.
    pub fn to_density(&self) -> CMatrix {
        CMatrix::from_real_diagonal(&self.probs)
    }

    /// Squared 2-norm `Σ p²`.
    pub fn collision(&self) -> f64 {
        self.probs.iter().map(|p| p * p).sum()
    }
}

/// Structure promised by a [`BipartiteState`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    ClassicalClassical,
    ClassicalQuantum,
    QuantumQuantum,
}

impl StateKind {
    pub fn tag(self) -> &'static str {
        match self {
            StateKind::ClassicalClassical => "cc",
            StateKind::ClassicalQuantum => "cq",
            StateKind::QuantumQuantum => "qq",
        }
    }

    pub fn from_tag(s: &str) -> Result<Self> {
        match s {
            "cc" => Ok(StateKind::ClassicalClassical),
            "cq" => Ok(StateKind::ClassicalQuantum),
            "qq" => Ok(StateKind::QuantumQuantum),
            other => Err(Error::Parse(format!("unknown state kind {other:?}"))),
        }
    }
}

/// Density operator on `N ⊗ R` (N is factor 0).
#[derive(Clone, Debug)]
pub struct BipartiteState {
    rho: CMatrix,
    dim_n: usize,
    dim_r: usize,
    kind: StateKind,
}

impl BipartiteState {
    pub fn new(rho: CMatrix, dim_n: usize, dim_r: usize, kind: StateKind) -> Result<Self> {
        if dim_n == 0 || dim_r == 0 || rho.rows() != dim_n * dim_r || !rho.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator for |N|={dim_n}, |R|={dim_r}",
                rho.rows(),
                rho.cols()
            )));
        }
        let rho = rho.set_factors(vec![dim_n, dim_r])?;
        validate_density(&rho)?;
        let offdiag_tol = 1e-12;
        match kind {
            StateKind::QuantumQuantum => {}
            StateKind::ClassicalQuantum | StateKind::ClassicalClassical => {
                for i in 0..rho.rows() {
                    for j in 0..rho.cols() {
                        let same_n = i / dim_r == j / dim_r;
                        let diag_r = i % dim_r == j % dim_r;
                        let allowed = same_n && (kind == StateKind::ClassicalQuantum || diag_r);
                        if !allowed && rho.get(i, j).norm() > offdiag_tol {
                            return Err(Error::InvalidState(format!(
                                "entry ({i},{j}) breaks the {} structure",
                                kind.tag()
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self { rho, dim_n, dim_r, kind })
    }

    /// `Σ_n p_n |n⟩⟨n| ⊗ ρ_n`.
    pub fn classical_quantum(probs: &[f64], conditionals: &[CMatrix]) -> Result<Self> {
        if probs.len() != conditionals.len() || probs.is_empty() {
            return Err(Error::DimensionMismatch("one conditional state per symbol".into()));
        }
        let dim_n = probs.len();
        let dim_r = conditionals[0].rows();
        let mut data = DMatrix::from_element(dim_n * dim_r, dim_n * dim_r, C64::new(0.0, 0.0));
        for (n, (p, c)) in probs.iter().zip(conditionals).enumerate() {
            if c.rows() != dim_r || c.cols() != dim_r {
                return Err(Error::DimensionMismatch("conditional states differ in size".into()));
            }
            for r in 0..dim_r {
                for s in 0..dim_r {
                    data[(n * dim_r + r, n * dim_r + s)] = c.get(r, s) * *p;
                }
            }
        }
        Self::new(CMatrix::new(data), dim_n, dim_r, StateKind::ClassicalQuantum)
    }

    /// Joint distribution `p(n, r)` as a classical-classical state.
    pub fn classical_classical(joint: &[Vec<f64>]) -> Result<Self> {
        let dim_n = joint.len();
        let dim_r = joint.first().map_or(0, Vec::len);
        let flat: Vec<f64> = joint.iter().flatten().copied().collect();
        if flat.len() != dim_n * dim_r {
            return Err(Error::DimensionMismatch("ragged joint distribution".into()));
        }
        Self::new(CMatrix::from_real_diagonal(&flat), dim_n, dim_r, StateKind::ClassicalClassical)
    }

    pub fn product(rho_n: &CMatrix, rho_r: &CMatrix, kind: StateKind) -> Result<Self> {
        let rho = tensor(rho_n, rho_r);
        Self::new(CMatrix::new(rho.into_inner()), rho_n.rows(), rho_r.rows(), kind)
    }

    /// `|Φ⟩ = Σ_i |ii⟩/√d` on `C^d ⊗ C^d`.
    pub fn maximally_entangled(dim: usize) -> Self {
        let s = 1.0 / (dim as f64).sqrt();
        let mut v = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            v[i * dim + i] = C64::new(s, 0.0);
        }
        let rho = CMatrix::outer(&v, &v).hermitian_part();
        Self::new(rho, dim, dim, StateKind::QuantumQuantum).expect("maximally entangled state")
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn dim_r(&self) -> usize {
        self.dim_r
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn marginal_n(&self) -> CMatrix {
        partial_trace(&self.rho, &[0]).expect("bipartite factors")
    }

    pub fn marginal_r(&self) -> CMatrix {
        partial_trace(&self.rho, &[1]).expect("bipartite factors")
    }

    /// Subnormalized conditional operators `ρ_R^n = ⟨n|ρ|n⟩` for each symbol.
    pub fn conditional_blocks(&self) -> Vec<CMatrix> {
        let dr = self.dim_r;
        (0..self.dim_n).map(|n| CMatrix::from_fn(dr, dr, |r, s| self.rho.get(n * dr + r, n * dr + s))).collect()
    }
}

fn validate_density(rho: &CMatrix) -> Result<()> {
    if !rho.is_hermitian(1e-10) {
        return Err(Error::InvalidState("operator is not Hermitian".into()));
    }
    let tr = rho.trace().re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidState(format!("trace is {tr}")));
    }
    let min = hermitian_eigs(rho)?.min();
    if min < -PSD_TOL {
        return Err(Error::InvalidState(format!("minimum eigenvalue {min}")));
    }
    Ok(())
}

/// `-log₂ max_x p(x)`.
pub fn hmin(p: &ClassicalState) -> f64 {
    let max = p.probs.iter().copied().fold(0.0, f64::max);
    -max.log2()
}

/// `-log₂ λ₁(ρ)`.
pub fn hmin_q(rho: &CMatrix) -> Result<f64> {
    if rho.rows() == 0 {
        return Err(Error::InvalidState("empty state".into()));
    }
    Ok(-hermitian_eigs(rho)?.max().log2())
}

/// Collision entropy `-log₂ tr ρ²` of an unconditioned state.
pub fn h2_q(rho: &CMatrix) -> f64 {
    -rho.frobenius_sq().log2()
}

/// Conditional min-entropy `H_min(N|R)` with the SDP certificate that backs it.
pub fn hmin_cond(state: &BipartiteState) -> Result<(f64, SdpCertificate)> {
    let (dn, dr) = (state.dim_n, state.dim_r);
    if dn * dr > MAX_SDP_DIM {
        return Err(Error::Overflow(format!("|N|·|R| = {} exceeds {MAX_SDP_DIM}", dn * dr)));
    }
    let blocks: Vec<sdp::Block> = match state.kind {
        StateKind::QuantumQuantum => {
            vec![sdp::Block { mult: dn, rho: state.rho.data().clone() }]
        }
        _ => state.conditional_blocks().into_iter().map(|b| sdp::Block { mult: 1, rho: b.into_inner() }).collect(),
    };
    let rho_max = hermitian_eigs(&state.rho)?.max();
    let cert = sdp::solve(&blocks, dr, rho_max, 1e-11)?;
    Ok((-cert.dual_value.log2(), cert))
}

/// Guessing probability of a classical-classical state, `Σ_r max_n p(n, r)`.
pub fn guess_probability_cc(state: &BipartiteState) -> f64 {
    let dr = state.dim_r;
    (0..dr).map(|r| (0..state.dim_n).map(|n| state.rho.get(n * dr + r, n * dr + r).re).fold(0.0, f64::max)).sum()
}

/// Tilted operators entering the collision entropy.
#[derive(Clone, Debug)]
pub struct CollisionData {
    /// `H₂(N|R) = -log₂ ‖ρ̃‖₂²`
    pub value: f64,
    /// `(1 ⊗ ρ_R^{-1/4}) ρ (1 ⊗ ρ_R^{-1/4})`
    pub tilde: CMatrix,
    /// `(1 ⊗ ρ_R^{-1/2}) ρ (1 ⊗ ρ_R^{-1/2})`
    pub hat: CMatrix,
}

/// Conditional collision entropy. Inverse powers of `ρ_R` are taken on its
/// support.
pub fn h2_cond(state: &BipartiteState) -> Result<CollisionData> {
    let rho_r = state.marginal_r();
    if rho_r.max_abs() == 0.0 {
        return Err(Error::InvalidState("reduced state on R is zero".into()));
    }
    let id_n = CMatrix::identity(state.dim_n);
    let quarter = tensor(&id_n, &hermitian_power(&rho_r, -0.25, SUPPORT_CUTOFF)?);
    let half = tensor(&id_n, &hermitian_power(&rho_r, -0.5, SUPPORT_CUTOFF)?);
    let tilde = &(&quarter * &state.rho) * &quarter;
    let hat = &(&half * &state.rho) * &half;
    Ok(CollisionData { value: -tilde.frobenius_sq().log2(), tilde, hat })
}

/// Converts an entropy argument to an integer, rejecting fractional values.
pub fn integer_entropy(k: f64) -> Result<i32> {
    if !k.is_finite() || k.fract() != 0.0 {
        return Err(Error::InvalidArgument(format!("min-entropy {k} is not an integer")));
    }
    Ok(k as i32)
}

fn flat_size(n: u32, k: f64) -> Result<usize> {
    let k = integer_entropy(k)?;
    if k < 0 || k as u32 > n {
        return Err(Error::InvalidArgument(format!("need 0 <= k <= n, got k={k}, n={n}")));
    }
    Ok(1usize << k)
}

/// Flat classical source on `2ⁿ` symbols: `2ᵏ` entries equal to `2⁻ᵏ` on a
/// uniformly random support.
pub fn flat_source(n: u32, k: f64, rng: &mut Rng) -> Result<ClassicalState> {
    let size = flat_size(n, k)?;
    let support = sample(rng, 1usize << n, size).into_vec();
    flat_source_on(n, &support)
}

/// Flat classical source with the given support.
pub fn flat_source_on(n: u32, support: &[usize]) -> Result<ClassicalState> {
    let len = 1usize << n;
    if support.is_empty() || !support.len().is_power_of_two() {
        return Err(Error::InvalidArgument("support size must be a power of two".into()));
    }
    let mut probs = vec![0.0; len];
    let w = 1.0 / support.len() as f64;
    for &s in support {
        if s >= len || probs[s] != 0.0 {
            return Err(Error::InvalidArgument(format!("bad support element {s}")));
        }
        probs[s] = w;
    }
    ClassicalState::new(probs)
}

/// Flat quantum source on `n` qubits: `2ᵏ` eigenvalues `2⁻ᵏ` in a
/// Haar-random eigenbasis.
pub fn flat_source_quantum(n: u32, k: f64, rng: &mut Rng) -> Result<CMatrix> {
    let size = flat_size(n, k)?;
    let basis = haar_unitary(1usize << n, rng);
    flat_source_in_basis(&basis, size)
}

/// `2⁻ᵏ Σ_{j<2ᵏ} |b_j⟩⟨b_j|` for the first `size` columns of `basis`.
pub fn flat_source_in_basis(basis: &CMatrix, size: usize) -> Result<CMatrix> {
    if size == 0 || size > basis.cols() {
        return Err(Error::InvalidArgument(format!("support {size} exceeds basis")));
    }
    let cols = basis.data().columns(0, size).into_owned();
    let rho = CMatrix::new(&cols * cols.adjoint()).scale(1.0 / size as f64);
    Ok(rho.hermitian_part())
}

/// Writes a distribution with `H_min ≥ k` as a convex combination of flat
/// `k`-sources. Each component is returned with its weight.
pub fn flat_decomposition(p: &ClassicalState, k: f64) -> Result<Vec<(f64, ClassicalState)>> {
    let k = integer_entropy(k)?;
    if k < 0 {
        return Err(Error::InvalidArgument("k must be nonnegative".into()));
    }
    let cap = 1usize << k;
    let len = p.len();
    if cap > len || hmin(p) < k as f64 - 1e-12 {
        return Err(Error::Infeasible(format!("H_min = {} is below k = {k}", hmin(p))));
    }
    let mut v = p.probs.clone();
    let mut remaining = 1.0;
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..len).collect();
    for _ in 0..4 * len + 4 {
        if remaining <= 1e-14 {
            break;
        }
        order.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
        let top = &order[..cap];
        let min_top = v[top[cap - 1]];
        let rest_max = if cap < len { v[order[cap]] } else { 0.0 };
        let w = (cap as f64 * min_top).min(remaining - cap as f64 * rest_max);
        if w <= 1e-15 {
            break;
        }
        for &i in top {
            v[i] = (v[i] - w / cap as f64).max(0.0);
        }
        remaining -= w;
        out.push((w, flat_source_on(len.trailing_zeros(), top)?));
    }
    if remaining > 1e-10 {
        return Err(Error::NonConvergence(format!("undecomposed mass {remaining:e}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{random_density, seeded_rng, trace_norm};
    use rand::Rng as _;

    fn uniform_tensor(dn: usize, rho_r: &CMatrix, kind: StateKind) -> BipartiteState {
        BipartiteState::product(&CMatrix::identity(dn).scale(1.0 / dn as f64), rho_r, kind).unwrap()
    }

    #[test]
    fn hmin_classical_cases() {
        assert!((hmin(&ClassicalState::uniform(16)) - 4.0).abs() < 1e-15);
        assert_eq!(hmin(&ClassicalState::point_mass(8, 3)), 0.0);
        assert!(ClassicalState::new(vec![]).is_err());
        assert!(ClassicalState::new(vec![0.5, 0.6]).is_err());
    }

    #[test]
    fn hmin_q_matches_eigensolver() {
        let mut rng = seeded_rng(1);
        let rho = random_density(8, 8, &mut rng);
        let want = -hermitian_eigs(&rho).unwrap().values[0].log2();
        assert!((hmin_q(&rho).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn hmin_cond_uniform_product() {
        let mut rng = seeded_rng(2);
        let rho_r = random_density(2, 2, &mut rng);
        let s = uniform_tensor(4, &rho_r, StateKind::QuantumQuantum);
        let (h, cert) = hmin_cond(&s).unwrap();
        assert!((h - 2.0).abs() < 1e-8, "{h}");
        assert!(cert.gap >= -1e-8 && cert.relative_gap() <= 1e-6);
    }

    #[test]
    fn hmin_cond_orthogonal_conditionals() {
        let s = BipartiteState::classical_quantum(
            &[0.5, 0.5],
            &[CMatrix::basis_projector(2, 0), CMatrix::basis_projector(2, 1)],
        )
        .unwrap();
        let (h, _) = hmin_cond(&s).unwrap();
        assert!(h.abs() < 1e-8, "{h}");
    }

    #[test]
    fn hmin_cond_maximally_entangled() {
        let s = BipartiteState::maximally_entangled(2);
        let (h, cert) = hmin_cond(&s).unwrap();
        assert!((h + 1.0).abs() < 1e-6, "{h}");
        // hand-built dual witness σ_R = 1_R: feasible since 1⊗1 − Φ ⪰ 0 and tr σ = 2
        let witness = tensor(&CMatrix::identity(2), &CMatrix::identity(2));
        let slack = &witness - s.rho();
        assert!(hermitian_eigs(&slack).unwrap().min() > -1e-12);
        assert!((cert.dual_value - 2.0).abs() < 1e-6);
        let slack = &tensor(&CMatrix::identity(2), &cert.dual_witness) - s.rho();
        assert!(hermitian_eigs(&slack).unwrap().min() >= -1e-8);
    }

    #[test]
    fn hmin_cond_matches_helstrom() {
        let mut rng = seeded_rng(3);
        for _ in 0..100 {
            let p0: f64 = rng.random_range(0.05..0.95);
            let r0 = random_density(2, rng.random_range(1..=2), &mut rng);
            let r1 = random_density(2, rng.random_range(1..=2), &mut rng);
            let s = BipartiteState::classical_quantum(&[p0, 1.0 - p0], &[r0.clone(), r1.clone()]).unwrap();
            let helstrom = 0.5 * (1.0 + trace_norm(&(&r0.scale(p0) - &r1.scale(1.0 - p0))));
            let (h, _) = hmin_cond(&s).unwrap();
            assert!((2f64.powf(-h) - helstrom).abs() < 1e-6);
        }
    }

    #[test]
    fn hmin_cond_classical_classical_formula() {
        let mut rng = seeded_rng(4);
        for _ in 0..20 {
            let mut joint: Vec<Vec<f64>> = (0..4).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect();
            let total: f64 = joint.iter().flatten().sum();
            joint.iter_mut().flatten().for_each(|x| *x /= total);
            let s = BipartiteState::classical_classical(&joint).unwrap();
            let (h, _) = hmin_cond(&s).unwrap();
            assert!((h + guess_probability_cc(&s).log2()).abs() < 1e-8);
        }
    }

    #[test]
    fn hmin_cond_product_equals_marginal() {
        let mut rng = seeded_rng(5);
        for _ in 0..10 {
            let rn = random_density(4, 4, &mut rng);
            let rr = random_density(2, 2, &mut rng);
            let s = BipartiteState::product(&rn, &rr, StateKind::QuantumQuantum).unwrap();
            let (h, _) = hmin_cond(&s).unwrap();
            assert!((h - hmin_q(&rn).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn hmin_cond_rejects_large_dims() {
        let s = uniform_tensor(16, &CMatrix::identity(8).scale(0.125), StateKind::QuantumQuantum);
        assert!(matches!(hmin_cond(&s), Err(Error::Overflow(_))));
    }

    #[test]
    fn h2_cond_cases() {
        let mut rng = seeded_rng(6);
        let rho_r = random_density(2, 2, &mut rng);
        let s = uniform_tensor(4, &rho_r, StateKind::QuantumQuantum);
        assert!((h2_cond(&s).unwrap().value - 2.0).abs() < 1e-10);

        let phi = BipartiteState::maximally_entangled(2);
        let h2 = h2_cond(&phi).unwrap();
        assert!((h2.value + 1.0).abs() < 1e-12);
        let want = phi.rho().scale(2f64.sqrt());
        assert!((&h2.tilde - &want).max_abs() < 1e-12);
    }

    #[test]
    fn cq_structure_is_enforced() {
        let phi = BipartiteState::maximally_entangled(2);
        let err = BipartiteState::new(phi.rho().clone(), 2, 2, StateKind::ClassicalQuantum);
        assert!(matches!(err, Err(Error::InvalidState(_))));
    }

    #[test]
    fn flat_sources() {
        let mut rng = seeded_rng(7);
        assert_eq!(flat_source(3, 3.0, &mut rng).unwrap(), ClassicalState::uniform(8));
        let p = flat_source(3, 0.0, &mut rng).unwrap();
        assert_eq!(p.probs().iter().filter(|&&x| x == 1.0).count(), 1);
        for k in 0..=5 {
            let p = flat_source(5, k as f64, &mut rng).unwrap();
            assert_eq!(hmin(&p), k as f64);
            let q = flat_source_quantum(3, (k % 4) as f64, &mut rng).unwrap();
            assert!((hmin_q(&q).unwrap() - (k % 4) as f64).abs() < 1e-9);
        }
        let mixed = flat_source_quantum(2, 2.0, &mut rng).unwrap();
        assert!((&mixed - &CMatrix::identity(4).scale(0.25)).max_abs() < 1e-12);
        assert!(matches!(flat_source(3, 1.5, &mut rng), Err(Error::InvalidArgument(_))));
        assert!(flat_source(3, 4.0, &mut rng).is_err());
    }

    fn remix(parts: &[(f64, ClassicalState)], len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for (w, c) in parts {
            for (o, p) in out.iter_mut().zip(c.probs()) {
                *o += w * p;
            }
        }
        out
    }

    #[test]
    fn flat_decomposition_cases() {
        let flat = flat_source_on(3, &[1, 4]).unwrap();
        let parts = flat_decomposition(&flat, 1.0).unwrap();
        assert_eq!(parts.len(), 1);
        assert!((parts[0].0 - 1.0).abs() < 1e-15);

        let u = ClassicalState::uniform(4);
        let parts = flat_decomposition(&u, 1.0).unwrap();
        assert_eq!(parts.len(), 2);
        let back = remix(&parts, 4);
        assert!(back.iter().all(|x| (x - 0.25).abs() < 1e-12));

        assert!(matches!(flat_decomposition(&ClassicalState::point_mass(4, 0), 1.0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn flat_decomposition_random() {
        let mut rng = seeded_rng(8);
        for k in 0..=4 {
            // cap every entry at 2^-k by mixing with uniform
            let raw: Vec<f64> = (0..64).map(|_| rng.random::<f64>().powi(3)).collect();
            let total: f64 = raw.iter().sum();
            let mut p: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let cap = 2f64.powi(-k);
            let max = p.iter().copied().fold(0.0, f64::max);
            if max > cap {
                let lam = (cap - 1.0 / 64.0) / (max - 1.0 / 64.0);
                p.iter_mut().for_each(|x| *x = lam * *x + (1.0 - lam) / 64.0);
            }
            let total: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= total);
            let state = ClassicalState::new(p.clone()).unwrap();
            let parts = flat_decomposition(&state, k as f64).unwrap();
            let wsum: f64 = parts.iter().map(|(w, _)| w).sum();
            assert!((wsum - 1.0).abs() < 1e-10);
            for (w, c) in &parts {
                assert!(*w >= 0.0);
                assert_eq!(hmin(c), k as f64);
                assert_eq!(c.probs().iter().filter(|&&x| x > 0.0).count(), 1 << k);
            }
            let back = remix(&parts, 64);
            for (a, b) in back.iter().zip(&p) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
