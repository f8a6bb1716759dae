//! Unitary families `{U_1, …, U_|D|}` on n qubits, the channel
//! `ψ(ρ) = (1/|D|) Σ_i tr_E[U_i ρ U_i†] ⊗ |i⟩⟨i|` with `N = M ⊗ E` (the output
//! register M is the leading `m` qubits), and its spectral certificate.
//!
//! Superoperators use column-stacking: `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. Since
//! ψ's output is block diagonal in the seed register it is stored as one
//! `|M|² × |N|²` block per seed.

mod clifford;
mod design;
mod shortseed;
mod witness;

pub use clifford::{clifford_family, clifford_group, CACHE_ENV};
pub use design::{
    haar_moment_coefficients, haar_moment_operator, haar_twirl, moment_term, output_swap, twirl, two_design_check,
};
pub use shortseed::{shortseed_experiment, ShortseedOutcome, ShortseedParams};
pub use witness::{quantum_seed_bound_witness, single_unitary_witness, QuantumSeedBoundWitness, SingleUnitaryWitness};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::certificate::{Mode, SpectralCertificate};
use crate::entropy::BipartiteState;
use crate::error::{Error, Result};
use crate::numerics::{haar_unitary, hermitian_eigs, trace_norm, CMatrix, Rng, C64};

/// Largest qubit count for which superoperators are formed.
pub const MAX_SUPEROP_QUBITS: u32 = 4;
/// Largest `|N|·|R|` accepted by the decoupling check.
pub const MAX_DECOUPLING_DIM: usize = 1 << 10;
const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryFamily {
    n: u32,
    m: u32,
    unitaries: Vec<CMatrix>,
    mode: Mode,
}

impl UnitaryFamily {
    pub fn new(n: u32, m: u32, unitaries: Vec<CMatrix>, mode: Mode) -> Result<Self> {
        if m > n || n > 10 {
            return Err(Error::InvalidArgument(format!("need m <= n <= 10, got n={n}, m={m}")));
        }
        if unitaries.is_empty() {
            return Err(Error::InvalidArgument("family has no members".into()));
        }
        let dim = 1usize << n;
        for (i, u) in unitaries.iter().enumerate() {
            if u.rows() != dim || u.cols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "member {i} is {}x{}, expected {dim}x{dim}",
                    u.rows(),
                    u.cols()
                )));
            }
            let dev = (&(&u.adjoint() * u) - &CMatrix::identity(dim)).max_abs();
            if dev > UNITARY_TOL {
                return Err(Error::InvalidArgument(format!("member {i} is not unitary ({dev:e})")));
            }
        }
        let unitaries = unitaries.into_iter().map(|u| CMatrix::new(u.into_inner())).collect();
        Ok(Self { n, m, unitaries, mode })
    }

    /// `t` independent Haar-random unitaries.
    pub fn haar(n: u32, m: u32, t: usize, rng: &mut Rng) -> Result<Self> {
        let us = (0..t).map(|_| haar_unitary(1 << n, rng)).collect();
        Self::new(n, m, us, Mode::Strong)
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// Same unitaries with a different output register size.
    pub fn with_output_qubits(mut self, m: u32) -> Result<Self> {
        if m > self.n {
            return Err(Error::InvalidArgument(format!("need m <= n, got m={m}")));
        }
        self.m = m;
        Ok(self)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn unitaries(&self) -> &[CMatrix] {
        &self.unitaries
    }

    pub fn seeds(&self) -> usize {
        self.unitaries.len()
    }

    /// Seed length `log₂ |D|`, fractional for non-power-of-two families.
    pub fn d(&self) -> f64 {
        (self.seeds() as f64).log2()
    }

    pub fn dim_n(&self) -> usize {
        1 << self.n
    }

    pub fn dim_m(&self) -> usize {
        1 << self.m
    }

    pub fn dim_e(&self) -> usize {
        1 << (self.n - self.m)
    }
}

/// `tr_E[U A A† U†]` for `A` with `|N|` rows; the caller folds any weight
/// into `A`.
pub(crate) fn reduced_output_sqrt(u: &CMatrix, a: &DMatrix<C64>, dm: usize) -> CMatrix {
    let b = u.data() * a;
    let de = b.nrows() / dm;
    CMatrix::from_fn(dm, dm, |x, y| {
        let mut acc = C64::new(0.0, 0.0);
        for e in 0..de {
            let (rx, ry) = (x * de + e, y * de + e);
            for j in 0..b.ncols() {
                acc += b[(rx, j)] * b[(ry, j)].conj();
            }
        }
        acc
    })
}

/// `tr_E[U ρ U†]`.
pub fn reduced_output(u: &CMatrix, rho: &CMatrix, dm: usize) -> CMatrix {
    let out = &(u * rho) * &u.adjoint();
    let de = out.rows() / dm;
    CMatrix::from_fn(dm, dm, |x, y| (0..de).map(|e| out.get(x * de + e, y * de + e)).sum())
}

/// `tr_E[(U ⊗ 1_R) ρ (U ⊗ 1_R)†]` on `M ⊗ R`.
pub fn reduced_output_with_side(u: &CMatrix, rho: &CMatrix, dm: usize, dr: usize) -> CMatrix {
    let dn = u.rows();
    let de = dn / dm;
    // left multiply by U ⊗ 1 without forming the Kronecker product
    let left = |x: &DMatrix<C64>| {
        let mut out = DMatrix::from_element(dn * dr, x.ncols(), C64::new(0.0, 0.0));
        for y in 0..dn {
            for k in 0..dn {
                let uyk = u.get(y, k);
                if uyk == C64::new(0.0, 0.0) {
                    continue;
                }
                for r in 0..dr {
                    let dst = y * dr + r;
                    let src = k * dr + r;
                    for c in 0..x.ncols() {
                        out[(dst, c)] += uyk * x[(src, c)];
                    }
                }
            }
        }
        out
    };
    // (U⊗1) ρ (U⊗1)† as (U⊗1) [(U⊗1) ρ]† for Hermitian ρ
    let half = left(rho.data());
    let full = left(&half.adjoint());
    let side = dm * dr;
    CMatrix::from_fn(side, side, |p, q| {
        let (a, r) = (p / dr, p % dr);
        let (b, s) = (q / dr, q % dr);
        (0..de).map(|e| full[((a * de + e) * dr + r, (b * de + e) * dr + s)]).sum()
    })
}

/// `|M|² × |N|²` matrix of `X ↦ tr_E[U X U†]`.
pub fn channel_block(u: &CMatrix, dm: usize) -> DMatrix<C64> {
    let dn = u.rows();
    let de = dn / dm;
    let mut out = DMatrix::from_element(dm * dm, dn * dn, C64::new(0.0, 0.0));
    for c in 0..dn {
        for r in 0..dn {
            let col = r + c * dn;
            for b in 0..dm {
                for a in 0..dm {
                    let mut acc = C64::new(0.0, 0.0);
                    for e in 0..de {
                        acc += u.get(a * de + e, r) * u.get(b * de + e, c).conj();
                    }
                    out[(a + b * dm, col)] = acc;
                }
            }
        }
    }
    out
}

/// Block-diagonal superoperator from operators on an input space of
/// dimension `dim_in` to `⊕_i` operators of dimension `dim_out`.
#[derive(Clone, Debug)]
pub struct Superop {
    dim_in: usize,
    dim_out: usize,
    blocks: Vec<DMatrix<C64>>,
}

fn vec_of_identity(dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim * dim, 1, |r, _| if r % (dim + 1) == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

impl Superop {
    /// ψ of a unitary family.
    pub fn of_family(fam: &UnitaryFamily) -> Result<Self> {
        check_superop_size(fam.n)?;
        let w = 1.0 / fam.seeds() as f64;
        let blocks = fam.unitaries.iter().map(|u| channel_block(u, fam.dim_m()) * C64::new(w, 0.0)).collect();
        Ok(Self { dim_in: fam.dim_n(), dim_out: fam.dim_m(), blocks })
    }

    /// The ideal map `ρ ↦ tr ρ · 1_M/|M| ⊗ 1_D/|D|`.
    pub fn ideal(n: u32, m: u32, seeds: usize) -> Result<Self> {
        check_superop_size(n)?;
        let (dn, dm) = (1usize << n, 1usize << m);
        let w = C64::new(1.0 / (dm * seeds) as f64, 0.0);
        let block = vec_of_identity(dm) * vec_of_identity(dn).adjoint() * w;
        Ok(Self { dim_in: dn, dim_out: dm, blocks: vec![block; seeds] })
    }

    pub fn seeds(&self) -> usize {
        self.blocks.len()
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// Stacked `|D||M|² × |N|²` matrix.
    pub fn matrix(&self) -> CMatrix {
        let h = self.dim_out * self.dim_out;
        let mut out = DMatrix::from_element(h * self.seeds(), self.dim_in * self.dim_in, C64::new(0.0, 0.0));
        for (i, b) in self.blocks.iter().enumerate() {
            out.rows_mut(i * h, h).copy_from(b);
        }
        CMatrix::new(out)
    }

    /// Output blocks `ψ_i(X)`, one per seed.
    pub fn apply_blocks(&self, x: &CMatrix) -> Vec<CMatrix> {
        let v = DMatrix::from_column_slice(x.rows() * x.cols(), 1, &x.vectorize());
        self.blocks.iter().map(|b| CMatrix::unvectorize((b * &v).as_slice(), self.dim_out, self.dim_out)).collect()
    }

    /// `ψ(X)` on `M ⊗ D`, seed register last.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let seeds = self.seeds();
        let blocks = self.apply_blocks(x);
        let dim = self.dim_out * seeds;
        let mut out = CMatrix::zeros(dim, dim);
        for (i, b) in blocks.iter().enumerate() {
            for a in 0..self.dim_out {
                for c in 0..self.dim_out {
                    out.data_mut()[(a * seeds + i, c * seeds + i)] = b.get(a, c);
                }
            }
        }
        out
    }

    /// `ψ†(Y)` for `Y` on `M ⊗ D`; only its seed-diagonal blocks contribute.
    pub fn apply_adjoint(&self, y: &CMatrix) -> CMatrix {
        let seeds = self.seeds();
        let mut acc = DMatrix::from_element(self.dim_in * self.dim_in, 1, C64::new(0.0, 0.0));
        for (i, b) in self.blocks.iter().enumerate() {
            let yi = CMatrix::from_fn(self.dim_out, self.dim_out, |a, c| y.get(a * seeds + i, c * seeds + i));
            let v = DMatrix::from_column_slice(self.dim_out * self.dim_out, 1, &yi.vectorize());
            acc += b.adjoint() * v;
        }
        CMatrix::unvectorize(acc.as_slice(), self.dim_in, self.dim_in)
    }

    /// `self† ∘ other` as an `|N|² × |N|²` matrix.
    pub fn adjoint_compose(&self, other: &Superop) -> Result<CMatrix> {
        if self.seeds() != other.seeds() || self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(Error::DimensionMismatch("superoperator shapes differ".into()));
        }
        let n2 = self.dim_in * self.dim_in;
        let mut acc = DMatrix::from_element(n2, n2, C64::new(0.0, 0.0));
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            acc += a.adjoint() * b;
        }
        Ok(CMatrix::new(acc))
    }
}

fn check_superop_size(n: u32) -> Result<()> {
    if n > MAX_SUPEROP_QUBITS {
        return Err(Error::Overflow(format!("superoperators need n <= {MAX_SUPEROP_QUBITS}, got {n}")));
    }
    Ok(())
}

/// `ψ†ψ` accumulated without storing the per-seed blocks.
pub fn superop_gram(fam: &UnitaryFamily) -> Result<CMatrix> {
    check_superop_size(fam.n)?;
    let n2 = fam.dim_n() * fam.dim_n();
    let mut acc = DMatrix::from_element(n2, n2, C64::new(0.0, 0.0));
    for u in &fam.unitaries {
        let b = channel_block(u, fam.dim_m());
        acc += b.adjoint() * b;
    }
    let w = 1.0 / (fam.seeds() * fam.seeds()) as f64;
    Ok(CMatrix::new(acc).scale(w).hermitian_part())
}

/// `λ₁(ψ†ψ − τ†τ)` and `λ₂(ψ†ψ)` of a unitary family.
pub fn q_spectral_certificate(fam: &UnitaryFamily) -> Result<SpectralCertificate> {
    let gram = superop_gram(fam)?;
    let one = vec_of_identity(fam.dim_n());
    let tau = CMatrix::new(&one * one.adjoint()).scale(1.0 / (fam.dim_m() * fam.seeds()) as f64);
    let diff = &gram - &tau;
    let psi_eigs = hermitian_eigs(&gram)?;
    let lambda1_diff = hermitian_eigs(&diff)?.max();
    let lambda2_psi = psi_eigs.values.get(1).copied().unwrap_or(0.0);
    // unitaries send the maximally mixed input to the maximally mixed output
    let mixed = CMatrix::identity(fam.dim_n()).scale(1.0 / fam.dim_n() as f64);
    let target = CMatrix::identity(fam.dim_m()).scale(1.0 / fam.dim_m() as f64);
    let balanced = fam.unitaries.iter().all(|u| (&reduced_output(u, &mixed, fam.dim_m()) - &target).max_abs() < 1e-10);
    Ok(SpectralCertificate { lambda1_diff, lambda2_psi, balanced })
}

/// The bound `|M|/(|N||D|)` that every exact 2-design meets.
pub fn design_lambda_bound(fam: &UnitaryFamily) -> f64 {
    fam.dim_m() as f64 / (fam.dim_n() * fam.seeds()) as f64
}

/// Trace distance of the family's output from `1_M/|M| ⊗ ρ_R (⊗ 1_D/|D|)`, in
/// the family's mode.
pub fn decoupling_error(fam: &UnitaryFamily, state: &BipartiteState) -> Result<f64> {
    decoupling_error_in(fam, state, fam.mode)
}

pub fn decoupling_error_in(fam: &UnitaryFamily, state: &BipartiteState, mode: Mode) -> Result<f64> {
    if state.dim_n() != fam.dim_n() {
        return Err(Error::DimensionMismatch(format!(
            "state has |N| = {}, family acts on {}",
            state.dim_n(),
            fam.dim_n()
        )));
    }
    if state.dim_n() * state.dim_r() > MAX_DECOUPLING_DIM {
        return Err(Error::Overflow(format!("|N|·|R| exceeds {MAX_DECOUPLING_DIM}")));
    }
    let (dm, dr) = (fam.dim_m(), state.dim_r());
    let target = crate::numerics::tensor(&CMatrix::identity(dm).scale(1.0 / dm as f64), &state.marginal_r());
    let target = CMatrix::new(target.into_inner());
    let outputs = |u: &CMatrix| reduced_output_with_side(u, state.rho(), dm, dr);
    let seeds = fam.seeds() as f64;
    match mode {
        Mode::Strong => {
            let norms: Vec<f64> = fam.unitaries.par_iter().map(|u| trace_norm(&(&outputs(u) - &target))).collect();
            Ok(norms.iter().sum::<f64>() / seeds)
        }
        Mode::Weak => {
            let mut avg = CMatrix::zeros(dm * dr, dm * dr);
            for u in &fam.unitaries {
                avg = &avg + &outputs(u);
            }
            Ok(trace_norm(&(&avg.scale(1.0 / seeds) - &target)))
        }
    }
}
