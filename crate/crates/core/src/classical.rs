//! Seeded function families `{f_1, …, f_|D|}: {0,1}ⁿ → {0,1}ᵐ`, the linear
//! map ψ they induce on distributions, and the spectral certificate
//! `λ₁(ψᵀψ − τᵀτ)`.
//!
//! ψ maps a distribution `P` on N to the distribution of `(f_i(x), i)` on
//! `M ⊗ D` (output symbol is the major index). τ maps `P` to
//! `(Σ P) · u_M ⊗ u_D`.

use nalgebra::DMatrix;

use crate::certificate::{Mode, SpectralCertificate};
use crate::entropy::{integer_entropy, BipartiteState, ClassicalState, StateKind};
use crate::error::{Error, Result};
use crate::gf2n::{Gf2n, MAX_DEGREE};
use crate::numerics::{trace_norm, CMatrix, C64};

/// Largest input size (bits) for which dense spectral certificates are built.
pub const MAX_CERTIFY_BITS: u32 = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionFamily {
    n: u32,
    m: u32,
    tables: Vec<Vec<u32>>,
    mode: Mode,
    permutation_based: bool,
}

impl FunctionFamily {
    pub fn new(n: u32, m: u32, tables: Vec<Vec<u32>>, mode: Mode) -> Result<Self> {
        if m > n || n > 20 {
            return Err(Error::InvalidArgument(format!("need m <= n <= 20, got n={n}, m={m}")));
        }
        if tables.is_empty() {
            return Err(Error::InvalidArgument("family has no members".into()));
        }
        let len = 1usize << n;
        for (i, t) in tables.iter().enumerate() {
            if t.len() != len {
                return Err(Error::DimensionMismatch(format!("function {i} has {} entries, expected {len}", t.len())));
            }
            if let Some(y) = t.iter().find(|&&y| (y as u64) >> m != 0) {
                return Err(Error::InvalidArgument(format!("function {i} outputs {y}, outside {m} bits")));
            }
        }
        Ok(Self { n, m, tables, mode, permutation_based: false })
    }

    /// Marks the family as restrictions of permutations; fails unless every
    /// member is balanced, which is exactly that property.
    pub fn into_permutation_based(mut self) -> Result<Self> {
        if !self.is_balanced() {
            return Err(Error::InvalidArgument("members are not restrictions of bijections".into()));
        }
        self.permutation_based = true;
        Ok(self)
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
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

    pub fn permutation_based(&self) -> bool {
        self.permutation_based
    }

    pub fn tables(&self) -> &[Vec<u32>] {
        &self.tables
    }

    pub fn input_size(&self) -> usize {
        1 << self.n
    }

    pub fn output_size(&self) -> usize {
        1 << self.m
    }

    /// `|D|`.
    pub fn seeds(&self) -> usize {
        self.tables.len()
    }

    /// Seed length `log₂ |D|`; fractional when `|D|` is not a power of two.
    pub fn d(&self) -> f64 {
        (self.seeds() as f64).log2()
    }

    pub fn eval(&self, seed: usize, x: usize) -> usize {
        self.tables[seed][x] as usize
    }

    pub fn preimage_sizes(&self, seed: usize) -> Vec<usize> {
        let mut counts = vec![0usize; self.output_size()];
        for &y in &self.tables[seed] {
            counts[y as usize] += 1;
        }
        counts
    }

    pub fn is_balanced(&self) -> bool {
        let want = self.input_size() / self.output_size();
        (0..self.seeds()).all(|i| self.preimage_sizes(i).iter().all(|&c| c == want))
    }

    /// Output distribution `P_{f_i(N)}` of one member.
    pub fn push_forward(&self, seed: usize, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.output_size()];
        for (x, &px) in p.iter().enumerate() {
            out[self.eval(seed, x)] += px;
        }
        out
    }
}

/// The `|M||D| × |N|` column-stochastic matrix of ψ; row `y·|D| + i`.
pub fn psi_matrix(fam: &FunctionFamily) -> CMatrix {
    let seeds = fam.seeds();
    let w = C64::new(1.0 / seeds as f64, 0.0);
    let mut data = DMatrix::from_element(fam.output_size() * seeds, fam.input_size(), C64::new(0.0, 0.0));
    for i in 0..seeds {
        for x in 0..fam.input_size() {
            data[(fam.eval(i, x) * seeds + i, x)] += w;
        }
    }
    CMatrix::new(data)
}

/// The `|M||D| × |N|` matrix of τ, every entry `1/(|M||D|)`.
pub fn tau_matrix(n: u32, m: u32, seeds: usize) -> CMatrix {
    let rows = (1usize << m) * seeds;
    let v = C64::new(1.0 / rows as f64, 0.0);
    CMatrix::new(DMatrix::from_element(rows, 1usize << n, v))
}

/// `ψᵀψ` as a dense real matrix: entry `(j, k)` is the fraction of seeds with
/// `f_i(j) = f_i(k)`, divided by `|D|`.
pub fn psi_gram(fam: &FunctionFamily) -> DMatrix<f64> {
    let len = fam.input_size();
    let seeds = fam.seeds();
    let mut counts = DMatrix::<f64>::zeros(len, len);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); fam.output_size()];
    for i in 0..seeds {
        buckets.iter_mut().for_each(Vec::clear);
        for x in 0..len {
            buckets[fam.eval(i, x)].push(x);
        }
        for b in &buckets {
            for &j in b {
                for &k in b {
                    counts[(j, k)] += 1.0;
                }
            }
        }
    }
    counts / (seeds * seeds) as f64
}

/// Spectral certificate of a classical family.
pub fn spectral_certificate(fam: &FunctionFamily) -> Result<SpectralCertificate> {
    if fam.n > MAX_CERTIFY_BITS {
        return Err(Error::Overflow(format!("spectral certificate needs n <= {MAX_CERTIFY_BITS}, got {}", fam.n)));
    }
    let gram = psi_gram(fam);
    let shift = 1.0 / (fam.output_size() * fam.seeds()) as f64;
    let diff = gram.map(|g| g - shift);

    let mut psi_eigs: Vec<f64> = gram.symmetric_eigenvalues().iter().copied().collect();
    psi_eigs.sort_by(|a, b| b.total_cmp(a));
    let lambda1_diff = diff.symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lambda2_psi = psi_eigs.get(1).copied().unwrap_or(0.0);
    Ok(SpectralCertificate { lambda1_diff, lambda2_psi, balanced: fam.is_balanced() })
}

/// `f_a(x)` = the top `m` bits of `a · x` in GF(2ⁿ), for every `a` (so `d = n`).
pub fn hash_family(n: u32, m: u32) -> Result<FunctionFamily> {
    if m > n {
        return Err(Error::InvalidArgument(format!("need m <= n, got n={n}, m={m}")));
    }
    let field = Gf2n::new(n)?;
    let shift = n - m;
    let tables = (0..field.order()).map(|a| (0..field.order()).map(|x| field.mul(a, x) >> shift).collect()).collect();
    FunctionFamily::new(n, m, tables, Mode::Strong)
}

/// Affine permutations `x ↦ a·x + b` of GF(2ⁿ), `a ≠ 0`, restricted to their
/// top `m` output bits. `|D| = 2ⁿ(2ⁿ − 1)`.
pub fn pairwise_permutations(n: u32, m: u32) -> Result<FunctionFamily> {
    if m > n {
        return Err(Error::InvalidArgument(format!("need m <= n, got n={n}, m={m}")));
    }
    let field = Gf2n::new(n)?;
    let shift = n - m;
    let mut tables = Vec::with_capacity((field.order() * (field.order() - 1)) as usize);
    for a in 1..field.order() {
        for b in 0..field.order() {
            tables.push((0..field.order()).map(|x| field.add(field.mul(a, x), b) >> shift).collect());
        }
    }
    FunctionFamily::new(n, m, tables, Mode::Strong)?.into_permutation_based()
}

/// Worst pairwise collision rate of a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CollisionStats {
    /// `max_{j≠k} #{i : f_i(j) = f_i(k)}`
    pub max_collisions: usize,
    pub seeds: usize,
    pub output_size: usize,
}

impl CollisionStats {
    pub fn frequency(&self) -> f64 {
        self.max_collisions as f64 / self.seeds as f64
    }

    /// Exact integer test of `collisions/|D| ≤ 1/|M|`.
    pub fn is_two_universal(&self) -> bool {
        self.max_collisions * self.output_size <= self.seeds
    }
}

pub fn two_universal_check(fam: &FunctionFamily) -> Result<CollisionStats> {
    if fam.n > MAX_DEGREE {
        return Err(Error::Overflow(format!("collision check needs n <= {MAX_DEGREE}")));
    }
    let len = fam.input_size();
    let mut counts = vec![0u32; len * len];
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); fam.output_size()];
    for i in 0..fam.seeds() {
        buckets.iter_mut().for_each(Vec::clear);
        for x in 0..len {
            buckets[fam.eval(i, x)].push(x);
        }
        for b in &buckets {
            for (a, &j) in b.iter().enumerate() {
                for &k in &b[a + 1..] {
                    counts[j * len + k] += 1;
                }
            }
        }
    }
    let mut max = 0;
    for j in 0..len {
        for k in j + 1..len {
            max = max.max(counts[j * len + k].max(counts[k * len + j]));
        }
    }
    Ok(CollisionStats { max_collisions: max as usize, seeds: fam.seeds(), output_size: fam.output_size() })
}

/// Checks that for all `x ≠ x'` and `y ≠ y'` exactly a `1/(|N|(|N|−1))`
/// fraction of members sends `(x, x')` to `(y, y')`. Needs `m = n`.
pub fn is_pairwise_independent(fam: &FunctionFamily) -> Result<bool> {
    if fam.m != fam.n || fam.n > 6 {
        return Err(Error::InvalidArgument("pairwise check needs m = n <= 6".into()));
    }
    let len = fam.input_size();
    let pairs = len * (len - 1);
    if !fam.seeds().is_multiple_of(pairs) {
        return Ok(false);
    }
    let want = (fam.seeds() / pairs) as u32;
    let mut counts = vec![0u32; len * len];
    for x in 0..len {
        for xp in 0..len {
            if x == xp {
                continue;
            }
            counts.iter_mut().for_each(|c| *c = 0);
            for i in 0..fam.seeds() {
                counts[fam.eval(i, x) * len + fam.eval(i, xp)] += 1;
            }
            for y in 0..len {
                for yp in 0..len {
                    let c = counts[y * len + yp];
                    if (y == yp && c != 0) || (y != yp && c != want) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Distance to uniform of the extractor output on a classical source, in the
/// family's mode (strong keeps the seed register).
pub fn classical_error(fam: &FunctionFamily, p: &ClassicalState) -> Result<f64> {
    classical_error_in(fam, p, fam.mode)
}

pub fn classical_error_in(fam: &FunctionFamily, p: &ClassicalState, mode: Mode) -> Result<f64> {
    if p.len() != fam.input_size() {
        return Err(Error::DimensionMismatch("source size differs from 2^n".into()));
    }
    let seeds = fam.seeds() as f64;
    let out = fam.output_size() as f64;
    match mode {
        Mode::Strong => Ok((0..fam.seeds())
            .map(|i| {
                fam.push_forward(i, p.probs()).iter().map(|q| (q / seeds - 1.0 / (out * seeds)).abs()).sum::<f64>()
            })
            .sum()),
        Mode::Weak => {
            let mut avg = vec![0.0; fam.output_size()];
            for i in 0..fam.seeds() {
                for (a, q) in avg.iter_mut().zip(fam.push_forward(i, p.probs())) {
                    *a += q / seeds;
                }
            }
            Ok(avg.iter().map(|q| (q - 1.0 / out).abs()).sum())
        }
    }
}

/// Trace distance of the extractor output from `u_M ⊗ ρ_R (⊗ u_D)` for a
/// classical-quantum input, in the family's mode.
pub fn quantum_proof_error(fam: &FunctionFamily, state: &BipartiteState) -> Result<f64> {
    quantum_proof_error_in(fam, state, fam.mode)
}

pub fn quantum_proof_error_in(fam: &FunctionFamily, state: &BipartiteState, mode: Mode) -> Result<f64> {
    if state.kind() == StateKind::QuantumQuantum {
        return Err(Error::InvalidState("quantum-proof error needs a classical-quantum state".into()));
    }
    if state.dim_n() != fam.input_size() {
        return Err(Error::DimensionMismatch("state alphabet differs from 2^n".into()));
    }
    if state.dim_n() * state.dim_r() > 1 << 10 {
        return Err(Error::Overflow("|N|·|R| exceeds 2^10".into()));
    }
    let blocks = state.conditional_blocks();
    let rho_r = state.marginal_r();
    let dr = state.dim_r();
    let seeds = fam.seeds() as f64;
    let out = fam.output_size() as f64;

    let grouped = |i: usize| {
        let mut acc = vec![CMatrix::zeros(dr, dr); fam.output_size()];
        for (x, b) in blocks.iter().enumerate() {
            let y = fam.eval(i, x);
            acc[y] = &acc[y] + b;
        }
        acc
    };
    match mode {
        Mode::Strong => {
            let target = rho_r.scale(1.0 / (out * seeds));
            Ok((0..fam.seeds())
                .map(|i| grouped(i).iter().map(|g| trace_norm(&(&g.scale(1.0 / seeds) - &target))).sum::<f64>())
                .sum())
        }
        Mode::Weak => {
            let mut avg = vec![CMatrix::zeros(dr, dr); fam.output_size()];
            for i in 0..fam.seeds() {
                for (a, g) in avg.iter_mut().zip(grouped(i)) {
                    *a = &*a + &g.scale(1.0 / seeds);
                }
            }
            let target = rho_r.scale(1.0 / out);
            Ok(avg.iter().map(|a| trace_norm(&(a - &target))).sum())
        }
    }
}

/// Flat source concentrated on few preimages of `f_1`, certifying a lower
/// bound on `λ₁(ψᵀψ − τᵀτ)`.
#[derive(Clone, Debug)]
pub struct SeedBoundWitness {
    pub source: ClassicalState,
    /// `|S| = ⌈2ᵏ |M| / |N|⌉`
    pub support_size: usize,
    /// number of distinct outputs of `f_1` on the source
    pub image_support: usize,
    /// `(2ᵏ/|D|²) · |S| · (1/|S| − 1/|M|)²`
    pub lower_bound: f64,
    /// `2ᵏ ‖(ψ − τ)(Q)‖₂²`, itself at most `λ₁`
    pub rayleigh: f64,
    pub lambda1_diff: f64,
}

/// `⌈2ᵏ·|M|/|N|⌉` for integer `k ≥ 0`, in exact integer arithmetic.
pub(crate) fn witness_support(n: u32, m: u32, k: i32) -> usize {
    let e = k + m as i32 - n as i32;
    if e >= 0 {
        1usize << e
    } else {
        1
    }
}

pub(crate) fn seed_bound_formula(k: i32, seeds: usize, support: usize, out: usize) -> f64 {
    let s = support as f64;
    2f64.powi(k) / (seeds as f64).powi(2) * s * (1.0 / s - 1.0 / out as f64).powi(2)
}

pub fn seed_bound_witness(fam: &FunctionFamily, k: f64) -> Result<SeedBoundWitness> {
    let k = integer_entropy(k)?;
    if k < 0 || k as u32 > fam.n {
        return Err(Error::Infeasible(format!("need 0 <= k <= n, got k={k}")));
    }
    let want = 1usize << k;
    let support_size = witness_support(fam.n, fam.m, k);

    // fill 2^k inputs from the largest preimages of f_1
    let sizes = fam.preimage_sizes(0);
    let mut outputs: Vec<usize> = (0..fam.output_size()).collect();
    outputs.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let mut chosen = Vec::with_capacity(want);
    let mut used = 0;
    for &y in &outputs {
        if chosen.len() == want {
            break;
        }
        used += 1;
        for x in 0..fam.input_size() {
            if fam.eval(0, x) == y && chosen.len() < want {
                chosen.push(x);
            }
        }
    }
    if used > support_size {
        return Err(Error::Infeasible(format!(
            "f_1 needs {used} outputs to host a flat {k}-source, more than |S| = {support_size}"
        )));
    }
    let source = crate::entropy::flat_source_on(fam.n, &chosen)?;

    let seeds = fam.seeds();
    let out = fam.output_size();
    let dist: f64 = (0..seeds)
        .map(|i| fam.push_forward(i, source.probs()).iter().map(|q| (q - 1.0 / out as f64).powi(2)).sum::<f64>())
        .sum::<f64>()
        / (seeds * seeds) as f64;
    let cert = spectral_certificate(fam)?;
    Ok(SeedBoundWitness {
        source,
        support_size,
        image_support: used,
        lower_bound: seed_bound_formula(k, seeds, support_size, out),
        rayleigh: 2f64.powi(k) * dist,
        lambda1_diff: cert.lambda1_diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::epsilon_for_k;
    use crate::entropy::flat_source;
    use crate::numerics::{random_density, seeded_rng};
    use rand::Rng as _;

    fn identity_family(n: u32) -> FunctionFamily {
        FunctionFamily::new(n, n, vec![(0..1u32 << n).collect()], Mode::Strong).unwrap()
    }

    fn random_family(n: u32, m: u32, seeds: usize, rng: &mut crate::numerics::Rng) -> FunctionFamily {
        let tables = (0..seeds).map(|_| (0..1usize << n).map(|_| rng.random_range(0..1u32 << m)).collect()).collect();
        FunctionFamily::new(n, m, tables, Mode::Strong).unwrap()
    }

    #[test]
    fn psi_degenerate_cases() {
        let f = hash_family(3, 0).unwrap();
        let psi = psi_matrix(&f);
        let tau = tau_matrix(3, 0, f.seeds());
        assert!((&psi - &tau).max_abs() < 1e-15);

        let id = identity_family(3);
        assert!((&psi_matrix(&id) - &CMatrix::identity(8)).max_abs() == 0.0);
    }

    #[test]
    fn psi_is_stochastic_and_matches_empirical_distribution() {
        let mut rng = seeded_rng(1);
        let f = random_family(4, 2, 5, &mut rng);
        let psi = psi_matrix(&f);
        for x in 0..16 {
            let col: f64 = (0..psi.rows()).map(|r| psi.get(r, x).re).sum();
            assert!((col - 1.0).abs() < 1e-12);
            for i in 0..5 {
                assert!((psi.get(f.eval(i, x) * 5 + i, x).re - 0.2).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn certificate_simple_cases() {
        let c = spectral_certificate(&hash_family(4, 0).unwrap()).unwrap();
        assert!(c.lambda1_diff.abs() < 1e-12);
        let c = spectral_certificate(&identity_family(3)).unwrap();
        assert!((c.lambda1_diff - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hash_certificate_within_inverse_seed_count() {
        let f = hash_family(4, 2).unwrap();
        let c = spectral_certificate(&f).unwrap();
        assert!(c.lambda1_diff <= 1.0 / 16.0 + 1e-9);
        assert!(c.lambda1_diff >= -1e-10);
        let b = epsilon_for_k(&c, 3.0, 2, f.d());
        assert!(b.epsilon <= 4.0 / 8.0 + 1e-9);
    }

    #[test]
    fn certificate_from_gram_matches_psi_product() {
        let mut rng = seeded_rng(2);
        let f = random_family(3, 1, 4, &mut rng);
        let psi = psi_matrix(&f);
        let dense = &psi.transpose() * &psi;
        let gram = psi_gram(&f);
        for j in 0..8 {
            for k in 0..8 {
                assert!((dense.get(j, k).re - gram[(j, k)]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn quadratic_form_identity() {
        let mut rng = seeded_rng(3);
        let f = random_family(4, 2, 3, &mut rng);
        let gram = psi_gram(&f);
        let shift = 1.0 / (4.0 * 3.0);
        let psi = psi_matrix(&f);
        let tau = tau_matrix(4, 2, 3);
        for _ in 0..20 {
            let p: Vec<f64> = (0..16).map(|_| rng.random::<f64>()).collect();
            let quad: f64 = (0..16)
                .flat_map(|j| (0..16).map(move |k| (j, k)))
                .map(|(j, k)| p[j] * (gram[(j, k)] - shift) * p[k])
                .sum();
            let pv = CMatrix::from_fn(16, 1, |r, _| C64::new(p[r], 0.0));
            let diff = &(&psi - &tau) * &pv;
            assert!((quad - diff.frobenius_sq()).abs() < 1e-10);
        }
    }

    #[test]
    fn hash_family_is_two_universal_small() {
        for (n, m, bound) in [(2u32, 1u32, 0.5), (4, 2, 0.25)] {
            let stats = two_universal_check(&hash_family(n, m).unwrap()).unwrap();
            assert!(stats.is_two_universal());
            assert!(stats.frequency() <= bound);
        }
    }

    #[test]
    fn collision_check_flags_constant_functions() {
        let f = FunctionFamily::new(2, 1, vec![vec![0; 4], vec![1; 4]], Mode::Strong).unwrap();
        let stats = two_universal_check(&f).unwrap();
        assert_eq!(stats.frequency(), 1.0);
        assert!(!stats.is_two_universal());
        let inj = identity_family(3);
        assert_eq!(two_universal_check(&inj).unwrap().max_collisions, 0);
    }

    #[test]
    fn brute_force_two_universality_oracle() {
        // direct triple loop over (a, j, k)
        let f = hash_family(3, 1).unwrap();
        for j in 0..8 {
            for k in 0..8 {
                if j == k {
                    continue;
                }
                let c = (0..8).filter(|&a| f.eval(a, j) == f.eval(a, k)).count();
                assert!(c * 2 <= 8);
            }
        }
    }

    #[test]
    fn affine_permutations() {
        let f = pairwise_permutations(2, 2).unwrap();
        assert_eq!(f.seeds(), 12);
        assert!(is_pairwise_independent(&f).unwrap());
        for t in f.tables() {
            let mut s = t.clone();
            s.sort_unstable();
            assert_eq!(s, vec![0, 1, 2, 3]);
        }
        let f3 = pairwise_permutations(3, 3).unwrap();
        let c = spectral_certificate(&f3).unwrap();
        assert!(c.lambda1_diff <= 1.0 / f3.seeds() as f64 + 1e-9);
        assert!((c.lambda1_diff - c.lambda2_psi).abs() <= 1e-9);
        assert!(!is_pairwise_independent(&hash_family(2, 2).unwrap()).unwrap());
    }

    #[test]
    fn quantum_proof_error_trivial_cases() {
        let mut rng = seeded_rng(4);
        let rho_r = random_density(2, 2, &mut rng);
        let u = CMatrix::identity(8).scale(1.0 / 8.0);
        let s = BipartiteState::product(&u, &rho_r, StateKind::ClassicalQuantum).unwrap();
        let perm = pairwise_permutations(3, 1).unwrap();
        assert!(quantum_proof_error(&perm, &s).unwrap() < 1e-10);
        let m0 = hash_family(3, 0).unwrap();
        let p = ClassicalState::new(vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let s = BipartiteState::product(&p.to_density(), &rho_r, StateKind::ClassicalQuantum).unwrap();
        assert!(quantum_proof_error(&m0, &s).unwrap() < 1e-12);
        let phi = BipartiteState::maximally_entangled(8);
        assert!(quantum_proof_error(&m0, &phi).is_err());
    }

    #[test]
    fn side_information_product_matches_classical_error() {
        let mut rng = seeded_rng(5);
        let f = hash_family(3, 1).unwrap();
        for mode in [Mode::Strong, Mode::Weak] {
            for _ in 0..10 {
                let p = flat_source(3, 2.0, &mut rng).unwrap();
                let rho_r = random_density(2, 2, &mut rng);
                let s = BipartiteState::product(&p.to_density(), &rho_r, StateKind::ClassicalQuantum).unwrap();
                let q = quantum_proof_error_in(&f, &s, mode).unwrap();
                let c = classical_error_in(&f, &p, mode).unwrap();
                assert!(q <= c + 1e-9);
                assert!((q - c).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn classical_soundness_on_flat_sources() {
        let mut rng = seeded_rng(6);
        let f = hash_family(4, 1).unwrap();
        let c = spectral_certificate(&f).unwrap();
        for k in 1..=4 {
            let eps = epsilon_for_k(&c, k as f64, 1, f.d()).epsilon;
            for _ in 0..50 {
                let p = flat_source(4, k as f64, &mut rng).unwrap();
                assert!(classical_error(&f, &p).unwrap() <= eps.sqrt() + 1e-12);
            }
        }
    }

    #[test]
    fn seed_bound_witness_identity() {
        let f = identity_family(4);
        let w = seed_bound_witness(&f, 3.0).unwrap();
        assert_eq!(w.support_size, 8);
        assert!(w.lower_bound > 0.0);
        assert!(w.lower_bound <= w.lambda1_diff + 1e-9);
        assert!(w.rayleigh <= w.lambda1_diff + 1e-9);
    }

    #[test]
    fn seed_bound_witness_hash_and_degenerate() {
        let f = hash_family(4, 2).unwrap();
        let w = seed_bound_witness(&f, 1.0).unwrap();
        assert!(w.lower_bound <= w.lambda1_diff + 1e-9);
        assert!(w.rayleigh <= w.lambda1_diff + 1e-9);

        let perm = pairwise_permutations(3, 2).unwrap();
        let w = seed_bound_witness(&perm, 3.0).unwrap();
        assert_eq!(w.support_size, 4);
        assert_eq!(w.lower_bound, 0.0);
        assert!(seed_bound_witness(&perm, 1.5).is_err());
    }

    #[test]
    fn invalid_families_are_rejected() {
        assert!(FunctionFamily::new(2, 1, vec![vec![0, 1, 2, 0]], Mode::Strong).is_err());
        assert!(FunctionFamily::new(2, 1, vec![vec![0, 1, 1]], Mode::Strong).is_err());
        assert!(FunctionFamily::new(2, 1, vec![], Mode::Strong).is_err());
        let unbalanced = FunctionFamily::new(2, 1, vec![vec![0, 0, 0, 1]], Mode::Strong).unwrap();
        assert!(unbalanced.into_permutation_based().is_err());
    }
}
