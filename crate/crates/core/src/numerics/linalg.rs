use nalgebra::{DMatrix, SymmetricEigen};

use super::{CMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Kronecker product `a ⊗ b`. Factor labels are concatenated when both
/// operands are square; an unlabelled square operand counts as one factor.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = (a.rows(), a.cols());
    let (br, bc) = (b.rows(), b.cols());
    let mut out = DMatrix::from_element(ar * br, ac * bc, ZERO);
    for i in 0..ar {
        for k in 0..ac {
            let aik = a.get(i, k);
            if aik == ZERO {
                continue;
            }
            for j in 0..br {
                for l in 0..bc {
                    out[(i * br + j, k * bc + l)] = aik * b.get(j, l);
                }
            }
        }
    }
    if a.is_square() && b.is_square() {
        let mut factors = a.factors().map(<[usize]>::to_vec).unwrap_or_else(|| vec![ar]);
        factors.extend(b.factors().map(<[usize]>::to_vec).unwrap_or_else(|| vec![br]));
        CMatrix::with_factors(out, factors).expect("kronecker factors are consistent")
    } else {
        CMatrix::new(out)
    }
}

/// Mixed-radix offsets of every multi-index over the listed factors.
fn offsets(dims: &[usize], strides: &[usize], which: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &f in which {
        let mut next = Vec::with_capacity(out.len() * dims[f]);
        for &base in &out {
            for x in 0..dims[f] {
                next.push(base + x * strides[f]);
            }
        }
        out = next;
    }
    out
}

/// Traces out every factor not listed in `keep`. The kept factors retain
/// their relative order.
pub fn partial_trace(m: &CMatrix, keep: &[usize]) -> Result<CMatrix> {
    let dims = m.factors().ok_or(Error::MissingFactors)?.to_vec();
    if let Some(&bad) = keep.iter().find(|&&f| f >= dims.len()) {
        return Err(Error::BadFactor(bad));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|f| !kept.contains(f)).collect();

    let mut strides = vec![1usize; dims.len()];
    for f in (0..dims.len().saturating_sub(1)).rev() {
        strides[f] = strides[f + 1] * dims[f + 1];
    }
    let keep_off = offsets(&dims, &strides, &kept);
    let trace_off = offsets(&dims, &strides, &traced);

    let dk = keep_off.len();
    let data = m.data();
    let out =
        DMatrix::from_fn(dk, dk, |i, j| trace_off.iter().map(|&t| data[(keep_off[i] + t, keep_off[j] + t)]).sum());
    let kept_dims: Vec<usize> = kept.iter().map(|&f| dims[f]).collect();
    if kept_dims.is_empty() {
        return Ok(CMatrix::new(out));
    }
    CMatrix::with_factors(out, kept_dims)
}

/// Eigendecomposition of a Hermitian operator, eigenvalues in descending order
/// with eigenvectors as the matching columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Rebuilds `Σ f(λ_i) |v_i⟩⟨v_i|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let v = self.vectors.data();
        let mut scaled = v.clone();
        for (j, &l) in self.values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(f(l));
        }
        CMatrix::new(scaled * v.adjoint()).hermitian_part()
    }
}

/// Hermitian eigensolver. The input is symmetrized as `(m + m†)/2` first.
pub fn hermitian_eigs(m: &CMatrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Eigen { values: vec![], vectors: CMatrix::zeros(0, 0) });
    }
    let sym = m.hermitian_part().into_inner();
    let eig = SymmetricEigen::try_new(sym, 1e-15, 10_000)
        .ok_or_else(|| Error::NonConvergence("hermitian eigensolver".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Eigen { values, vectors: CMatrix::new(vectors) })
}

/// `m^p` on the support of a PSD operator. Eigenvalues at or below
/// `cutoff · λ_max` (and all negative ones) are treated as exactly zero, so
/// `p = 0` yields the support projector and negative `p` a pseudo-inverse power.
pub fn hermitian_power(m: &CMatrix, p: f64, cutoff: f64) -> Result<CMatrix> {
    let eig = hermitian_eigs(m)?;
    let thresh = cutoff * eig.max().max(0.0);
    let mut out = eig.map(|l| if l > thresh && l > 0.0 { l.powf(p) } else { 0.0 });
    if let Some(f) = m.factors() {
        out = out.set_factors(f.to_vec())?;
    }
    Ok(out)
}

fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return vec![];
    }
    if m.is_hermitian(1e-13 * m.max_abs().max(1.0)) {
        if let Ok(e) = hermitian_eigs(m) {
            return e.values.iter().map(|l| l.abs()).collect();
        }
    }
    m.data().clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Schatten-1 norm: the sum of singular values (no factor ½).
pub fn trace_norm(m: &CMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Weight and exponent of a σ-weighted Schatten norm. `alpha` may be
/// `f64::INFINITY`.
#[derive(Clone, Debug)]
pub struct WeightedNormParams {
    sigma: CMatrix,
    alpha: f64,
}

impl WeightedNormParams {
    pub fn new(sigma: CMatrix, alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha < 1.0 {
            return Err(Error::InvalidArgument(format!("alpha must be >= 1, got {alpha}")));
        }
        check_psd(&sigma)?;
        Ok(Self { sigma, alpha })
    }

    pub fn sigma(&self) -> &CMatrix {
        &self.sigma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

const PSD_CUTOFF: f64 = 1e-12;

fn check_psd(sigma: &CMatrix) -> Result<()> {
    if !sigma.is_square() {
        return Err(Error::NotSquare(sigma.rows(), sigma.cols()));
    }
    let scale = sigma.max_abs().max(1.0);
    if !sigma.is_hermitian(1e-10 * scale) {
        return Err(Error::NotPsd(f64::NAN));
    }
    let min = hermitian_eigs(sigma)?.min();
    if min < -1e-10 * scale {
        return Err(Error::NotPsd(min));
    }
    Ok(())
}

/// `⟨a|b⟩_σ = tr[(σ^{1/4} a σ^{1/4})† (σ^{1/4} b σ^{1/4})]`.
pub fn weighted_inner(a: &CMatrix, b: &CMatrix, sigma: &CMatrix) -> Result<C64> {
    check_psd(sigma)?;
    if a.rows() != sigma.rows() || b.rows() != sigma.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch("weighted inner product operands".into()));
    }
    let s4 = hermitian_power(sigma, 0.25, PSD_CUTOFF)?;
    let wa = &(&s4 * a) * &s4;
    let wb = &(&s4 * b) * &s4;
    Ok(wa.hs_inner(&wb))
}

/// `‖a‖_{α,σ} = (tr|σ^{1/2α} a σ^{1/2α}|^α)^{1/α}`; for `α = ∞` the weight
/// reduces to the support projector of σ and the norm to the operator norm.
pub fn weighted_norm(a: &CMatrix, params: &WeightedNormParams) -> Result<f64> {
    let sigma = &params.sigma;
    if a.rows() != sigma.rows() || a.cols() != sigma.cols() {
        return Err(Error::DimensionMismatch("weighted norm operand".into()));
    }
    let alpha = params.alpha;
    let w = if alpha.is_infinite() {
        hermitian_power(sigma, 0.0, PSD_CUTOFF)?
    } else {
        hermitian_power(sigma, 1.0 / (2.0 * alpha), PSD_CUTOFF)?
    };
    let s = singular_values(&(&(&w * a) * &w));
    Ok(if alpha.is_infinite() {
        s.iter().copied().fold(0.0, f64::max)
    } else if alpha == 1.0 {
        s.iter().sum()
    } else if alpha == 2.0 {
        s.iter().map(|x| x * x).sum::<f64>().sqrt()
    } else {
        s.iter().map(|x| x.powf(alpha)).sum::<f64>().powf(1.0 / alpha)
    })
}

/// Swap operator `F|i j⟩ = |j i⟩` on `C^dim ⊗ C^dim`.
pub fn swap_operator(dim: usize) -> CMatrix {
    let n = dim * dim;
    let mut data = DMatrix::from_element(n, n, ZERO);
    for i in 0..dim {
        for j in 0..dim {
            data[(j * dim + i, i * dim + j)] = ONE;
        }
    }
    CMatrix::with_factors(data, vec![dim, dim]).expect("swap factors")
}
