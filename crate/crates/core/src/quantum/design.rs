//! Second moments of unitary families against the Haar measure.
//!
//! For `X` on `N ⊗ N'` the Haar twirl `∫ (U⊗U) X (U⊗U)† dU` equals
//! `α·1 + β·F` with `α = (tr X − tr XF / d)/(d² − 1)` and
//! `β = (tr XF − tr X / d)/(d² − 1)`, where `F` is the swap and `d = |N|`.

use nalgebra::DMatrix;

use super::UnitaryFamily;
use crate::error::{Error, Result};
use crate::numerics::{operator_norm, swap_operator, tensor, CMatrix, C64};

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidArgument("twirl needs |N| >= 2".into()));
    }
    Ok(())
}

fn twirl_coefficients(tr_x: C64, tr_xf: C64, d: f64) -> (C64, C64) {
    let den = d * d - 1.0;
    ((tr_x - tr_xf / d) / den, (tr_xf - tr_x / d) / den)
}

/// Closed-form Haar twirl of `X` on `N ⊗ N'` with `|N| = d`.
pub fn haar_twirl(x: &CMatrix, d: usize) -> Result<CMatrix> {
    check_dim(d)?;
    if x.rows() != d * d || x.cols() != d * d {
        return Err(Error::DimensionMismatch(format!("operator is not on a {d}x{d} pair")));
    }
    let f = swap_operator(d);
    let (a, b) = twirl_coefficients(x.trace(), (x * &f).trace(), d as f64);
    Ok(&CMatrix::identity(d * d).scale_complex(a) + &f.scale_complex(b))
}

/// `(1/L) Σ_i (U_i⊗U_i) X (U_i⊗U_i)†`.
pub fn twirl(fam: &UnitaryFamily, x: &CMatrix) -> Result<CMatrix> {
    let d = fam.dim_n();
    if x.rows() != d * d || x.cols() != d * d {
        return Err(Error::DimensionMismatch(format!("operator is not on a {d}x{d} pair")));
    }
    let mut acc = DMatrix::from_element(d * d, d * d, C64::new(0.0, 0.0));
    for u in fam.unitaries() {
        let v = u.data().kronecker(u.data());
        acc += &v * x.data() * v.adjoint();
    }
    Ok(CMatrix::new(acc).scale(1.0 / fam.seeds() as f64))
}

/// `F_{MM'} ⊗ 1_{EE'}` on `N ⊗ N'`, with `N = M ⊗ E` in that order.
pub fn output_swap(n: u32, m: u32) -> Result<CMatrix> {
    if m > n {
        return Err(Error::InvalidArgument(format!("need m <= n, got n={n}, m={m}")));
    }
    let (dn, de) = (1usize << n, 1usize << (n - m));
    let image = |i: usize| {
        let (x, y) = (i / dn, i % dn);
        let (a, e) = (x / de, x % de);
        let (b, f) = (y / de, y % de);
        (b * de + e) * dn + (a * de + f)
    };
    Ok(CMatrix::from_fn(dn * dn, dn * dn, |r, c| C64::new(if image(c) == r { 1.0 } else { 0.0 }, 0.0)))
}

/// Coefficients `(α, β)` of `α·1 + β·F`, the Haar twirl of [`output_swap`]:
/// `α = (1/|M|)(|N|³ − |M|²|N|)/(|N|³ − |N|)` and
/// `β = (1/|M|)(|N|²|M|² − |N|²)/(|N|³ − |N|)`.
pub fn haar_moment_coefficients(n: u32, m: u32) -> Result<(f64, f64)> {
    if m > n {
        return Err(Error::InvalidArgument(format!("need m <= n, got n={n}, m={m}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("Haar moment needs |N| >= 2".into()));
    }
    let (dn, dm) = ((1u64 << n) as f64, (1u64 << m) as f64);
    let den = dn.powi(3) - dn;
    Ok(((dn.powi(3) - dm * dm * dn) / den / dm, (dn * dn * dm * dm - dn * dn) / den / dm))
}

pub fn haar_moment_operator(n: u32, m: u32) -> Result<CMatrix> {
    let (a, b) = haar_moment_coefficients(n, m)?;
    let d = 1usize << n;
    let f = swap_operator(d);
    let op = &CMatrix::identity(d * d).scale(a) + &f.scale(b);
    op.set_factors(vec![d, d])
}

/// Largest operator-norm gap between the family twirl and the Haar twirl
/// over the matrix-unit basis of `N ⊗ N'`. Needs `n ≤ 2`.
pub fn two_design_check(fam: &UnitaryFamily) -> Result<f64> {
    if fam.n() > 2 || fam.n() == 0 {
        return Err(Error::Overflow(format!("two-design check needs 1 <= n <= 2, got {}", fam.n())));
    }
    let d = fam.dim_n();
    let dd = d * d;
    // column-stacked superoperator of X ↦ V X V†, V = U ⊗ U
    let mut t = DMatrix::from_element(dd * dd, dd * dd, C64::new(0.0, 0.0));
    for u in fam.unitaries() {
        let v = u.data().kronecker(u.data());
        t += v.conjugate().kronecker(&v);
    }
    t /= C64::new(fam.seeds() as f64, 0.0);

    let f = swap_operator(d);
    let mut worst: f64 = 0.0;
    for q in 0..dd {
        for p in 0..dd {
            let col = t.column(p + q * dd);
            let family = CMatrix::unvectorize(col.as_slice(), dd, dd);
            let tr_x = C64::new(if p == q { 1.0 } else { 0.0 }, 0.0);
            let (a, b) = twirl_coefficients(tr_x, f.get(q, p), d as f64);
            let haar = &CMatrix::identity(dd).scale_complex(a) + &f.scale_complex(b);
            worst = worst.max(operator_norm(&(&family - &haar)));
        }
    }
    Ok(worst)
}

/// `(U⊗U) X (U⊗U)†` for a single unitary; the summand of [`twirl`].
pub fn moment_term(u: &CMatrix, x: &CMatrix) -> CMatrix {
    let v = CMatrix::new(tensor(u, u).into_inner());
    &(&v * x) * &v.adjoint()
}
