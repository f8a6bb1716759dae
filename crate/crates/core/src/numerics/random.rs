use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{CMatrix, C64};

/// Generator used for every experiment in the crate.
pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Independent stream `index` of the generator seeded with `seed`. Trials
/// draw from their own stream so results do not depend on scheduling.
pub fn trial_rng(seed: u64, index: u64) -> Rng {
    let mut rng = Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn complex_gaussian(rng: &mut Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut Rng) -> CMatrix {
    let mut data = DMatrix::from_element(rows, cols, C64::new(0.0, 0.0));
    for c in 0..cols {
        for r in 0..rows {
            data[(r, c)] = complex_gaussian(rng);
        }
    }
    CMatrix::new(data)
}

/// Haar-distributed unitary: QR of a Ginibre matrix, with each column of Q
/// rotated by the phase of the matching diagonal entry of R so that R has a
/// positive diagonal.
pub fn haar_unitary(dim: usize, rng: &mut Rng) -> CMatrix {
    assert!(dim >= 1, "haar_unitary needs dim >= 1");
    let g = gaussian_matrix(dim, dim, rng).into_inner();
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let n = d.norm();
        let phase = if n > 0.0 { d / n } else { C64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    CMatrix::new(q)
}

/// Random Hermitian matrix `(G + G†)/2`.
pub fn random_hermitian(dim: usize, rng: &mut Rng) -> CMatrix {
    gaussian_matrix(dim, dim, rng).hermitian_part()
}

/// Random density matrix of rank at most `rank` (induced measure `G G† / tr`).
pub fn random_density(dim: usize, rank: usize, rng: &mut Rng) -> CMatrix {
    let g = gaussian_matrix(dim, rank.max(1), rng);
    let rho = &g * &g.adjoint();
    let t = rho.trace().re;
    rho.scale(1.0 / t).hermitian_part()
}

/// Haar-random pure state vector.
pub fn random_pure(dim: usize, rng: &mut Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}
