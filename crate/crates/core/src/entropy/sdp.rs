//! Conditional min-entropy semidefinite program.
//!
//! The dual problem `minimize tr σ_R  s.t.  1_N ⊗ σ_R ⪰ ρ_NR` is solved by a
//! path-following log-barrier Newton method over a real orthonormal basis of
//! Hermitian `σ_R`. The constraint is handled as a list of diagonal blocks
//! `1_k ⊗ σ − ρ_b` so classical-quantum inputs decompose into `|N|` small
//! blocks. On the central path `E = Z^{-1}/t` satisfies `tr_N E = 1_R`; away
//! from it the candidate is renormalized to exact primal feasibility, so the
//! returned pair always brackets the optimum.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigs, CMatrix, C64};

/// Primal/dual pair for the guessing-probability SDP. `dual_witness` is the
/// feasible `σ_R`, `primal_value = tr[ρ E]` for the recovered feasible `E`.
#[derive(Clone, Debug)]
pub struct SdpCertificate {
    pub primal_value: f64,
    pub dual_value: f64,
    pub dual_witness: CMatrix,
    pub gap: f64,
    pub newton_steps: usize,
}

impl SdpCertificate {
    pub fn relative_gap(&self) -> f64 {
        self.gap / self.dual_value.abs().max(f64::MIN_POSITIVE)
    }
}

/// One diagonal block `1_mult ⊗ σ − rho` of the constraint.
#[derive(Clone, Debug)]
pub(crate) struct Block {
    pub mult: usize,
    pub rho: DMatrix<C64>,
}

/// Sparse Hermitian basis element: entries `(row, col, value)`.
type BasisElem = Vec<(usize, usize, C64)>;

fn hermitian_basis(d: usize) -> Vec<BasisElem> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for r in 0..d {
        out.push(vec![(r, r, C64::new(1.0, 0.0))]);
    }
    for r in 0..d {
        for c in r + 1..d {
            out.push(vec![(r, c, C64::new(s, 0.0)), (c, r, C64::new(s, 0.0))]);
            out.push(vec![(r, c, C64::new(0.0, -s)), (c, r, C64::new(0.0, s))]);
        }
    }
    out
}

fn sigma_from_coords(basis: &[BasisElem], x: &DVector<f64>, d: usize) -> DMatrix<C64> {
    let mut s = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for (elem, &xa) in basis.iter().zip(x.iter()) {
        for &(r, c, v) in elem {
            s[(r, c)] += v * xa;
        }
    }
    s
}

struct Solver<'a> {
    blocks: &'a [Block],
    d: usize,
    basis: Vec<BasisElem>,
    /// objective coefficients `tr B_a`
    cost: DVector<f64>,
    /// total barrier dimension Σ mult·d
    barrier_dim: usize,
}

struct Eval {
    /// Z_b^{-1} per block
    inverses: Vec<DMatrix<C64>>,
    log_det: f64,
}

impl<'a> Solver<'a> {
    fn new(blocks: &'a [Block], d: usize) -> Self {
        let basis = hermitian_basis(d);
        let cost = DVector::from_iterator(
            basis.len(),
            basis.iter().map(|e| e.iter().filter(|(r, c, _)| r == c).map(|(_, _, v)| v.re).sum()),
        );
        let barrier_dim = blocks.iter().map(|b| b.mult * d).sum();
        Self { blocks, d, basis, cost, barrier_dim }
    }

    fn slack(&self, sigma: &DMatrix<C64>, b: &Block) -> DMatrix<C64> {
        let d = self.d;
        let mut z = -b.rho.clone();
        for k in 0..b.mult {
            for r in 0..d {
                for c in 0..d {
                    z[(k * d + r, k * d + c)] += sigma[(r, c)];
                }
            }
        }
        z
    }

    /// Returns `None` when σ is outside the feasible interior.
    fn evaluate(&self, x: &DVector<f64>) -> Option<Eval> {
        let sigma = sigma_from_coords(&self.basis, x, self.d);
        let mut inverses = Vec::with_capacity(self.blocks.len());
        let mut log_det = 0.0;
        for b in self.blocks {
            let z = self.slack(&sigma, b);
            let chol = Cholesky::new(z)?;
            let l = chol.l_dirty();
            // complex Cholesky does not fail on indefinite input; it yields
            // pivots off the positive real axis instead
            for i in 0..l.nrows() {
                let lii = l[(i, i)];
                if !(lii.re > 0.0 && lii.re.is_finite()) || lii.im.abs() > 1e-10 * lii.re {
                    return None;
                }
                log_det += 2.0 * lii.re.ln();
            }
            inverses.push(chol.inverse());
        }
        Some(Eval { inverses, log_det })
    }

    fn barrier(&self, t: f64, x: &DVector<f64>) -> Option<(f64, Eval)> {
        let ev = self.evaluate(x)?;
        Some((t * self.cost.dot(x) - ev.log_det, ev))
    }

    /// `tr_k` of each inverse block, summed: the gradient weight `W_R`.
    fn reduced_inverse(&self, ev: &Eval) -> DMatrix<C64> {
        let d = self.d;
        let mut w = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
        for (b, inv) in self.blocks.iter().zip(&ev.inverses) {
            for k in 0..b.mult {
                for r in 0..d {
                    for c in 0..d {
                        w[(r, c)] += inv[(k * d + r, k * d + c)];
                    }
                }
            }
        }
        w
    }

    fn gradient_and_hessian(&self, t: f64, ev: &Eval) -> (DVector<f64>, DMatrix<f64>) {
        let d = self.d;
        let wr = self.reduced_inverse(ev);
        let nb = self.basis.len();
        let grad = DVector::from_iterator(
            nb,
            self.basis.iter().zip(self.cost.iter()).map(|(e, &c)| {
                let tr: C64 = e.iter().map(|&(r, col, v)| wr[(col, r)] * v).sum();
                t * c - tr.re
            }),
        );

        // T[q][r][s][p] = Σ_b Σ_{k,k'} W_b[(k',q),(k,r)] · W_b[(k,s),(k',p)]
        let idx = |q: usize, r: usize, s: usize, p: usize| ((q * d + r) * d + s) * d + p;
        let mut tt = vec![C64::new(0.0, 0.0); d * d * d * d];
        for (b, w) in self.blocks.iter().zip(&ev.inverses) {
            for kp in 0..b.mult {
                for k in 0..b.mult {
                    for q in 0..d {
                        for r in 0..d {
                            let a = w[(kp * d + q, k * d + r)];
                            if a == C64::new(0.0, 0.0) {
                                continue;
                            }
                            for s in 0..d {
                                for p in 0..d {
                                    tt[idx(q, r, s, p)] += a * w[(k * d + s, kp * d + p)];
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut hess = DMatrix::zeros(nb, nb);
        for a in 0..nb {
            for bb in a..nb {
                let mut acc = C64::new(0.0, 0.0);
                for &(r, s, va) in &self.basis[a] {
                    for &(p, q, vb) in &self.basis[bb] {
                        acc += va * vb * tt[idx(q, r, s, p)];
                    }
                }
                hess[(a, bb)] = acc.re;
                hess[(bb, a)] = acc.re;
            }
        }
        (grad, hess)
    }
}

const MAX_NEWTON: usize = 200;
const T_GROWTH: f64 = 20.0;

/// Solves the conditional min-entropy SDP for the given constraint blocks;
/// `rho_max` bounds the largest eigenvalue of ρ and seeds a strictly feasible
/// start.
pub(crate) fn solve(blocks: &[Block], d: usize, rho_max: f64, rel_tol: f64) -> Result<SdpCertificate> {
    let solver = Solver::new(blocks, d);
    let nb = solver.basis.len();
    let start = 2.0 * rho_max.max(1e-300) + 1e-12;
    let mut x = DVector::from_iterator(nb, (0..nb).map(|a| if a < d { start } else { 0.0 }));
    let mut t = solver.barrier_dim as f64 / (start * d as f64);
    let mut steps = 0usize;
    let mut best: Option<SdpCertificate> = None;

    loop {
        // centering
        let mut converged = false;
        for _ in 0..MAX_NEWTON {
            let (f0, ev) = solver
                .barrier(t, &x)
                .ok_or_else(|| Error::NonConvergence("iterate left the feasible region".into()))?;
            let (g, h) = solver.gradient_and_hessian(t, &ev);
            let chol = match Cholesky::new(h.clone()) {
                Some(c) => c,
                None => {
                    // regularize a numerically indefinite Hessian
                    let reg = 1e-12 * h.diagonal().amax().max(1e-300);
                    Cholesky::new(h + DMatrix::identity(nb, nb) * reg)
                        .ok_or_else(|| Error::NonConvergence(format!("singular Newton system at t={t:e}")))?
                }
            };
            let dx = -chol.solve(&g);
            let decrement = -g.dot(&dx);
            steps += 1;
            if decrement <= 1e-11 {
                converged = true;
                break;
            }
            let mut alpha = 1.0;
            let mut moved = false;
            while alpha > 1e-14 {
                let trial = &x + &dx * alpha;
                if let Some((f1, _)) = solver.barrier(t, &trial) {
                    if f1 <= f0 - 0.25 * alpha * decrement {
                        x = trial;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !moved {
                // no further progress possible at this barrier weight
                converged = decrement < 1e-6;
                break;
            }
        }

        let ev = solver.evaluate(&x).ok_or_else(|| Error::NonConvergence("iterate left the feasible region".into()))?;
        let cert = recover(&solver, blocks, &x, &ev, t, steps)?;
        let done = cert.gap <= rel_tol * cert.dual_value.abs()
            || solver.barrier_dim as f64 / t <= 1e-3 * rel_tol * cert.dual_value.abs();
        let improves = best.as_ref().is_none_or(|b| cert.gap < b.gap);
        if improves {
            best = Some(cert);
        }
        if done {
            break;
        }
        if !converged && steps > 50 * MAX_NEWTON {
            break;
        }
        if t > 1e18 {
            break;
        }
        t *= T_GROWTH;
    }

    let best = best.expect("at least one centering pass");
    if best.gap > 1e-6 * best.dual_value.abs().max(1e-300) || best.gap < -1e-8 {
        return Err(Error::NonConvergence(format!(
            "duality gap {:e} (primal {:e}, dual {:e}) after {} Newton steps",
            best.gap, best.primal_value, best.dual_value, best.newton_steps
        )));
    }
    Ok(best)
}

/// Builds the primal candidate `E_b = Z_b^{-1}/t`, renormalizes it to
/// `tr_N E = 1_R`, and pairs it with the current dual point.
fn recover(
    solver: &Solver,
    blocks: &[Block],
    x: &DVector<f64>,
    ev: &Eval,
    t: f64,
    steps: usize,
) -> Result<SdpCertificate> {
    let d = solver.d;
    let sigma = sigma_from_coords(&solver.basis, x, d);
    let dual_value = solver.cost.dot(x);

    let wr = CMatrix::new(solver.reduced_inverse(ev).map(|z| z / t));
    let eig = hermitian_eigs(&wr)?;
    if eig.min() <= 0.0 {
        return Err(Error::NonConvergence("primal recovery: singular marginal".into()));
    }
    let norm = eig.map(|l| 1.0 / l.sqrt());
    let nrm = norm.data();

    let mut primal_value = 0.0;
    for (b, inv) in blocks.iter().zip(&ev.inverses) {
        let dim = b.mult * d;
        // (1 ⊗ S^{-1/2}) (Z^{-1}/t) (1 ⊗ S^{-1/2})
        let mut lift = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        for k in 0..b.mult {
            for r in 0..d {
                for c in 0..d {
                    lift[(k * d + r, k * d + c)] = nrm[(r, c)];
                }
            }
        }
        let e = &lift * (inv / C64::new(t, 0.0)) * &lift;
        let v: C64 = b.rho.iter().zip(e.iter()).map(|(r, ee)| r.conj() * ee).sum();
        primal_value += v.re;
    }

    Ok(SdpCertificate {
        primal_value,
        dual_value,
        dual_witness: CMatrix::new(sigma).hermitian_part(),
        gap: dual_value - primal_value,
        newton_steps: steps,
    })
}
