//! Clifford groups on one and two qubits by breadth-first closure over
//! generators, deduplicated up to a global phase.

use std::collections::{HashSet, VecDeque};
use std::path::PathBuf;

use super::UnitaryFamily;
use crate::certificate::Mode;
use crate::error::{Error, Result};
use crate::formats::{parse_unitary_family, write_unitary_family};
use crate::numerics::{tensor, CMatrix, C64};

/// Directory holding cached groups, if set.
pub const CACHE_ENV: &str = "EXTRACTORLAB_CACHE";

const GROUP_LIMIT: usize = 20_000;
const KEY_SCALE: f64 = 1e6;

fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(2, 2, |r, c| C64::new(if r == 1 && c == 1 { -h } else { h }, 0.0))
}

fn phase_gate() -> CMatrix {
    CMatrix::from_fn(2, 2, |r, c| match (r, c) {
        (0, 0) => C64::new(1.0, 0.0),
        (1, 1) => C64::new(0.0, 1.0),
        _ => C64::new(0.0, 0.0),
    })
}

/// Control on the leading qubit.
fn cnot() -> CMatrix {
    const PERM: [usize; 4] = [0, 1, 3, 2];
    CMatrix::from_fn(4, 4, |r, c| C64::new(if PERM[c] == r { 1.0 } else { 0.0 }, 0.0))
}

fn generators(n: u32) -> Result<Vec<CMatrix>> {
    let id = CMatrix::identity(2);
    match n {
        1 => Ok(vec![hadamard(), phase_gate()]),
        2 => Ok(vec![
            tensor(&hadamard(), &id),
            tensor(&id, &hadamard()),
            tensor(&phase_gate(), &id),
            tensor(&id, &phase_gate()),
            cnot(),
        ]
        .into_iter()
        .map(|g| CMatrix::new(g.into_inner()))
        .collect()),
        _ => Err(Error::InvalidArgument(format!("Clifford groups available for n = 1, 2; got {n}"))),
    }
}

/// Rotates the global phase so the first nonzero entry (row-major) is
/// positive real.
fn canonical(u: &CMatrix) -> CMatrix {
    let dim = u.rows();
    let pivot =
        (0..dim * dim).map(|i| u.get(i / dim, i % dim)).find(|z| z.norm() > 1e-9).expect("unitary has a nonzero entry");
    u.scale_complex(pivot.conj() / pivot.norm())
}

fn key(u: &CMatrix) -> Vec<(i64, i64)> {
    let dim = u.rows();
    (0..dim * dim)
        .map(|i| {
            let z = u.get(i / dim, i % dim);
            ((z.re * KEY_SCALE).round() as i64, (z.im * KEY_SCALE).round() as i64)
        })
        .collect()
}

/// Every Clifford unitary on `n ∈ {1, 2}` qubits, in discovery order.
pub fn clifford_group(n: u32) -> Result<Vec<CMatrix>> {
    let gens = generators(n)?;
    let start = CMatrix::identity(1 << n);
    let mut seen = HashSet::from([key(&start)]);
    let mut elements = vec![start];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in &gens {
            let next = canonical(&(g * &elements[i]));
            if seen.insert(key(&next)) {
                if elements.len() == GROUP_LIMIT {
                    return Err(Error::NonConvergence(format!("group closure exceeded {GROUP_LIMIT} elements")));
                }
                queue.push_back(elements.len());
                elements.push(next);
            }
        }
    }
    Ok(elements)
}

fn expected_order(n: u32) -> usize {
    if n == 1 {
        24
    } else {
        11_520
    }
}

fn cache_path(n: u32) -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).map(|d| PathBuf::from(d).join(format!("clifford-{n}.txt")))
}

/// The full Clifford group as a family with `m = n`, read from the cache
/// directory when present and written there after generation.
pub fn clifford_family(n: u32) -> Result<UnitaryFamily> {
    let path = cache_path(n);
    if let Some(p) = &path {
        if let Ok(text) = std::fs::read_to_string(p) {
            if let Ok(fam) = parse_unitary_family(&text) {
                if fam.n() == n && fam.seeds() == expected_order(n) {
                    return fam.with_output_qubits(n).map(|f| f.with_mode(Mode::Strong));
                }
            }
        }
    }
    let group = clifford_group(n)?;
    if group.len() != expected_order(n) {
        return Err(Error::NonConvergence(format!(
            "closure produced {} elements, expected {}",
            group.len(),
            expected_order(n)
        )));
    }
    let fam = UnitaryFamily::new(n, n, group, Mode::Strong)?;
    if let Some(p) = path {
        // the cache is an optimisation; failing to write it is not an error
        if let Some(dir) = p.parent() {
            let _ = std::fs::create_dir_all(dir);
        }
        let tmp = p.with_extension("tmp");
        if std::fs::write(&tmp, write_unitary_family(&fam)).is_ok() {
            let _ = std::fs::rename(&tmp, &p);
        }
    }
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_group_has_24_elements() {
        let g = clifford_group(1).unwrap();
        assert_eq!(g.len(), 24);
        for u in &g {
            assert!((&(&u.adjoint() * u) - &CMatrix::identity(2)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn single_qubit_group_maps_paulis_to_paulis() {
        let x = CMatrix::from_fn(2, 2, |r, c| C64::new(if r != c { 1.0 } else { 0.0 }, 0.0));
        let z = CMatrix::from_real_diagonal(&[1.0, -1.0]);
        let y = CMatrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 1) => C64::new(0.0, -1.0),
            (1, 0) => C64::new(0.0, 1.0),
            _ => C64::new(0.0, 0.0),
        });
        let paulis = [x.clone(), y, z.clone()];
        for u in clifford_group(1).unwrap() {
            for p in [&x, &z] {
                let img = &(&u * p) * &u.adjoint();
                let hit = paulis.iter().any(|q| (&img - q).max_abs() < 1e-12 || (&img + q).max_abs() < 1e-12);
                assert!(hit);
            }
        }
    }

    #[test]
    fn two_qubit_group_order() {
        assert_eq!(clifford_group(2).unwrap().len(), 11_520);
    }

    #[test]
    fn canonical_form_removes_global_phase() {
        let h = hadamard();
        let rotated = h.scale_complex(C64::from_polar(1.0, 0.7));
        assert_eq!(key(&canonical(&rotated)), key(&canonical(&h)));
    }

    #[test]
    fn unsupported_sizes() {
        assert!(clifford_group(3).is_err());
    }
}
