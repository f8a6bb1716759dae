//! Plain-text serialization of families and states.
//!
//! * function family: header `n m d mode`, then one line of `2ⁿ` output
//!   symbols per seed;
//! * unitary family: header `n m count mode`, then one line per unitary of
//!   `2·4ⁿ` reals, real and imaginary parts interleaved, row-major;
//! * bipartite state: header `dim_n dim_r kind`, then one line per row of
//!   `ρ` with real and imaginary parts interleaved.
//!
//! Reals use the shortest representation that parses back to the same `f64`,
//! so every format round-trips exactly.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::certificate::Mode;
use crate::classical::FunctionFamily;
use crate::entropy::{BipartiteState, StateKind};
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, C64};
use crate::quantum::UnitaryFamily;

fn parse<T: FromStr>(tok: &str, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse(format!("bad {what}: {tok:?}")))
}

/// Non-empty lines, with the header split into tokens.
fn split(text: &str, header_len: usize) -> Result<(Vec<&str>, Vec<&str>)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header: Vec<&str> =
        lines.next().ok_or_else(|| Error::Parse("empty input".into()))?.split_whitespace().collect();
    if header.len() != header_len {
        return Err(Error::Parse(format!("header needs {header_len} fields, got {}", header.len())));
    }
    Ok((header, lines.collect()))
}

fn push_complex_row(out: &mut String, row: impl Iterator<Item = C64>) {
    let mut first = true;
    for z in row {
        if !first {
            out.push(' ');
        }
        first = false;
        let _ = write!(out, "{} {}", z.re, z.im);
    }
    out.push('\n');
}

fn parse_complex_row(line: &str, len: usize) -> Result<Vec<C64>> {
    let vals: Vec<f64> = line.split_whitespace().map(|t| parse(t, "real")).collect::<Result<_>>()?;
    if vals.len() != 2 * len {
        return Err(Error::Parse(format!("row has {} reals, expected {}", vals.len(), 2 * len)));
    }
    Ok(vals.chunks(2).map(|c| C64::new(c[0], c[1])).collect())
}

pub fn write_function_family(fam: &FunctionFamily) -> String {
    let mut out = format!("{} {} {} {}\n", fam.n(), fam.m(), fam.d(), fam.mode().as_str());
    for t in fam.tables() {
        let row: Vec<String> = t.iter().map(u32::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_function_family(text: &str) -> Result<FunctionFamily> {
    let (h, rows) = split(text, 4)?;
    let n: u32 = parse(h[0], "n")?;
    let m: u32 = parse(h[1], "m")?;
    let d: f64 = parse(h[2], "d")?;
    let mode: Mode = h[3].parse()?;
    if n > 20 {
        return Err(Error::Parse(format!("n = {n} is too large")));
    }
    if rows.is_empty() || ((rows.len() as f64).log2() - d).abs() > 1e-9 {
        return Err(Error::Parse(format!("header d = {d} but {} rows follow", rows.len())));
    }
    let tables = rows
        .iter()
        .map(|l| l.split_whitespace().map(|t| parse(t, "symbol")).collect::<Result<Vec<u32>>>())
        .collect::<Result<Vec<_>>>()?;
    FunctionFamily::new(n, m, tables, mode).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_unitary_family(fam: &UnitaryFamily) -> String {
    let mut out = format!("{} {} {} {}\n", fam.n(), fam.m(), fam.seeds(), fam.mode().as_str());
    let dim = fam.dim_n();
    for u in fam.unitaries() {
        push_complex_row(&mut out, (0..dim * dim).map(|i| u.get(i / dim, i % dim)));
    }
    out
}

pub fn parse_unitary_family(text: &str) -> Result<UnitaryFamily> {
    let (h, rows) = split(text, 4)?;
    let n: u32 = parse(h[0], "n")?;
    let m: u32 = parse(h[1], "m")?;
    let count: usize = parse(h[2], "count")?;
    let mode: Mode = h[3].parse()?;
    if n > 10 {
        return Err(Error::Parse(format!("n = {n} is too large")));
    }
    if rows.len() != count {
        return Err(Error::Parse(format!("header count = {count} but {} rows follow", rows.len())));
    }
    let dim = 1usize << n;
    let us = rows
        .iter()
        .map(|l| {
            let v = parse_complex_row(l, dim * dim)?;
            Ok(CMatrix::from_fn(dim, dim, |r, c| v[r * dim + c]))
        })
        .collect::<Result<Vec<_>>>()?;
    UnitaryFamily::new(n, m, us, mode).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_state(state: &BipartiteState) -> String {
    let mut out = format!("{} {} {}\n", state.dim_n(), state.dim_r(), state.kind().tag());
    let rho = state.rho();
    for r in 0..rho.rows() {
        push_complex_row(&mut out, (0..rho.cols()).map(|c| rho.get(r, c)));
    }
    out
}

pub fn parse_state(text: &str) -> Result<BipartiteState> {
    let (h, rows) = split(text, 3)?;
    let dn: usize = parse(h[0], "dim_n")?;
    let dr: usize = parse(h[1], "dim_r")?;
    let kind = StateKind::from_tag(h[2]).map_err(|e| Error::Parse(e.to_string()))?;
    let dim = dn.checked_mul(dr).filter(|&d| d > 0 && d <= 1 << 12);
    let dim = dim.ok_or_else(|| Error::Parse(format!("bad dimensions {dn} x {dr}")))?;
    if rows.len() != dim {
        return Err(Error::Parse(format!("expected {dim} rows, got {}", rows.len())));
    }
    let parsed = rows.iter().map(|l| parse_complex_row(l, dim)).collect::<Result<Vec<_>>>()?;
    let rho = CMatrix::from_fn(dim, dim, |r, c| parsed[r][c]);
    BipartiteState::new(rho, dn, dr, kind).map_err(|e| Error::Parse(e.to_string()))
}

/// A family read from disk, classical or unitary.
#[derive(Clone, Debug)]
pub enum FamilyFile {
    Classical(FunctionFamily),
    Unitary(UnitaryFamily),
}

/// Tells the two family formats apart by the width of the first member line:
/// `2ⁿ` symbols for functions, `2·4ⁿ` reals for unitaries.
pub fn parse_family(text: &str) -> Result<FamilyFile> {
    let (h, rows) = split(text, 4)?;
    let n: u32 = parse(h[0], "n")?;
    let first = rows.first().ok_or_else(|| Error::Parse("family has no members".into()))?;
    let width = first.split_whitespace().count();
    if n <= 20 && width == 1usize << n {
        parse_function_family(text).map(FamilyFile::Classical)
    } else if n <= 10 && width == 2usize << (2 * n) {
        parse_unitary_family(text).map(FamilyFile::Unitary)
    } else {
        Err(Error::Parse(format!("member line has {width} fields, matching neither format")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{hash_family, pairwise_permutations};
    use crate::numerics::{random_density, seeded_rng};
    use crate::quantum::clifford_family;

    #[test]
    fn function_family_round_trip() {
        for fam in [hash_family(3, 2).unwrap(), pairwise_permutations(2, 1).unwrap().with_mode(Mode::Weak)] {
            let text = write_function_family(&fam);
            let back = parse_function_family(&text).unwrap();
            assert_eq!(back.tables(), fam.tables());
            assert_eq!(back.mode(), fam.mode());
            assert_eq!(write_function_family(&back), text);
        }
    }

    #[test]
    fn unitary_family_round_trip_is_exact() {
        let mut rng = seeded_rng(1);
        let fam = UnitaryFamily::haar(2, 1, 3, &mut rng).unwrap();
        let back = parse_unitary_family(&write_unitary_family(&fam)).unwrap();
        assert_eq!(back, fam);
        let cl = clifford_family(1).unwrap();
        assert_eq!(parse_unitary_family(&write_unitary_family(&cl)).unwrap(), cl);
    }

    #[test]
    fn state_round_trip_is_exact() {
        let mut rng = seeded_rng(2);
        let rho = random_density(6, 3, &mut rng);
        let s = BipartiteState::new(rho, 3, 2, StateKind::QuantumQuantum).unwrap();
        let back = parse_state(&write_state(&s)).unwrap();
        assert_eq!(back.rho(), s.rho());
        assert_eq!(back.kind(), s.kind());
    }

    #[test]
    fn family_kind_detection() {
        let c = write_function_family(&hash_family(2, 1).unwrap());
        assert!(matches!(parse_family(&c).unwrap(), FamilyFile::Classical(_)));
        let u = write_unitary_family(&clifford_family(1).unwrap());
        assert!(matches!(parse_family(&u).unwrap(), FamilyFile::Unitary(_)));
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_function_family("").is_err());
        assert!(parse_function_family("2 1 1 strong\n0 1 0 1\n").is_err());
        assert!(parse_function_family("2 1 0 strong\n0 1 0\n").is_err());
        assert!(parse_function_family("2 1 0 sideways\n0 1 0 1\n").is_err());
        assert!(parse_unitary_family("1 1 1 strong\n1 0 0 0 0 0 2 0\n").is_err());
        assert!(parse_state("2 1 qq\n1 0 0 0\n").is_err());
        assert!(parse_family("1 1 1 strong\n0 1 0\n").is_err());
    }
}
