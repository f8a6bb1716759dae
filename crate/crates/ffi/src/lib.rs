//! C ABI over `extractorlab`.
//!
//! Families and states are opaque handles created by `xl_*_new`/`xl_*_parse`
//! functions and released with the matching `xl_*_free`. Every fallible call
//! returns an [`XlStatus`]; on failure the message is available from
//! [`xl_last_error`] until the next failing call on the same thread.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use extractorlab::classical::{hash_family, pairwise_permutations, spectral_certificate, two_universal_check};
use extractorlab::entropy::{hmin_cond, BipartiteState};
use extractorlab::formats::{parse_function_family, parse_state, parse_unitary_family};
use extractorlab::numerics::seeded_rng;
use extractorlab::quantum::{clifford_family, q_spectral_certificate, two_design_check};
use extractorlab::{epsilon_for_k, Error, SpectralCertificate};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    InvalidState = 4,
    NotPsd = 5,
    Overflow = 6,
    Infeasible = 7,
    NonConvergence = 8,
    Parse = 9,
    Io = 10,
    Panic = 11,
}

impl From<&Error> for XlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NotSquare(..) | Error::DimensionMismatch(_) | Error::MissingFactors | Error::BadFactor(_) => {
                XlStatus::DimensionMismatch
            }
            Error::NotPsd(_) => XlStatus::NotPsd,
            Error::InvalidState(_) => XlStatus::InvalidState,
            Error::InvalidArgument(_) => XlStatus::InvalidArgument,
            Error::Overflow(_) => XlStatus::Overflow,
            Error::Infeasible(_) => XlStatus::Infeasible,
            Error::NonConvergence(_) => XlStatus::NonConvergence,
            Error::Parse(_) => XlStatus::Parse,
            Error::Io(_) => XlStatus::Io,
        }
    }
}

/// Opaque classical function family.
pub struct XlClassicalFamily(extractorlab::classical::FunctionFamily);

/// Opaque unitary family.
pub struct XlUnitaryFamily(extractorlab::quantum::UnitaryFamily);

/// Opaque bipartite state on `N ⊗ R`.
pub struct XlState(BipartiteState);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct XlCertificate {
    /// `λ₁(ψ†ψ − τ†τ)`
    pub lambda1_diff: f64,
    /// second largest eigenvalue of `ψ†ψ`
    pub lambda2_psi: f64,
    pub balanced: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct XlErrorBound {
    pub epsilon: f64,
    /// `2√ε`
    pub quantum_error: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct XlFamilyInfo {
    pub n: u32,
    pub m: u32,
    pub seeds: usize,
    /// `log₂ |D|`
    pub d: f64,
}

impl From<SpectralCertificate> for XlCertificate {
    fn from(c: SpectralCertificate) -> Self {
        Self { lambda1_diff: c.lambda1_diff, lambda2_psi: c.lambda2_psi, balanced: c.balanced }
    }
}

impl From<XlCertificate> for SpectralCertificate {
    fn from(c: XlCertificate) -> Self {
        Self { lambda1_diff: c.lambda1_diff, lambda2_psi: c.lambda2_psi, balanced: c.balanced }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `f`, maps errors and panics to status codes and records the message.
fn guard(f: impl FnOnce() -> Result<(), (XlStatus, String)>) -> XlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => XlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            XlStatus::Panic
        }
    }
}

fn lib<T>(r: extractorlab::Result<T>) -> Result<T, (XlStatus, String)> {
    r.map_err(|e| (XlStatus::from(&e), e.to_string()))
}

fn null(what: &str) -> (XlStatus, String) {
    (XlStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` is null or valid for reads of `T`.
unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, (XlStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

/// # Safety
/// `p` is null or valid for writes of `T`.
unsafe fn put<T>(p: *mut T, value: T, what: &str) -> Result<(), (XlStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

/// Boxes the result of `make` into `*out`; `out` is checked first so that
/// nothing is allocated for a null destination.
///
/// # Safety
/// `out` is null or valid for writes.
unsafe fn new_handle<T>(
    out: *mut *mut T,
    make: impl FnOnce() -> Result<T, (XlStatus, String)>,
) -> Result<(), (XlStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(make()?)));
    Ok(())
}

/// # Safety
/// `s` is null or a NUL-terminated string.
unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, (XlStatus, String)> {
    if s.is_null() {
        return Err(null("text"));
    }
    CStr::from_ptr(s).to_str().map_err(|e| (XlStatus::Parse, e.to_string()))
}

/// Message of the last failure on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn xl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn xl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Multiplicative hash family `x ↦ top m bits of a·x` over GF(2ⁿ).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xl_classical_hash_new(n: u32, m: u32, out: *mut *mut XlClassicalFamily) -> XlStatus {
    guard(|| new_handle(out, || lib(hash_family(n, m)).map(XlClassicalFamily)))
}

/// Affine permutations `x ↦ a·x + b`, `a ≠ 0`, truncated to m bits.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xl_classical_permutations_new(n: u32, m: u32, out: *mut *mut XlClassicalFamily) -> XlStatus {
    guard(|| new_handle(out, || lib(pairwise_permutations(n, m)).map(XlClassicalFamily)))
}

/// Parses a function-family file.
///
/// # Safety
/// `src` is a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xl_classical_parse(src: *const c_char, out: *mut *mut XlClassicalFamily) -> XlStatus {
    guard(|| new_handle(out, || lib(parse_function_family(text(src)?)).map(XlClassicalFamily)))
}

/// # Safety
/// `fam` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xl_classical_free(fam: *mut XlClassicalFamily) {
    if !fam.is_null() {
        drop(Box::from_raw(fam));
    }
}

/// # Safety
/// `fam` is a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xl_classical_info(fam: *const XlClassicalFamily, out: *mut XlFamilyInfo) -> XlStatus {
    guard(|| {
        let f = &get(fam, "family")?.0;
        put(out, XlFamilyInfo { n: f.n(), m: f.m(), seeds: f.seeds(), d: f.d() }, "out")
    })
}

/// # Safety
/// `fam` is a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xl_classical_certificate(fam: *const XlClassicalFamily, out: *mut XlCertificate) -> XlStatus {
    guard(|| {
        let c = lib(spectral_certificate(&get(fam, "family")?.0))?;
        put(out, c.into(), "out")
    })
}

/// Exact two-universality test: every pair collides on at most `|D|/|M|` seeds.
///
/// # Safety
/// `fam` is a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xl_classical_two_universal(fam: *const XlClassicalFamily, out: *mut bool) -> XlStatus {
    guard(|| {
        let stats = lib(two_universal_check(&get(fam, "family")?.0))?;
        put(out, stats.is_two_universal(), "out")
    })
}

/// Full Clifford group on n qubits, the first m of which are kept.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xl_unitary_clifford_new(n: u32, m: u32, out: *mut *mut XlUnitaryFamily) -> XlStatus {
    guard(|| new_handle(out, || lib(clifford_family(n).and_then(|f| f.with_output_qubits(m))).map(XlUnitaryFamily)))
}

/// `t` Haar-random unitaries drawn from `seed`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xl_unitary_haar_new(
    n: u32,
    m: u32,
    t: usize,
    seed: u64,
    out: *mut *mut XlUnitaryFamily,
) -> XlStatus {
    guard(|| {
        new_handle(out, || {
            lib(extractorlab::quantum::UnitaryFamily::haar(n, m, t, &mut seeded_rng(seed))).map(XlUnitaryFamily)
        })
    })
}

/// Parses a unitary-family file.
///
/// # Safety
/// `src` is a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xl_unitary_parse(src: *const c_char, out: *mut *mut XlUnitaryFamily) -> XlStatus {
    guard(|| new_handle(out, || lib(parse_unitary_family(text(src)?)).map(XlUnitaryFamily)))
}

/// # Safety
/// `fam` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xl_unitary_free(fam: *mut XlUnitaryFamily) {
    if !fam.is_null() {
        drop(Box::from_raw(fam));
    }
}

/// # Safety
/// `fam` is a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xl_unitary_info(fam: *const XlUnitaryFamily, out: *mut XlFamilyInfo) -> XlStatus {
    guard(|| {
        let f = &get(fam, "family")?.0;
        put(out, XlFamilyInfo { n: f.n(), m: f.m(), seeds: f.seeds(), d: f.d() }, "out")
    })
}

/// # Safety
/// `fam` is a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xl_unitary_certificate(fam: *const XlUnitaryFamily, out: *mut XlCertificate) -> XlStatus {
    guard(|| {
        let c = lib(q_spectral_certificate(&get(fam, "family")?.0))?;
        put(out, c.into(), "out")
    })
}

/// Largest operator-norm deviation of the family's second moment from the
/// Haar one; zero for an exact 2-design.
///
/// # Safety
/// `fam` is a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xl_unitary_two_design_deviation(fam: *const XlUnitaryFamily, out: *mut f64) -> XlStatus {
    guard(|| {
        let dev = lib(two_design_check(&get(fam, "family")?.0))?;
        put(out, dev, "out")
    })
}

/// Error bound at min-entropy `k` for output length `m` and seed length `d`.
///
/// # Safety
/// `cert` is valid for reads; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xl_epsilon(
    cert: *const XlCertificate,
    k: f64,
    m: u32,
    d: f64,
    out: *mut XlErrorBound,
) -> XlStatus {
    guard(|| {
        let c: SpectralCertificate = (*get(cert, "certificate")?).into();
        if !k.is_finite() || !d.is_finite() || d < 0.0 {
            return Err((XlStatus::InvalidArgument, "k and d must be finite, d >= 0".into()));
        }
        let b = epsilon_for_k(&c, k, m, d);
        put(out, XlErrorBound { epsilon: b.epsilon, quantum_error: b.quantum_error }, "out")
    })
}

/// Parses a state file.
///
/// # Safety
/// `src` is a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xl_state_parse(src: *const c_char, out: *mut *mut XlState) -> XlStatus {
    guard(|| new_handle(out, || lib(parse_state(text(src)?)).map(XlState)))
}

/// Maximally entangled state of two `dim`-level systems.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xl_state_maximally_entangled(dim: usize, out: *mut *mut XlState) -> XlStatus {
    guard(|| {
        if dim == 0 || dim > 64 {
            return Err((XlStatus::InvalidArgument, format!("dim must be in 1..=64, got {dim}")));
        }
        new_handle(out, || Ok(XlState(BipartiteState::maximally_entangled(dim))))
    })
}

/// # Safety
/// `state` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xl_state_free(state: *mut XlState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Certified `H_min(N|R)` and the relative duality gap of the solve.
/// `gap` may be null.
///
/// # Safety
/// `state` is a live handle; `hmin` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xl_hmin_cond(state: *const XlState, hmin: *mut f64, gap: *mut f64) -> XlStatus {
    guard(|| {
        let (h, cert) = lib(hmin_cond(&get(state, "state")?.0))?;
        put(hmin, h, "hmin")?;
        if !gap.is_null() {
            gap.write(cert.relative_gap());
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn every_error_has_a_distinct_nonzero_code() {
        let errs = [
            Error::NotPsd(0.0),
            Error::InvalidState(String::new()),
            Error::InvalidArgument(String::new()),
            Error::Overflow(String::new()),
            Error::Infeasible(String::new()),
            Error::NonConvergence(String::new()),
            Error::Parse(String::new()),
        ];
        let mut codes: Vec<i32> = errs.iter().map(|e| XlStatus::from(e) as i32).collect();
        codes.sort_unstable();
        codes.dedup();
        assert_eq!(codes.len(), errs.len());
        assert!(!codes.contains(&0));
    }

    #[test]
    fn panics_become_status_codes() {
        assert_eq!(guard(|| panic!("boom")), XlStatus::Panic);
        let msg = unsafe { CStr::from_ptr(xl_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "internal panic");
    }

    #[test]
    fn null_out_pointer_is_reported() {
        let s = unsafe { xl_classical_hash_new(3, 1, ptr::null_mut()) };
        assert_eq!(s, XlStatus::NullPointer);
    }
}
