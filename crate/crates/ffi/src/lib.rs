//! C interface to `tracesos`.
//!
//! Every object crosses the boundary as an opaque handle, released by the
//! matching `ts_*_free` function. Functions return a [`TsStatus`]; on failure a description is
//! available from [`ts_last_error`] on the same thread. Results are written
//! through out-pointers, which must be valid and non-null. Strings returned
//! through out-pointers are owned by the caller and must be released with
//! [`ts_string_free`]. Panics never unwind into C: they surface as
//! [`TsStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fmt::Display;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tracesos::cert84::{self, Q3Param};
use tracesos::matrix::RationalMatrix;
use tracesos::necklace::{self, NecklaceError, OracleOptions, TraceProblem};
use tracesos::poly::{rat_frac, ParamId, Polynomial};
use tracesos::psd;
use tracesos::sdp::{self, BasisSpec};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was out of range or malformed.
    InvalidArgument = 2,
    /// The computation ran, and the object failed verification.
    VerificationFailed = 3,
    /// Enumeration would exceed the visit budget.
    BudgetExceeded = 4,
    /// An internal error was caught at the boundary.
    Panic = 5,
}

/// Which independent expansion computes a trace coefficient.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsOracle {
    /// One term per cyclic word.
    Necklace = 0,
    /// Symbolic matrix powers.
    Matrix = 1,
}

/// A polynomial in the entries of `A` and `B` with exact rational coefficients.
pub struct TsPolynomial(Polynomial);

/// A sum-of-squares certificate: Gram blocks paired with monomial vectors.
pub struct TsCertificate {
    problem: TraceProblem,
    basis: BasisSpec,
    blocks: Vec<RationalMatrix>,
}

struct Failure {
    status: TsStatus,
    message: String,
}

impl Failure {
    fn new(status: TsStatus, message: impl Display) -> Failure {
        Failure {
            status,
            message: message.to_string(),
        }
    }

    fn invalid(message: impl Display) -> Failure {
        Failure::new(TsStatus::InvalidArgument, message)
    }
}

impl From<NecklaceError> for Failure {
    fn from(e: NecklaceError) -> Failure {
        match e {
            NecklaceError::BudgetExceeded { .. } => Failure::new(TsStatus::BudgetExceeded, e),
            _ => Failure::invalid(e),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TsStatus::Ok
        }
        Ok(Err(fail)) => {
            set_last_error(fail.message);
            fail.status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal error: {message}"));
            TsStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or point to a live `T`.
unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(TsStatus::NullPointer, format!("{what} is null")))
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(TsStatus::NullPointer, "output pointer is null"));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

fn oracle_options() -> OracleOptions {
    OracleOptions::default()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ts_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ts_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string obtained from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ts_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Coefficient of `t^r` in `trace((A + tB)^m)` for symmetric `n x n` matrices
/// (`A` diagonal when `diagonal_a` is set).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_trace_coeff(
    m: usize,
    r: usize,
    n: u16,
    diagonal_a: bool,
    oracle: TsOracle,
    out: *mut *mut TsPolynomial,
) -> TsStatus {
    guard(|| {
        let p = TraceProblem::new(m, r, n, diagonal_a)?;
        let poly = match oracle {
            TsOracle::Necklace => necklace::trace_coeff_necklace(&p, oracle_options())?,
            TsOracle::Matrix => necklace::trace_coeff_matrix(&p, oracle_options())?,
        };
        write_out(out, Box::into_raw(Box::new(TsPolynomial(poly))))
    })
}

/// Parses a polynomial from the JSON form produced by [`ts_polynomial_to_json`].
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_polynomial_from_json(json: *const c_char, out: *mut *mut TsPolynomial) -> TsStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure::new(TsStatus::NullPointer, "json is null"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(Failure::invalid)?;
        let poly: Polynomial = serde_json::from_str(text).map_err(Failure::invalid)?;
        write_out(out, Box::into_raw(Box::new(TsPolynomial(poly))))
    })
}

/// Number of nonzero terms.
///
/// # Safety
/// `p` must be a live polynomial handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_polynomial_term_count(p: *const TsPolynomial, out: *mut usize) -> TsStatus {
    guard(|| write_out(out, borrow(p, "polynomial")?.0.len()))
}

/// Human-readable form, e.g. `2*a[1,1]*b[1,2]^2`.
///
/// # Safety
/// `p` must be a live polynomial handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_polynomial_to_string(p: *const TsPolynomial, out: *mut *mut c_char) -> TsStatus {
    guard(|| write_out(out, c_string(borrow(p, "polynomial")?.0.to_string())))
}

/// JSON object mapping monomials to exact coefficients.
///
/// # Safety
/// `p` must be a live polynomial handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_polynomial_to_json(p: *const TsPolynomial, out: *mut *mut c_char) -> TsStatus {
    guard(|| {
        let text = serde_json::to_string(&borrow(p, "polynomial")?.0).map_err(Failure::invalid)?;
        write_out(out, c_string(text))
    })
}

/// Exact equality of two polynomials.
///
/// # Safety
/// `a` and `b` must be live polynomial handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_polynomial_equal(
    a: *const TsPolynomial,
    b: *const TsPolynomial,
    out: *mut bool,
) -> TsStatus {
    guard(|| write_out(out, borrow(a, "left polynomial")?.0 == borrow(b, "right polynomial")?.0))
}

/// Releases a polynomial handle. Null is ignored.
///
/// # Safety
/// `p` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ts_polynomial_free(p: *mut TsPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

fn certificate_out(out: *mut *mut TsCertificate, cert: TsCertificate) -> Result<(), Failure> {
    // SAFETY: callers pass their own out-pointer through unchanged.
    unsafe { write_out(out, Box::into_raw(Box::new(cert))) }
}

/// The certificate for the coefficient of `t^2` in `trace((A + tB)^4)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_cert42_build(n: u16, out: *mut *mut TsCertificate) -> TsStatus {
    guard(|| {
        let problem = TraceProblem::new(4, 2, n, false)?;
        let basis = BasisSpec::cert42(n).map_err(Failure::invalid)?;
        let blocks = sdp::cert42_blocks(n).map_err(Failure::invalid)?;
        certificate_out(out, TsCertificate { problem, basis, blocks })
    })
}

fn build84(n: u16, params: Q3Param, out: *mut *mut TsCertificate) -> Result<(), Failure> {
    let problem = TraceProblem::new(8, 4, n, true)?;
    let basis = BasisSpec::cert84(n, false).map_err(Failure::invalid)?;
    let blocks = sdp::cert84_blocks(n, &params).map_err(Failure::invalid)?;
    certificate_out(out, TsCertificate { problem, basis, blocks })
}

/// The certificate for the coefficient of `t^4` in `trace((A + tB)^8)` with
/// diagonal `A`, using the published parameter values.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_cert84_build(n: u16, out: *mut *mut TsCertificate) -> TsStatus {
    guard(|| build84(n, Q3Param::Published, out))
}

/// As [`ts_cert84_build`] with parameters `x_k = num[k-1] / den[k-1]` for
/// `k = 1..=22`; all values must be nonnegative.
///
/// # Safety
/// `num` and `den` must each point to 22 readable values; `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_cert84_build_with_params(
    n: u16,
    num: *const i64,
    den: *const i64,
    out: *mut *mut TsCertificate,
) -> TsStatus {
    guard(|| {
        if num.is_null() || den.is_null() {
            return Err(Failure::new(TsStatus::NullPointer, "parameter arrays are null"));
        }
        let (num, den) = (
            std::slice::from_raw_parts(num, cert84::PARAM_COUNT.into()),
            std::slice::from_raw_parts(den, cert84::PARAM_COUNT.into()),
        );
        let mut values = std::collections::BTreeMap::new();
        for (k, (&p, &q)) in num.iter().zip(den).enumerate() {
            if q == 0 {
                return Err(Failure::invalid(format!("x{} has a zero denominator", k + 1)));
            }
            values.insert(ParamId(k as u16 + 1), rat_frac(p, q));
        }
        build84(n, Q3Param::Values(values), out)
    })
}

/// Number of Gram blocks.
///
/// # Safety
/// `c` must be a live certificate handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_certificate_block_count(c: *const TsCertificate, out: *mut usize) -> TsStatus {
    guard(|| write_out(out, borrow(c, "certificate")?.blocks.len()))
}

unsafe fn block<'a>(c: *const TsCertificate, k: usize) -> Result<(&'a TsCertificate, &'a RationalMatrix), Failure> {
    let cert = borrow(c, "certificate")?;
    let q = cert
        .blocks
        .get(k)
        .ok_or_else(|| Failure::invalid(format!("block {k} out of range")))?;
    Ok((cert, q))
}

/// Side length of Gram block `k` (0-based).
///
/// # Safety
/// `c` must be a live certificate handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_certificate_block_dim(c: *const TsCertificate, k: usize, out: *mut usize) -> TsStatus {
    guard(|| write_out(out, block(c, k)?.1.rows()))
}

/// Number of monomial vectors sharing Gram block `k`.
///
/// # Safety
/// `c` must be a live certificate handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_certificate_block_copies(c: *const TsCertificate, k: usize, out: *mut usize) -> TsStatus {
    guard(|| {
        let (cert, _) = block(c, k)?;
        write_out(out, cert.basis.blocks[k].bases.len())
    })
}

/// Entry `(i, j)` (0-based) of Gram block `k` as an exact rational string.
///
/// # Safety
/// `c` must be a live certificate handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_certificate_entry(
    c: *const TsCertificate,
    k: usize,
    i: usize,
    j: usize,
    out: *mut *mut c_char,
) -> TsStatus {
    guard(|| {
        let (_, q) = block(c, k)?;
        if i >= q.rows() || j >= q.cols() {
            return Err(Failure::invalid(format!("entry ({i}, {j}) out of range")));
        }
        write_out(out, c_string(q.get(i, j).to_string()))
    })
}

/// The polynomial `sum_k sum_z zᵀ Q_k z` the certificate represents.
///
/// # Safety
/// `c` must be a live certificate handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_certificate_assemble(c: *const TsCertificate, out: *mut *mut TsPolynomial) -> TsStatus {
    guard(|| {
        let cert = borrow(c, "certificate")?;
        let poly = sdp::assemble_blocks(&cert.basis, &cert.blocks);
        write_out(out, Box::into_raw(Box::new(TsPolynomial(poly))))
    })
}

/// Checks the certificate exactly: every block is PSD and the assembled sum
/// equals the trace coefficient. Returns [`TsStatus::VerificationFailed`] with
/// the reason in [`ts_last_error`] otherwise.
///
/// # Safety
/// `c` must be a live certificate handle.
#[no_mangle]
pub unsafe extern "C" fn ts_certificate_verify(c: *const TsCertificate) -> TsStatus {
    guard(|| {
        let cert = borrow(c, "certificate")?;
        for (k, q) in cert.blocks.iter().enumerate() {
            psd::certify_auto(q)
                .map_err(|e| Failure::new(TsStatus::VerificationFailed, format!("block {k}: {e}")))?;
        }
        let target = necklace::trace_coeff_necklace(&cert.problem, oracle_options())?;
        let diff = sdp::assemble_blocks(&cert.basis, &cert.blocks).sub(&target);
        let first = diff.monomials().next().cloned();
        match first {
            None => Ok(()),
            Some(m) => Err(Failure::new(
                TsStatus::VerificationFailed,
                format!("sum of squares differs from {} at {m}", cert.problem),
            )),
        }
    })
}

/// Releases a certificate handle. Null is ignored.
///
/// # Safety
/// `c` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ts_certificate_free(c: *mut TsCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Certifies the symmetric `dim x dim` matrix with entries `num[i] / den[i]`
/// (row-major) positive semidefinite. On success the nullity is written to
/// `nullity` when it is non-null. A matrix that is symmetric but not PSD gives
/// [`TsStatus::VerificationFailed`].
///
/// # Safety
/// `num` and `den` must each point to `dim * dim` readable values; `nullity`
/// must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_psd_check(dim: usize, num: *const i64, den: *const i64, nullity: *mut usize) -> TsStatus {
    guard(|| {
        if num.is_null() || den.is_null() {
            return Err(Failure::new(TsStatus::NullPointer, "entry arrays are null"));
        }
        let len = dim.checked_mul(dim).ok_or_else(|| Failure::invalid("dimension too large"))?;
        let (num, den) = (std::slice::from_raw_parts(num, len), std::slice::from_raw_parts(den, len));
        if let Some(k) = den.iter().position(|&d| d == 0) {
            return Err(Failure::invalid(format!("entry {k} has a zero denominator")));
        }
        let q = RationalMatrix::from_fn(dim, dim, |i, j| rat_frac(num[i * dim + j], den[i * dim + j]));
        if !q.is_symmetric() {
            return Err(Failure::invalid("matrix is not symmetric"));
        }
        let cert = psd::certify_auto(&q).map_err(|e| Failure::new(TsStatus::VerificationFailed, e))?;
        if !nullity.is_null() {
            let k = match cert.nullity() {
                Some(k) => k,
                None => psd::verify_charpoly_signs(&q)
                    .ok()
                    .and_then(|c| c.nullity())
                    .ok_or_else(|| Failure::invalid("nullity unavailable"))?,
            };
            nullity.write(k);
        }
        Ok(())
    })
}

/// Runs the necklace-to-cell accounting audit of the `(4,2)` certificate and
/// writes the report as JSON. Returns [`TsStatus::VerificationFailed`] (with
/// the report still written) when a cell does not balance.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_audit42(n: u16, out: *mut *mut c_char) -> TsStatus {
    guard(|| {
        let report = tracesos::cert42::audit_report(n).map_err(Failure::invalid)?;
        let text = serde_json::to_string(&report).map_err(Failure::invalid)?;
        write_out(out, c_string(text))?;
        if report.is_clean() {
            Ok(())
        } else {
            Err(Failure::new(
                TsStatus::VerificationFailed,
                format!("{} cells do not balance", report.mismatches.len()),
            ))
        }
    })
}
