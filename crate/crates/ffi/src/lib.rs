//! C ABI over the `vtree` library.
//!
//! Rationals cross the boundary as opaque `VtreeRational` handles; bit words,
//! dyadics and formatted rationals as NUL-terminated strings owned by the
//! caller and released with [`vtree_string_free`]. Every fallible function
//! returns a [`VtreeStatus`]; on failure the message is available from
//! [`vtree_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use vtree::codes::{decode_prefix, encode_u64, CodeFlavor, Decoded};
use vtree::foundation::{format_rational, parse_rational, BitWord, Rational};
use vtree::measures::{entropy, EntropyCode};
use vtree::qmf::{minkowski_q, qmf_bar, qmf_forward, qmf_inverse};
use vtree::trees::{address_of, node_value, TreeKind};
use vtree::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VtreeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    DomainError = 4,
    MalformedStream = 5,
    TooLarge = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VtreeTree {
    V = 0,
    V1 = 1,
    V10 = 2,
    SternBrocot = 3,
    VanDerCorput = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VtreeCode {
    CI = 0,
    CII = 1,
    CU = 2,
    CV = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VtreeEntropyCode {
    Levy = 0,
    GaussKuzmin = 1,
    CiCii = 2,
    SternBrocot = 3,
}

/// Opaque exact rational.
pub struct VtreeRational(Rational);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> VtreeStatus {
    match e {
        Error::InvalidBitWord(_) | Error::Parse { .. } => VtreeStatus::ParseError,
        Error::MalformedStream(_) => VtreeStatus::MalformedStream,
        Error::TooLarge(_) => VtreeStatus::TooLarge,
        _ => VtreeStatus::DomainError,
    }
}

struct Fail(VtreeStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> VtreeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VtreeStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            VtreeStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(VtreeStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(VtreeStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn rational_arg<'a>(p: *const VtreeRational, name: &str) -> Result<&'a Rational, Fail> {
    p.as_ref()
        .map(|r| &r.0)
        .ok_or_else(|| Fail(VtreeStatus::NullPointer, format!("{name} is null")))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(VtreeStatus::NullPointer, format!("{name} is null")));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(VtreeStatus::Panic, "interior NUL".into()))?;
    write_out(out, c.into_raw(), "out")
}

unsafe fn write_rational(out: *mut *mut VtreeRational, r: Rational) -> Result<(), Fail> {
    write_out(out, Box::into_raw(Box::new(VtreeRational(r))), "out")
}

fn tree(kind: VtreeTree) -> TreeKind {
    match kind {
        VtreeTree::V => TreeKind::V,
        VtreeTree::V1 => TreeKind::V1,
        VtreeTree::V10 => TreeKind::V10,
        VtreeTree::SternBrocot => TreeKind::SB,
        VtreeTree::VanDerCorput => TreeKind::VDC,
    }
}

fn flavor(code: VtreeCode) -> CodeFlavor {
    match code {
        VtreeCode::CI => CodeFlavor::CI,
        VtreeCode::CII => CodeFlavor::CII,
        VtreeCode::CU => CodeFlavor::CU,
        VtreeCode::CV => CodeFlavor::CV,
    }
}

/// Message of the last failure on this thread, or "" if none. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn vtree_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn vtree_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn vtree_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `"p/q"` or `"p"`.
///
/// # Safety
/// `text` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vtree_rational_parse(
    text: *const c_char,
    out: *mut *mut VtreeRational,
) -> VtreeStatus {
    guard(|| {
        let r = parse_rational(str_arg(text, "text")?)?;
        write_rational(out, r)
    })
}

/// Builds `p/q` in lowest terms; `q` must be nonzero.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vtree_rational_new(p: i64, q: i64, out: *mut *mut VtreeRational) -> VtreeStatus {
    guard(|| {
        if q == 0 {
            return Err(Fail(VtreeStatus::DomainError, "denominator is zero".into()));
        }
        write_rational(out, Rational::new(p.into(), q.into()))
    })
}

/// Frees a rational. Null is ignored.
///
/// # Safety
/// `r` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn vtree_rational_free(r: *mut VtreeRational) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Formats as `"p/q"`.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vtree_rational_format(r: *const VtreeRational, out: *mut *mut c_char) -> VtreeStatus {
    guard(|| write_string(out, format_rational(rational_arg(r, "r")?)))
}

/// Writes 1 to `out` if `a == b`, else 0.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vtree_rational_equal(
    a: *const VtreeRational,
    b: *const VtreeRational,
    out: *mut i32,
) -> VtreeStatus {
    guard(|| {
        let eq = rational_arg(a, "a")? == rational_arg(b, "b")?;
        write_out(out, eq as i32, "out")
    })
}

/// Address of `x` in (0,1) in the V10 tree, as a 0/1 string.
///
/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vtree_qmf_forward(x: *const VtreeRational, out: *mut *mut c_char) -> VtreeStatus {
    guard(|| write_string(out, qmf_forward(rational_arg(x, "x")?)?.to_string()))
}

/// Label of the V10 node at `address` (0/1 string, "" for the root).
///
/// # Safety
/// `address` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vtree_qmf_inverse(address: *const c_char, out: *mut *mut VtreeRational) -> VtreeStatus {
    guard(|| {
        let v: BitWord = str_arg(address, "address")?.parse()?;
        write_rational(out, qmf_inverse(&v)?)
    })
}

/// Dyadic image of `x` in (0,1), as `"a/2^k"`.
///
/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vtree_qmf_bar(x: *const VtreeRational, out: *mut *mut c_char) -> VtreeStatus {
    guard(|| write_string(out, qmf_bar(rational_arg(x, "x")?)?.to_string()))
}

/// Minkowski's function at `x` in (0,1), as `"a/2^k"`.
///
/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vtree_minkowski(x: *const VtreeRational, out: *mut *mut c_char) -> VtreeStatus {
    guard(|| write_string(out, minkowski_q(rational_arg(x, "x")?)?.to_string()))
}

/// Label of the node at `address` in `kind`.
///
/// # Safety
/// `address` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vtree_node_value(
    kind: VtreeTree,
    address: *const c_char,
    out: *mut *mut VtreeRational,
) -> VtreeStatus {
    guard(|| {
        let v: BitWord = str_arg(address, "address")?.parse()?;
        write_rational(out, node_value(tree(kind), &v)?)
    })
}

/// Address of `x` in `kind`.
///
/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vtree_address_of(
    kind: VtreeTree,
    x: *const VtreeRational,
    out: *mut *mut c_char,
) -> VtreeStatus {
    guard(|| write_string(out, address_of(tree(kind), rational_arg(x, "x")?)?.to_string()))
}

/// Codeword of `b >= 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vtree_encode(b: u64, code: VtreeCode, out: *mut *mut c_char) -> VtreeStatus {
    guard(|| write_string(out, encode_u64(b, flavor(code))?.to_string()))
}

/// Reads one complete codeword from the front of `bits`.
///
/// # Safety
/// `bits` must be a valid C string; `value` and `consumed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vtree_decode(
    bits: *const c_char,
    code: VtreeCode,
    value: *mut u64,
    consumed: *mut usize,
) -> VtreeStatus {
    guard(|| {
        let w: BitWord = str_arg(bits, "bits")?.parse()?;
        match decode_prefix(w.bits(), false, flavor(code))? {
            Decoded::Value { b, consumed: n } if n <= w.len() => {
                let b = u64::try_from(&b).map_err(|_| Fail(VtreeStatus::TooLarge, format!("{b} exceeds 64 bits")))?;
                write_out(value, b, "value")?;
                write_out(consumed, n, "consumed")
            }
            _ => Err(Fail(VtreeStatus::MalformedStream, "incomplete codeword".into())),
        }
    })
}

/// Entropy of `code` under the Gauss-Kuzmin distribution. `divergent` is set
/// to 1 (and `value` to the partial sum) when the series diverges.
///
/// # Safety
/// All out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn vtree_entropy(
    code: VtreeEntropyCode,
    value: *mut f64,
    error_bound: *mut f64,
    divergent: *mut i32,
) -> VtreeStatus {
    guard(|| {
        let e = entropy(match code {
            VtreeEntropyCode::Levy => EntropyCode::Levy,
            VtreeEntropyCode::GaussKuzmin => EntropyCode::GK,
            VtreeEntropyCode::CiCii => EntropyCode::CiCii,
            VtreeEntropyCode::SternBrocot => EntropyCode::SB,
        });
        let (v, d) = match e.finite() {
            Some(v) => (v, 0),
            None => (e.partial.unwrap_or(f64::INFINITY), 1),
        };
        write_out(value, v, "value")?;
        write_out(error_bound, e.error_bound, "error_bound")?;
        write_out(divergent, d, "divergent")
    })
}
