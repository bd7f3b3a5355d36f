//! C interface to the `permuton` crate.
//!
//! Objects are handed out as opaque pointers and must be released with the
//! matching `*_free` function. Every fallible call returns a [`PtStatus`];
//! the message of the last failure on the calling thread is available from
//! [`pt_last_error`]. Strings returned through out-parameters are owned by
//! the caller and released with [`pt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use permuton::moments::{expectation_lambda, joint_moment_with_budget};
use permuton::perm::occ_exact;
use permuton::rational::{format_fraction, to_f64};
use permuton::sampler::sample_separable;
use permuton::tree::decomposition_tree;
use permuton::{Error, Permutation, Rational, SignedTree};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidPermutation = 3,
    NotSeparable = 4,
    BudgetExceeded = 5,
    Panic = 6,
}

/// Opaque permutation handle.
pub struct PtPermutation(Permutation);

/// Opaque signed Schröder tree handle.
pub struct PtSignedTree(SignedTree);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PtStatus {
    match e {
        Error::NotSeparable => PtStatus::NotSeparable,
        Error::BudgetExceeded { .. } => PtStatus::BudgetExceeded,
        Error::InvalidPermutation(_) | Error::Parse(_) => PtStatus::InvalidPermutation,
        _ => PtStatus::InvalidArgument,
    }
}

/// Runs `f`, recording errors and panics.
fn guard(f: impl FnOnce() -> Result<(), PtStatus>) -> PtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PtStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            PtStatus::Panic
        }
    }
}

fn fail(e: Error) -> PtStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null() -> PtStatus {
    set_error("null pointer argument".into());
    PtStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, PtStatus> {
    p.as_ref().ok_or_else(null)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), PtStatus> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, PtStatus> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not valid UTF-8".into());
        PtStatus::InvalidArgument
    })
}

unsafe fn write_fraction(
    q: &Rational,
    out_fraction: *mut *mut c_char,
    out_value: *mut f64,
) -> Result<(), PtStatus> {
    if out_fraction.is_null() || out_value.is_null() {
        return Err(null());
    }
    out_fraction.write(into_c_string(format_fraction(q)));
    out_value.write(to_f64(q));
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a permutation from `len` values, a rearrangement of `1..=len`.
///
/// # Safety
/// `values` must point to `len` readable integers and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pt_perm_new(
    values: *const u32,
    len: usize,
    out: *mut *mut PtPermutation,
) -> PtStatus {
    guard(|| {
        if values.is_null() {
            return Err(null());
        }
        let v = std::slice::from_raw_parts(values, len).to_vec();
        let p = Permutation::new(v).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(PtPermutation(p))))
    })
}

/// Parses a permutation such as `"2413"` or `"10 2 1 3 4 5 6 7 8 9"`.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pt_perm_parse(
    text: *const c_char,
    out: *mut *mut PtPermutation,
) -> PtStatus {
    guard(|| {
        let p = Permutation::parse_pattern(read_str(text)?).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(PtPermutation(p))))
    })
}

/// # Safety
/// `p` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pt_perm_free(p: *mut PtPermutation) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Size of the permutation, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pt_perm_len(p: *const PtPermutation) -> usize {
    p.as_ref().map_or(0, |p| p.0.size())
}

/// Copies the values into `out`, which must hold at least `pt_perm_len(p)`
/// integers; `cap` is its capacity.
///
/// # Safety
/// `p` must be a live handle and `out` must have room for `cap` integers.
#[no_mangle]
pub unsafe extern "C" fn pt_perm_values(
    p: *const PtPermutation,
    out: *mut u32,
    cap: usize,
) -> PtStatus {
    guard(|| {
        let p = deref(p)?;
        if out.is_null() {
            return Err(null());
        }
        let v = p.0.values();
        if cap < v.len() {
            set_error(format!("buffer holds {cap} values, {} needed", v.len()));
            return Err(PtStatus::InvalidArgument);
        }
        ptr::copy_nonoverlapping(v.as_ptr(), out, v.len());
        Ok(())
    })
}

/// Space-separated values of the permutation.
///
/// # Safety
/// `p` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pt_perm_to_string(
    p: *const PtPermutation,
    out: *mut *mut c_char,
) -> PtStatus {
    guard(|| {
        let p = deref(p)?;
        write_out(out, into_c_string(p.0.to_string()))
    })
}

/// # Safety
/// `p` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pt_is_separable(p: *const PtPermutation, out: *mut bool) -> PtStatus {
    guard(|| {
        let p = deref(p)?;
        write_out(out, p.0.is_separable())
    })
}

/// Exact density of `pattern` in `sigma` as a fraction string and a double.
///
/// # Safety
/// Both handles must be live and both out-parameters writable.
#[no_mangle]
pub unsafe extern "C" fn pt_occ_exact(
    pattern: *const PtPermutation,
    sigma: *const PtPermutation,
    out_fraction: *mut *mut c_char,
    out_value: *mut f64,
) -> PtStatus {
    guard(|| {
        let (pi, s) = (deref(pattern)?, deref(sigma)?);
        write_fraction(&occ_exact(&pi.0, &s.0), out_fraction, out_value)
    })
}

/// Decomposition tree of a separable permutation; `PT_STATUS_NOT_SEPARABLE`
/// otherwise.
///
/// # Safety
/// `p` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pt_decompose(
    p: *const PtPermutation,
    out: *mut *mut PtSignedTree,
) -> PtStatus {
    guard(|| {
        let p = deref(p)?;
        let t = decomposition_tree(&p.0).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(PtSignedTree(t))))
    })
}

/// Parses a signed tree such as `"(+ L (- L L))"`.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pt_tree_parse(
    text: *const c_char,
    out: *mut *mut PtSignedTree,
) -> PtStatus {
    guard(|| {
        let t: SignedTree = read_str(text)?.parse().map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(PtSignedTree(t))))
    })
}

/// # Safety
/// `t` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pt_tree_to_string(
    t: *const PtSignedTree,
    out: *mut *mut c_char,
) -> PtStatus {
    guard(|| {
        let t = deref(t)?;
        write_out(out, into_c_string(t.0.to_string()))
    })
}

/// The permutation of a signed tree.
///
/// # Safety
/// `t` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pt_tree_perm(
    t: *const PtSignedTree,
    out: *mut *mut PtPermutation,
) -> PtStatus {
    guard(|| {
        let t = deref(t)?;
        write_out(out, Box::into_raw(Box::new(PtPermutation(t.0.perm()))))
    })
}

/// # Safety
/// `t` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pt_tree_free(t: *mut PtSignedTree) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Limit expectation of the density of `pattern` in uniform separable
/// permutations.
///
/// # Safety
/// `pattern` must be a live handle and both out-parameters writable.
#[no_mangle]
pub unsafe extern "C" fn pt_expectation(
    pattern: *const PtPermutation,
    out_fraction: *mut *mut c_char,
    out_value: *mut f64,
) -> PtStatus {
    guard(|| {
        let p = deref(pattern)?;
        write_fraction(&expectation_lambda(&p.0), out_fraction, out_value)
    })
}

/// Joint limit moment of the densities of `count` patterns. Fails with
/// `PT_STATUS_BUDGET_EXCEEDED` when more than `budget` partition pairs would
/// be enumerated.
///
/// # Safety
/// `patterns` must point to `count` live handles and both out-parameters
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn pt_joint_moment(
    patterns: *const *const PtPermutation,
    count: usize,
    budget: u64,
    out_fraction: *mut *mut c_char,
    out_value: *mut f64,
) -> PtStatus {
    guard(|| {
        if patterns.is_null() {
            return Err(null());
        }
        let list = std::slice::from_raw_parts(patterns, count)
            .iter()
            .map(|&p| deref(p).map(|p| p.0.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let q = joint_moment_with_budget(&list, budget as u128).map_err(fail)?;
        write_fraction(&q, out_fraction, out_value)
    })
}

/// Uniform random separable permutation of size `n`, determined by `seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pt_sample_separable(
    n: usize,
    seed: u64,
    out: *mut *mut PtPermutation,
) -> PtStatus {
    guard(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = sample_separable(n, &mut rng).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(PtPermutation(p))))
    })
}
