//! C ABI over `orrkit`. Every call returns an `OrrStatus`; on failure the
//! message is available from `orr_last_error` on the same thread. Strings
//! handed out are owned by the caller and released with `orr_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use orrkit::galois::GaloisAutomorphism;
use orrkit::koszul;
use orrkit::lyndon::{d_rank, witt_rank};
use orrkit::magnus::{self, Depth};
use orrkit::ring::Ring;
use orrkit::words::Word;
use orrkit::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Precondition = 4,
    Invalid = 5,
    Panic = 6,
}

/// Opaque reduced word in a free group.
pub struct OrrWord(Word);

/// Opaque automorphism built from a JSON config.
pub struct OrrAutomorphism(GaloisAutomorphism);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(OrrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } => OrrStatus::Parse,
            Error::Precondition(_)
            | Error::InsufficientGuard { .. }
            | Error::IndexTooLong { .. } => OrrStatus::Precondition,
            _ => OrrStatus::Invalid,
        };
        Failure(status, e.to_string())
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> OrrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OrrStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            OrrStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(OrrStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(OrrStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn read_ref<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(OrrStatus::NullPointer, "null handle".into()))
}

unsafe fn read_index<'a>(p: *const usize, len: usize) -> Result<&'a [usize], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure(OrrStatus::NullPointer, "null index".into()));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(
            OrrStatus::NullPointer,
            "null output pointer".into(),
        ));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(OrrStatus::Invalid, "interior nul".into()))?;
    write_out(out, c.into_raw())
}

fn ring(ell: u64, m: u32) -> Result<Ring, Failure> {
    if ell == 0 {
        Ok(Ring::Integers)
    } else {
        Ok(Ring::mod_prime_power(ell, m)?)
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn orr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn orr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `N_k(n)` as a decimal string.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn orr_witt_rank(n: u64, k: u64, out: *mut *mut c_char) -> OrrStatus {
    guard(|| write_string(out, witt_rank(n, k).to_string()))
}

/// `D_k(n) = nN_k(n) - N_{k+1}(n)` as a decimal string.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn orr_d_rank(n: u64, k: u64, out: *mut *mut c_char) -> OrrStatus {
    guard(|| write_string(out, d_rank(n, k).to_string()))
}

/// H_3 weight decomposition of `L/L_{≥k}` as `"a⊕b⊕…"` (UTF-8), from the rank formula.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn orr_h3_cell(n: u64, k: u64, out: *mut *mut c_char) -> OrrStatus {
    guard(|| {
        if n == 0 || k < 2 {
            return Err(Failure(
                OrrStatus::Precondition,
                "need n ≥ 1 and k ≥ 2".into(),
            ));
        }
        write_string(out, koszul::h3_formula_cell(n, k))
    })
}

/// Koszul homology `H_degree(L/L_{≥k})` computed directly, as JSON.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn orr_homology_json(
    n: usize,
    k: usize,
    degree: usize,
    out: *mut *mut c_char,
) -> OrrStatus {
    guard(|| {
        let h = koszul::homology(n, k, degree)?;
        let s =
            serde_json::to_string(&h).map_err(|e| Failure(OrrStatus::Invalid, e.to_string()))?;
        write_string(out, s)
    })
}

/// Parse a word such as `"[[x1,x2],x2] x1^-3"` in the free group of rank `n`.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn orr_word_parse(
    text: *const c_char,
    n: usize,
    out: *mut *mut OrrWord,
) -> OrrStatus {
    guard(|| {
        let w = Word::parse(read_str(text)?, n)?;
        write_out(out, Box::into_raw(Box::new(OrrWord(w))))
    })
}

/// # Safety
/// `w` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn orr_word_free(w: *mut OrrWord) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// # Safety
/// `a`, `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn orr_word_multiply(
    a: *const OrrWord,
    b: *const OrrWord,
    out: *mut *mut OrrWord,
) -> OrrStatus {
    guard(|| {
        let w = read_ref(a)?.0.multiply(&read_ref(b)?.0)?;
        write_out(out, Box::into_raw(Box::new(OrrWord(w))))
    })
}

/// Reduced syllable form of the word.
///
/// # Safety
/// `w` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn orr_word_to_string(w: *const OrrWord, out: *mut *mut c_char) -> OrrStatus {
    guard(|| write_string(out, read_ref(w)?.0.to_string()))
}

/// Magnus coefficient `μ(I; w)` over Z (`ell = 0`) or Z/ℓ^M.
///
/// # Safety
/// `w` must be a live handle, `index` must point to `len` values, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn orr_magnus_coefficient(
    w: *const OrrWord,
    index: *const usize,
    len: usize,
    ell: u64,
    m: u32,
    out: *mut *mut c_char,
) -> OrrStatus {
    guard(|| {
        let idx = read_index(index, len)?;
        let c = magnus::coefficient(&read_ref(w)?.0, idx, len, &ring(ell, m)?)?;
        write_string(out, c.to_string())
    })
}

/// Lower-central depth of `w` seen through truncation `degree`. `exact` is
/// false when the word is trivial up to the truncation and `depth` is only a
/// lower bound.
///
/// # Safety
/// `w` must be a live handle; `depth` and `exact` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn orr_lcs_depth(
    w: *const OrrWord,
    degree: usize,
    depth: *mut usize,
    exact: *mut bool,
) -> OrrStatus {
    guard(|| {
        let (d, e) = match magnus::lcs_depth(&read_ref(w)?.0, degree, &Ring::Integers)? {
            Depth::Exact(d) => (d, true),
            Depth::AtLeast(d) => (d, false),
        };
        write_out(depth, d)?;
        write_out(exact, e)
    })
}

/// Build an automorphism from a JSON config (`n`, `K`, `ell`, `M`, `chi`, `y`).
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn orr_automorphism_from_json(
    json: *const c_char,
    out: *mut *mut OrrAutomorphism,
) -> OrrStatus {
    guard(|| {
        let s = GaloisAutomorphism::from_json(read_str(json)?)?;
        write_out(out, Box::into_raw(Box::new(OrrAutomorphism(s))))
    })
}

/// # Safety
/// `a` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn orr_automorphism_free(a: *mut OrrAutomorphism) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Milnor invariant `μ(σ; J)` mod ℓ^M.
///
/// # Safety
/// `a` must be a live handle, `index` must point to `len` values, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn orr_automorphism_milnor(
    a: *const OrrAutomorphism,
    index: *const usize,
    len: usize,
    out: *mut *mut c_char,
) -> OrrStatus {
    guard(|| {
        let v = read_ref(a)?.0.milnor_invariant(read_index(index, len)?)?;
        write_string(out, v.to_string())
    })
}

/// JSON report `depth | milnor | tau | tower | n2`; `k` and `l` of zero mean unset.
///
/// # Safety
/// `a` must be a live handle, `report` a nul-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn orr_automorphism_report(
    a: *const OrrAutomorphism,
    report: *const c_char,
    k: usize,
    l: usize,
    out: *mut *mut c_char,
) -> OrrStatus {
    guard(|| {
        let opt = |x: usize| (x != 0).then_some(x);
        let v = read_ref(a)?
            .0
            .report_json(read_str(report)?, opt(k), opt(l))?;
        write_string(out, v.to_string())
    })
}
