//! C ABI over `fratio`.
//!
//! Lists and families live behind opaque handles created by the `*_parse`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`FratioStatus`]; on failure [`fratio_last_error`] describes
//! the problem until the next call on the same thread. Strings returned
//! through `char **` out-parameters are owned by the caller and released
//! with [`fratio_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fratio::catalog::Catalog;
use fratio::criteria::{is_integral_ratio, norm, RatioVerdict};
use fratio::family::{verify_family_exact, AffineList};
use fratio::reducibility::{certify_irreducible, certify_with_any_prime, Conclusion};
use fratio::{Error, IntList};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FratioStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// Input text was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Input text did not parse.
    Parse = 3,
    /// Input parsed but violates a precondition.
    InvalidInput = 4,
    /// An intermediate value left the supported range.
    Overflow = 5,
    /// An internal error; the call had no effect.
    Internal = 6,
}

/// A list of nonzero integers.
pub struct FratioList(IntList);

/// A list whose entries are linear forms in up to four parameters.
pub struct FratioFamily(AffineList);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FratioStatus {
    match e {
        Error::Parse(_) => FratioStatus::Parse,
        Error::Overflow(_) => FratioStatus::Overflow,
        _ => FratioStatus::InvalidInput,
    }
}

fn fail(status: FratioStatus, msg: &str) -> FratioStatus {
    set_error(msg);
    status
}

/// Runs `f`, recording its error and turning panics into `Internal`.
fn guarded(f: impl FnOnce() -> Result<(), FratioStatus>) -> FratioStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FratioStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(FratioStatus::Internal, "internal error"),
    }
}

fn lib_err(e: Error) -> FratioStatus {
    fail(status_of(&e), &e.to_string())
}

unsafe fn read_text<'a>(p: *const c_char) -> Result<&'a str, FratioStatus> {
    if p.is_null() {
        return Err(fail(FratioStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(FratioStatus::InvalidUtf8, "string is not UTF-8"))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, FratioStatus> {
    p.as_ref()
        .ok_or_else(|| fail(FratioStatus::NullPointer, "null handle"))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), FratioStatus> {
    if out.is_null() {
        return Err(fail(FratioStatus::NullPointer, "null output pointer"));
    }
    out.write(v);
    Ok(())
}

/// Stores `s` in `*out` if `out` is not null; a null `out` skips it.
unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), FratioStatus> {
    if out.is_null() {
        return Ok(());
    }
    let c = CString::new(s).map_err(|_| fail(FratioStatus::Internal, "interior nul"))?;
    out.write(c.into_raw());
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, FratioStatus> {
    serde_json::to_string(v).map_err(|e| fail(FratioStatus::Internal, &e.to_string()))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn fratio_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fratio_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a list such as `"30,1,-15,-10,-6"` or `"[1,-3,9]"`.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fratio_list_parse(
    text: *const c_char,
    out: *mut *mut FratioList,
) -> FratioStatus {
    guarded(|| {
        let l: IntList = read_text(text)?.parse().map_err(lib_err)?;
        put(out, Box::into_raw(Box::new(FratioList(l))))
    })
}

/// # Safety
/// `list` must come from [`fratio_list_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fratio_list_free(list: *mut FratioList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}

/// Number of entries after cancellation.
///
/// # Safety
/// `list` must be a live handle or null (which gives 0).
#[no_mangle]
pub unsafe extern "C" fn fratio_list_len(list: *const FratioList) -> usize {
    list.as_ref().map_or(0, |l| l.0.len())
}

/// Copies up to `cap` entries into `buf` and stores the full length in
/// `*len`.
///
/// # Safety
/// `buf` must hold `cap` values; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fratio_list_entries(
    list: *const FratioList,
    buf: *mut i64,
    cap: usize,
    len: *mut usize,
) -> FratioStatus {
    guarded(|| {
        let l = deref(list)?;
        let e = l.0.entries();
        if cap > 0 && buf.is_null() {
            return Err(fail(FratioStatus::NullPointer, "null buffer"));
        }
        for (i, &v) in e.iter().take(cap).enumerate() {
            buf.add(i).write(v);
        }
        put(len, e.len())
    })
}

/// Landau test. Sets `*integral` to 1 or 0 and, when integral, `*height`.
/// `verdict_json` may be null; otherwise it receives the full verdict.
///
/// # Safety
/// Pointers must be live; `integral` and `height` writable.
#[no_mangle]
pub unsafe extern "C" fn fratio_list_check(
    list: *const FratioList,
    integral: *mut i32,
    height: *mut i64,
    verdict_json: *mut *mut c_char,
) -> FratioStatus {
    guarded(|| {
        let l = deref(list)?;
        let v = is_integral_ratio(&l.0);
        if let RatioVerdict::Invalid { reason } = &v {
            return Err(fail(FratioStatus::InvalidInput, reason));
        }
        put(integral, v.is_integral() as i32)?;
        put(height, v.height().unwrap_or(l.0.height()))?;
        put_string(verdict_json, to_json(&v)?)
    })
}

/// Exact norm as `"num/den"`.
///
/// # Safety
/// `list` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fratio_list_norm(
    list: *const FratioList,
    out: *mut *mut c_char,
) -> FratioStatus {
    guarded(|| {
        let l = deref(list)?;
        let n = norm(&l.0).map_err(lib_err)?;
        if out.is_null() {
            return Err(fail(FratioStatus::NullPointer, "null output pointer"));
        }
        put_string(out, n.to_string())
    })
}

/// Irreducibility certificate for a height-2 list. `prime` 0 tries every
/// prime from 11 up. Sets `*irreducible` to 1 only on a certificate.
///
/// # Safety
/// `list` must be live; `irreducible` writable; `cert_json` may be null.
#[no_mangle]
pub unsafe extern "C" fn fratio_list_certify(
    list: *const FratioList,
    prime: i64,
    irreducible: *mut i32,
    cert_json: *mut *mut c_char,
) -> FratioStatus {
    guarded(|| {
        let l = deref(list)?;
        let cert = if prime == 0 {
            certify_with_any_prime(&l.0).map_err(lib_err)?
        } else {
            Some(certify_irreducible(&l.0, prime).map_err(lib_err)?)
        };
        let yes = cert
            .as_ref()
            .is_some_and(|c| c.conclusion == Conclusion::Irreducible);
        put(irreducible, yes as i32)?;
        put_string(cert_json, to_json(&cert)?)
    })
}

/// Parses a family such as `"6a,b,-2a,-3a,-6b,-(a-5b)"`.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fratio_family_parse(
    text: *const c_char,
    out: *mut *mut FratioFamily,
) -> FratioStatus {
    guarded(|| {
        let f = AffineList::parse_shorthand(read_text(text)?).map_err(lib_err)?;
        put(out, Box::into_raw(Box::new(FratioFamily(f))))
    })
}

/// # Safety
/// `family` must come from [`fratio_family_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fratio_family_free(family: *mut FratioFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Number of parameters of a family; 0 for null.
///
/// # Safety
/// `family` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn fratio_family_dim(family: *const FratioFamily) -> usize {
    family.as_ref().map_or(0, |f| f.0.dim())
}

/// Exact sweep of a two-parameter family. Sets `*passed` to 1 or 0; a
/// failure comes with a witness point in `verdict_json`.
///
/// # Safety
/// `family` must be live; `passed` writable; `verdict_json` may be null.
#[no_mangle]
pub unsafe extern "C" fn fratio_family_verify_exact(
    family: *const FratioFamily,
    passed: *mut i32,
    verdict_json: *mut *mut c_char,
) -> FratioStatus {
    guarded(|| {
        let f = deref(family)?;
        let v = verify_family_exact(&f.0).map_err(lib_err)?;
        put(passed, v.passed() as i32)?;
        put_string(verdict_json, to_json(&v)?)
    })
}

/// Verifies one scope of the embedded catalog (`"all"` for everything).
///
/// # Safety
/// `scope` must be a nul-terminated string; `passed` writable;
/// `report_json` may be null.
#[no_mangle]
pub unsafe extern "C" fn fratio_catalog_verify(
    scope: *const c_char,
    passed: *mut i32,
    report_json: *mut *mut c_char,
) -> FratioStatus {
    guarded(|| {
        let r = Catalog::embedded()
            .verify(read_text(scope)?)
            .map_err(lib_err)?;
        put(passed, r.all_passed() as i32)?;
        put_string(report_json, to_json(&r)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::Parse("x".into())), FratioStatus::Parse);
        assert_eq!(status_of(&Error::Overflow("x")), FratioStatus::Overflow);
        assert_eq!(status_of(&Error::NotMonotone), FratioStatus::InvalidInput);
    }

    #[test]
    fn errors_are_per_call() {
        unsafe {
            let mut l = ptr::null_mut();
            assert_eq!(
                fratio_list_parse(ptr::null(), &mut l),
                FratioStatus::NullPointer
            );
            assert!(!fratio_last_error().is_null());
            let ok = CString::new("1,-2").unwrap();
            assert_eq!(fratio_list_parse(ok.as_ptr(), &mut l), FratioStatus::Ok);
            assert!(fratio_last_error().is_null());
            fratio_list_free(l);
        }
    }
}
