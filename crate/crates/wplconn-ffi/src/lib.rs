//! C ABI for the wplconn library.
//!
//! Values cross the boundary as JSON strings in the same schemas the command
//! line uses; sheaves can additionally be held behind an opaque handle so
//! repeated operations skip re-parsing. Every returned string is owned by
//! the caller and must be released with [`wpl_string_free`].
//!
//! Status codes mirror the CLI exit codes: `0` success, `1` domain-level
//! failure (the output JSON carries diagnostics), `2` malformed input,
//! `3` null pointer or invalid handle.

use serde_json::Value;
use std::ffi::{c_char, CStr, CString};
use std::ptr;
use wplconn::commands::{eval, CommandError, EvalOptions};
use wplconn::json as wj;
use wplconn::sheaf::PatchedSheaf;

pub const WPL_OK: i32 = 0;
pub const WPL_ERR_DOMAIN: i32 = 1;
pub const WPL_ERR_PARSE: i32 = 2;
pub const WPL_ERR_NULL: i32 = 3;

/// Opaque sheaf handle.
pub struct WplSheaf {
    inner: PatchedSheaf,
}

fn to_cstring(v: &Value) -> *mut c_char {
    let text = serde_json::to_string(v).unwrap_or_default();
    CString::new(text).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn set_out(out: *mut *mut c_char, v: &Value) {
    if !out.is_null() {
        unsafe {
            *out = to_cstring(v);
        }
    }
}

fn set_err(out: *mut *mut c_char, msg: &str) {
    if !out.is_null() {
        let v = serde_json::json!({ "ok": false, "error": msg });
        unsafe {
            *out = to_cstring(&v);
        }
    }
}

/// # Safety
/// `s` must be null or a pointer previously returned by this library and not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn wpl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn wpl_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, i32> {
    if p.is_null() {
        return Err(WPL_ERR_NULL);
    }
    CStr::from_ptr(p).to_str().map_err(|_| WPL_ERR_PARSE)
}

/// Runs a named command on a JSON input, exactly like the command line.
/// `output` receives the result JSON (or diagnostics on failure). `seed`,
/// `count` and `retries` feed the seeded commands; pass zeros for defaults.
///
/// # Safety
/// `command` and `input_json` must be null-terminated strings (the input may
/// be null for `selftest`); `output`, if non-null, receives an owned string.
#[no_mangle]
pub unsafe extern "C" fn wpl_eval(
    command: *const c_char,
    input_json: *const c_char,
    seed: u64,
    count: usize,
    retries: usize,
    output: *mut *mut c_char,
) -> i32 {
    let cmd = match read_str(command) {
        Ok(s) => s,
        Err(code) => {
            set_err(output, "command must be a valid string");
            return code;
        }
    };
    let input: Option<Value> = if input_json.is_null() {
        None
    } else {
        match read_str(input_json).map(serde_json::from_str::<Value>) {
            Ok(Ok(v)) => Some(v),
            _ => {
                set_err(output, "input is not valid JSON");
                return WPL_ERR_PARSE;
            }
        }
    };
    let opts = EvalOptions {
        seed: if seed == 0 { 1 } else { seed },
        count: count.max(1),
        jobs: 1,
        retries: if retries == 0 { 40 } else { retries },
    };
    match eval(cmd, input.as_ref(), &opts) {
        Ok(outcome) => {
            set_out(output, &outcome.value);
            if outcome.ok {
                WPL_OK
            } else {
                WPL_ERR_DOMAIN
            }
        }
        Err(CommandError::Domain(msg, value)) => {
            match value {
                Some(v) => set_out(output, &v),
                None => set_err(output, &msg),
            }
            WPL_ERR_DOMAIN
        }
        Err(CommandError::Input(msg)) => {
            set_err(output, &msg);
            WPL_ERR_PARSE
        }
        Err(CommandError::UnknownCommand(name)) => {
            set_err(output, &format!("unknown command {name:?}"));
            WPL_ERR_PARSE
        }
    }
}

/// Parses a sheaf from JSON into an opaque handle, or returns null with an
/// error message in `err`.
///
/// # Safety
/// `json` must be a null-terminated string; `err`, if non-null, receives an
/// owned string on failure.
#[no_mangle]
pub unsafe extern "C" fn wpl_sheaf_parse(
    json: *const c_char,
    err: *mut *mut c_char,
) -> *mut WplSheaf {
    let text = match read_str(json) {
        Ok(s) => s,
        Err(_) => {
            set_err(err, "null or non-UTF-8 input");
            return ptr::null_mut();
        }
    };
    let value: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            set_err(err, &format!("input is not valid JSON: {e}"));
            return ptr::null_mut();
        }
    };
    match wj::sheaf_from_json(&value) {
        Ok(s) => Box::into_raw(Box::new(WplSheaf { inner: s })),
        Err(e) => {
            set_err(err, &e.to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `handle` must be null or a pointer from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wpl_sheaf_free(handle: *mut WplSheaf) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

macro_rules! handle_ref {
    ($handle:expr, $out:expr) => {
        match $handle.as_ref() {
            Some(h) => &h.inner,
            None => {
                set_err($out, "null sheaf handle");
                return WPL_ERR_NULL;
            }
        }
    };
}

/// Rank of the sheaf behind the handle, or -1 for a null handle.
///
/// # Safety
/// `handle` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn wpl_sheaf_rank(handle: *const WplSheaf) -> i64 {
    match handle.as_ref() {
        Some(h) => h.inner.rank as i64,
        None => -1,
    }
}

/// Serializes the sheaf behind the handle.
///
/// # Safety
/// As [`wpl_sheaf_rank`]; `output` receives an owned string.
#[no_mangle]
pub unsafe extern "C" fn wpl_sheaf_to_json(
    handle: *const WplSheaf,
    output: *mut *mut c_char,
) -> i32 {
    let s = handle_ref!(handle, output);
    set_out(output, &wj::sheaf_to_json(s));
    WPL_OK
}

/// Full validity check; `report` receives `{ok, failures}`.
///
/// # Safety
/// As [`wpl_sheaf_rank`]; `report` receives an owned string.
#[no_mangle]
pub unsafe extern "C" fn wpl_sheaf_check(
    handle: *const WplSheaf,
    report: *mut *mut c_char,
) -> i32 {
    let s = handle_ref!(handle, report);
    let d = wplconn::sheaf::check_sheaf(s);
    set_out(report, &wj::diagnostics_to_json(&d));
    if d.ok() {
        WPL_OK
    } else {
        WPL_ERR_DOMAIN
    }
}

/// Flags at the marked points as JSON.
///
/// # Safety
/// As [`wpl_sheaf_rank`]; `output` receives an owned string.
#[no_mangle]
pub unsafe extern "C" fn wpl_sheaf_flags(
    handle: *const WplSheaf,
    output: *mut *mut c_char,
) -> i32 {
    let s = handle_ref!(handle, output);
    match wplconn::sheaf::extract_flags(s) {
        Ok(flags) => {
            set_out(output, &wj::flags_to_json(&flags));
            WPL_OK
        }
        Err(e) => {
            set_err(output, &e.to_string());
            WPL_ERR_DOMAIN
        }
    }
}

/// Shift by the integer vector `r` (length `r_len`), returning a new handle
/// or null with an error in `err`.
///
/// # Safety
/// `handle` as above; `r` must point to `r_len` readable values.
#[no_mangle]
pub unsafe extern "C" fn wpl_sheaf_shift(
    handle: *const WplSheaf,
    r: *const i64,
    r_len: usize,
    err: *mut *mut c_char,
) -> *mut WplSheaf {
    let Some(h) = handle.as_ref() else {
        set_err(err, "null sheaf handle");
        return ptr::null_mut();
    };
    if r.is_null() {
        set_err(err, "null shift vector");
        return ptr::null_mut();
    }
    let shifts = std::slice::from_raw_parts(r, r_len);
    match wplconn::sheaf::shift_sheaf(&h.inner, shifts) {
        Ok(s) => Box::into_raw(Box::new(WplSheaf { inner: s })),
        Err(e) => {
            set_err(err, &e.to_string());
            ptr::null_mut()
        }
    }
}

/// Omega twist, returning a new handle or null with an error in `err`.
///
/// # Safety
/// `handle` as above.
#[no_mangle]
pub unsafe extern "C" fn wpl_sheaf_twist_omega(
    handle: *const WplSheaf,
    err: *mut *mut c_char,
) -> *mut WplSheaf {
    let Some(h) = handle.as_ref() else {
        set_err(err, "null sheaf handle");
        return ptr::null_mut();
    };
    match wplconn::sheaf::twist_omega(&h.inner) {
        Ok(s) => Box::into_raw(Box::new(WplSheaf { inner: s })),
        Err(e) => {
            set_err(err, &e.to_string());
            ptr::null_mut()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn take(p: *mut c_char) -> String {
        assert!(!p.is_null());
        let s = CStr::from_ptr(p).to_str().unwrap().to_string();
        wpl_string_free(p);
        s
    }

    fn worked_tuple_json() -> String {
        let t = wplconn::bridge::worked_instance();
        serde_json::to_string(&wj::tuple_to_json(&t)).unwrap()
    }

    #[test]
    fn eval_round_trip() {
        let tuple = cstr(&worked_tuple_json());
        let cmd = cstr("fuchs2rep");
        let mut out: *mut c_char = ptr::null_mut();
        let code = unsafe { wpl_eval(cmd.as_ptr(), tuple.as_ptr(), 0, 0, 0, &mut out) };
        assert_eq!(code, WPL_OK);
        let text = unsafe { take(out) };
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["rep"]["dims"], serde_json::json!([2, 1, 1, 0]));
        assert_eq!(v["lambda"]["0"]["re"], "-1/2");
    }

    #[test]
    fn eval_error_paths() {
        let cmd = cstr("check-sheaf");
        let garbage = cstr("{ nope");
        let mut out: *mut c_char = ptr::null_mut();
        let code = unsafe { wpl_eval(cmd.as_ptr(), garbage.as_ptr(), 0, 0, 0, &mut out) };
        assert_eq!(code, WPL_ERR_PARSE);
        unsafe { wpl_string_free(out) };

        let unknown = cstr("no-such-command");
        let input = cstr("{}");
        let mut out: *mut c_char = ptr::null_mut();
        let code = unsafe { wpl_eval(unknown.as_ptr(), input.as_ptr(), 0, 0, 0, &mut out) };
        assert_eq!(code, WPL_ERR_PARSE);
        unsafe { wpl_string_free(out) };

        let code = unsafe { wpl_eval(ptr::null(), input.as_ptr(), 0, 0, 0, &mut out) };
        assert_eq!(code, WPL_ERR_NULL);
        unsafe { wpl_string_free(out) };
    }

    #[test]
    fn handle_lifecycle_and_operations() {
        let t = wplconn::bridge::worked_instance();
        let sheaf = wplconn::sheaf::parabolic_to_sheaf(t.rank, &t.flags, &t.weights).unwrap();
        let text = serde_json::to_string(&wj::sheaf_to_json(&sheaf)).unwrap();
        let json = cstr(&text);
        let mut err: *mut c_char = ptr::null_mut();
        let handle = unsafe { wpl_sheaf_parse(json.as_ptr(), &mut err) };
        assert!(!handle.is_null());
        assert_eq!(unsafe { wpl_sheaf_rank(handle) }, 2);

        let mut report: *mut c_char = ptr::null_mut();
        let code = unsafe { wpl_sheaf_check(handle, &mut report) };
        assert_eq!(code, WPL_OK);
        let text = unsafe { take(report) };
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["ok"], true);

        let mut flags_out: *mut c_char = ptr::null_mut();
        assert_eq!(unsafe { wpl_sheaf_flags(handle, &mut flags_out) }, WPL_OK);
        unsafe { wpl_string_free(flags_out) };

        // Shift by a full period at the first point and back.
        let r = [2i64, 0, 0];
        let shifted = unsafe { wpl_sheaf_shift(handle, r.as_ptr(), r.len(), &mut err) };
        assert!(!shifted.is_null());
        let back = {
            let r = [-2i64, 0, 0];
            unsafe { wpl_sheaf_shift(shifted, r.as_ptr(), r.len(), &mut err) }
        };
        assert!(!back.is_null());
        let mut a: *mut c_char = ptr::null_mut();
        let mut b: *mut c_char = ptr::null_mut();
        unsafe {
            wpl_sheaf_to_json(handle, &mut a);
            wpl_sheaf_to_json(back, &mut b);
            assert_eq!(take(a), take(b));
        }

        let twisted = unsafe { wpl_sheaf_twist_omega(handle, &mut err) };
        assert!(!twisted.is_null());
        let mut report: *mut c_char = ptr::null_mut();
        assert_eq!(unsafe { wpl_sheaf_check(twisted, &mut report) }, WPL_OK);
        unsafe {
            wpl_string_free(report);
            wpl_sheaf_free(twisted);
            wpl_sheaf_free(back);
            wpl_sheaf_free(shifted);
            wpl_sheaf_free(handle);
        }

        // Null-handle behavior.
        assert_eq!(unsafe { wpl_sheaf_rank(ptr::null()) }, -1);
        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(unsafe { wpl_sheaf_check(ptr::null(), &mut out) }, WPL_ERR_NULL);
        unsafe { wpl_string_free(out) };
    }

    #[test]
    fn parse_rejects_bad_sheaf() {
        let json = cstr("{\"weights\": []}");
        let mut err: *mut c_char = ptr::null_mut();
        let handle = unsafe { wpl_sheaf_parse(json.as_ptr(), &mut err) };
        assert!(handle.is_null());
        let msg = unsafe { take(err) };
        assert!(msg.contains("error"));
    }
}
