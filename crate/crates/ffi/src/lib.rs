//! C interface to `gts-core`.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free` function. Every fallible call returns a
//! [`GtsStatus`]; on anything but `GTS_STATUS_OK` a message is available from
//! [`gts_last_error`] on the same thread. Strings handed out by the library
//! are released with [`gts_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gts_core::dpo::{reachable, DerivationSeq, DpoError, ReachMode, ReachOptions, ReachOutcome};
use gts_core::encode::{certify_trace, Certificate, EncodeError, InitialForm, RuleStyle};
use gts_core::graph::{congruent, normalize};
use gts_core::logic::check_term;
use gts_core::workspace::{Workspace, WorkspaceError};
use libc::{c_char, c_int, size_t};

/// Result of every fallible call. The first four agree with the exit codes
/// of the `gts` binary.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GtsStatus {
    Ok = 0,
    /// The question was answered negatively: not reachable, rejected by
    /// the kernel, not enough rule instances.
    Negative = 1,
    /// Malformed input or an unknown name.
    Input = 2,
    /// A state cap was hit before the search finished.
    Exhausted = 3,
    NullArgument = 4,
    InvalidUtf8 = 5,
    /// A bug in the library; the message carries the panic payload.
    Panic = 6,
}

/// How rule formulas are provided to a trace certificate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GtsRuleStyle {
    /// One reusable hypothesis per rule.
    Nonlinear = 0,
    /// Exactly as many linear instances as the trace applies each rule.
    Linear = 1,
}

/// A parsed set of declarations.
pub struct GtsWorkspace(Workspace);

/// A kernel-accepted sequent.
pub struct GtsCertificate(Certificate);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let mut bytes = msg.into().into_bytes();
    bytes.retain(|b| *b != 0);
    let c = CString::new(bytes).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(GtsStatus, String);

impl From<WorkspaceError> for Fail {
    fn from(e: WorkspaceError) -> Self {
        let status = match &e {
            WorkspaceError::Dpo(DpoError::CapReached(_)) => GtsStatus::Exhausted,
            _ => GtsStatus::Input,
        };
        Fail(status, e.to_string())
    }
}

impl From<EncodeError> for Fail {
    fn from(e: EncodeError) -> Self {
        let status = match &e {
            EncodeError::UnderProvisioned { .. } | EncodeError::UnusedInstances { .. } | EncodeError::Kernel(_) => {
                GtsStatus::Negative
            }
            EncodeError::Dpo(DpoError::CapReached(_)) => GtsStatus::Exhausted,
            _ => GtsStatus::Input,
        };
        Fail(status, e.to_string())
    }
}

impl From<DpoError> for Fail {
    fn from(e: DpoError) -> Self {
        let status = match &e {
            DpoError::CapReached(_) => GtsStatus::Exhausted,
            _ => GtsStatus::Input,
        };
        Fail(status, e.to_string())
    }
}

/// Runs `f`, turning failures and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GtsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GtsStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_error(format!("internal error: {msg}"));
            GtsStatus::Panic
        }
    }
}

unsafe fn string_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(GtsStatus::NullArgument, format!("`{what}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(GtsStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(GtsStatus::NullArgument, format!("`{what}` is null")))
}

fn out_arg<T>(p: *mut T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(GtsStatus::NullArgument, format!("output `{what}` is null")))
    } else {
        Ok(())
    }
}

fn to_c(s: String) -> *mut c_char {
    let mut bytes = s.into_bytes();
    bytes.retain(|b| *b != 0);
    CString::new(bytes).expect("interior NULs removed").into_raw()
}

fn find_trace(ws: &Workspace, target: &str, max_steps: u32) -> Result<DerivationSeq, Fail> {
    let gts = ws.gts()?;
    let opts = ReachOptions {
        max_steps: max_steps as usize,
        ..ReachOptions::default()
    };
    match reachable(&gts, ws.graph(target)?, &ReachMode::Unlimited, opts)? {
        ReachOutcome::Found(t) => Ok(t),
        ReachOutcome::NotFound => Err(Fail(
            GtsStatus::Negative,
            format!("`{target}` is not reachable within {max_steps} steps"),
        )),
        ReachOutcome::Exhausted { explored } => Err(Fail(
            GtsStatus::Exhausted,
            format!("state cap reached after {explored} states"),
        )),
    }
}

/// Message describing the last failure on this thread, or an empty string.
/// The pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn gts_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn gts_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses declarations (node and edge types, graphs, rules, formulas,
/// sequents) from `source`.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gts_workspace_parse(source: *const c_char, out: *mut *mut GtsWorkspace) -> GtsStatus {
    guard(|| {
        out_arg(out, "out")?;
        let src = string_arg(source, "source")?;
        let ws = Workspace::from_sources(&[("<input>".to_string(), src.to_string())])?;
        *out = Box::into_raw(Box::new(GtsWorkspace(ws)));
        Ok(())
    })
}

/// # Safety
/// `ws` must be null or a handle from [`gts_workspace_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gts_workspace_free(ws: *mut GtsWorkspace) {
    if !ws.is_null() {
        drop(Box::from_raw(ws));
    }
}

/// Writes the normal form of graph `name` as text to `out`.
///
/// # Safety
/// Pointers must be valid; `*out` must be released with [`gts_string_free`].
#[no_mangle]
pub unsafe extern "C" fn gts_workspace_normalize(
    ws: *const GtsWorkspace,
    name: *const c_char,
    out: *mut *mut c_char,
) -> GtsStatus {
    guard(|| {
        out_arg(out, "out")?;
        let ws = &handle(ws, "ws")?.0;
        let g = ws.graph(string_arg(name, "name")?)?;
        *out = to_c(normalize(g).to_expression().to_string());
        Ok(())
    })
}

/// Sets `*out` to whether graphs `a` and `b` are structurally congruent.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gts_workspace_congruent(
    ws: *const GtsWorkspace,
    a: *const c_char,
    b: *const c_char,
    out: *mut bool,
) -> GtsStatus {
    guard(|| {
        out_arg(out, "out")?;
        let ws = &handle(ws, "ws")?.0;
        let ga = ws.graph(string_arg(a, "a")?)?;
        let gb = ws.graph(string_arg(b, "b")?)?;
        *out = congruent(ga, gb).is_some();
        Ok(())
    })
}

/// Breadth-first search from the initial graph for a state congruent to
/// graph `target`. On success `*steps` is the length of a shortest trace;
/// `GTS_NEGATIVE` means no such state within `max_steps`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gts_workspace_reach(
    ws: *const GtsWorkspace,
    target: *const c_char,
    max_steps: u32,
    steps: *mut size_t,
) -> GtsStatus {
    guard(|| {
        out_arg(steps, "steps")?;
        let ws = &handle(ws, "ws")?.0;
        *steps = find_trace(ws, string_arg(target, "target")?, max_steps)?.len();
        Ok(())
    })
}

/// Finds a shortest trace to `target` and certifies it.
///
/// # Safety
/// Pointers must be valid; `*out` must be released with
/// [`gts_certificate_free`].
#[no_mangle]
pub unsafe extern "C" fn gts_workspace_certify_trace(
    ws: *const GtsWorkspace,
    target: *const c_char,
    max_steps: u32,
    style: GtsRuleStyle,
    out: *mut *mut GtsCertificate,
) -> GtsStatus {
    guard(|| {
        out_arg(out, "out")?;
        let ws = &handle(ws, "ws")?.0;
        let trace = find_trace(ws, string_arg(target, "target")?, max_steps)?;
        let style = match style {
            GtsRuleStyle::Nonlinear => RuleStyle::Nonlinear,
            GtsRuleStyle::Linear => RuleStyle::Linear(trace.rule_usage()),
        };
        let cert = certify_trace(&ws.gts()?, &trace, &style, InitialForm::Components)?;
        *out = Box::into_raw(Box::new(GtsCertificate(cert)));
        Ok(())
    })
}

/// Type-checks the declared sequent `name`. `GTS_NEGATIVE` means the kernel
/// rejected it; `*class` (if not null) then receives the diagnostic class,
/// for instance `linear_reuse`.
///
/// # Safety
/// Pointers must be valid; `class` may be null.
#[no_mangle]
pub unsafe extern "C" fn gts_workspace_check_sequent(
    ws: *const GtsWorkspace,
    name: *const c_char,
    class: *mut *mut c_char,
) -> GtsStatus {
    guard(|| {
        if !class.is_null() {
            *class = ptr::null_mut();
        }
        let ws = &handle(ws, "ws")?.0;
        let name = string_arg(name, "name")?;
        let s = ws.sequent(name)?;
        let Some(term) = &s.term else {
            return Err(Fail(GtsStatus::Input, format!("sequent `{name}` has no proof term")));
        };
        check_term(&s.ctx, term, &s.ty).map_err(|e| {
            if !class.is_null() {
                *class = to_c(e.class().to_string());
            }
            Fail(GtsStatus::Negative, e.to_string())
        })
    })
}

/// Reads a certificate from its JSON form and re-checks it. A rejected
/// certificate gives `GTS_NEGATIVE` and no handle.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gts_certificate_from_json(json: *const c_char, out: *mut *mut GtsCertificate) -> GtsStatus {
    guard(|| {
        out_arg(out, "out")?;
        *out = ptr::null_mut();
        let text = string_arg(json, "json")?;
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Fail(GtsStatus::Input, format!("json: {e}")))?;
        let s = Certificate::sequent_from_json(&v).map_err(|e| Fail(GtsStatus::Input, e))?;
        let cert = Certificate::verify(s).map_err(|e| Fail(GtsStatus::Negative, e.to_string()))?;
        *out = Box::into_raw(Box::new(GtsCertificate(cert)));
        Ok(())
    })
}

/// The certificate as JSON: `gamma`, `delta`, `term`, `type` and, for
/// traces, `trace`.
///
/// # Safety
/// Pointers must be valid; `*out` must be released with [`gts_string_free`].
#[no_mangle]
pub unsafe extern "C" fn gts_certificate_to_json(cert: *const GtsCertificate, out: *mut *mut c_char) -> GtsStatus {
    guard(|| {
        out_arg(out, "out")?;
        let cert = &handle(cert, "cert")?.0;
        *out = to_c(cert.to_json().to_string());
        Ok(())
    })
}

/// # Safety
/// `cert` must be null or a live certificate handle.
#[no_mangle]
pub unsafe extern "C" fn gts_certificate_free(cert: *mut GtsCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// Runs the `gts` command line with `argv[0..argc]` (program name first)
/// and hands back its exit code and output streams.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings; `stdout_out` and
/// `stderr_out` may be null when the caller does not want them.
#[no_mangle]
pub unsafe extern "C" fn gts_run(
    argc: c_int,
    argv: *const *const c_char,
    exit_code: *mut c_int,
    stdout_out: *mut *mut c_char,
    stderr_out: *mut *mut c_char,
) -> GtsStatus {
    guard(|| {
        out_arg(exit_code, "exit_code")?;
        if argc < 0 || (argc > 0 && argv.is_null()) {
            return Err(Fail(GtsStatus::NullArgument, "`argv` is null".to_string()));
        }
        let mut args = Vec::with_capacity(argc as usize);
        for i in 0..argc as usize {
            args.push(string_arg(*argv.add(i), "argv[i]")?.to_string());
        }
        let out = gts_core::cli::run(args);
        *exit_code = out.code as c_int;
        if !stdout_out.is_null() {
            *stdout_out = to_c(out.stdout);
        }
        if !stderr_out.is_null() {
            *stderr_out = to_c(out.stderr);
        }
        Ok(())
    })
}
