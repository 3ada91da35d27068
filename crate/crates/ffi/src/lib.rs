//! C ABI over `autonomy-core`.
//!
//! Every fallible function returns an [`AutonomyStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`autonomy_last_error`] on the same thread. Handles and strings returned
//! here are owned by the caller and released with the matching `_free`
//! function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use autonomy_core::adjudicator::{judge, RuleParams, TaxCase, Verdict};
use autonomy_core::court::{
    default_constitution, replay, run_simulation, Constitution, RequestType, SimulationTrace,
    REQUEST_TYPES,
};
use autonomy_core::equilibrium::{
    model_from_tax_params, render_ascii, render_svg, solve_equilibrium, DiagramOptions,
    Equilibrium, LinearLawModel,
};
use autonomy_core::formats::{export_trace, parse_cases, parse_constitution};
use autonomy_core::money::{parse_money, parse_rate};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutonomyStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    DomainError = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutonomyVerdictKind {
    FullyPaid = 0,
    DecisionUpheld = 1,
    DecisionNullifiedRecalculated = 2,
}

/// Amounts are in micro-units (10^-6 UAH) and are zero unless the kind is
/// `DecisionNullifiedRecalculated`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AutonomyVerdict {
    pub kind: AutonomyVerdictKind,
    pub correct_debt_micros: i64,
    pub allowed_penalty_micros: i64,
}

/// A solved rights/duties model.
pub struct AutonomyEquilibrium {
    model: LinearLawModel,
    equilibrium: Equilibrium,
}

/// A validated tax case.
pub struct AutonomyCase(TaxCase);

/// A 12-entry permission matrix.
pub struct AutonomyConstitution(Constitution);

/// The records of one court session.
pub struct AutonomyTrace(SimulationTrace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(AutonomyStatus, String);

type Outcome<T> = Result<T, Failure>;

fn parse_failure(e: impl ToString) -> Failure {
    Failure(AutonomyStatus::ParseError, e.to_string())
}

fn domain_failure(e: impl ToString) -> Failure {
    Failure(AutonomyStatus::DomainError, e.to_string())
}

/// Runs `body`, turning errors and panics into a status and a stored message.
fn guard(body: impl FnOnce() -> Outcome<()>) -> AutonomyStatus {
    match panic::catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            AutonomyStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            AutonomyStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(Failure(AutonomyStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(AutonomyStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Outcome<&'a T> {
    p.as_ref()
        .ok_or_else(|| Failure(AutonomyStatus::NullArgument, format!("{name} is null")))
}

unsafe fn put<T>(out: *mut T, value: T) -> Outcome<()> {
    if out.is_null() {
        return Err(Failure(AutonomyStatus::NullArgument, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Outcome<()> {
    put(out, owned_string(s))
}

/// Static version string, e.g. `0.1.0`. Do not free.
#[no_mangle]
pub extern "C" fn autonomy_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the last error message on this thread, or NULL if the last call
/// succeeded. Free with [`autonomy_string_free`].
#[no_mangle]
pub extern "C" fn autonomy_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn autonomy_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the tax model from decimal strings (evasion total in UAH, tax and
/// penalty rates) and solves it.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn autonomy_equilibrium_new(
    evasion_total: *const c_char,
    tax_rate: *const c_char,
    penalty_rate: *const c_char,
    out: *mut *mut AutonomyEquilibrium,
) -> AutonomyStatus {
    guard(|| {
        let evasion = parse_money(text(evasion_total, "evasion_total")?).map_err(domain_failure)?;
        let t = parse_rate(text(tax_rate, "tax_rate")?).map_err(domain_failure)?;
        let p = parse_rate(text(penalty_rate, "penalty_rate")?).map_err(domain_failure)?;
        let model = model_from_tax_params(evasion, t, p).map_err(domain_failure)?;
        let equilibrium = solve_equilibrium(&model);
        put(out, Box::into_raw(Box::new(AutonomyEquilibrium { model, equilibrium })))
    })
}

/// # Safety
/// `h` must be NULL or a handle from [`autonomy_equilibrium_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn autonomy_equilibrium_free(h: *mut AutonomyEquilibrium) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

unsafe fn equilibrium_field(
    h: *const AutonomyEquilibrium,
    out: *mut *mut c_char,
    pick: impl FnOnce(&autonomy_core::equilibrium::EquilibriumPoint) -> String,
) -> AutonomyStatus {
    guard(|| {
        let h = handle(h, "equilibrium")?;
        let point = h
            .equilibrium
            .point()
            .ok_or_else(|| domain_failure(&h.equilibrium))?;
        put_string(out, pick(point))
    })
}

/// Equilibrium income rounded to `digits` decimals, or as an exact fraction
/// `a/b` when `exact` is true.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn autonomy_equilibrium_income(
    h: *const AutonomyEquilibrium,
    digits: u32,
    exact: bool,
    out: *mut *mut c_char,
) -> AutonomyStatus {
    equilibrium_field(h, out, |p| {
        if exact {
            p.income.to_string()
        } else {
            p.income.to_fixed(digits)
        }
    })
}

/// Equilibrium responsibility, formatted as for [`autonomy_equilibrium_income`].
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn autonomy_equilibrium_responsibility(
    h: *const AutonomyEquilibrium,
    digits: u32,
    exact: bool,
    out: *mut *mut c_char,
) -> AutonomyStatus {
    equilibrium_field(h, out, |p| {
        if exact {
            p.responsibility.to_string()
        } else {
            p.responsibility.to_fixed(digits)
        }
    })
}

/// SVG diagram with the default window.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn autonomy_equilibrium_svg(
    h: *const AutonomyEquilibrium,
    out: *mut *mut c_char,
) -> AutonomyStatus {
    guard(|| {
        let h = handle(h, "equilibrium")?;
        let svg = render_svg(&h.model, &h.equilibrium, &DiagramOptions::default()).map_err(domain_failure)?;
        put_string(out, svg)
    })
}

/// 80x24 character diagram with legend.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn autonomy_equilibrium_ascii(
    h: *const AutonomyEquilibrium,
    out: *mut *mut c_char,
) -> AutonomyStatus {
    guard(|| {
        let h = handle(h, "equilibrium")?;
        let ascii = render_ascii(&h.model, &h.equilibrium, &DiagramOptions::default()).map_err(domain_failure)?;
        put_string(out, ascii)
    })
}

/// Validates a case from decimal strings with at most two decimals.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn autonomy_case_new(
    plaintiff: *const c_char,
    tax_base: *const c_char,
    tax_paid: *const c_char,
    assessed_debt: *const c_char,
    assessed_penalty: *const c_char,
    out: *mut *mut AutonomyCase,
) -> AutonomyStatus {
    guard(|| {
        let case = TaxCase::parse(
            text(plaintiff, "plaintiff")?,
            text(tax_base, "tax_base")?,
            text(tax_paid, "tax_paid")?,
            text(assessed_debt, "assessed_debt")?,
            text(assessed_penalty, "assessed_penalty")?,
        )
        .map_err(domain_failure)?;
        put(out, Box::into_raw(Box::new(AutonomyCase(case))))
    })
}

/// # Safety
/// `h` must be NULL or a handle from [`autonomy_case_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn autonomy_case_free(h: *mut AutonomyCase) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Adjudicates under the default rules (18% tax, 20% penalty, 0.01 tolerance),
/// writing the verdict and, if `judgment` is not NULL, the judgment text.
///
/// # Safety
/// `h` must be a live handle; `verdict` must be writable; `judgment` must be
/// NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn autonomy_case_adjudicate(
    h: *const AutonomyCase,
    verdict: *mut AutonomyVerdict,
    judgment: *mut *mut c_char,
) -> AutonomyStatus {
    guard(|| {
        let case = &handle(h, "case")?.0;
        let (v, text) = judge(case, &RuleParams::default());
        let c = match v {
            Verdict::FullyPaid => AutonomyVerdict {
                kind: AutonomyVerdictKind::FullyPaid,
                correct_debt_micros: 0,
                allowed_penalty_micros: 0,
            },
            Verdict::DecisionUpheld => AutonomyVerdict {
                kind: AutonomyVerdictKind::DecisionUpheld,
                correct_debt_micros: 0,
                allowed_penalty_micros: 0,
            },
            Verdict::DecisionNullifiedRecalculated { correct_debt, allowed_penalty } => AutonomyVerdict {
                kind: AutonomyVerdictKind::DecisionNullifiedRecalculated,
                correct_debt_micros: correct_debt.micros(),
                allowed_penalty_micros: allowed_penalty.micros(),
            },
        };
        put(verdict, c)?;
        if !judgment.is_null() {
            put_string(judgment, text)?;
        }
        Ok(())
    })
}

/// Adjudicates a whole case file (JSON Lines); judgments are separated by
/// blank lines. Nothing is written on a parse error.
///
/// # Safety
/// `case_file` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn autonomy_adjudicate_file(
    case_file: *const c_char,
    out: *mut *mut c_char,
) -> AutonomyStatus {
    guard(|| {
        let cases = parse_cases(text(case_file, "case_file")?).map_err(parse_failure)?;
        let params = RuleParams::default();
        let judgments: Vec<String> = cases.iter().map(|c| judge(c, &params).1).collect();
        let mut all = judgments.join("\n\n");
        if !all.is_empty() {
            all.push('\n');
        }
        put_string(out, all)
    })
}

/// The bundled OS constitution.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn autonomy_constitution_default(out: *mut *mut AutonomyConstitution) -> AutonomyStatus {
    guard(|| put(out, Box::into_raw(Box::new(AutonomyConstitution(default_constitution())))))
}

/// Parses constitution rule lines; unruled request types are denied.
///
/// # Safety
/// `source` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn autonomy_constitution_parse(
    source: *const c_char,
    out: *mut *mut AutonomyConstitution,
) -> AutonomyStatus {
    guard(|| {
        let (c, _warnings) = parse_constitution(text(source, "source")?).map_err(parse_failure)?;
        put(out, Box::into_raw(Box::new(AutonomyConstitution(c))))
    })
}

/// Whether request type `index` (0..12, canonical order) is allowed.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn autonomy_constitution_allows(
    h: *const AutonomyConstitution,
    index: u32,
    out: *mut bool,
) -> AutonomyStatus {
    guard(|| {
        let c = &handle(h, "constitution")?.0;
        let allowed = *c
            .permissions()
            .get(index as usize)
            .ok_or_else(|| domain_failure(format!("request index {index} is not in 0..12")))?;
        put(out, allowed)
    })
}

/// # Safety
/// `h` must be NULL or a constitution handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn autonomy_constitution_free(h: *mut AutonomyConstitution) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Seeded session of `n_cases` random requests.
///
/// # Safety
/// `constitution` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn autonomy_court_simulate(
    constitution: *const AutonomyConstitution,
    seed: u64,
    n_cases: usize,
    out: *mut *mut AutonomyTrace,
) -> AutonomyStatus {
    guard(|| {
        let c = &handle(constitution, "constitution")?.0;
        let trace = run_simulation(c, seed, n_cases).map_err(domain_failure)?;
        put(out, Box::into_raw(Box::new(AutonomyTrace(trace))))
    })
}

/// Replays `n_cases` request indices from `knowledge` (12 entries, true =
/// believed allowed).
///
/// # Safety
/// `knowledge` must point to 12 readable bools and `cases` to `n_cases`
/// readable indices; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn autonomy_court_replay(
    constitution: *const AutonomyConstitution,
    knowledge: *const bool,
    cases: *const u32,
    n_cases: usize,
    out: *mut *mut AutonomyTrace,
) -> AutonomyStatus {
    guard(|| {
        let c = &handle(constitution, "constitution")?.0;
        let knowledge: [bool; REQUEST_TYPES] = *handle(knowledge.cast::<[bool; REQUEST_TYPES]>(), "knowledge")?;
        if cases.is_null() && n_cases > 0 {
            return Err(Failure(AutonomyStatus::NullArgument, "cases is null".into()));
        }
        let indices = if n_cases == 0 { &[][..] } else { std::slice::from_raw_parts(cases, n_cases) };
        let requests = indices
            .iter()
            .map(|&i| {
                RequestType::from_index(i as usize)
                    .ok_or_else(|| domain_failure(format!("request index {i} is not in 0..12")))
            })
            .collect::<Outcome<Vec<_>>>()?;
        let trace = replay(c, knowledge, &requests).map_err(domain_failure)?;
        put(out, Box::into_raw(Box::new(AutonomyTrace(trace))))
    })
}

/// Number of records; 0 for NULL.
///
/// # Safety
/// `h` must be NULL or a live trace handle.
#[no_mangle]
pub unsafe extern "C" fn autonomy_trace_len(h: *const AutonomyTrace) -> usize {
    h.as_ref().map_or(0, |t| t.0.records.len())
}

/// Number of records where the lawyer was wrong; 0 for NULL.
///
/// # Safety
/// `h` must be NULL or a live trace handle.
#[no_mangle]
pub unsafe extern "C" fn autonomy_trace_wrong_count(h: *const AutonomyTrace) -> usize {
    h.as_ref().map_or(0, |t| t.0.wrong_count())
}

/// Human-readable log, one judgment per line.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn autonomy_trace_log(h: *const AutonomyTrace, out: *mut *mut c_char) -> AutonomyStatus {
    guard(|| put_string(out, handle(h, "trace")?.0.log()))
}

/// Structured JSON Lines export.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn autonomy_trace_export(h: *const AutonomyTrace, out: *mut *mut c_char) -> AutonomyStatus {
    guard(|| put_string(out, export_trace(&handle(h, "trace")?.0).structured))
}

/// Final autonomy estimation, e.g. `83%`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn autonomy_trace_autonomy(h: *const AutonomyTrace, out: *mut *mut c_char) -> AutonomyStatus {
    guard(|| put_string(out, handle(h, "trace")?.0.final_autonomy_text.clone()))
}

/// # Safety
/// `h` must be NULL or a trace handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn autonomy_trace_free(h: *mut AutonomyTrace) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    unsafe fn take(s: *mut c_char) -> String {
        let out = CStr::from_ptr(s).to_str().unwrap().to_string();
        autonomy_string_free(s);
        out
    }

    #[test]
    fn errors_are_reported_per_call() {
        unsafe {
            let mut h = ptr::null_mut();
            let status = autonomy_equilibrium_new(c"1".as_ptr(), c"1.5".as_ptr(), c"0.25".as_ptr(), &mut h);
            assert_eq!(status, AutonomyStatus::DomainError);
            assert!(h.is_null());
            assert!(take(autonomy_last_error()).contains("tax_rate"));
            let status = autonomy_equilibrium_new(c"1".as_ptr(), c"0.5".as_ptr(), c"0.25".as_ptr(), &mut h);
            assert_eq!(status, AutonomyStatus::Ok);
            assert!(autonomy_last_error().is_null());
            autonomy_equilibrium_free(h);
        }
    }

    #[test]
    fn null_arguments() {
        unsafe {
            let mut h = ptr::null_mut();
            assert_eq!(
                autonomy_equilibrium_new(ptr::null(), c"0.5".as_ptr(), c"0.25".as_ptr(), &mut h),
                AutonomyStatus::NullArgument
            );
            assert_eq!(
                autonomy_equilibrium_new(c"1".as_ptr(), c"0.5".as_ptr(), c"0.25".as_ptr(), ptr::null_mut()),
                AutonomyStatus::NullArgument
            );
            let mut s = ptr::null_mut();
            assert_eq!(autonomy_trace_log(ptr::null(), &mut s), AutonomyStatus::NullArgument);
            assert_eq!(autonomy_trace_len(ptr::null()), 0);
            autonomy_string_free(ptr::null_mut());
            autonomy_trace_free(ptr::null_mut());
        }
    }

    #[test]
    fn version_is_static() {
        let v = unsafe { CStr::from_ptr(autonomy_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
