//! C ABI over `strongmech`.
//!
//! Objects cross the boundary as opaque pointers created by `sm_*_new`-style
//! constructors and released by the matching `sm_*_free`. Every fallible
//! call returns an [`SmStatus`]; on failure `sm_last_error_message` holds a
//! description until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use strongmech::analysis::{eta_bound, gamma_threshold, verify_predicate};
use strongmech::cli::ScenarioFile;
use strongmech::scoring::{bounding_constants, RuleKind, ScoringRule};
use strongmech::strongtruth::{strong_truth_modulus, Mechanism};
use strongmech::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Validation = 3,
    UnboundedDomain = 4,
    UnboundedScore = 5,
    TrivialRule = 6,
    Feasibility = 7,
    Budget = 8,
    InvalidUtf8 = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmRuleKind {
    Quadratic = 0,
    Spherical = 1,
    Logarithmic = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SmEvaluation {
    pub allocation: f64,
    pub payment: f64,
    pub utility: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SmModulus {
    pub m: f64,
    pub value: f64,
    pub report: f64,
}

/// Opaque single-agent mechanism.
pub struct SmMechanism(Mechanism);

/// Opaque scoring rule.
pub struct SmScoringRule(ScoringRule);

/// Opaque validated scenario.
pub struct SmScenario(ScenarioFile);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SmStatus {
    match e {
        Error::Domain(_) => SmStatus::Domain,
        Error::UnboundedDomain => SmStatus::UnboundedDomain,
        Error::UnboundedScore(_) => SmStatus::UnboundedScore,
        Error::TrivialRule => SmStatus::TrivialRule,
        Error::Feasibility(_) => SmStatus::Feasibility,
        Error::Budget { .. } => SmStatus::Budget,
        Error::Validation { .. } => SmStatus::Validation,
    }
}

enum Failure {
    Status(SmStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(SmStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> SmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SmStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            SmStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next `sm_*` call on the same thread.
#[no_mangle]
pub extern "C" fn sm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Linear mechanism on `[low, high]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sm_mechanism_linear(low: f64, high: f64, out: *mut *mut SmMechanism) -> SmStatus {
    guard(|| {
        let m = Mechanism::linear(low, high)?;
        write(out, Box::into_raw(Box::new(SmMechanism(m))), "out")
    })
}

/// Log-family mechanism of order `k` on `[low, high]`; `high` may be infinite.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sm_mechanism_log(k: u32, low: f64, high: f64, out: *mut *mut SmMechanism) -> SmStatus {
    guard(|| {
        let m = Mechanism::log_family(k, low, high)?;
        write(out, Box::into_raw(Box::new(SmMechanism(m))), "out")
    })
}

/// # Safety
/// `mech` must come from an `sm_mechanism_*` constructor, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn sm_mechanism_free(mech: *mut SmMechanism) {
    if !mech.is_null() {
        drop(Box::from_raw(mech));
    }
}

/// # Safety
/// `mech` must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sm_mechanism_evaluate(mech: *const SmMechanism, v: f64, out: *mut SmEvaluation) -> SmStatus {
    guard(|| {
        let e = borrow(mech, "mech")?.0.evaluate(v)?;
        write(
            out,
            SmEvaluation {
                allocation: e.allocation,
                payment: e.payment,
                utility: e.utility,
            },
            "out",
        )
    })
}

/// Utility `value * a(report) - p(report)`.
///
/// # Safety
/// `mech` must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sm_mechanism_misreport_utility(
    mech: *const SmMechanism,
    value: f64,
    report: f64,
    out: *mut f64,
) -> SmStatus {
    guard(|| {
        let u = borrow(mech, "mech")?.0.misreport_utility(value, report)?;
        write(out, u, "out")
    })
}

/// Grid strong-truthfulness modulus with its witness pair.
///
/// # Safety
/// `mech` must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sm_mechanism_modulus(mech: *const SmMechanism, grid_step: f64, out: *mut SmModulus) -> SmStatus {
    guard(|| {
        let m = strong_truth_modulus(&borrow(mech, "mech")?.0, grid_step)?;
        write(
            out,
            SmModulus {
                m: m.m,
                value: m.value,
                report: m.report,
            },
            "out",
        )
    })
}

/// Standard scoring rule over `n + 1` outcomes.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sm_rule_standard(kind: SmRuleKind, n: usize, out: *mut *mut SmScoringRule) -> SmStatus {
    guard(|| {
        let kind = match kind {
            SmRuleKind::Quadratic => RuleKind::Quadratic,
            SmRuleKind::Spherical => RuleKind::Spherical,
            SmRuleKind::Logarithmic => RuleKind::Logarithmic,
        };
        let r = ScoringRule::standard(kind, n)?;
        write(out, Box::into_raw(Box::new(SmScoringRule(r))), "out")
    })
}

/// # Safety
/// `rule` must come from `sm_rule_standard`, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn sm_rule_free(rule: *mut SmScoringRule) {
    if !rule.is_null() {
        drop(Box::from_raw(rule));
    }
}

/// `(C0, C)` on a simplex grid.
///
/// # Safety
/// `rule` must be live; `c0` and `c` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sm_rule_bounding_constants(
    rule: *const SmScoringRule,
    grid_step: f64,
    c0: *mut f64,
    c: *mut f64,
) -> SmStatus {
    guard(|| {
        if c0.is_null() || c.is_null() {
            return Err(null("output"));
        }
        let k = bounding_constants(&borrow(rule, "rule")?.0, grid_step)?;
        write(c0, k.c0, "c0")?;
        write(c, k.c, "c")
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sm_eta_bound(n: usize, delta: f64, gamma: f64, out: *mut f64) -> SmStatus {
    guard(|| write(out, eta_bound(n, delta, gamma)?, "out"))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sm_gamma_threshold(n: usize, delta: f64, epsilon: f64, out: *mut f64) -> SmStatus {
    guard(|| write(out, gamma_threshold(n, delta, epsilon)?, "out"))
}

/// Parses and validates a scenario document (JSON).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sm_scenario_from_json(json: *const c_char, out: *mut *mut SmScenario) -> SmStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure::Status(SmStatus::InvalidUtf8, e.to_string()))?;
        let file = ScenarioFile::parse(text)?;
        write(out, Box::into_raw(Box::new(SmScenario(file))), "out")
    })
}

/// # Safety
/// `scenario` must come from `sm_scenario_from_json`, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn sm_scenario_free(scenario: *mut SmScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs the predicate check. `report_json` receives a string to release
/// with `sm_string_free`; `pass` receives the verdict.
///
/// # Safety
/// `scenario` must be live; `report_json` and `pass` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sm_scenario_verify(
    scenario: *const SmScenario,
    report_json: *mut *mut c_char,
    pass: *mut bool,
) -> SmStatus {
    guard(|| {
        if report_json.is_null() || pass.is_null() {
            return Err(null("output"));
        }
        let s = borrow(scenario, "scenario")?.0.build()?;
        let r = verify_predicate(&s)?;
        let text = serde_json::to_string(&r).expect("report serializes");
        let c = CString::new(text).expect("JSON has no NUL bytes");
        write(pass, r.pass, "pass")?;
        write(report_json, c.into_raw(), "report_json")
    })
}

/// # Safety
/// `s` must come from this library, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn sm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
