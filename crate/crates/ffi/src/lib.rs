//! C ABI over `idlearn`.
//!
//! Objects cross the boundary as opaque handles created by `*_from_json` or
//! `idl_learn` and released with the matching `*_free`. Every fallible call
//! returns an [`IdlStatus`]; on failure `idl_last_error_message` describes
//! the error on the calling thread. Strings returned through out-pointers
//! are owned by the caller and released with `idl_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use idlearn::admg::{Admg, Assignment, Symbol};
use idlearn::estimand::EstimandDoc;
use idlearn::generate;
use idlearn::identify::{identify, CausalQuery, Identification, QueryDoc};
use idlearn::jsonfmt;
use idlearn::learn::{learn, DistHandle, LearnConfig, LearnError, LearnedInterventional};
use idlearn::oracle::CausalBayesNet;
use idlearn::samples::SampleSet;
use serde_json::json;

/// Result code of every fallible call. The nonzero values match the exit
/// codes of the command line tool where they overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdlStatus {
    Ok = 0,
    NotIdentifiable = 2,
    PositivityViolation = 3,
    InvalidInput = 4,
    NullPointer = 5,
    Panic = 6,
}

/// An ADMG.
pub struct IdlAdmg(Admg);

/// A causal Bayes net with hidden variables.
pub struct IdlNet(CausalBayesNet);

/// A learned interventional distribution.
pub struct IdlLearned(LearnedInterventional);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(IdlStatus, String);

impl Failure {
    fn input(msg: impl ToString) -> Self {
        Failure(IdlStatus::InvalidInput, msg.to_string())
    }
}

impl From<LearnError> for Failure {
    fn from(e: LearnError) -> Self {
        let status = match e {
            LearnError::NotIdentifiable(_) => IdlStatus::NotIdentifiable,
            LearnError::PositivityViolation(_) => IdlStatus::PositivityViolation,
            _ => IdlStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IdlStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IdlStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            IdlStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(IdlStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::input("argument is not UTF-8"))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(IdlStatus::NullPointer, "null handle".into()))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(IdlStatus::NullPointer, "null output pointer".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure::input("output contains a NUL byte"))?;
    put(out, c.into_raw())
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn idl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn idl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an ADMG document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn idl_admg_from_json(json: *const c_char, out: *mut *mut IdlAdmg) -> IdlStatus {
    guard(|| {
        let g = Admg::from_json(text(json)?).map_err(Failure::input)?;
        put(out, Box::into_raw(Box::new(IdlAdmg(g))))
    })
}

/// # Safety
/// `g` must come from `idl_admg_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn idl_admg_free(g: *mut IdlAdmg) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

unsafe fn query(g: &Admg, json: *const c_char) -> Result<CausalQuery, Failure> {
    QueryDoc::from_json(text(json)?)
        .and_then(|d| d.into_query(g))
        .map_err(Failure::input)
}

/// Compiles a query. On success `out_json` receives
/// `{"identifiable": true, "estimand": {...}, "trace": [...]}`; when the
/// effect is not identifiable the status is `NOT_IDENTIFIABLE` and
/// `out_json` receives the hedge report.
///
/// # Safety
/// Pointers must be valid as described for the other functions.
#[no_mangle]
pub unsafe extern "C" fn idl_identify(g: *const IdlAdmg, query_json: *const c_char, out_json: *mut *mut c_char) -> IdlStatus {
    guard(|| {
        let g = &handle(g)?.0;
        let q = query(g, query_json)?;
        let id = identify(g, q.x.domain(), q.y).map_err(Failure::input)?;
        let trace: Vec<_> = id
            .trace()
            .iter()
            .map(|t| json!({ "step": t.step.id(), "depth": t.depth, "call": t.describe(g) }))
            .collect();
        let names = |s: idlearn::admg::VarSet| s.iter().map(|v| g.name(v).to_string()).collect::<Vec<_>>();
        match id {
            Identification::Identified { estimand, .. } => put_string(
                out_json,
                jsonfmt::to_string(&json!({
                    "identifiable": true,
                    "estimand": EstimandDoc::from_estimand(&estimand, g.names()),
                    "trace": trace,
                })),
            ),
            Identification::Hedge(w) => {
                put_string(
                    out_json,
                    jsonfmt::to_string(&json!({
                        "identifiable": false,
                        "hedge": { "root": names(w.root), "graph": names(w.graph), "intervened": names(w.x) },
                        "trace": trace,
                    })),
                )?;
                Err(Failure(IdlStatus::NotIdentifiable, "effect is not identifiable".into()))
            }
        }
    })
}

/// Parses a causal Bayes net document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn idl_net_from_json(json: *const c_char, out: *mut *mut IdlNet) -> IdlStatus {
    guard(|| {
        let net = CausalBayesNet::from_json(text(json)?).map_err(Failure::input)?;
        put(out, Box::into_raw(Box::new(IdlNet(net))))
    })
}

/// # Safety
/// `net` must come from `idl_net_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn idl_net_free(net: *mut IdlNet) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// `m` observational samples as CSV with a header of observable names.
///
/// # Safety
/// `net` must be a live handle; `out_csv` must be writable.
#[no_mangle]
pub unsafe extern "C" fn idl_net_simulate(net: *const IdlNet, seed: u64, m: usize, out_csv: *mut *mut c_char) -> IdlStatus {
    guard(|| {
        let net = &handle(net)?.0;
        let s = net.sample_observational(seed, m);
        let mut buf = Vec::new();
        s.write_csv(net.observable_names(), &mut buf).map_err(Failure::input)?;
        put_string(out_csv, String::from_utf8(buf).map_err(Failure::input)?)
    })
}

/// Exact `P_x(y)` as `{"targets": [...], "probs": [...]}`, cells ordered
/// with the last target varying fastest.
///
/// # Safety
/// Pointers must be valid as described for the other functions.
#[no_mangle]
pub unsafe extern "C" fn idl_net_exact_interventional(
    net: *const IdlNet,
    query_json: *const c_char,
    out_json: *mut *mut c_char,
) -> IdlStatus {
    guard(|| {
        let net = &handle(net)?.0;
        let g = net.latent_project().map_err(Failure::input)?;
        let q = query(&g, query_json)?;
        let t = net.exact_interventional(&q.x).map_err(Failure::input)?.marginalize(q.y);
        let targets: Vec<&str> = q.y.iter().map(|v| g.name(v)).collect();
        put_string(out_json, jsonfmt::to_string(&json!({ "targets": targets, "probs": t.probs() })))
    })
}

/// Learns `P_x(V ∖ X)` from CSV samples. The query must leave `targets`
/// unset or list every non-intervened variable.
///
/// # Safety
/// Pointers must be valid as described for the other functions.
#[no_mangle]
pub unsafe extern "C" fn idl_learn(
    g: *const IdlAdmg,
    samples_csv: *const c_char,
    query_json: *const c_char,
    epsilon: f64,
    delta: f64,
    alpha: f64,
    out: *mut *mut IdlLearned,
) -> IdlStatus {
    guard(|| {
        let g = &handle(g)?.0;
        let q = query(g, query_json)?;
        if q.y != g.vars().difference(q.x.domain()) {
            return Err(Failure::input("learning needs every non-intervened variable as a target"));
        }
        let samples = SampleSet::read_csv(g.names(), g.cardinalities(), text(samples_csv)?.as_bytes())
            .map_err(Failure::input)?;
        let config = LearnConfig {
            epsilon,
            delta,
            alpha,
            seed: None,
        };
        let li = learn(DistHandle::Samples(&samples), g, &q.x, &config)?;
        put(out, Box::into_raw(Box::new(IdlLearned(li))))
    })
}

/// Parses a learned-model document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn idl_learned_from_json(json: *const c_char, out: *mut *mut IdlLearned) -> IdlStatus {
    guard(|| {
        let li = LearnedInterventional::from_json(text(json)?)?;
        put(out, Box::into_raw(Box::new(IdlLearned(li))))
    })
}

/// Serializes a learned model.
///
/// # Safety
/// `li` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn idl_learned_to_json(li: *const IdlLearned, out_json: *mut *mut c_char) -> IdlStatus {
    guard(|| put_string(out_json, handle(li)?.0.to_json()))
}

/// # Safety
/// `li` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn idl_learned_free(li: *mut IdlLearned) {
    if !li.is_null() {
        drop(Box::from_raw(li));
    }
}

/// Number of graph variables; `idl_learned_eval` reads that many values.
///
/// # Safety
/// `li` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn idl_learned_num_vars(li: *const IdlLearned) -> usize {
    li.as_ref().map_or(0, |l| l.0.graph().num_vars())
}

/// Number of targets; each sample from `idl_learned_sample` has that many
/// values, in variable declaration order.
///
/// # Safety
/// `li` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn idl_learned_num_targets(li: *const IdlLearned) -> usize {
    li.as_ref().map_or(0, |l| l.0.targets().len())
}

/// `P̂_x(y)` at `values`, one symbol per graph variable in declaration
/// order. Entries of intervened variables are ignored.
///
/// # Safety
/// `values` must point to `len` readable entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn idl_learned_eval(li: *const IdlLearned, values: *const u32, len: usize, out: *mut f64) -> IdlStatus {
    guard(|| {
        let li = &handle(li)?.0;
        let g = li.graph();
        if values.is_null() {
            return Err(Failure(IdlStatus::NullPointer, "null value array".into()));
        }
        if len != g.num_vars() {
            return Err(Failure::input(format!("expected {} values, got {len}", g.num_vars())));
        }
        let vals = std::slice::from_raw_parts(values, len);
        let mut y = Assignment::empty();
        for v in li.targets().iter() {
            let s = vals[v.0];
            if s as usize >= g.cardinality(v) {
                return Err(Failure::input(format!("value {s} of `{}` is out of range", g.name(v))));
            }
            y.set(v, s as Symbol);
        }
        put(out, li.evaluate_point(&y)?)
    })
}

/// Draws `m` samples into `out`, row-major, `idl_learned_num_targets`
/// values per sample.
///
/// # Safety
/// `out` must point to `len` writable entries.
#[no_mangle]
pub unsafe extern "C" fn idl_learned_sample(li: *const IdlLearned, seed: u64, m: usize, out: *mut u32, len: usize) -> IdlStatus {
    guard(|| {
        let li = &handle(li)?.0;
        let width = li.targets().len();
        let needed = m
            .checked_mul(width)
            .ok_or_else(|| Failure::input("sample buffer size overflows"))?;
        if len < needed {
            return Err(Failure::input(format!("buffer holds {len} values, {needed} needed")));
        }
        if out.is_null() && needed > 0 {
            return Err(Failure(IdlStatus::NullPointer, "null sample buffer".into()));
        }
        let s = generate::sample(li, seed, m);
        for (i, row) in s.rows().enumerate() {
            for (j, v) in row.iter().enumerate() {
                out.add(i * width + j).write(*v as u32);
            }
        }
        Ok(())
    })
}
