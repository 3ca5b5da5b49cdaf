//! C interface to the planning toolkit.
//!
//! Every function returns an [`MsStatus`]. Objects cross the boundary as
//! opaque handles that the caller releases with the matching `_free`
//! function. Strings returned through `out` parameters are owned by the
//! caller and released with [`ms_string_free`]. After a failed call,
//! [`ms_last_error`] describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use std::sync::Arc;

use milestone::bench::verify_goldens;
use milestone::domain::{parse_domain, DomainDef};
use milestone::envs::episode::EpisodeConfig;
use milestone::envs::{bins, blocks, drawers, run_episode, DomainId, EpisodeStatus};
use milestone::fol::syntax::{parse_state, print_state};
use milestone::introspector::{introspector_plan, IntrospectorConfig};
use milestone::mdp::RelMdp;
use milestone::mutation::{dump_mutations, MutabilityIndex, Mutator};
use milestone::planners::{bfs_oracle, Budget, PlannerKind};
use milestone::state::RelState;
use milestone::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    BadSpec = 5,
    LimitExceeded = 6,
    Replay = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MsEpisodeStatus {
    Success = 0,
    Failure = 1,
    Continue = 2,
    Budget = 3,
}

/// Outcome of one episode. The return is the exact fraction
/// `ret_numer / ret_denom`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MsEpisode {
    pub ret_numer: i64,
    pub ret_denom: i64,
    /// Meaningful only when `has_score` is true.
    pub normalized_score: f64,
    pub has_score: bool,
    pub plan_length: u64,
    pub nodes_expanded: u64,
    pub status: MsEpisodeStatus,
}

/// A relational domain definition.
pub struct MsDomain(Arc<DomainDef>);

/// A relational state.
pub struct MsState(RelState);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> MsStatus {
    match e {
        Error::Parse { .. } => MsStatus::Parse,
        Error::BadSpec(_) => MsStatus::BadSpec,
        Error::MutationLimit { .. } | Error::StateCapExceeded(_) => MsStatus::LimitExceeded,
        Error::Replay { .. } => MsStatus::Replay,
        Error::Io(_) => MsStatus::Io,
        _ => MsStatus::InvalidInput,
    }
}

struct Fail(MsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

// Runs `f`, turning errors and panics into a status code and a message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MsStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            MsStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(MsStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(MsStatus::InvalidUtf8, "string argument is not UTF-8".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(MsStatus::NullPointer, "null handle".into()))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(MsStatus::NullPointer, "null output pointer".into()));
    }
    out.write(v);
    Ok(())
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ms_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ms_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads one of the built-in domains: `blocks`, `bins` or `drawers`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_domain_builtin(name: *const c_char, out: *mut *mut MsDomain) -> MsStatus {
    guard(|| {
        let d = match text(name)? {
            "blocks" => blocks::shared(),
            "bins" => bins::shared(),
            "drawers" => drawers::shared(),
            other => return Err(Fail(MsStatus::InvalidInput, format!("unknown domain `{other}`"))),
        };
        put(out, Box::into_raw(Box::new(MsDomain(d))))
    })
}

/// Parses a domain definition.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_domain_parse(src: *const c_char, out: *mut *mut MsDomain) -> MsStatus {
    guard(|| {
        let d = parse_domain(text(src)?)?;
        put(out, Box::into_raw(Box::new(MsDomain(Arc::new(d)))))
    })
}

/// # Safety
/// `d` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ms_domain_free(d: *mut MsDomain) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Parses a state in the `(state (constants ...) (facts ...))` format.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_state_parse(src: *const c_char, out: *mut *mut MsState) -> MsStatus {
    guard(|| {
        let s = parse_state(text(src)?)?;
        put(out, Box::into_raw(Box::new(MsState(s))))
    })
}

/// # Safety
/// `s` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ms_state_free(s: *mut MsState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Prints a state in the format read by [`ms_state_parse`].
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_state_print(s: *const MsState, out: *mut *mut c_char) -> MsStatus {
    guard(|| put(out, owned(print_state(&handle(s)?.0))))
}

/// Mutations of `state` satisfying the domain's maximal-reward condition,
/// one per line.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_milestone_mutations(
    d: *const MsDomain,
    s: *const MsState,
    out: *mut *mut c_char,
) -> MsStatus {
    guard(|| {
        let (d, s) = (&handle(d)?.0, &handle(s)?.0);
        d.check_state(s)?;
        let idx = MutabilityIndex::new(d);
        let ms = Mutator::new(&idx).mutate_true(s, &d.reward.maximal_condition())?;
        put(out, owned(dump_mutations(&ms)))
    })
}

/// Counts reachable states and dead ends from `s`.
///
/// # Safety
/// Handles must be live; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_oracle_counts(
    d: *const MsDomain,
    s: *const MsState,
    state_cap: u64,
    out_states: *mut u64,
    out_dead_ends: *mut u64,
) -> MsStatus {
    guard(|| {
        let (d, s) = (&handle(d)?.0, &handle(s)?.0);
        d.check_state(s)?;
        let h = milestone::envs::relational_horizon(s.constants().len());
        let g = bfs_oracle(&RelMdp::new(Arc::clone(d), s.clone(), h), state_cap as usize)?;
        put(out_states, g.states.len() as u64)?;
        put(out_dead_ends, g.dead_ends.len() as u64)
    })
}

/// Plans with the bilevel planner and returns the actions, one per line.
///
/// # Safety
/// Handles must be live; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_introspector_plan(
    d: *const MsDomain,
    s: *const MsState,
    horizon: u64,
    node_cap: u64,
    out_actions: *mut *mut c_char,
    out_status: *mut MsEpisodeStatus,
) -> MsStatus {
    guard(|| {
        let (d, s) = (&handle(d)?.0, &handle(s)?.0);
        d.check_state(s)?;
        let cfg = IntrospectorConfig::new(horizon as usize, Budget::nodes(node_cap));
        let r = introspector_plan(d, s, &cfg)?;
        let lines: String = r.stats.plan.actions.iter().map(|a| format!("{a}\n")).collect();
        let status = if r.stats.budget_exhausted {
            MsEpisodeStatus::Budget
        } else {
            episode_status(match r.stats.plan.status {
                milestone::reward::TerminationValue::Success => EpisodeStatus::Success,
                milestone::reward::TerminationValue::Failure => EpisodeStatus::Failure,
                milestone::reward::TerminationValue::Continue => EpisodeStatus::Continue,
            })
        };
        put(out_status, status)?;
        put(out_actions, owned(lines))
    })
}

fn episode_status(s: EpisodeStatus) -> MsEpisodeStatus {
    match s {
        EpisodeStatus::Success => MsEpisodeStatus::Success,
        EpisodeStatus::Failure => MsEpisodeStatus::Failure,
        EpisodeStatus::Continue => MsEpisodeStatus::Continue,
        EpisodeStatus::Budget => MsEpisodeStatus::Budget,
    }
}

/// Runs one episode. `domain` is `grid`, `blocks`, `drawers:N` or `bins:N`;
/// `planner` is e.g. `greedy`, `beam:8` or `introspector`. A `node_cap` of
/// zero selects the default cap.
///
/// # Safety
/// Strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_run_episode(
    domain: *const c_char,
    size: u64,
    planner: *const c_char,
    seed: u64,
    node_cap: u64,
    out: *mut MsEpisode,
) -> MsStatus {
    guard(|| {
        let domain: DomainId = text(domain)?.parse()?;
        let planner: PlannerKind = text(planner)?.parse()?;
        let mut cfg = EpisodeConfig::default();
        if node_cap > 0 {
            cfg.budget.node_cap = node_cap;
        }
        let r = run_episode(domain, size as usize, planner, seed, cfg)?;
        put(
            out,
            MsEpisode {
                ret_numer: *r.ret.numer(),
                ret_denom: *r.ret.denom(),
                normalized_score: r.normalized_score.unwrap_or(f64::NAN),
                has_score: r.normalized_score.is_some(),
                plan_length: r.plan_length as u64,
                nodes_expanded: r.nodes_expanded,
                status: episode_status(r.status),
            },
        )
    })
}

/// Runs the golden checks; `out_report` receives the JSON report.
///
/// # Safety
/// Outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_verify_goldens(out_passed: *mut bool, out_report: *mut *mut c_char) -> MsStatus {
    guard(|| {
        let r = verify_goldens();
        put(out_passed, r.passed())?;
        put(out_report, owned(serde_json::to_string(&r).map_err(|e| Fail(MsStatus::Io, e.to_string()))?))
    })
}

