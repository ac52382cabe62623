// SPDX-License-Identifier: Apache-2.0

//! C ABI over `tangle-sim`.
//!
//! All objects cross the boundary as opaque handles created and destroyed by
//! this library. Fallible calls return a [`TsStatus`]; the message for the
//! most recent failure on the calling thread is available from
//! [`ts_last_error_message`]. Times are seconds as `double`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use tangle_sim::config::{ConfigError, SimConfig};
use tangle_sim::ledger::{LedgerError, Tangle, TransactionId, MAX_PARENTS};
use tangle_sim::metrics::{self, ClassStats, MetricsError, RunSummary};
use tangle_sim::oracle::{self, Fault};
use tangle_sim::selection::Strategy;
use tangle_sim::sim::{self, SimTrace, TxClass};
use tangle_sim::time::SimTime;

/// Parent slots in [`TsRecord`]; equals the ledger's arity bound.
pub const TS_MAX_PARENTS: usize = 8;

const _: () = assert!(TS_MAX_PARENTS == MAX_PARENTS);

/// Result codes. The first four match the command-line exit statuses.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    ConfigInvalid = 1,
    IoFailure = 2,
    OracleMismatch = 3,
    NullPointer = 4,
    InvalidArgument = 5,
    OutOfRange = 6,
    UnknownParent = 7,
    ParentArity = 8,
    TimeRegression = 9,
    UnknownTransaction = 10,
    WorkloadMismatch = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsStrategy {
    Uniform = 0,
    Ptsa = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsClass {
    Priority = 0,
    Common = 1,
}

/// Opaque simulation configuration.
pub struct TsConfig {
    inner: SimConfig,
}

/// Opaque completed simulation trace.
pub struct TsTrace {
    inner: SimTrace,
}

/// Opaque ledger for driving the DAG directly.
pub struct TsTangle {
    inner: Tangle,
}

/// One transaction lifecycle record. `parents[..parent_count]` is valid.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TsRecord {
    pub id: u64,
    pub class_: TsClass,
    pub issued_at: f64,
    pub confirmed: bool,
    /// Meaningful only when `confirmed`.
    pub confirmed_at: f64,
    pub parent_count: u32,
    pub parents: [u64; TS_MAX_PARENTS],
}

/// Latency fields are meaningful only when `confirmed > 0`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TsClassStats {
    pub issued: u64,
    pub confirmed: u64,
    pub mean_latency: f64,
    pub median_latency: f64,
    pub p95_latency: f64,
    pub unconfirmed_fraction: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TsComparison {
    pub has_latency_reduction: bool,
    pub latency_reduction: f64,
    pub starvation_delta: f64,
    pub ptsa_wins: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(text).ok());
}

fn fail(status: TsStatus, message: impl Into<String>) -> TsStatus {
    set_error(message);
    status
}

fn guard(body: impl FnOnce() -> TsStatus) -> TsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(TsStatus::Panic, "internal panic"),
    }
}

fn config_status(e: ConfigError) -> TsStatus {
    let status = match e {
        ConfigError::Io { .. } => TsStatus::IoFailure,
        _ => TsStatus::ConfigInvalid,
    };
    fail(status, e.to_string())
}

fn metrics_status(e: MetricsError) -> TsStatus {
    let status = match e {
        MetricsError::WorkloadMismatch { .. } => TsStatus::WorkloadMismatch,
        _ => TsStatus::IoFailure,
    };
    fail(status, e.to_string())
}

fn ledger_status(e: LedgerError) -> TsStatus {
    let status = match e {
        LedgerError::UnknownParent(_) => TsStatus::UnknownParent,
        LedgerError::ParentArity(_) => TsStatus::ParentArity,
        LedgerError::TimeRegression { .. } => TsStatus::TimeRegression,
        LedgerError::UnknownTransaction(_) => TsStatus::UnknownTransaction,
    };
    fail(status, e.to_string())
}

unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, TsStatus> {
    if s.is_null() {
        return Err(fail(TsStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(TsStatus::InvalidArgument, "string is not UTF-8"))
}

unsafe fn out_handle<T>(out: *mut *mut T, value: T) -> TsStatus {
    if out.is_null() {
        return fail(TsStatus::NullPointer, "null output pointer");
    }
    *out = Box::into_raw(Box::new(value));
    TsStatus::Ok
}

macro_rules! deref {
    ($ptr:expr) => {
        match $ptr.as_ref() {
            Some(v) => v,
            None => return fail(TsStatus::NullPointer, concat!("null ", stringify!($ptr))),
        }
    };
    (mut $ptr:expr) => {
        match $ptr.as_mut() {
            Some(v) => v,
            None => return fail(TsStatus::NullPointer, concat!("null ", stringify!($ptr))),
        }
    };
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ts_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// The reference configuration. Free with [`ts_config_free`].
#[no_mangle]
pub extern "C" fn ts_config_default() -> *mut TsConfig {
    Box::into_raw(Box::new(TsConfig { inner: SimConfig::default() }))
}

/// Parses and validates TOML configuration text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ts_config_from_toml(text: *const c_char, out: *mut *mut TsConfig) -> TsStatus {
    guard(|| {
        let text = match c_str(text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match SimConfig::from_toml_str(text) {
            Ok(inner) => out_handle(out, TsConfig { inner }),
            Err(e) => config_status(e),
        }
    })
}

/// Loads and validates a TOML configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ts_config_load(path: *const c_char, out: *mut *mut TsConfig) -> TsStatus {
    guard(|| {
        let path = match c_str(path) {
            Ok(p) => PathBuf::from(p),
            Err(status) => return status,
        };
        match SimConfig::load(&path) {
            Ok(inner) => out_handle(out, TsConfig { inner }),
            Err(e) => config_status(e),
        }
    })
}

/// # Safety
/// `config` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ts_config_set_seed(config: *mut TsConfig, seed: u64) -> TsStatus {
    let config = deref!(mut config);
    config.inner.seed = seed;
    TsStatus::Ok
}

/// # Safety
/// `config` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ts_config_set_strategy(config: *mut TsConfig, strategy: TsStrategy) -> TsStatus {
    let config = deref!(mut config);
    config.inner.strategy = match strategy {
        TsStrategy::Uniform => Strategy::Uniform,
        TsStrategy::Ptsa => Strategy::Ptsa,
    };
    TsStatus::Ok
}

/// # Safety
/// `config` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ts_config_free(config: *mut TsConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs one simulation with the configured strategy.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ts_simulate(config: *const TsConfig, out: *mut *mut TsTrace) -> TsStatus {
    let config = deref!(config);
    guard(|| match sim::run_simulation(&config.inner) {
        Ok(inner) => out_handle(out, TsTrace { inner }),
        Err(e) => config_status(e),
    })
}

/// Runs the configured workload under the uniform baseline and under ptsa.
///
/// # Safety
/// `config` must be a live handle; `uniform` and `ptsa` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ts_paired_runs(
    config: *const TsConfig,
    uniform: *mut *mut TsTrace,
    ptsa: *mut *mut TsTrace,
) -> TsStatus {
    let config = deref!(config);
    if uniform.is_null() || ptsa.is_null() {
        return fail(TsStatus::NullPointer, "null output pointer");
    }
    guard(|| match sim::paired_runs(&config.inner) {
        Ok((u, p)) => {
            *uniform = Box::into_raw(Box::new(TsTrace { inner: u }));
            *ptsa = Box::into_raw(Box::new(TsTrace { inner: p }));
            TsStatus::Ok
        }
        Err(e) => config_status(e),
    })
}

/// Number of records (genesis excluded). Zero for NULL.
///
/// # Safety
/// `trace` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ts_trace_len(trace: *const TsTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.inner.records.len())
}

/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ts_trace_record(trace: *const TsTrace, index: usize, out: *mut TsRecord) -> TsStatus {
    let trace = deref!(trace);
    let out = deref!(mut out);
    let Some(r) = trace.inner.records.get(index) else {
        return fail(TsStatus::OutOfRange, format!("record {index} out of range"));
    };
    let mut parents = [0u64; TS_MAX_PARENTS];
    for (slot, p) in parents.iter_mut().zip(&r.parents) {
        *slot = p.get();
    }
    *out = TsRecord {
        id: r.id.get(),
        class_: match r.class {
            TxClass::Priority => TsClass::Priority,
            TxClass::Common => TsClass::Common,
        },
        issued_at: r.issued_at.as_secs_f64(),
        confirmed: r.confirmed_at.is_some(),
        confirmed_at: r.confirmed_at.map_or(0.0, SimTime::as_secs_f64),
        parent_count: r.parents.len() as u32,
        parents,
    };
    TsStatus::Ok
}

fn to_c_stats(s: &ClassStats) -> TsClassStats {
    TsClassStats {
        issued: s.issued as u64,
        confirmed: s.confirmed as u64,
        mean_latency: s.mean_latency.unwrap_or(0.0),
        median_latency: s.median_latency.unwrap_or(0.0),
        p95_latency: s.p95_latency.unwrap_or(0.0),
        unconfirmed_fraction: s.unconfirmed_fraction,
    }
}

/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ts_trace_class_stats(
    trace: *const TsTrace,
    class_: TsClass,
    out: *mut TsClassStats,
) -> TsStatus {
    let trace = deref!(trace);
    let out = deref!(mut out);
    let class = match class_ {
        TsClass::Priority => TxClass::Priority,
        TsClass::Common => TxClass::Common,
    };
    *out = to_c_stats(&metrics::class_stats(&trace.inner, class));
    TsStatus::Ok
}

/// # Safety
/// Both traces must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ts_compare(uniform: *const TsTrace, ptsa: *const TsTrace, out: *mut TsComparison) -> TsStatus {
    let uniform = deref!(uniform);
    let ptsa = deref!(ptsa);
    let out = deref!(mut out);
    match metrics::compare(&uniform.inner, &ptsa.inner) {
        Ok(r) => {
            *out = TsComparison {
                has_latency_reduction: r.latency_reduction.is_some(),
                latency_reduction: r.latency_reduction.unwrap_or(0.0),
                starvation_delta: r.starvation_delta,
                ptsa_wins: r.ptsa_wins(),
            };
            TsStatus::Ok
        }
        Err(e) => metrics_status(e),
    }
}

fn create(path: &str) -> Result<BufWriter<File>, TsStatus> {
    File::create(path).map(BufWriter::new).map_err(|e| fail(TsStatus::IoFailure, format!("{path}: {e}")))
}

/// Writes the trace CSV to `path`.
///
/// # Safety
/// `trace` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ts_trace_export_csv(trace: *const TsTrace, path: *const c_char) -> TsStatus {
    let trace = deref!(trace);
    let file = match c_str(path).and_then(create) {
        Ok(f) => f,
        Err(status) => return status,
    };
    metrics::export_csv(&trace.inner, file).map_or_else(metrics_status, |()| TsStatus::Ok)
}

/// Writes the run summary JSON to `path`.
///
/// # Safety
/// `trace` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ts_trace_export_summary_json(trace: *const TsTrace, path: *const c_char) -> TsStatus {
    let trace = deref!(trace);
    let file = match c_str(path).and_then(create) {
        Ok(f) => f,
        Err(status) => return status,
    };
    metrics::export_json(&RunSummary::of(&trace.inner), file).map_or_else(metrics_status, |()| TsStatus::Ok)
}

/// Writes the comparison report JSON for a pair of traces to `path`.
///
/// # Safety
/// Both traces must be live handles and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ts_compare_export_json(
    uniform: *const TsTrace,
    ptsa: *const TsTrace,
    path: *const c_char,
) -> TsStatus {
    let uniform = deref!(uniform);
    let ptsa = deref!(ptsa);
    let report = match metrics::compare(&uniform.inner, &ptsa.inner) {
        Ok(r) => r,
        Err(e) => return metrics_status(e),
    };
    let file = match c_str(path).and_then(create) {
        Ok(f) => f,
        Err(status) => return status,
    };
    metrics::export_json(&report, file).map_or_else(metrics_status, |()| TsStatus::Ok)
}

/// # Safety
/// `trace` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ts_trace_free(trace: *mut TsTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// A ledger holding only genesis (id 0). Free with [`ts_tangle_free`].
#[no_mangle]
pub extern "C" fn ts_tangle_new() -> *mut TsTangle {
    Box::into_raw(Box::new(TsTangle { inner: Tangle::new() }))
}

/// Appends a transaction approving `parents[..count]`.
///
/// # Safety
/// `tangle` must be a live handle, `parents` must point to `count` ids, and
/// `out_id` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ts_tangle_add(
    tangle: *mut TsTangle,
    parents: *const u64,
    count: usize,
    issued_at: f64,
    priority_flag: bool,
    out_id: *mut u64,
) -> TsStatus {
    let tangle = deref!(mut tangle);
    let out_id = deref!(mut out_id);
    if parents.is_null() && count > 0 {
        return fail(TsStatus::NullPointer, "null parents");
    }
    if !(issued_at.is_finite() && issued_at >= 0.0) {
        return fail(TsStatus::InvalidArgument, "issued_at must be a non-negative time");
    }
    let ids: Vec<TransactionId> = if count == 0 {
        Vec::new()
    } else {
        std::slice::from_raw_parts(parents, count).iter().copied().map(TransactionId::new).collect()
    };
    match tangle.inner.add_transaction(&ids, SimTime::from_secs_f64(issued_at), priority_flag) {
        Ok(id) => {
            *out_id = id.get();
            TsStatus::Ok
        }
        Err(e) => ledger_status(e),
    }
}

/// # Safety
/// `tangle` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ts_tangle_cumulative_weight(tangle: *const TsTangle, id: u64, out: *mut u64) -> TsStatus {
    let tangle = deref!(tangle);
    let out = deref!(mut out);
    match tangle.inner.cumulative_weight(TransactionId::new(id)) {
        Ok(w) => {
            *out = w;
            TsStatus::Ok
        }
        Err(e) => ledger_status(e),
    }
}

/// Confirms every transaction whose weight reached `theta`; writes how many
/// became confirmed.
///
/// # Safety
/// `tangle` must be a live handle and `newly_confirmed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ts_tangle_sweep(
    tangle: *mut TsTangle,
    theta: u64,
    now: f64,
    newly_confirmed: *mut usize,
) -> TsStatus {
    let tangle = deref!(mut tangle);
    let out = deref!(mut newly_confirmed);
    if theta == 0 {
        return fail(TsStatus::InvalidArgument, "theta must be at least 1");
    }
    *out = tangle.inner.confirmation_sweep(theta, SimTime::from_secs_f64(now)).len();
    TsStatus::Ok
}

/// # Safety
/// `tangle` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ts_tangle_is_confirmed(tangle: *const TsTangle, id: u64, out: *mut bool) -> TsStatus {
    let tangle = deref!(tangle);
    let out = deref!(mut out);
    let id = TransactionId::new(id);
    if !tangle.inner.contains(id) {
        return ledger_status(LedgerError::UnknownTransaction(id));
    }
    *out = tangle.inner.is_confirmed(id);
    TsStatus::Ok
}

/// Copies up to `capacity` tip ids in ascending order into `buffer` and
/// writes the total tip count to `total`.
///
/// # Safety
/// `tangle` must be a live handle, `buffer` must have room for `capacity`
/// ids (or be NULL with `capacity == 0`), and `total` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ts_tangle_tips(
    tangle: *const TsTangle,
    buffer: *mut u64,
    capacity: usize,
    total: *mut usize,
) -> TsStatus {
    let tangle = deref!(tangle);
    let total = deref!(mut total);
    if buffer.is_null() && capacity > 0 {
        return fail(TsStatus::NullPointer, "null buffer");
    }
    let tips = tangle.inner.tips();
    *total = tips.len();
    for (i, id) in tips.iter().take(capacity).enumerate() {
        *buffer.add(i) = id.get();
    }
    TsStatus::Ok
}

/// # Safety
/// `tangle` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ts_tangle_free(tangle: *mut TsTangle) {
    if !tangle.is_null() {
        drop(Box::from_raw(tangle));
    }
}

/// Runs the brute-force weight check over `trials` random DAGs of at most
/// `max_size` transactions plus the selection branch table.
#[no_mangle]
pub extern "C" fn ts_self_check(seed: u64, trials: usize, max_size: usize) -> TsStatus {
    if max_size == 0 {
        return fail(TsStatus::InvalidArgument, "max_size must be at least 1");
    }
    guard(|| {
        if let Err(cex) = oracle::weight_self_check(seed, trials, max_size, Fault::None) {
            return fail(
                TsStatus::OracleMismatch,
                format!("weight mismatch at transaction {} on DAG #{}", cex.mismatch.id, cex.trial),
            );
        }
        if let Some(case) = oracle::branch_table(0..8).into_iter().find(|c| !c.passed()) {
            return fail(
                TsStatus::OracleMismatch,
                format!("branch table p={} common={}: {:?}", case.priority, case.common, case.problem),
            );
        }
        TsStatus::Ok
    })
}
