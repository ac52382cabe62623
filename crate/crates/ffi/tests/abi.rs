// SPDX-License-Identifier: Apache-2.0

use std::ffi::{CStr, CString};
use std::ptr;

use tangle_sim_ffi::*;

fn last_error() -> String {
    let p = ts_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn ledger_handle_matches_diamond() {
    unsafe {
        let t = ts_tangle_new();
        let mut a = 0;
        let mut b = 0;
        let mut c = 0;
        assert_eq!(ts_tangle_add(t, [0u64].as_ptr(), 1, 1.0, false, &mut a), TsStatus::Ok);
        assert_eq!(ts_tangle_add(t, [0u64].as_ptr(), 1, 1.0, true, &mut b), TsStatus::Ok);
        assert_eq!(ts_tangle_add(t, [a, b].as_ptr(), 2, 2.0, false, &mut c), TsStatus::Ok);

        let mut w = 0;
        assert_eq!(ts_tangle_cumulative_weight(t, 0, &mut w), TsStatus::Ok);
        assert_eq!(w, 4);
        assert_eq!(ts_tangle_cumulative_weight(t, a, &mut w), TsStatus::Ok);
        assert_eq!(w, 2);

        let mut tips = [0u64; 4];
        let mut total = 0;
        assert_eq!(ts_tangle_tips(t, tips.as_mut_ptr(), tips.len(), &mut total), TsStatus::Ok);
        assert_eq!((total, tips[0]), (1, c));

        let mut newly = 0;
        assert_eq!(ts_tangle_sweep(t, 4, 2.0, &mut newly), TsStatus::Ok);
        assert_eq!(newly, 1);
        let mut confirmed = false;
        assert_eq!(ts_tangle_is_confirmed(t, 0, &mut confirmed), TsStatus::Ok);
        assert!(confirmed);

        let mut id = 0;
        assert_eq!(ts_tangle_add(t, [99u64].as_ptr(), 1, 3.0, false, &mut id), TsStatus::UnknownParent);
        assert!(last_error().contains("99"));
        assert_eq!(ts_tangle_add(t, ptr::null(), 0, 3.0, false, &mut id), TsStatus::ParentArity);
        assert_eq!(ts_tangle_add(t, [0u64].as_ptr(), 1, 0.5, false, &mut id), TsStatus::TimeRegression);
        assert_eq!(ts_tangle_cumulative_weight(t, 42, &mut w), TsStatus::UnknownTransaction);
        assert_eq!(ts_tangle_sweep(t, 0, 3.0, &mut newly), TsStatus::InvalidArgument);
        ts_tangle_free(t);
    }
}

#[test]
fn config_errors_carry_field_names() {
    let text = CString::new(tangle_sim::REFERENCE_CONFIG_TOML.replace("rho = 0.05", "rho = 1.5")).unwrap();
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(ts_config_from_toml(text.as_ptr(), &mut cfg), TsStatus::ConfigInvalid);
        assert!(cfg.is_null());
        assert!(last_error().contains("rho"));
        let missing = CString::new("/nonexistent/config.toml").unwrap();
        assert_eq!(ts_config_load(missing.as_ptr(), &mut cfg), TsStatus::IoFailure);
        assert_eq!(ts_config_from_toml(ptr::null(), &mut cfg), TsStatus::NullPointer);
    }
}

#[test]
fn paired_runs_through_handles() {
    let dir = tempfile::tempdir().unwrap();
    unsafe {
        let cfg = ts_config_default();
        let text = CString::new(
            tangle_sim::REFERENCE_CONFIG_TOML.replace("horizon_seconds = 300.0", "horizon_seconds = 60.0"),
        )
        .unwrap();
        let mut short = ptr::null_mut();
        assert_eq!(ts_config_from_toml(text.as_ptr(), &mut short), TsStatus::Ok);
        assert_eq!(ts_config_set_seed(short, 5), TsStatus::Ok);

        let mut u = ptr::null_mut();
        let mut p = ptr::null_mut();
        assert_eq!(ts_paired_runs(short, &mut u, &mut p), TsStatus::Ok);
        let n = ts_trace_len(u);
        assert!(n > 400);
        assert_eq!(n, ts_trace_len(p));

        let mut ru = std::mem::zeroed::<TsRecord>();
        let mut rp = std::mem::zeroed::<TsRecord>();
        for i in 0..n {
            assert_eq!(ts_trace_record(u, i, &mut ru), TsStatus::Ok);
            assert_eq!(ts_trace_record(p, i, &mut rp), TsStatus::Ok);
            assert_eq!(ru.issued_at, rp.issued_at);
            assert_eq!(ru.class_, rp.class_);
            assert!((1..=3).contains(&rp.parent_count));
        }
        assert_eq!(ts_trace_record(u, n, &mut ru), TsStatus::OutOfRange);

        let mut stats = std::mem::zeroed::<TsClassStats>();
        assert_eq!(ts_trace_class_stats(p, TsClass::Priority, &mut stats), TsStatus::Ok);
        assert!(stats.issued > 0 && stats.confirmed <= stats.issued);

        let mut cmp = std::mem::zeroed::<TsComparison>();
        assert_eq!(ts_compare(u, p, &mut cmp), TsStatus::Ok);
        assert!(cmp.has_latency_reduction && cmp.ptsa_wins);

        let csv = CString::new(dir.path().join("t.csv").to_str().unwrap()).unwrap();
        let json = CString::new(dir.path().join("s.json").to_str().unwrap()).unwrap();
        let report = CString::new(dir.path().join("r.json").to_str().unwrap()).unwrap();
        assert_eq!(ts_trace_export_csv(p, csv.as_ptr()), TsStatus::Ok);
        assert_eq!(ts_trace_export_summary_json(p, json.as_ptr()), TsStatus::Ok);
        assert_eq!(ts_compare_export_json(u, p, report.as_ptr()), TsStatus::Ok);
        let rows = std::fs::read_to_string(dir.path().join("t.csv")).unwrap().lines().count();
        assert_eq!(rows, n + 1);

        // A different seed is a different workload.
        assert_eq!(ts_config_set_seed(cfg, 6), TsStatus::Ok);
        assert_eq!(ts_config_set_strategy(cfg, TsStrategy::Uniform), TsStatus::Ok);
        let mut other = ptr::null_mut();
        assert_eq!(ts_simulate(cfg, &mut other), TsStatus::Ok);
        assert_eq!(ts_compare(u, other, &mut cmp), TsStatus::WorkloadMismatch);

        let bad = CString::new("/nonexistent/dir/t.csv").unwrap();
        assert_eq!(ts_trace_export_csv(p, bad.as_ptr()), TsStatus::IoFailure);

        ts_trace_free(other);
        ts_trace_free(u);
        ts_trace_free(p);
        ts_config_free(short);
        ts_config_free(cfg);
        ts_trace_free(ptr::null_mut());
        assert_eq!(ts_trace_len(ptr::null()), 0);
    }
}

#[test]
fn null_handles_are_rejected() {
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(ts_simulate(ptr::null(), &mut out), TsStatus::NullPointer);
        assert_eq!(ts_config_set_seed(ptr::null_mut(), 1), TsStatus::NullPointer);
        let cfg = ts_config_default();
        assert_eq!(ts_simulate(cfg, ptr::null_mut()), TsStatus::NullPointer);
        ts_config_free(cfg);
    }
}

#[test]
fn self_check_entry_point() {
    assert_eq!(ts_self_check(3, 10, 50), TsStatus::Ok);
    assert_eq!(ts_self_check(3, 10, 0), TsStatus::InvalidArgument);
}
