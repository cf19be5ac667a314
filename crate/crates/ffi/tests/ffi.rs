use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use ftrl_approach_ffi::*;

fn last_error() -> String {
    let p = ftrl_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn config(json: &str) -> (FtrlStatus, *mut FtrlConfig) {
    let text = CString::new(json).unwrap();
    let mut cfg = ptr::null_mut();
    let status = unsafe { ftrl_config_from_json(text.as_ptr(), &mut cfg) };
    (status, cfg)
}

#[test]
fn swap_experiment_round_trip() {
    let (status, cfg) = config(
        r#"{"problem": "swap", "d": 3, "T": 256, "seeds": [0, 1, 2],
            "environment": {"kind": "uniform_random"}}"#,
    );
    assert_eq!(status, FtrlStatus::Ok);
    let mut exp = ptr::null_mut();
    assert_eq!(unsafe { ftrl_experiment_run(cfg, &mut exp) }, FtrlStatus::Ok);
    assert_eq!(unsafe { ftrl_experiment_len(exp) }, 3);
    let mut rec = FtrlRecord::default();
    assert_eq!(unsafe { ftrl_experiment_record(exp, 2, &mut rec) }, FtrlStatus::Ok);
    assert_eq!(rec.seed, 2);
    assert_eq!(rec.aborted, 0);
    assert!(rec.final_support >= 0.0 && rec.final_support <= rec.final_bound);

    assert_eq!(unsafe { ftrl_experiment_record(exp, 3, &mut rec) }, FtrlStatus::InvalidInput);
    assert!(last_error().contains("out of range"));

    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().to_str().unwrap()).unwrap();
    assert_eq!(unsafe { ftrl_experiment_write(exp, path.as_ptr()) }, FtrlStatus::Ok);
    assert!(dir.path().join("steps.csv").exists() && dir.path().join("summary.json").exists());
    assert!(ftrl_last_error().is_null());

    unsafe {
        ftrl_experiment_free(exp);
        ftrl_config_free(cfg);
    }
}

#[test]
fn config_errors_name_the_field() {
    let (status, cfg) =
        config(r#"{"problem": "swap", "d": 3, "seeds": [0], "environment": {"kind": "uniform_random"}}"#);
    assert_eq!(status, FtrlStatus::Config);
    assert!(cfg.is_null());
    assert!(last_error().contains("`T`"));
}

#[test]
fn null_arguments_are_reported() {
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { ftrl_config_from_json(ptr::null(), &mut cfg) }, FtrlStatus::NullPointer);
    let mut exp = ptr::null_mut();
    assert_eq!(unsafe { ftrl_experiment_run(ptr::null(), &mut exp) }, FtrlStatus::NullPointer);
    assert_eq!(unsafe { ftrl_experiment_len(ptr::null()) }, 0);
    unsafe {
        ftrl_config_free(ptr::null_mut());
        ftrl_experiment_free(ptr::null_mut());
    }
}

#[test]
fn weighted_norm_matches_closed_form() {
    // ℓ∞ weights are proportional to 1/y_i, giving φ = 1/Σ(1/y_i)
    let y = [1.0, 2.0, 4.0];
    let mut phi = 0.0;
    let mut w = [0.0; 3];
    let status = unsafe { ftrl_min_weighted_lp_norm(y.as_ptr(), 3, f64::INFINITY, &mut phi, w.as_mut_ptr()) };
    assert_eq!(status, FtrlStatus::Ok);
    assert!((phi - 4.0 / 7.0).abs() < 1e-12);
    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);

    let status = unsafe { ftrl_min_weighted_lp_norm(y.as_ptr(), 3, 0.5, &mut phi, ptr::null_mut()) };
    assert_eq!(status, FtrlStatus::InvalidInput);
}

#[test]
fn global_cost_distance_is_zero_inside_the_cone() {
    // equal load on two machines with makespan ½ and mean load ½
    let inside = [0.25, 0.25, 0.5, 0.5];
    let mut out = -1.0;
    assert_eq!(unsafe { ftrl_global_cost_distance(inside.as_ptr(), 2, f64::INFINITY, &mut out) }, FtrlStatus::Ok);
    assert!(out.abs() < 1e-12);
    let outside = [1.0, 0.0, 0.0, 0.0];
    assert_eq!(unsafe { ftrl_global_cost_distance(outside.as_ptr(), 2, f64::INFINITY, &mut out) }, FtrlStatus::Ok);
    assert!(out > 0.0);
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(ftrl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/ftrl_approach.h");
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let out = Command::new(compiler).args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, header]).output();
        let Ok(out) = out else {
            eprintln!("{compiler} not available, header not compiled");
            continue;
        };
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
