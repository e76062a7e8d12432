use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use medianbs_ffi::*;

fn market(spot: f64, strike: f64, rate: f64, vol: f64, tau: f64) -> *mut MbsMarket {
    let mut h = ptr::null_mut();
    let st = unsafe { mbs_market_new(spot, strike, rate, vol, tau, &mut h) };
    assert_eq!(st, MbsStatus::Ok);
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    let p = mbs_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn prices_through_handles() {
    let h = market(1.5, 0.2, 0.0, 1.0, 1.0);
    let mut q = MbsQuote {
        method: MbsMethod::Mean,
        value: 0.0,
        d1: 0.0,
        d2: 0.0,
        exercise_prob: 0.0,
        discount: 0.0,
        conditional_median: 0.0,
    };
    unsafe {
        assert_eq!(mbs_bs_price(h, &mut q), MbsStatus::Ok);
        assert!((q.value - 1.304_049_811_746_439_3).abs() < 1e-13);
        assert!(q.conditional_median.is_nan());

        assert_eq!(mbs_median_price(h, &mut q), MbsStatus::Ok);
        assert_eq!(q.method, MbsMethod::Median);
        assert!((q.value - 0.786_978_709_953_795_8).abs() < 1e-13);
        assert!((q.conditional_median - 0.986_978_709_953_795_8).abs() < 1e-13);

        let mut v = 0.0;
        assert_eq!(mbs_bs_price_quadrature(h, &mut v), MbsStatus::Ok);
        assert!((v - 1.304_049_811_746_439_3).abs() < 1e-8 * 1.5);
        assert_eq!(mbs_conditional_median_above(h, 0.2, &mut v), MbsStatus::Ok);
        assert!((v - 0.986_978_709_953_795_8).abs() < 1e-13);
        assert_eq!(mbs_prob_above_mean(h, &mut v), MbsStatus::Ok);
        assert!((v - 0.308_537_538_725_986_9).abs() < 1e-15);
        mbs_market_free(h);
    }
}

#[test]
fn invalid_market_reports_fields() {
    let mut h = ptr::null_mut();
    let st = unsafe { mbs_market_new(-1.0, 0.2, 0.0, 1.0, 1.0, &mut h) };
    assert_eq!(st, MbsStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains("spot"));
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        assert_eq!(mbs_norm_cdf(0.0, ptr::null_mut()), MbsStatus::NullPointer);
        let mut v = 0.0;
        assert_eq!(mbs_prob_above_mean(ptr::null(), &mut v), MbsStatus::NullPointer);
        mbs_market_free(ptr::null_mut());
        mbs_growth_free(ptr::null_mut());
    }
}

#[test]
fn tail_underflow_has_its_own_status() {
    let h = market(1.0, 1e60, 0.0, 0.5, 1.0);
    let mut q = MbsQuote {
        method: MbsMethod::Mean,
        value: 0.0,
        d1: 0.0,
        d2: 0.0,
        exercise_prob: 0.0,
        discount: 0.0,
        conditional_median: 0.0,
    };
    unsafe {
        assert_eq!(mbs_median_price(h, &mut q), MbsStatus::TailUnderflow);
        mbs_market_free(h);
    }
}

#[test]
fn normal_kernel() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(mbs_norm_cdf(1.96, &mut v), MbsStatus::Ok);
        assert!((v - 0.975_002_104_851_779_6).abs() < 1e-15);
        assert_eq!(mbs_norm_quantile(0.975, &mut v), MbsStatus::Ok);
        assert!((v - 1.959_963_984_540_054).abs() < 1e-14);
        assert_eq!(mbs_norm_quantile(1.0, &mut v), MbsStatus::InvalidArgument);
        assert_eq!(mbs_norm_cdf(f64::NAN, &mut v), MbsStatus::InvalidArgument);
        assert_eq!(mbs_norm_pdf(0.0, &mut v), MbsStatus::Ok);
        assert_eq!(v, 0.398_942_280_401_432_7);
    }
}

#[test]
fn growth_model_handle() {
    let rates = [0.5, 1.7];
    let probs = [0.5, 0.5];
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(mbs_growth_new(rates.as_ptr(), probs.as_ptr(), 2, 1.0, 100, &mut g), MbsStatus::Ok);
        let mut s = MbsGrowthStats { mu_l: 0.0, mu_log: 0.0, geo_mean: 0.0, sd_log: 0.0 };
        assert_eq!(mbs_growth_stats(g, &mut s), MbsStatus::Ok);
        assert!((s.mu_l - 1.1).abs() < 1e-15);
        let mut v = 0.0;
        assert_eq!(mbs_growth_expected_size(g, &mut v), MbsStatus::Ok);
        assert!((v - 13_780.612_339_822_27).abs() < 1e-8);
        assert_eq!(mbs_growth_median_size(g, &mut v), MbsStatus::Ok);
        assert!((v - 2.957_646_637_126_993e-4).abs() < 1e-16);
        assert_eq!(mbs_growth_prob_exceeds(g, 1.0, MbsExceedMethod::Exact, &mut v), MbsStatus::Ok);
        assert!((v - 0.096_673_952_247_821_22).abs() < 1e-12);
        assert_eq!(mbs_growth_prob_exceeds(g, 1.0, MbsExceedMethod::Normal, &mut v), MbsStatus::Ok);
        assert!((v - 0.092_086_958_433_865_13).abs() < 1e-12);
        mbs_growth_free(g);

        let bad = [0.5, 0.4];
        assert_eq!(mbs_growth_new(rates.as_ptr(), bad.as_ptr(), 2, 1.0, 100, &mut g), MbsStatus::InvalidArgument);
    }
}

#[test]
fn monte_carlo_is_worker_invariant() {
    let h = market(1.5, 0.2, 0.0, 1.0, 1.0);
    let blank = MbsEstimate { value: 0.0, std_error: 0.0, paths_used: 0, ci_low: 0.0, ci_high: 0.0 };
    let mut runs = Vec::new();
    for workers in [1, 4] {
        let mut r = MbsValidation {
            mean_analytic: 0.0,
            mean_empirical: blank,
            mean_z: 0.0,
            mean_pass: false,
            median_analytic: 0.0,
            median_empirical: blank,
            median_pass: false,
            has_tail: false,
            tail_analytic: 0.0,
            tail_empirical: 0.0,
            tail_z: 0.0,
            tail_pass: false,
        };
        let st = unsafe { mbs_mc_validate(h, 200_000, 3, 4096, workers, &mut r) };
        assert_eq!(st, MbsStatus::Ok);
        assert!(r.has_tail);
        runs.push(r);
    }
    assert_eq!(runs[0], runs[1]);
    unsafe { mbs_market_free(h) };
}

#[test]
fn empirical_price_from_buffer() {
    let sample: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
    let mut e = MbsEstimate { value: 0.0, std_error: 0.0, paths_used: 0, ci_low: 0.0, ci_high: 0.0 };
    unsafe {
        let st = mbs_empirical_price(sample.as_ptr(), sample.len(), 500.0, 0.0, 1.0, MbsMethod::Median, &mut e);
        assert_eq!(st, MbsStatus::Ok);
        assert_eq!(e.value, 250.5);
        assert_eq!(e.paths_used, 1000);
        let st = mbs_empirical_price(ptr::null(), 5, 1.0, 0.0, 1.0, MbsMethod::Mean, &mut e);
        assert_eq!(st, MbsStatus::NullPointer);
        let st = mbs_empirical_price(sample.as_ptr(), sample.len(), 990.0, 0.0, 1.0, MbsMethod::Median, &mut e);
        assert_eq!(st, MbsStatus::Numeric);
        assert!(last_error().contains("exceed"));
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(mbs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "medianbs.h"

int main(void) {
    MbsMarket *m = NULL;
    if (mbs_market_new(1.5, 0.2, 0.0, 1.0, 1.0, &m) != MBS_STATUS_OK) return 10;
    MbsQuote mean, median;
    if (mbs_bs_price(m, &mean) != MBS_STATUS_OK) return 11;
    if (mbs_median_price(m, &median) != MBS_STATUS_OK) return 12;
    mbs_market_free(m);
    if (fabs(mean.value - 1.3040498117464393) > 1e-12) return 13;
    if (fabs(median.value - 0.7869787099537958) > 1e-12) return 14;
    if (mbs_market_new(-1.0, 0.2, 0.0, 1.0, 1.0, &m) != MBS_STATUS_INVALID_ARGUMENT) return 15;
    if (mbs_last_error_message() == NULL) return 16;
    printf("%.6f %.6f\n", mean.value, median.value);
    return 0;
}
"#;

/// Compiles a C program against the generated header and the static library.
#[test]
fn c_program_links_against_header() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = crate_dir.join("include");
    assert!(header_dir.join("medianbs.h").exists());

    // target/<profile>/deps/capi-<hash> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libmedianbs_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1.304050 0.786979");
}

fn which_cc() -> Result<String, ()> {
    for cand in ["cc", "gcc", "clang"] {
        if Command::new(cand).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cand.to_string());
        }
    }
    Err(())
}
