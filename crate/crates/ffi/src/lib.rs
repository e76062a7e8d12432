//! C ABI over `medianbs`.
//!
//! Every fallible function returns an [`MbsStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`mbs_last_error_message`] on the same thread until the next call.
//! Handles are opaque; free them with the matching `*_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use medianbs::{
    growth, montecarlo, pricing, Error, ExceedMethod, GrowthModel, MarketParams, McConfig, Method, PriceQuote,
    Probability,
};

/// Result codes. Values 2-4 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numeric = 3,
    Io = 4,
    TailUnderflow = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbsMethod {
    Mean = 0,
    Median = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbsExceedMethod {
    Exact = 0,
    Normal = 1,
}

/// A priced call. `conditional_median` is NaN for the mean method.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbsQuote {
    pub method: MbsMethod,
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub exercise_prob: f64,
    pub discount: f64,
    pub conditional_median: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbsEstimate {
    pub value: f64,
    pub std_error: f64,
    pub paths_used: usize,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbsGrowthStats {
    pub mu_l: f64,
    pub mu_log: f64,
    pub geo_mean: f64,
    pub sd_log: f64,
}

/// Flattened Monte Carlo validation report. Tail fields are NaN and
/// `tail_pass` is false when the law is a point mass (`has_tail` = false).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbsValidation {
    pub mean_analytic: f64,
    pub mean_empirical: MbsEstimate,
    pub mean_z: f64,
    pub mean_pass: bool,
    pub median_analytic: f64,
    pub median_empirical: MbsEstimate,
    pub median_pass: bool,
    pub has_tail: bool,
    pub tail_analytic: f64,
    pub tail_empirical: f64,
    pub tail_z: f64,
    pub tail_pass: bool,
}

/// Opaque market parameters.
pub struct MbsMarket(MarketParams);

/// Opaque growth model.
pub struct MbsGrowth(GrowthModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MbsStatus {
    match e {
        Error::Validation(_) | Error::Domain(_) | Error::Parse { .. } => MbsStatus::InvalidArgument,
        Error::TailUnderflow { .. } => MbsStatus::TailUnderflow,
        Error::Io(_) => MbsStatus::Io,
        Error::PartialCurve { first_error, .. } => status_of(first_error),
        _ => MbsStatus::Numeric,
    }
}

fn guard<F: FnOnce() -> Result<(), MbsStatus>>(f: F) -> MbsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MbsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            MbsStatus::Panic
        }
    }
}

fn fail(e: Error) -> MbsStatus {
    set_error(e.to_string());
    status_of(&e)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), MbsStatus> {
    if out.is_null() {
        set_error("null output pointer".into());
        return Err(MbsStatus::NullPointer);
    }
    out.write(value);
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, MbsStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle".into());
        MbsStatus::NullPointer
    })
}

unsafe fn slice<'a>(p: *const f64, len: usize) -> Result<&'a [f64], MbsStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        set_error("null array pointer".into());
        return Err(MbsStatus::NullPointer);
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn quote(q: &PriceQuote) -> MbsQuote {
    MbsQuote {
        method: match q.method {
            Method::Mean => MbsMethod::Mean,
            Method::Median => MbsMethod::Median,
        },
        value: q.value,
        d1: q.d1,
        d2: q.d2,
        exercise_prob: q.exercise_prob.value(),
        discount: q.discount,
        conditional_median: q.conditional_median.unwrap_or(f64::NAN),
    }
}

fn estimate(e: &medianbs::McEstimate) -> MbsEstimate {
    MbsEstimate {
        value: e.value,
        std_error: e.std_error,
        paths_used: e.paths_used,
        ci_low: e.ci_low,
        ci_high: e.ci_high,
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn mbs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mbs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub unsafe extern "C" fn mbs_norm_cdf(x: f64, out: *mut f64) -> MbsStatus {
    guard(|| {
        let p = medianbs::norm_cdf(x).map_err(fail)?;
        write(out, p.value())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbs_norm_pdf(x: f64, out: *mut f64) -> MbsStatus {
    guard(|| {
        let v = medianbs::norm_pdf(x).map_err(fail)?;
        write(out, v)
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbs_norm_quantile(p: f64, out: *mut f64) -> MbsStatus {
    guard(|| {
        let x = Probability::new(p).and_then(medianbs::norm_quantile).map_err(fail)?;
        write(out, x)
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbs_market_new(
    spot: f64,
    strike: f64,
    rate: f64,
    vol: f64,
    tau: f64,
    out: *mut *mut MbsMarket,
) -> MbsStatus {
    guard(|| {
        let params = MarketParams::new(spot, strike, rate, vol, tau).map_err(fail)?;
        write(out, Box::into_raw(Box::new(MbsMarket(params))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbs_market_free(market: *mut MbsMarket) {
    if !market.is_null() {
        drop(Box::from_raw(market));
    }
}

#[no_mangle]
pub unsafe extern "C" fn mbs_bs_price(market: *const MbsMarket, out: *mut MbsQuote) -> MbsStatus {
    guard(|| {
        let m = deref(market)?;
        write(out, quote(&pricing::bs_price(&m.0)))
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbs_median_price(market: *const MbsMarket, out: *mut MbsQuote) -> MbsStatus {
    guard(|| {
        let m = deref(market)?;
        let q = pricing::median_price(&m.0).map_err(fail)?;
        write(out, quote(&q))
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbs_bs_price_quadrature(market: *const MbsMarket, out: *mut f64) -> MbsStatus {
    guard(|| {
        let m = deref(market)?;
        let v = pricing::bs_price_quadrature(&m.0).map_err(fail)?;
        write(out, v)
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbs_conditional_median_above(market: *const MbsMarket, k: f64, out: *mut f64) -> MbsStatus {
    guard(|| {
        let m = deref(market)?;
        let v = medianbs::terminal_distribution(&m.0).conditional_median_above(k).map_err(fail)?;
        write(out, v)
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbs_prob_above_mean(market: *const MbsMarket, out: *mut f64) -> MbsStatus {
    guard(|| {
        let m = deref(market)?;
        write(out, medianbs::terminal_distribution(&m.0).prob_above_mean().value())
    })
}

/// Simulates `paths` terminal prices and checks both formulas. Results are
/// identical for any `workers` value; 0 uses the default pool.
#[no_mangle]
pub unsafe extern "C" fn mbs_mc_validate(
    market: *const MbsMarket,
    paths: usize,
    seed: u64,
    chunk: usize,
    workers: usize,
    out: *mut MbsValidation,
) -> MbsStatus {
    guard(|| {
        let m = deref(market)?;
        let mc = McConfig::new(paths, seed, chunk).map_err(fail)?;
        let r = if workers == 0 {
            montecarlo::validate(&m.0, &mc)
        } else {
            montecarlo::validate_with_workers(&m.0, &mc, workers)
        }
        .map_err(fail)?;
        let t = r.tail;
        write(
            out,
            MbsValidation {
                mean_analytic: r.mean.analytic,
                mean_empirical: estimate(&r.mean.empirical),
                mean_z: r.mean.z,
                mean_pass: r.mean.pass,
                median_analytic: r.median.analytic,
                median_empirical: estimate(&r.median.empirical),
                median_pass: r.median.pass,
                has_tail: t.is_some(),
                tail_analytic: t.map_or(f64::NAN, |t| t.analytic),
                tail_empirical: t.map_or(f64::NAN, |t| t.empirical),
                tail_z: t.map_or(f64::NAN, |t| t.z),
                tail_pass: t.is_some_and(|t| t.pass),
            },
        )
    })
}

/// Prices a call from `len` terminal prices.
#[no_mangle]
pub unsafe extern "C" fn mbs_empirical_price(
    sample: *const f64,
    len: usize,
    strike: f64,
    rate: f64,
    tau: f64,
    method: MbsMethod,
    out: *mut MbsEstimate,
) -> MbsStatus {
    guard(|| {
        let s = slice(sample, len)?;
        let method = match method {
            MbsMethod::Mean => Method::Mean,
            MbsMethod::Median => Method::Median,
        };
        let e = montecarlo::empirical_price(s, strike, rate, tau, method).map_err(fail)?;
        write(out, estimate(&e))
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbs_growth_new(
    rates: *const f64,
    probs: *const f64,
    len: usize,
    initial: f64,
    horizon: u32,
    out: *mut *mut MbsGrowth,
) -> MbsStatus {
    guard(|| {
        let rates = slice(rates, len)?.to_vec();
        let probs = slice(probs, len)?.to_vec();
        let model = GrowthModel::new(rates, probs, initial, horizon).map_err(fail)?;
        write(out, Box::into_raw(Box::new(MbsGrowth(model))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbs_growth_free(model: *mut MbsGrowth) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

#[no_mangle]
pub unsafe extern "C" fn mbs_growth_stats(model: *const MbsGrowth, out: *mut MbsGrowthStats) -> MbsStatus {
    guard(|| {
        let g = deref(model)?;
        let s = growth::growth_stats(&g.0);
        write(out, MbsGrowthStats { mu_l: s.mu_l, mu_log: s.mu_log, geo_mean: s.geo_mean, sd_log: s.sd_log })
    })
}

/// E[S_t]; may be +inf when it overflows.
#[no_mangle]
pub unsafe extern "C" fn mbs_growth_expected_size(model: *const MbsGrowth, out: *mut f64) -> MbsStatus {
    guard(|| {
        let g = deref(model)?;
        write(out, growth::expected_size(&g.0).value)
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbs_growth_median_size(model: *const MbsGrowth, out: *mut f64) -> MbsStatus {
    guard(|| {
        let g = deref(model)?;
        write(out, growth::median_size(&g.0).value)
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbs_growth_prob_exceeds(
    model: *const MbsGrowth,
    threshold: f64,
    method: MbsExceedMethod,
    out: *mut f64,
) -> MbsStatus {
    guard(|| {
        let g = deref(model)?;
        let method = match method {
            MbsExceedMethod::Exact => ExceedMethod::Exact,
            MbsExceedMethod::Normal => ExceedMethod::Normal,
        };
        let p = growth::prob_exceeds(&g.0, threshold, method).map_err(fail)?;
        write(out, p.value())
    })
}
