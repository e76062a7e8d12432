//! Seeded terminal-price simulation and empirical pricing.
//!
//! # Random stream
//!
//! Uniforms come from a counter-based generator: path `i` uses the
//! SplitMix64 output function applied to `key + (i + 1)·γ`, where
//! `γ = 0x9E3779B97F4A7C15` and `key = mix(seed ⊕ mix(γ))`. The top 53 bits
//! give `u = (bits + ½)·2⁻⁵³ ∈ (0, 1)`, mapped to a normal variate by
//! [`std_quantile`]. Every draw is a pure function of `(seed, i)`, so results
//! depend neither on the chunk size nor on how chunks are scheduled across
//! threads.

use std::io::BufRead;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::model::{conditional_median, terminal_distribution, ExceedanceLaw, MarketParams};
use crate::numerics::std_quantile;
use crate::pricing::{bs_price, median_price, Method};

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const Z_95: f64 = 1.959_963_984_540_054;

/// Minimum exceedances for the empirical median price.
pub const MIN_EXCEEDANCES: usize = 100;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based uniform stream for one (seed, stream) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        CounterRng { key: mix64(seed ^ mix64(stream.wrapping_add(1).wrapping_mul(GAMMA))) }
    }

    #[inline]
    pub fn bits(&self, counter: u64) -> u64 {
        mix64(self.key.wrapping_add(counter.wrapping_add(1).wrapping_mul(GAMMA)))
    }

    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn uniform(&self, counter: u64) -> f64 {
        ((self.bits(counter) >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn normal(&self, counter: u64) -> f64 {
        std_quantile(self.uniform(counter))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub paths: usize,
    pub seed: u64,
    /// Paths per parallel work item.
    pub chunk: usize,
}

impl McConfig {
    pub const DEFAULT_CHUNK: usize = 1 << 16;

    pub fn new(paths: usize, seed: u64, chunk: usize) -> Result<Self> {
        let mut bad = Vec::new();
        if paths == 0 {
            bad.push("paths must be >= 1".to_string());
        }
        if chunk == 0 {
            bad.push("chunk must be >= 1".to_string());
        }
        if bad.is_empty() {
            Ok(McConfig { paths, seed, chunk })
        } else {
            Err(Error::Validation(bad))
        }
    }

    pub fn with_paths(paths: usize, seed: u64) -> Result<Self> {
        Self::new(paths, seed, Self::DEFAULT_CHUNK)
    }
}

/// Terminal prices S_T = S·exp((r − σ²/2)τ + σ√τ·Z) for every path, in path
/// order. Runs on the global rayon pool.
pub fn sample_terminal(params: &MarketParams, mc: &McConfig) -> Vec<f64> {
    let drift = (params.rate() - 0.5 * params.vol() * params.vol()) * params.tau();
    let s = params.total_vol();
    let spot = params.spot();
    let mut out = vec![0.0; mc.paths];
    let rng = CounterRng::new(mc.seed, 0);
    out.par_chunks_mut(mc.chunk).enumerate().for_each(|(c, block)| {
        let first = (c * mc.chunk) as u64;
        for (i, x) in block.iter_mut().enumerate() {
            let z = if s == 0.0 { 0.0 } else { rng.normal(first + i as u64) };
            *x = spot * (drift + s * z).exp();
        }
    });
    out
}

/// [`sample_terminal`] on a dedicated pool with `workers` threads.
pub fn sample_terminal_with_workers(params: &MarketParams, mc: &McConfig, workers: usize) -> Result<Vec<f64>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Io(format!("thread pool: {e}")))?;
    Ok(pool.install(|| sample_terminal(params, mc)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub paths_used: usize,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Sorted sample viewed as a law with upper tail and upper quantile.
#[derive(Debug, Clone)]
pub struct EmpiricalLaw {
    sorted: Vec<f64>,
}

impl EmpiricalLaw {
    pub fn new(mut sample: Vec<f64>) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::Validation(vec!["sample is empty".into()]));
        }
        if let Some(x) = sample.iter().find(|x| !x.is_finite()) {
            return Err(Error::Validation(vec![format!("sample contains non-finite value {x}")]));
        }
        sample.sort_by(f64::total_cmp);
        Ok(EmpiricalLaw { sorted: sample })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn count_above(&self, x: f64) -> usize {
        self.sorted.len() - self.sorted.partition_point(|&v| v <= x)
    }
}

impl ExceedanceLaw for EmpiricalLaw {
    fn tail_at(&self, x: f64) -> Result<f64> {
        Ok(self.count_above(x) as f64 / self.sorted.len() as f64)
    }

    /// Interpolated order statistic with `q·n` of the sample above it: the
    /// (q·n + ½)-th largest value, so that `q = e/(2n)` lands on the sample
    /// median of the top `e` values.
    fn upper_quantile_at(&self, q: f64) -> Result<f64> {
        let n = self.sorted.len();
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain(format!("upper_quantile: q = {q} must lie strictly inside (0, 1)")));
        }
        let twice = 2.0 * q * n as f64;
        let snapped = if (twice - twice.round()).abs() < 1e-9 { twice.round() } else { twice };
        let rank = (0.5 * snapped + 0.5).clamp(1.0, n as f64);
        let whole = rank.floor();
        let frac = rank - whole;
        let hi_idx = n - whole as usize;
        let upper = self.sorted[hi_idx];
        if frac == 0.0 || hi_idx == 0 {
            return Ok(upper);
        }
        let lower = self.sorted[hi_idx - 1];
        Ok(upper + frac * (lower - upper))
    }
}

/// 1-based order-statistic ranks `(l, n + 1 − l)` giving a distribution-free
/// interval for the median with coverage at least `confidence`.
pub fn median_ci_ranks(n: usize, confidence: f64) -> (usize, usize) {
    let alpha_half = 0.5 * (1.0 - confidence);
    let nf = n as f64;
    let j0 = n / 2;
    let mut pmf = (ln_gamma(nf + 1.0)
        - ln_gamma(j0 as f64 + 1.0)
        - ln_gamma((n - j0) as f64 + 1.0)
        - nf * std::f64::consts::LN_2)
        .exp();
    // P[B <= j0] for B ~ Bin(n, 1/2)
    let mut cdf = if n.is_multiple_of(2) { 0.5 + 0.5 * pmf } else { 0.5 };
    let mut j = j0;
    loop {
        if cdf <= alpha_half {
            let l = j + 1;
            return (l, n + 1 - l);
        }
        if j == 0 {
            return (1, n);
        }
        cdf -= pmf;
        pmf *= j as f64 / (n - j + 1) as f64;
        j -= 1;
    }
}

fn exceedances(sample: &[f64], strike: f64) -> Vec<f64> {
    let mut above: Vec<f64> = sample.iter().copied().filter(|&x| x > strike).collect();
    above.sort_by(f64::total_cmp);
    above
}

fn check_inputs(sample: &[f64], strike: f64, rate: f64, tau: f64) -> Result<()> {
    let mut bad = Vec::new();
    if sample.is_empty() {
        bad.push("sample is empty".to_string());
    }
    if !(strike.is_finite() && strike >= 0.0) {
        bad.push(format!("strike must be finite and >= 0 (got {strike})"));
    }
    if !rate.is_finite() {
        bad.push(format!("rate must be finite (got {rate})"));
    }
    if !(tau.is_finite() && tau >= 0.0) {
        bad.push(format!("tau must be finite and >= 0 (got {tau})"));
    }
    if let Some(x) = sample.iter().find(|x| !x.is_finite()) {
        bad.push(format!("sample contains non-finite value {x}"));
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(bad))
    }
}

/// Prices a call from terminal-price draws. The median method reports a 95%
/// order-statistic interval on the exceeding subsample.
pub fn empirical_price(sample: &[f64], strike: f64, rate: f64, tau: f64, method: Method) -> Result<McEstimate> {
    check_inputs(sample, strike, rate, tau)?;
    let discount = (-rate * tau).exp();
    match method {
        Method::Mean => Ok(mean_estimate(sample, strike, discount)),
        Method::Median => {
            let above = exceedances(sample, strike);
            let (l, u) = median_ci_ranks(above.len().max(1), 0.95);
            let est = median_estimate(sample, strike, discount)?;
            let ci_low = discount * (above[l - 1] - strike);
            let ci_high = discount * (above[u - 1] - strike);
            Ok(McEstimate {
                std_error: (ci_high - ci_low) / (2.0 * Z_95),
                ci_low: ci_low.min(est.value),
                ci_high: ci_high.max(est.value),
                ..est
            })
        }
    }
}

/// Median price with a percentile-bootstrap 95% interval from `resamples`
/// resamples of the exceeding subsample.
pub fn empirical_median_bootstrap(
    sample: &[f64],
    strike: f64,
    rate: f64,
    tau: f64,
    resamples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_inputs(sample, strike, rate, tau)?;
    if resamples < 2 {
        return Err(Error::Validation(vec!["bootstrap needs at least 2 resamples".into()]));
    }
    let discount = (-rate * tau).exp();
    let est = median_estimate(sample, strike, discount)?;
    let above = exceedances(sample, strike);
    let e = above.len();
    let mut medians: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let rng = CounterRng::new(seed, b as u64);
            let mut draw: Vec<f64> =
                (0..e as u64).map(|i| above[((rng.bits(i) as u128 * e as u128) >> 64) as usize]).collect();
            sample_median(&mut draw)
        })
        .collect();
    medians.sort_by(f64::total_cmp);
    let pick = |q: f64| medians[((q * (resamples - 1) as f64).round() as usize).min(resamples - 1)];
    let (lo, hi) = (pick(0.025), pick(0.975));
    let mean = medians.iter().sum::<f64>() / resamples as f64;
    let var = medians.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (resamples - 1) as f64;
    Ok(McEstimate {
        std_error: discount * var.sqrt(),
        ci_low: (discount * (lo - strike)).min(est.value),
        ci_high: (discount * (hi - strike)).max(est.value),
        ..est
    })
}

fn sample_median(v: &mut [f64]) -> f64 {
    let n = v.len();
    let mid = n / 2;
    let (_, upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

fn mean_estimate(sample: &[f64], strike: f64, discount: f64) -> McEstimate {
    let n = sample.len();
    // Welford
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for (i, &x) in sample.iter().enumerate() {
        let payoff = (x - strike).max(0.0);
        let delta = payoff - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (payoff - mean);
    }
    let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
    let value = discount * mean;
    let std_error = discount * (var / n as f64).sqrt();
    McEstimate { value, std_error, paths_used: n, ci_low: value - Z_95 * std_error, ci_high: value + Z_95 * std_error }
}

fn median_estimate(sample: &[f64], strike: f64, discount: f64) -> Result<McEstimate> {
    let law = EmpiricalLaw::new(sample.to_vec())?;
    let count = law.count_above(strike);
    if count < MIN_EXCEEDANCES {
        return Err(Error::InsufficientExceedances { count, required: MIN_EXCEEDANCES });
    }
    let m = conditional_median(&law, strike)?;
    let value = discount * (m - strike);
    Ok(McEstimate { value, std_error: 0.0, paths_used: sample.len(), ci_low: value, ci_high: value })
}

/// Reads one price per line; blank lines and lines starting with `#` are
/// skipped.
pub fn read_sample<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let x: f64 = t.parse().map_err(|e| Error::Parse { line: i + 1, message: format!("{t:?}: {e}") })?;
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::Parse { line: i + 1, message: format!("price must be finite and >= 0 (got {x})") });
        }
        out.push(x);
    }
    Ok(out)
}

pub fn read_sample_file(path: &Path) -> Result<Vec<f64>> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_sample(std::io::BufReader::new(file))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanCheck {
    pub analytic: f64,
    pub empirical: McEstimate,
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MedianCheck {
    pub analytic: f64,
    pub empirical: McEstimate,
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub analytic: f64,
    pub empirical: f64,
    pub binomial_se: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub params: MarketParams,
    pub config: McConfig,
    pub mean: MeanCheck,
    pub median: MedianCheck,
    /// Absent for a point-mass law, where P[S_T > E[S_T]] is not a tail.
    pub tail: Option<TailCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.mean.pass && self.median.pass && self.tail.is_none_or(|t| t.pass)
    }
}

/// |z| bound for the mean and tail checks.
pub const Z_LIMIT: f64 = 4.0;

fn z_score(empirical: f64, analytic: f64, se: f64) -> f64 {
    let diff = empirical - analytic;
    if se > 0.0 {
        diff / se
    } else if diff.abs() <= 1e-12 * analytic.abs().max(1.0) {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

/// Simulates once and checks both analytic prices and the above-mean
/// probability against the sample.
pub fn validate(params: &MarketParams, mc: &McConfig) -> Result<ValidationReport> {
    let sample = sample_terminal(params, mc);
    validate_sample(params, mc, &sample)
}

pub fn validate_with_workers(params: &MarketParams, mc: &McConfig, workers: usize) -> Result<ValidationReport> {
    let sample = sample_terminal_with_workers(params, mc, workers)?;
    validate_sample(params, mc, &sample)
}

fn validate_sample(params: &MarketParams, mc: &McConfig, sample: &[f64]) -> Result<ValidationReport> {
    let (k, r, tau) = (params.strike(), params.rate(), params.tau());

    let analytic = bs_price(params).value;
    let empirical = empirical_price(sample, k, r, tau, Method::Mean)?;
    let z = z_score(empirical.value, analytic, empirical.std_error);
    let mean = MeanCheck { analytic, empirical, z, pass: z.abs() <= Z_LIMIT };

    let analytic = median_price(params)?.value;
    let empirical = empirical_price(sample, k, r, tau, Method::Median)?;
    let z = z_score(empirical.value, analytic, empirical.std_error);
    let slack = 1e-12 * analytic.abs().max(1.0);
    let pass = empirical.ci_low - slack <= analytic && analytic <= empirical.ci_high + slack;
    let median = MedianCheck { analytic, empirical, z, pass };

    let dist = terminal_distribution(params);
    let tail = (dist.scale() > 0.0).then(|| {
        let analytic = dist.prob_above_mean().value();
        let threshold = dist.mean();
        let n = sample.len() as f64;
        let empirical = sample.iter().filter(|&&x| x > threshold).count() as f64 / n;
        let binomial_se = (analytic * (1.0 - analytic) / n).sqrt();
        let z = z_score(empirical, analytic, binomial_se);
        TailCheck { analytic, empirical, binomial_se, z, pass: z.abs() <= Z_LIMIT }
    });

    Ok(ValidationReport { params: *params, config: *mc, mean, median, tail })
}
