//! Multiplicative growth S_{t+1} = l_t·S_t with i.i.d. rates drawn from a
//! finite distribution: arithmetic vs geometric mean growth, and exact or
//! central-limit exceedance probabilities.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::numerics::{std_cdf, Probability};

/// Largest support `enumerate_distribution` will build.
pub const MAX_OUTCOMES: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthModel {
    rates: Vec<f64>,
    probs: Vec<f64>,
    initial: f64,
    horizon: u32,
}

impl GrowthModel {
    pub fn new(rates: Vec<f64>, probs: Vec<f64>, initial: f64, horizon: u32) -> Result<Self> {
        let mut bad = Vec::new();
        if rates.is_empty() {
            bad.push("at least one rate is required".to_string());
        }
        if rates.len() != probs.len() {
            bad.push(format!("{} rates but {} probabilities", rates.len(), probs.len()));
        }
        if let Some(l) = rates.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            bad.push(format!("rates must be finite and > 0 (got {l})"));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            bad.push(format!("probabilities must be finite and >= 0 (got {p})"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            bad.push(format!("probabilities must sum to 1 (got {total})"));
        }
        if !(initial.is_finite() && initial > 0.0) {
            bad.push(format!("initial size must be finite and > 0 (got {initial})"));
        }
        if !bad.is_empty() {
            return Err(Error::Validation(bad));
        }
        Ok(GrowthModel { rates, probs, initial, horizon })
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
    pub fn initial(&self) -> f64 {
        self.initial
    }
    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn with_horizon(&self, horizon: u32) -> Self {
        GrowthModel { horizon, ..self.clone() }
    }

    // (rate, prob) with zero-probability rates dropped and equal rates merged
    fn support(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (&l, &p) in self.rates.iter().zip(&self.probs) {
            if p == 0.0 {
                continue;
            }
            match out.iter_mut().find(|(r, _)| *r == l) {
                Some(entry) => entry.1 += p,
                None => out.push((l, p)),
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthStats {
    /// E[l]
    pub mu_l: f64,
    /// E[log l]
    pub mu_log: f64,
    /// e^{E[log l]}
    pub geo_mean: f64,
    /// standard deviation of log l
    pub sd_log: f64,
}

pub fn growth_stats(model: &GrowthModel) -> GrowthStats {
    let support = model.support();
    let mu_l = sorted_sum(support.iter().map(|(l, p)| l * p));
    let mu_log = sorted_sum(support.iter().map(|(l, p)| l.ln() * p));
    let var = sorted_sum(support.iter().map(|(l, p)| {
        let d = l.ln() - mu_log;
        d * d * p
    }));
    GrowthStats { mu_l, mu_log, geo_mean: mu_log.exp(), sd_log: var.max(0.0).sqrt() }
}

/// A size that may have overflowed to infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Size {
    pub value: f64,
    pub overflow: bool,
}

impl Size {
    fn from_log(log_value: f64) -> Self {
        let value = log_value.exp();
        Size { value, overflow: value.is_infinite() }
    }
}

/// E[S_t] = μ_l^t·S_0
pub fn expected_size(model: &GrowthModel) -> Size {
    let stats = growth_stats(model);
    Size::from_log(model.horizon as f64 * stats.mu_l.ln() + model.initial.ln())
}

/// M^t·S_0 with M the geometric mean rate.
pub fn median_size(model: &GrowthModel) -> Size {
    let stats = growth_stats(model);
    Size::from_log(model.horizon as f64 * stats.mu_log + model.initial.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub size: f64,
    pub log_size: f64,
    pub prob: f64,
}

/// Number of count vectors of `t` draws over `k` categories, C(t+k−1, k−1).
pub fn support_size(t: u32, k: usize) -> f64 {
    if k <= 1 {
        return 1.0;
    }
    let n = t as f64 + k as f64 - 1.0;
    (ln_gamma(n + 1.0) - ln_gamma(k as f64) - ln_gamma(t as f64 + 1.0)).exp().round()
}

/// Exact law of S_t, collapsed over orderings by multinomial weights and
/// sorted by size.
pub fn enumerate_distribution(model: &GrowthModel) -> Result<Vec<Outcome>> {
    let support = model.support();
    let k = support.len();
    let t = model.horizon;
    let outcomes = support_size(t, k);
    if outcomes > MAX_OUTCOMES as f64 {
        return Err(Error::EnumerationTooLarge { outcomes, limit: MAX_OUTCOMES });
    }

    let log_fact: Vec<f64> = (0..=t).map(|i| ln_gamma(i as f64 + 1.0)).collect();
    let log_rates: Vec<f64> = support.iter().map(|(l, _)| l.ln()).collect();
    let log_probs: Vec<f64> = support.iter().map(|(_, p)| p.ln()).collect();
    let log_initial = model.initial.ln();

    let mut out = Vec::with_capacity(outcomes as usize);
    let mut counts = vec![0u32; k];
    for_each_composition(t, &mut counts, 0, &mut |c| {
        let mut log_w = log_fact[t as usize];
        let mut log_s = log_initial;
        for (i, &n) in c.iter().enumerate() {
            log_w += n as f64 * log_probs[i] - log_fact[n as usize];
            log_s += n as f64 * log_rates[i];
        }
        out.push(Outcome { size: log_s.exp(), log_size: log_s, prob: log_w.exp() });
    });
    out.sort_by(|a, b| a.log_size.total_cmp(&b.log_size));
    Ok(out)
}

fn for_each_composition(remaining: u32, counts: &mut [u32], idx: usize, f: &mut dyn FnMut(&[u32])) {
    if idx + 1 == counts.len() {
        counts[idx] = remaining;
        f(counts);
        return;
    }
    for n in 0..=remaining {
        counts[idx] = n;
        for_each_composition(remaining - n, counts, idx + 1, f);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExceedMethod {
    /// Sum over the enumerated law.
    Exact,
    /// Central-limit approximation of the log-sum.
    Normal,
}

/// P[S_t > threshold].
pub fn prob_exceeds(model: &GrowthModel, threshold: f64, method: ExceedMethod) -> Result<Probability> {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::domain(format!("threshold must be finite and > 0 (got {threshold})")));
    }
    let log_ratio = (threshold / model.initial).ln();
    match method {
        ExceedMethod::Exact => {
            let dist = enumerate_distribution(model)?;
            Ok(Probability::saturating(sorted_sum(
                dist.iter().filter(|o| o.log_size - model.initial.ln() > log_ratio).map(|o| o.prob),
            )))
        }
        ExceedMethod::Normal => {
            let stats = growth_stats(model);
            let t = model.horizon as f64;
            let drift = t * stats.mu_log - log_ratio;
            let spread = stats.sd_log * t.sqrt();
            if spread == 0.0 {
                return Ok(if drift > 0.0 { Probability::ONE } else { Probability::ZERO });
            }
            Ok(Probability::saturating(std_cdf(drift / spread)))
        }
    }
}

/// Sum of nonnegative-ish terms, smallest magnitude first.
pub(crate) fn sorted_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = terms.collect();
    v.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    v.into_iter().sum()
}
