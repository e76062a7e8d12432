//! Log-normal terminal-price law under the risk-neutral drift.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{std_cdf, std_pdf, std_quantile, Probability};

/// Tail probabilities below this are treated as underflow.
pub const TAIL_FLOOR: f64 = 1e-300;

/// Inputs of a European call: spot, strike, riskless rate, volatility and
/// time to maturity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    spot: f64,
    strike: f64,
    rate: f64,
    vol: f64,
    tau: f64,
}

impl MarketParams {
    pub fn new(spot: f64, strike: f64, rate: f64, vol: f64, tau: f64) -> Result<Self> {
        let mut bad = Vec::new();
        if !(spot.is_finite() && spot > 0.0) {
            bad.push(format!("spot must be finite and > 0 (got {spot})"));
        }
        if !(strike.is_finite() && strike >= 0.0) {
            bad.push(format!("strike must be finite and >= 0 (got {strike})"));
        }
        if !rate.is_finite() {
            bad.push(format!("rate must be finite (got {rate})"));
        }
        if !(vol.is_finite() && vol >= 0.0) {
            bad.push(format!("vol must be finite and >= 0 (got {vol})"));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            bad.push(format!("tau must be finite and >= 0 (got {tau})"));
        }
        if bad.is_empty() {
            Ok(MarketParams { spot, strike, rate, vol, tau })
        } else {
            Err(Error::Validation(bad))
        }
    }

    pub fn spot(&self) -> f64 {
        self.spot
    }
    pub fn strike(&self) -> f64 {
        self.strike
    }
    pub fn rate(&self) -> f64 {
        self.rate
    }
    pub fn vol(&self) -> f64 {
        self.vol
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn with_spot(&self, spot: f64) -> Result<Self> {
        Self::new(spot, self.strike, self.rate, self.vol, self.tau)
    }
    pub fn with_strike(&self, strike: f64) -> Result<Self> {
        Self::new(self.spot, strike, self.rate, self.vol, self.tau)
    }
    pub fn with_vol(&self, vol: f64) -> Result<Self> {
        Self::new(self.spot, self.strike, self.rate, vol, self.tau)
    }
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.spot, self.strike, self.rate, self.vol, tau)
    }

    /// σ√τ, the standard deviation of log S_T.
    pub fn total_vol(&self) -> f64 {
        self.vol * self.tau.sqrt()
    }

    /// e^{−rτ}
    pub fn discount(&self) -> f64 {
        (-self.rate * self.tau).exp()
    }
}

/// Law of S_T: log S_T ~ N(location, scale²), or a point mass at
/// e^{location} when the scale is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TerminalDistribution {
    LogNormal { location: f64, scale: f64 },
    PointMass { location: f64 },
}

pub fn terminal_distribution(params: &MarketParams) -> TerminalDistribution {
    let location = params.spot.ln() + (params.rate - 0.5 * params.vol * params.vol) * params.tau;
    let scale = params.total_vol();
    TerminalDistribution::from_parts(location, scale).expect("validated market parameters give a finite law")
}

impl TerminalDistribution {
    pub fn from_parts(location: f64, scale: f64) -> Result<Self> {
        if !location.is_finite() {
            return Err(Error::Validation(vec![format!("location must be finite (got {location})")]));
        }
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(Error::Validation(vec![format!("scale must be finite and >= 0 (got {scale})")]));
        }
        Ok(if scale == 0.0 {
            TerminalDistribution::PointMass { location }
        } else {
            TerminalDistribution::LogNormal { location, scale }
        })
    }

    pub fn location(&self) -> f64 {
        match *self {
            TerminalDistribution::LogNormal { location, .. } | TerminalDistribution::PointMass { location } => location,
        }
    }

    pub fn scale(&self) -> f64 {
        match *self {
            TerminalDistribution::LogNormal { scale, .. } => scale,
            TerminalDistribution::PointMass { .. } => 0.0,
        }
    }

    fn lognormal(&self) -> Result<(f64, f64)> {
        match *self {
            TerminalDistribution::LogNormal { location, scale } => Ok((location, scale)),
            TerminalDistribution::PointMass { .. } => {
                Err(Error::DegenerateLaw("point-mass law has no density or continuous quantile"))
            }
        }
    }

    /// E[S_T] = e^{m + s²/2}
    pub fn mean(&self) -> f64 {
        let s = self.scale();
        (self.location() + 0.5 * s * s).exp()
    }

    pub fn median(&self) -> f64 {
        self.location().exp()
    }

    pub fn mode(&self) -> f64 {
        let s = self.scale();
        (self.location() - s * s).exp()
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        let (m, s) = self.lognormal()?;
        if x.is_nan() || x <= 0.0 {
            return Err(Error::domain(format!("pdf: price must be > 0 (got {x})")));
        }
        Ok(std_pdf((x.ln() - m) / s) / (x * s))
    }

    /// P[S_T ≤ x]. For a point mass this is the step at e^m.
    pub fn cdf(&self, x: f64) -> Result<Probability> {
        check_price(x, "cdf")?;
        Ok(Probability::saturating(match *self {
            TerminalDistribution::LogNormal { location, scale } => {
                if x == 0.0 {
                    0.0
                } else {
                    std_cdf((x.ln() - location) / scale)
                }
            }
            TerminalDistribution::PointMass { location } => {
                if x >= location.exp() {
                    1.0
                } else {
                    0.0
                }
            }
        }))
    }

    /// P[S_T > x], computed in the upper-tail direction.
    pub fn tail(&self, x: f64) -> Result<Probability> {
        check_price(x, "tail")?;
        Ok(Probability::saturating(match *self {
            TerminalDistribution::LogNormal { location, scale } => {
                if x == 0.0 {
                    1.0
                } else {
                    std_cdf((location - x.ln()) / scale)
                }
            }
            TerminalDistribution::PointMass { location } => {
                if x < location.exp() {
                    1.0
                } else {
                    0.0
                }
            }
        }))
    }

    pub fn quantile(&self, p: Probability) -> Result<f64> {
        let (m, s) = self.lognormal()?;
        let p = p.value();
        if p <= 0.0 || p >= 1.0 {
            return Err(Error::domain(format!("quantile: p = {p} must lie strictly inside (0, 1)")));
        }
        Ok((m + s * std_quantile(p)).exp())
    }

    /// The price exceeded with probability `q`, i.e. `quantile(1 − q)`
    /// without forming 1 − q.
    pub fn upper_quantile(&self, q: Probability) -> Result<f64> {
        let (m, s) = self.lognormal()?;
        let q = q.value();
        if q <= 0.0 || q >= 1.0 {
            return Err(Error::domain(format!("upper_quantile: q = {q} must lie strictly inside (0, 1)")));
        }
        Ok((m - s * std_quantile(q)).exp())
    }

    /// M with P[S_T > M] = P[S_T > k] / 2.
    pub fn conditional_median_above(&self, k: f64) -> Result<f64> {
        conditional_median(self, k)
    }

    /// P[S_T > E[S_T]] = Φ(−s/2).
    pub fn prob_above_mean(&self) -> Probability {
        Probability::saturating(std_cdf(-0.5 * self.scale()))
    }
}

fn check_price(x: f64, what: &str) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        Err(Error::domain(format!("{what}: price must be >= 0 (got {x})")))
    } else {
        Ok(())
    }
}

/// A law that exposes its upper tail and the matching inverse. The
/// conditional-median estimator is written once against this surface and
/// shared by the analytic law and empirical samples.
pub trait ExceedanceLaw {
    /// P[X > x]
    fn tail_at(&self, x: f64) -> Result<f64>;
    /// The x with P[X > x] = q, for 0 < q < 1.
    fn upper_quantile_at(&self, q: f64) -> Result<f64>;
}

impl ExceedanceLaw for TerminalDistribution {
    fn tail_at(&self, x: f64) -> Result<f64> {
        self.lognormal()?;
        self.tail(x).map(Probability::value)
    }

    fn upper_quantile_at(&self, q: f64) -> Result<f64> {
        self.upper_quantile(Probability::new(q)?)
    }
}

/// Median of the law conditioned on exceeding `k`.
pub fn conditional_median<L: ExceedanceLaw + ?Sized>(law: &L, k: f64) -> Result<f64> {
    if k.is_nan() || k < 0.0 {
        return Err(Error::domain(format!("conditional median: threshold must be >= 0 (got {k})")));
    }
    let tail = law.tail_at(k)?;
    if tail < TAIL_FLOOR {
        return Err(Error::TailUnderflow { strike: k, tail });
    }
    law.upper_quantile_at(0.5 * tail)
}
