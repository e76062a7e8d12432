//! European call prices: the discounted mean payoff (Black-Scholes) and the
//! discounted conditional median of the in-the-money terminal price.
//!
//! Degenerate inputs are resolved by case analysis before any formula is
//! evaluated:
//!
//! | case        | mean                         | median                       |
//! |-------------|------------------------------|------------------------------|
//! | `K = 0`     | `S`                          | `S·e^{−σ²τ/2}`               |
//! | `σ√τ = 0`   | `max(S − K·e^{−rτ}, 0)`      | `max(S − K·e^{−rτ}, 0)`      |

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{terminal_distribution, MarketParams, TAIL_FLOOR};
use crate::numerics::{mills_ratio, mills_slope, std_cdf, std_pdf, std_quantile, Probability};
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mean,
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceQuote {
    pub method: Method,
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    /// Φ(d2) = P[S_T > K]
    pub exercise_prob: Probability,
    pub discount: f64,
    /// Only set for the median method.
    pub conditional_median: Option<f64>,
}

/// `(d1, d2)`, or `None` when σ√τ = 0 or K = 0.
pub fn d_values(params: &MarketParams) -> Option<(f64, f64)> {
    let s = params.total_vol();
    if s == 0.0 || params.strike() == 0.0 {
        return None;
    }
    let d1 = ((params.spot() / params.strike()).ln()
        + (params.rate() + 0.5 * params.vol() * params.vol()) * params.tau())
        / s;
    Some((d1, d1 - s))
}

// d1/d2 used in quotes, with ±∞ standing in for the degenerate limits.
fn quote_d(params: &MarketParams) -> (f64, f64) {
    if let Some(d) = d_values(params) {
        return d;
    }
    let forward = params.spot() / params.discount();
    if params.strike() == 0.0 || forward > params.strike() {
        (f64::INFINITY, f64::INFINITY)
    } else {
        (f64::NEG_INFINITY, f64::NEG_INFINITY)
    }
}

fn intrinsic(params: &MarketParams) -> f64 {
    (params.spot() - params.strike() * params.discount()).max(0.0)
}

// K·e^{−rτ}·φ(d2)·(R(a) − R(b)) with R the Mills ratio, using
// S·φ(d1) = K·e^{−rτ}·φ(d2). Both tails then share one exponential factor and
// only the smooth ratios are differenced.
fn tail_gap(params: &MarketParams, d2: f64, a: f64, b: f64) -> f64 {
    // R(a) − R(b) = ∫ −R' over [a, b]; one Kronrod panel is exact to rounding
    // on a unit-width interval since the integrand is entire.
    let gap =
        if b - a <= 1.0 { quadrature::gk15(&mills_slope, a, b).0 } else { mills_ratio(a) - mills_ratio(b) }.max(0.0);
    params.discount() * params.strike() * std_pdf(d2) * gap
}

pub fn bs_price(params: &MarketParams) -> PriceQuote {
    let discount = params.discount();
    let (d1, d2) = quote_d(params);
    let exercise_prob = Probability::saturating(std_cdf(d2));
    let value = if params.strike() == 0.0 {
        params.spot()
    } else if params.total_vol() == 0.0 {
        intrinsic(params)
    } else if d2 > 0.0 {
        // In the money: intrinsic plus the put via parity, so the small tails
        // are not lost against Φ(d1), Φ(d2) ≈ 1.
        let put = tail_gap(params, d2, d2, d1);
        (params.spot() - discount * params.strike()) + put
    } else if d1 < 0.0 {
        tail_gap(params, d2, -d1, -d2)
    } else {
        let v = params.spot() * std_cdf(d1) - discount * params.strike() * exercise_prob.value();
        v.max(0.0)
    };
    PriceQuote { method: Method::Mean, value, d1, d2, exercise_prob, discount, conditional_median: None }
}

/// Discounted expected payoff by quadrature over the standardized log price,
/// `x = e^{m + s·z}`. Independent of the closed form.
pub fn bs_price_quadrature(params: &MarketParams) -> Result<f64> {
    let s = params.total_vol();
    if s == 0.0 {
        return Err(Error::DegenerateLaw("quadrature price needs σ√τ > 0"));
    }
    let dist = terminal_distribution(params);
    let m = dist.location();
    let k = params.strike();
    let payoff_density = |z: f64| {
        let phi = (-0.5 * z * z).exp() * crate::numerics::FRAC_1_SQRT_2PI;
        ((m + s * z).exp() - k) * phi
    };

    const REACH: f64 = 38.0;
    let z_strike = if k > 0.0 { (k.ln() - m) / s } else { f64::NEG_INFINITY };
    let lo = z_strike.max(-REACH);
    let hi = z_strike.max(s) + REACH;
    let mut breaks: Vec<f64> = [lo, 0.0, s, hi].into_iter().filter(|&b| b >= lo && b <= hi).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let target = 1e-10 * params.spot() / params.discount();
    let share = target / (breaks.len() - 1) as f64;
    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += quadrature::integrate(payoff_density, w[0], w[1], share, 4000)?.value;
    }
    Ok(params.discount() * total)
}

/// Discounted distance from the strike to the median of S_T conditioned on
/// exercise.
pub fn median_price(params: &MarketParams) -> Result<PriceQuote> {
    let discount = params.discount();
    let (d1, d2) = quote_d(params);
    let exercise_prob = Probability::saturating(std_cdf(d2));
    let s = params.total_vol();
    let base =
        PriceQuote { method: Method::Median, value: 0.0, d1, d2, exercise_prob, discount, conditional_median: None };

    if params.strike() == 0.0 {
        let dist = terminal_distribution(params);
        return Ok(PriceQuote {
            value: params.spot() * (-0.5 * s * s).exp(),
            conditional_median: Some(dist.median()),
            ..base
        });
    }
    if s == 0.0 {
        let value = intrinsic(params);
        let terminal = params.spot() / discount;
        return Ok(PriceQuote { value, conditional_median: (terminal > params.strike()).then_some(terminal), ..base });
    }

    let tail = exercise_prob.value();
    if tail < TAIL_FLOOR {
        return Err(Error::TailUnderflow { strike: params.strike(), tail });
    }
    // Φ⁻¹(1 − Φ(d2)/2) evaluated as −Φ⁻¹(Φ(d2)/2)
    let z = -std_quantile(0.5 * tail);
    let value = params.spot() * (s * z - 0.5 * s * s).exp() - params.strike() * discount;
    let m = terminal_distribution(params).location();
    let conditional_median = (m + s * z).exp();
    debug_assert!(value > 0.0, "median price must be positive, got {value} for {params:?}");
    Ok(PriceQuote { value: value.max(0.0), conditional_median: Some(conditional_median), ..base })
}

/// Which parameter the σ√τ axis moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SstSweep {
    /// τ = (x/σ)² at fixed σ.
    #[default]
    Tau,
    /// σ = x/√τ at fixed τ.
    Vol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveAxis {
    SigmaSqrtTau(SstSweep),
    Spot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub mean: f64,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub axis: CurveAxis,
    pub points: Vec<CurvePoint>,
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect()
}

/// Parameters at abscissa `x` of the given axis.
pub fn substitute(params: &MarketParams, axis: CurveAxis, x: f64) -> Result<MarketParams> {
    match axis {
        CurveAxis::Spot => params.with_spot(x),
        CurveAxis::SigmaSqrtTau(SstSweep::Tau) => {
            if params.vol() <= 0.0 {
                return Err(Error::Validation(vec!["sweeping σ√τ through τ needs vol > 0".into()]));
            }
            if x < 0.0 {
                return Err(Error::Validation(vec![format!("σ√τ must be >= 0 (got {x})")]));
            }
            let r = x / params.vol();
            params.with_tau(r * r)
        }
        CurveAxis::SigmaSqrtTau(SstSweep::Vol) => {
            if params.tau() <= 0.0 {
                return Err(Error::Validation(vec!["sweeping σ√τ through σ needs tau > 0".into()]));
            }
            params.with_vol(x / params.tau().sqrt())
        }
    }
}

pub fn price_curve(params: &MarketParams, axis: CurveAxis, lo: f64, hi: f64, n: usize) -> Result<CurveSeries> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || n < 2 {
        return Err(Error::Validation(vec![format!(
            "curve range needs finite lo < hi and n >= 2 (got lo={lo}, hi={hi}, n={n})"
        )]));
    }
    let xs = linspace(lo, hi, n);
    let results: Vec<Result<CurvePoint>> = xs
        .par_iter()
        .map(|&x| {
            let p = substitute(params, axis, x)?;
            let mean = bs_price(&p).value;
            let median = median_price(&p)?.value;
            Ok(CurvePoint { x, mean, median })
        })
        .collect();

    let mut points = Vec::with_capacity(n);
    let mut failed = Vec::new();
    let mut first_error = None;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(p) => points.push(p),
            Err(e) => {
                failed.push(i);
                first_error.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_error {
        return Err(Error::PartialCurve { failed, total: n, first_error: Box::new(e) });
    }
    Ok(CurveSeries { axis, points })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    /// (price, density) on a log-spaced grid.
    pub pdf: Vec<(f64, f64)>,
    /// Terminal price whose discounted payoff equals the mean price.
    pub marker_mean: f64,
    /// Conditional median of S_T above the strike.
    pub marker_median: f64,
    /// P[K < S_T < marker_median]
    pub area_left: Probability,
    /// P[S_T > marker_median]
    pub area_right: Probability,
}

pub fn density_report(params: &MarketParams, grid_n: usize) -> Result<DensityReport> {
    if grid_n < 2 {
        return Err(Error::Validation(vec![format!("grid size must be >= 2 (got {grid_n})")]));
    }
    let dist = terminal_distribution(params);
    if dist.scale() == 0.0 {
        return Err(Error::DegenerateLaw("density report needs σ√τ > 0"));
    }
    let lo = dist.quantile(Probability::new(1e-4)?)?.ln();
    let hi = dist.upper_quantile(Probability::new(1e-4)?)?.ln();
    let pdf = linspace(lo, hi, grid_n)
        .into_iter()
        .map(|lx| {
            let x = lx.exp();
            dist.pdf(x).map(|f| (x, f))
        })
        .collect::<Result<Vec<_>>>()?;

    let strike = params.strike();
    let marker_median = dist.conditional_median_above(strike)?;
    let marker_mean = strike + bs_price(params).value / params.discount();
    let tail_k = dist.tail(strike)?.value();
    let area_right = dist.tail(marker_median)?;
    let area_left = Probability::saturating(tail_k - area_right.value());
    Ok(DensityReport { pdf, marker_mean, marker_median, area_left, area_right })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> MarketParams {
        MarketParams::new(1.5, 0.2, 0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn d_values_example() {
        let (d1, d2) = d_values(&example()).unwrap();
        assert!((d1 - 2.514_903_020_542_264_8).abs() < 1e-14);
        assert!((d2 - 1.514_903_020_542_264_8).abs() < 1e-14);
    }

    #[test]
    fn d_values_at_the_money() {
        let p = MarketParams::new(2.0, 2.0, 0.0, 0.4, 2.25).unwrap();
        let (d1, d2) = d_values(&p).unwrap();
        assert!((d1 - 0.3).abs() < 1e-15);
        assert!((d2 + 0.3).abs() < 1e-15);
    }

    #[test]
    fn d_values_degenerate() {
        assert!(d_values(&example().with_strike(0.0).unwrap()).is_none());
        assert!(d_values(&example().with_tau(0.0).unwrap()).is_none());
    }

    #[test]
    fn scaling_leaves_d_unchanged() {
        let (a1, a2) = d_values(&example()).unwrap();
        let (b1, b2) = d_values(&MarketParams::new(15.0, 2.0, 0.0, 1.0, 1.0).unwrap()).unwrap();
        assert!((a1 - b1).abs() < 1e-14 && (a2 - b2).abs() < 1e-14);
    }

    #[test]
    fn bs_reference_values() {
        assert!((bs_price(&example()).value - 1.304_049_811_746_439_3).abs() < 1e-13);
        let hull = MarketParams::new(42.0, 40.0, 0.10, 0.20, 0.5).unwrap();
        assert!((bs_price(&hull).value - 4.759_422_392_871_533).abs() < 1e-12);
        assert_eq!(bs_price(&example().with_strike(0.0).unwrap()).value, 1.5);
    }

    #[test]
    fn quote_invariants() {
        let q = bs_price(&example());
        assert!((q.d2 - (q.d1 - 1.0)).abs() < 1e-12);
        assert!((q.exercise_prob.value() - std_cdf(q.d2)).abs() < 1e-13);
        assert_eq!(q.method, Method::Mean);
        assert!(q.conditional_median.is_none());
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let quad = bs_price_quadrature(&example()).unwrap();
        assert!((quad - 1.304_049_811_746_439_3).abs() < 1e-10);
        let quad0 = bs_price_quadrature(&example().with_strike(0.0).unwrap()).unwrap();
        assert!((quad0 - 1.5).abs() < 1e-8);
    }

    #[test]
    fn quadrature_small_variance_is_intrinsic() {
        let p = MarketParams::new(1.5, 0.5, 0.05, 0.01, 1.0).unwrap();
        let quad = bs_price_quadrature(&p).unwrap();
        assert!((quad - (1.5 - 0.5 * (-0.05f64).exp())).abs() < 1e-6);
    }

    #[test]
    fn quadrature_rejects_point_mass() {
        assert!(matches!(bs_price_quadrature(&example().with_vol(0.0).unwrap()), Err(Error::DegenerateLaw(_))));
    }

    #[test]
    fn median_reference_values() {
        let q = median_price(&example()).unwrap();
        assert!((q.value - 0.786_978_709_953_795_8).abs() < 1e-13);
        assert!((q.conditional_median.unwrap() - 0.986_978_709_953_795_8).abs() < 1e-13);
        let k0 = median_price(&MarketParams::new(1.0, 0.0, 0.0, 1.0, 1.0).unwrap()).unwrap();
        assert!((k0.value - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn median_agrees_with_model_route() {
        for &(s, k, r, v, t) in
            &[(1.5, 0.2, 0.0, 1.0, 1.0), (100.0, 120.0, 0.03, 0.25, 2.0), (1.0, 0.7, -0.01, 2.0, 4.0)]
        {
            let p = MarketParams::new(s, k, r, v, t).unwrap();
            let mx = terminal_distribution(&p).conditional_median_above(k).unwrap();
            let via_model = p.discount() * (mx - k);
            let direct = median_price(&p).unwrap().value;
            assert!((direct - via_model).abs() <= 1e-12 * s, "{direct} vs {via_model}");
        }
    }

    #[test]
    fn maturity_limits_agree() {
        let p = MarketParams::new(1.5, 0.7, 0.1, 1.0, 0.0).unwrap();
        assert_eq!(bs_price(&p).value, 0.8);
        assert_eq!(median_price(&p).unwrap().value, 0.8);
        let otm = p.with_strike(2.0).unwrap();
        assert_eq!(bs_price(&otm).value, 0.0);
        assert_eq!(median_price(&otm).unwrap().value, 0.0);
    }

    #[test]
    fn median_far_out_of_the_money_underflows() {
        let p = MarketParams::new(1.0, 1e60, 0.0, 0.5, 1.0).unwrap();
        assert!(matches!(median_price(&p), Err(Error::TailUnderflow { .. })));
        assert_eq!(bs_price(&p).value, 0.0);
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn small_tail_prices_keep_relative_accuracy() {
        // 60-digit references
        let cases = [
            (
                (5.686197322327921, 9.59906208796674, 0.19888223325887144, 0.01446308534531628, 0.7504924086051312),
                5.3569992352722001669e-199,
            ),
            (
                (9.696652745538493, 14.286883218387148, 0.0, 0.013796200227073313, 4.515661099805305),
                8.7203256391316228559e-42,
            ),
            ((1.0, 20.0, 0.0, 0.4, 1.0), 7.8425885745800129463e-15),
            ((1.0, 3.0, 0.0, 0.5, 1.0), 0.0041597422340007867567),
            ((14.0, 9.0, 0.02, 0.02, 1.0), 5.1782119402392022837),
        ];
        for ((s, k, r, v, t), want) in cases {
            let got = bs_price(&MarketParams::new(s, k, r, v, t).unwrap()).value;
            assert!((got - want).abs() <= 1e-13 * want, "S {s} K {k}: {got:e} vs {want:e}");
        }
    }

    #[test]
    fn curve_endpoints_match_point_pricers() {
        let base = MarketParams::new(1.5, 0.7, 0.0, 1.0, 1.0).unwrap();
        let c = price_curve(&base, CurveAxis::SigmaSqrtTau(SstSweep::Tau), 0.01, 5.0, 50).unwrap();
        assert_eq!(c.points.len(), 50);
        let last = base.with_tau(25.0).unwrap();
        assert_eq!(c.points[49].x, 5.0);
        assert_eq!(c.points[49].mean, bs_price(&last).value);
        assert_eq!(c.points[49].median, median_price(&last).unwrap().value);
        let spot = price_curve(&base, CurveAxis::Spot, 0.1, 3.0, 7).unwrap();
        assert_eq!(spot.points[0].mean, bs_price(&base.with_spot(0.1).unwrap()).value);
    }

    #[test]
    fn curve_sweep_styles_agree_at_zero_rate() {
        let base = MarketParams::new(1.5, 0.2, 0.0, 1.0, 1.0).unwrap();
        let a = price_curve(&base, CurveAxis::SigmaSqrtTau(SstSweep::Tau), 0.1, 3.0, 9).unwrap();
        let b = price_curve(&base, CurveAxis::SigmaSqrtTau(SstSweep::Vol), 0.1, 3.0, 9).unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            assert!((p.mean - q.mean).abs() < 1e-12);
            assert!((p.median - q.median).abs() < 1e-12);
        }
    }

    #[test]
    fn curve_reports_failed_points() {
        let base = MarketParams::new(1.5, 0.7, 0.0, 1.0, 1.0).unwrap();
        match price_curve(&base, CurveAxis::Spot, -1.0, 1.0, 5) {
            Err(Error::PartialCurve { failed, total, .. }) => {
                assert_eq!(failed, vec![0, 1, 2]);
                assert_eq!(total, 5);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(price_curve(&base, CurveAxis::Spot, 1.0, 1.0, 5).is_err());
        assert!(price_curve(&base, CurveAxis::Spot, 0.5, 1.0, 1).is_err());
    }

    #[test]
    fn density_report_example() {
        let r = density_report(&example(), 400).unwrap();
        assert!((r.marker_median - 0.986_978_709_953_795_8).abs() < 1e-13);
        assert!((r.marker_mean - 1.504_049_811_746_439_3).abs() < 1e-13);
        assert!((r.area_left.value() - r.area_right.value()).abs() < 1e-10);
        let mass: f64 = r.pdf.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
        assert!(mass >= 0.999, "trapezoid mass {mass}");
        assert!(r.pdf.windows(2).all(|w| w[0].0 < w[1].0));
    }
}
