//! Mean (Black-Scholes) and median-based prices of a European call under a
//! log-normal terminal law, the multiplicative-growth model contrasting
//! arithmetic and geometric mean growth, and the quadrature and Monte Carlo
//! oracles used to check the closed forms.

pub mod cli;
pub mod error;
pub mod growth;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod pricing;
pub mod quadrature;

pub use error::{Error, Result};
pub use growth::{
    enumerate_distribution, expected_size, growth_stats, median_size, prob_exceeds, ExceedMethod, GrowthModel,
    GrowthStats, Outcome, Size,
};
pub use model::{conditional_median, terminal_distribution, ExceedanceLaw, MarketParams, TerminalDistribution};
pub use montecarlo::{
    empirical_median_bootstrap, empirical_price, sample_terminal, sample_terminal_with_workers, validate,
    validate_with_workers, CounterRng, EmpiricalLaw, McConfig, McEstimate, ValidationReport,
};
pub use numerics::{norm_cdf, norm_pdf, norm_quantile, norm_sf, Probability};
pub use pricing::{
    bs_price, bs_price_quadrature, d_values, density_report, median_price, price_curve, CurveAxis, CurvePoint,
    CurveSeries, DensityReport, Method, PriceQuote, SstSweep,
};
