//! Command-line front end. Data goes to stdout, diagnostics to stderr.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numeric failure (tail
//! underflow, quadrature, enumeration limits), 4 I/O.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::growth::{self, ExceedMethod, GrowthModel};
use crate::model::MarketParams;
use crate::montecarlo::{self, McConfig, ValidationReport};
use crate::pricing::{self, CurveAxis, CurveSeries, Method, PriceQuote, SstSweep};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Significant digits in csv/json output.
pub const MACHINE_DIGITS: usize = 12;
/// Significant digits in human output.
pub const HUMAN_DIGITS: usize = 6;

#[derive(Debug, Parser)]
#[command(name = "medianbs", version, about = "Mean and median European call prices")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price a call with the mean and/or median formula.
    Price(PriceArgs),
    /// Price curves against σ√τ or spot.
    Curve(CurveArgs),
    /// Terminal density with the mean/median markers and equal-area check.
    Density(DensityArgs),
    /// Multiplicative growth: mean vs geometric-mean growth.
    Growth(GrowthArgs),
    /// Monte Carlo validation of both formulas.
    Mc(McArgs),
    /// Price from a file of terminal prices.
    Empirical(EmpiricalArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct MarketArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub spot: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub strike: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rate: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub vol: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
}

impl MarketArgs {
    fn require(&self) -> Result<MarketParams, Error> {
        let mut missing = Vec::new();
        let mut get = |name: &str, v: Option<f64>| {
            v.unwrap_or_else(|| {
                missing.push(format!("missing --{name}"));
                f64::NAN
            })
        };
        let (spot, strike, rate, vol, tau) = (
            get("spot", self.spot),
            get("strike", self.strike),
            get("rate", self.rate),
            get("vol", self.vol),
            get("tau", self.tau),
        );
        if !missing.is_empty() {
            return Err(Error::Validation(missing));
        }
        MarketParams::new(spot, strike, rate, vol, tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Mean,
    Median,
    Both,
}

impl MethodChoice {
    fn methods(self) -> &'static [Method] {
        match self {
            MethodChoice::Mean => &[Method::Mean],
            MethodChoice::Median => &[Method::Median],
            MethodChoice::Both => &[Method::Mean, Method::Median],
        }
    }
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    #[command(flatten)]
    pub market: MarketArgs,
    #[arg(long, value_enum, default_value_t = MethodChoice::Both)]
    pub method: MethodChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisChoice {
    /// σ√τ
    Sst,
    Spot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepChoice {
    Tau,
    Vol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig2a,
    Fig2b,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub market: MarketArgs,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, value_enum)]
    pub axis: Option<AxisChoice>,
    /// Parameter moved along the σ√τ axis.
    #[arg(long, value_enum, default_value_t = SweepChoice::Tau)]
    pub sweep: SweepChoice,
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub market: MarketArgs,
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub rates: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub probs: Vec<f64>,
    #[arg(long = "t")]
    pub horizon: u32,
    #[arg(long, default_value_t = 1.0)]
    pub initial: f64,
    /// Exceedance threshold; defaults to the initial size.
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub market: MarketArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = McConfig::DEFAULT_CHUNK)]
    pub chunk: usize,
    /// Worker threads (does not change results).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EmpiricalArgs {
    /// One terminal price per line; `#` starts a comment line.
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub strike: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub rate: f64,
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    #[arg(long, value_enum, default_value_t = MethodChoice::Both)]
    pub method: MethodChoice,
    /// Use a percentile bootstrap with this many resamples for the median CI.
    #[arg(long)]
    pub bootstrap: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) | Error::Domain(_) | Error::Parse { .. } => EXIT_INVALID,
        Error::Io(_) => EXIT_IO,
        Error::PartialCurve { first_error, .. } => exit_code(first_error),
        _ => EXIT_NUMERIC,
    }
}

/// Formats `x` to `digits` significant digits using the shortest decimal
/// that round-trips the rounded value.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x, digits);
    if r == 0.0 {
        return "0".into();
    }
    let a = r.abs();
    if (1e-5..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig(n.as_f64().unwrap(), MACHINE_DIGITS);
            serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

struct Out<'a> {
    format: Format,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Out<'_> {
    fn num(&self, x: f64) -> String {
        fmt_sig(x, if self.format == Format::Human { HUMAN_DIGITS } else { MACHINE_DIGITS })
    }

    fn json(&mut self, command: &str, results: Value) -> std::io::Result<()> {
        let doc = json!({ "command": command, "results": round_json(results) });
        writeln!(self.stdout, "{}", serde_json::to_string_pretty(&doc).expect("json"))
    }

    fn csv_row(&mut self, cells: &[String]) -> std::io::Result<()> {
        writeln!(self.stdout, "{}", cells.join(","))
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{rendered}") } else { write!(stdout, "{rendered}") };
            return code;
        }
    };
    let mut out = Out { format: cli.format, stdout, stderr };
    let result = match &cli.command {
        Command::Price(a) => cmd_price(&mut out, a),
        Command::Curve(a) => cmd_curve(&mut out, a),
        Command::Density(a) => cmd_density(&mut out, a),
        Command::Growth(a) => cmd_growth(&mut out, a),
        Command::Mc(a) => cmd_mc(&mut out, a),
        Command::Empirical(a) => cmd_empirical(&mut out, a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(out.stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

type CmdResult = Result<(), Error>;

fn quote_json(q: &PriceQuote) -> Value {
    to_json(q)
}

fn cmd_price(out: &mut Out, a: &PriceArgs) -> CmdResult {
    let params = a.market.require()?;
    let mut quotes = Vec::new();
    for &m in a.method.methods() {
        quotes.push(match m {
            Method::Mean => pricing::bs_price(&params),
            Method::Median => pricing::median_price(&params)?,
        });
    }
    match out.format {
        Format::Json => {
            let results =
                json!({ "params": to_json(&params), "quotes": quotes.iter().map(quote_json).collect::<Vec<_>>() });
            out.json("price", results)?;
        }
        Format::Csv => {
            out.csv_row(
                &["method", "value", "d1", "d2", "exercise_prob", "discount", "conditional_median"].map(String::from),
            )?;
            for q in &quotes {
                let row = vec![
                    method_name(q.method).to_string(),
                    out.num(q.value),
                    out.num(q.d1),
                    out.num(q.d2),
                    out.num(q.exercise_prob.value()),
                    out.num(q.discount),
                    q.conditional_median.map(|m| out.num(m)).unwrap_or_default(),
                ];
                out.csv_row(&row)?;
            }
        }
        Format::Human => {
            for q in &quotes {
                let mut line = format!(
                    "{:<6} {}  (d1 {}, d2 {}, exercise prob {}, discount {}",
                    method_name(q.method),
                    out.num(q.value),
                    out.num(q.d1),
                    out.num(q.d2),
                    out.num(q.exercise_prob.value()),
                    out.num(q.discount)
                );
                if let Some(m) = q.conditional_median {
                    line.push_str(&format!(", conditional median {}", out.num(m)));
                }
                line.push(')');
                writeln!(out.stdout, "{line}")?;
            }
        }
    }
    Ok(())
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Mean => "mean",
        Method::Median => "median",
    }
}

struct SeriesJob {
    label: String,
    params: MarketParams,
    axis: CurveAxis,
}

fn cmd_curve(out: &mut Out, a: &CurveArgs) -> CmdResult {
    let sweep = match a.sweep {
        SweepChoice::Tau => SstSweep::Tau,
        SweepChoice::Vol => SstSweep::Vol,
    };
    let (jobs, lo, hi, n) = match a.preset {
        Some(Preset::Fig2a) => {
            let axis = CurveAxis::SigmaSqrtTau(sweep);
            let jobs = [0.2, 0.7]
                .into_iter()
                .map(|k| {
                    Ok(SeriesJob { label: format!("K={k}"), params: MarketParams::new(1.5, k, 0.0, 1.0, 1.0)?, axis })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            (jobs, a.lo.unwrap_or(0.01), a.hi.unwrap_or(5.0), a.n.unwrap_or(200))
        }
        Some(Preset::Fig2b) => {
            let jobs = [0.2, 2.0]
                .into_iter()
                .map(|tau| {
                    Ok(SeriesJob {
                        label: format!("tau={tau}"),
                        params: MarketParams::new(1.0, 1.0, 0.2, 1.0, tau)?,
                        axis: CurveAxis::Spot,
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            (jobs, a.lo.unwrap_or(0.01), a.hi.unwrap_or(3.0), a.n.unwrap_or(200))
        }
        None => {
            let axis = match a.axis {
                Some(AxisChoice::Sst) => CurveAxis::SigmaSqrtTau(sweep),
                Some(AxisChoice::Spot) => CurveAxis::Spot,
                None => return Err(Error::Validation(vec!["missing --axis (or --preset)".into()])),
            };
            // the swept parameter may be omitted; it is overwritten per point
            let mut m = a.market;
            match axis {
                CurveAxis::Spot => m.spot = m.spot.or(Some(1.0)),
                CurveAxis::SigmaSqrtTau(SstSweep::Tau) => m.tau = m.tau.or(Some(1.0)),
                CurveAxis::SigmaSqrtTau(SstSweep::Vol) => m.vol = m.vol.or(Some(1.0)),
            }
            let params = m.require()?;
            let mut missing = Vec::new();
            if a.lo.is_none() {
                missing.push("missing --lo".to_string());
            }
            if a.hi.is_none() {
                missing.push("missing --hi".to_string());
            }
            if a.n.is_none() {
                missing.push("missing --n".to_string());
            }
            if !missing.is_empty() {
                return Err(Error::Validation(missing));
            }
            (vec![SeriesJob { label: String::new(), params, axis }], a.lo.unwrap(), a.hi.unwrap(), a.n.unwrap())
        }
    };

    let series: Vec<(SeriesJob, CurveSeries)> = jobs
        .into_iter()
        .map(|job| pricing::price_curve(&job.params, job.axis, lo, hi, n).map(|s| (job, s)))
        .collect::<Result<_, _>>()?;
    let labelled = a.preset.is_some();

    match out.format {
        Format::Json => {
            let list: Vec<Value> = series
                .iter()
                .map(|(job, s)| {
                    json!({
                        "label": job.label,
                        "params": to_json(&job.params),
                        "axis": to_json(&s.axis),
                        "points": to_json(&s.points),
                    })
                })
                .collect();
            out.json("curve", json!({ "series": list }))?;
        }
        Format::Csv | Format::Human => {
            let mut header = vec!["x".to_string(), "mean".into(), "median".into()];
            if labelled {
                header.push("series".into());
            }
            if out.format == Format::Csv {
                out.csv_row(&header)?;
            } else {
                writeln!(out.stdout, "{}", header.iter().map(|h| format!("{h:>12}")).collect::<String>())?;
            }
            for (job, s) in &series {
                for p in &s.points {
                    let mut row = vec![out.num(p.x), out.num(p.mean), out.num(p.median)];
                    if labelled {
                        row.push(job.label.clone());
                    }
                    if out.format == Format::Csv {
                        out.csv_row(&row)?;
                    } else {
                        writeln!(out.stdout, "{}", row.iter().map(|c| format!("{c:>12}")).collect::<String>())?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn cmd_density(out: &mut Out, a: &DensityArgs) -> CmdResult {
    let params = a.market.require()?;
    let r = pricing::density_report(&params, a.grid)?;
    let dist = crate::model::terminal_distribution(&params);
    match out.format {
        Format::Json => out.json("density", json!({ "params": to_json(&params), "report": to_json(&r) }))?,
        Format::Csv => {
            out.csv_row(&["row", "x", "y"].map(String::from))?;
            for &(x, f) in &r.pdf {
                let row = vec!["pdf".to_string(), out.num(x), out.num(f)];
                out.csv_row(&row)?;
            }
            for (name, x) in [("marker_mean", r.marker_mean), ("marker_median", r.marker_median)] {
                let row = vec![name.to_string(), out.num(x), out.num(dist.pdf(x)?)];
                out.csv_row(&row)?;
            }
            let row = vec!["area_left".to_string(), out.num(params.strike()), out.num(r.area_left.value())];
            out.csv_row(&row)?;
            let row = vec!["area_right".to_string(), out.num(r.marker_median), out.num(r.area_right.value())];
            out.csv_row(&row)?;
        }
        Format::Human => {
            writeln!(out.stdout, "grid points      {}", r.pdf.len())?;
            writeln!(out.stdout, "marker (mean)    {}", out.num(r.marker_mean))?;
            writeln!(out.stdout, "marker (median)  {}", out.num(r.marker_median))?;
            writeln!(out.stdout, "area K..median   {}", out.num(r.area_left.value()))?;
            writeln!(out.stdout, "area > median    {}", out.num(r.area_right.value()))?;
        }
    }
    Ok(())
}

fn cmd_growth(out: &mut Out, a: &GrowthArgs) -> CmdResult {
    let model = GrowthModel::new(a.rates.clone(), a.probs.clone(), a.initial, a.horizon)?;
    let stats = growth::growth_stats(&model);
    let expected = growth::expected_size(&model);
    let median = growth::median_size(&model);
    let threshold = a.threshold.unwrap_or(a.initial);

    let mut exact_of = |thr: f64| -> Result<Option<f64>, Error> {
        match growth::prob_exceeds(&model, thr, ExceedMethod::Exact) {
            Ok(p) => Ok(Some(p.value())),
            Err(e @ Error::EnumerationTooLarge { .. }) => {
                let _ = writeln!(out.stderr, "note: exact probabilities unavailable: {e}");
                Ok(None)
            }
            Err(e) => Err(e),
        }
    };
    let exceed_exact = exact_of(threshold)?;
    let above_mean_exact = if expected.overflow { None } else { exact_of(expected.value)? };
    let exceed_normal = growth::prob_exceeds(&model, threshold, ExceedMethod::Normal)?.value();
    let above_mean_normal = if expected.overflow {
        None
    } else {
        Some(growth::prob_exceeds(&model, expected.value, ExceedMethod::Normal)?.value())
    };
    if expected.overflow {
        writeln!(out.stderr, "note: expected size overflows double precision")?;
    }

    match out.format {
        Format::Json => {
            let results = json!({
                "model": to_json(&model),
                "stats": to_json(&stats),
                "expected_size": to_json(&expected),
                "median_size": to_json(&median),
                "threshold": threshold,
                "prob_exceeds_threshold": { "exact": exceed_exact, "normal-approx": exceed_normal },
                "prob_above_expected": { "exact": above_mean_exact, "normal-approx": above_mean_normal },
            });
            out.json("growth", results)?;
        }
        Format::Csv => {
            out.csv_row(&["quantity", "method", "value"].map(String::from))?;
            let opt = |o: &Out, v: Option<f64>| v.map(|x| o.num(x)).unwrap_or_default();
            let rows: Vec<(&str, &str, String)> = vec![
                ("mu_l", "", out.num(stats.mu_l)),
                ("mu_log", "", out.num(stats.mu_log)),
                ("geo_mean", "", out.num(stats.geo_mean)),
                ("sd_log", "", out.num(stats.sd_log)),
                ("expected_size", "", out.num(expected.value)),
                ("median_size", "", out.num(median.value)),
                ("threshold", "", out.num(threshold)),
                ("prob_exceeds_threshold", "exact", opt(out, exceed_exact)),
                ("prob_exceeds_threshold", "normal-approx", out.num(exceed_normal)),
                ("prob_above_expected", "exact", opt(out, above_mean_exact)),
                ("prob_above_expected", "normal-approx", opt(out, above_mean_normal)),
            ];
            for (q, m, v) in rows {
                out.csv_row(&[q.to_string(), m.to_string(), v])?;
            }
        }
        Format::Human => {
            let opt = |o: &Out, v: Option<f64>| v.map(|x| o.num(x)).unwrap_or_else(|| "n/a".into());
            let t = a.horizon;
            writeln!(out.stdout, "mu_l (arithmetic mean rate)   {}", out.num(stats.mu_l))?;
            writeln!(out.stdout, "mu_log (mean log rate)        {}", out.num(stats.mu_log))?;
            writeln!(out.stdout, "geometric mean rate M         {}", out.num(stats.geo_mean))?;
            writeln!(out.stdout, "sd of log rate                {}", out.num(stats.sd_log))?;
            writeln!(out.stdout, "E[S_{t}] = mu_l^t S_0           {}", out.num(expected.value))?;
            writeln!(out.stdout, "median S_{t} = M^t S_0          {}", out.num(median.value))?;
            writeln!(
                out.stdout,
                "P[S_{t} > {}]  exact {}  normal-approx {}",
                out.num(threshold),
                opt(out, exceed_exact),
                out.num(exceed_normal)
            )?;
            writeln!(
                out.stdout,
                "P[S_{t} > E[S_{t}]]  exact {}  normal-approx {}",
                opt(out, above_mean_exact),
                opt(out, above_mean_normal)
            )?;
        }
    }
    Ok(())
}

fn cmd_mc(out: &mut Out, a: &McArgs) -> CmdResult {
    let params = a.market.require()?;
    let mc = McConfig::new(a.paths, a.seed, a.chunk)?;
    let report = match a.workers {
        Some(0) => return Err(Error::Validation(vec!["--workers must be >= 1".into()])),
        Some(w) => montecarlo::validate_with_workers(&params, &mc, w)?,
        None => montecarlo::validate(&params, &mc)?,
    };
    write_mc(out, &report)
}

fn write_mc(out: &mut Out, r: &ValidationReport) -> CmdResult {
    match out.format {
        Format::Json => {
            let mut v = to_json(r);
            v["passed"] = Value::Bool(r.passed());
            out.json("mc", v)?;
        }
        Format::Csv => {
            out.csv_row(
                &["check", "analytic", "empirical", "std_error", "ci_low", "ci_high", "z", "pass"].map(String::from),
            )?;
            let e = &r.mean.empirical;
            let row = vec![
                "mean".into(),
                out.num(r.mean.analytic),
                out.num(e.value),
                out.num(e.std_error),
                out.num(e.ci_low),
                out.num(e.ci_high),
                out.num(r.mean.z),
                r.mean.pass.to_string(),
            ];
            out.csv_row(&row)?;
            let e = &r.median.empirical;
            let row = vec![
                "median".into(),
                out.num(r.median.analytic),
                out.num(e.value),
                out.num(e.std_error),
                out.num(e.ci_low),
                out.num(e.ci_high),
                out.num(r.median.z),
                r.median.pass.to_string(),
            ];
            out.csv_row(&row)?;
            if let Some(t) = &r.tail {
                let row = vec![
                    "prob_above_mean".into(),
                    out.num(t.analytic),
                    out.num(t.empirical),
                    out.num(t.binomial_se),
                    String::new(),
                    String::new(),
                    out.num(t.z),
                    t.pass.to_string(),
                ];
                out.csv_row(&row)?;
            }
        }
        Format::Human => {
            let verdict = |b: bool| if b { "pass" } else { "FAIL" };
            writeln!(out.stdout, "paths {}  seed {}  chunk {}", r.config.paths, r.config.seed, r.config.chunk)?;
            let e = &r.mean.empirical;
            writeln!(
                out.stdout,
                "mean    analytic {}  empirical {} ± {}  z {}  {}",
                out.num(r.mean.analytic),
                out.num(e.value),
                out.num(e.std_error),
                out.num(r.mean.z),
                verdict(r.mean.pass)
            )?;
            let e = &r.median.empirical;
            writeln!(
                out.stdout,
                "median  analytic {}  empirical {}  95% CI [{}, {}]  {}",
                out.num(r.median.analytic),
                out.num(e.value),
                out.num(e.ci_low),
                out.num(e.ci_high),
                verdict(r.median.pass)
            )?;
            if let Some(t) = &r.tail {
                writeln!(
                    out.stdout,
                    "P[S_T > E S_T]  analytic {}  empirical {}  z {}  {}",
                    out.num(t.analytic),
                    out.num(t.empirical),
                    out.num(t.z),
                    verdict(t.pass)
                )?;
            }
        }
    }
    Ok(())
}

fn cmd_empirical(out: &mut Out, a: &EmpiricalArgs) -> CmdResult {
    let sample = montecarlo::read_sample_file(&a.file)?;
    let mut rows = Vec::new();
    for &m in a.method.methods() {
        let est = match (m, a.bootstrap) {
            (Method::Median, Some(b)) => {
                montecarlo::empirical_median_bootstrap(&sample, a.strike, a.rate, a.tau, b, a.seed)?
            }
            _ => montecarlo::empirical_price(&sample, a.strike, a.rate, a.tau, m)?,
        };
        rows.push((m, est));
    }
    match out.format {
        Format::Json => {
            let list: Vec<Value> = rows
                .iter()
                .map(|(m, e)| {
                    let mut v = to_json(e);
                    v["method"] = json!(method_name(*m));
                    v
                })
                .collect();
            out.json("empirical", json!({ "samples": sample.len(), "estimates": list }))?;
        }
        Format::Csv => {
            out.csv_row(&["method", "value", "std_error", "paths_used", "ci_low", "ci_high"].map(String::from))?;
            for (m, e) in &rows {
                let row = vec![
                    method_name(*m).to_string(),
                    out.num(e.value),
                    out.num(e.std_error),
                    e.paths_used.to_string(),
                    out.num(e.ci_low),
                    out.num(e.ci_high),
                ];
                out.csv_row(&row)?;
            }
        }
        Format::Human => {
            for (m, e) in &rows {
                writeln!(
                    out.stdout,
                    "{:<6} {}  se {}  95% CI [{}, {}]  ({} samples)",
                    method_name(*m),
                    out.num(e.value),
                    out.num(e.std_error),
                    out.num(e.ci_low),
                    out.num(e.ci_high),
                    e.paths_used
                )?;
            }
        }
    }
    Ok(())
}
