use std::io::Write;
use std::process::{Command, Output};

use medianbs::{bs_price, median_price, MarketParams};
use serde_json::Value;

fn medianbs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_medianbs")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const EXAMPLE: [&str; 10] = ["--spot", "1.5", "--strike", "0.2", "--rate", "0", "--vol", "1", "--tau", "1"];

fn with_example<'a>(head: &[&'a str]) -> Vec<&'a str> {
    head.iter().copied().chain(EXAMPLE).collect()
}

fn agrees_to_12_digits(printed: f64, exact: f64) -> bool {
    (printed - exact).abs() <= 5e-12 * exact.abs()
}

#[test]
fn price_csv_round_trips() {
    let out = medianbs(&with_example(&["--format", "csv", "price"]));
    assert!(out.status.success());
    assert!(out.stderr.is_empty());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "method,value,d1,d2,exercise_prob,discount,conditional_median");
    let p = MarketParams::new(1.5, 0.2, 0.0, 1.0, 1.0).unwrap();
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let want = match cells[0] {
            "mean" => bs_price(&p),
            "median" => median_price(&p).unwrap(),
            other => panic!("unexpected row {other}"),
        };
        let value: f64 = cells[1].parse().unwrap();
        let d1: f64 = cells[2].parse().unwrap();
        assert!(agrees_to_12_digits(value, want.value), "{line}");
        assert!(agrees_to_12_digits(d1, want.d1), "{line}");
    }
    assert!(!text.contains('\r'));
}

#[test]
fn price_json_round_trips() {
    let out = medianbs(&with_example(&["--format", "json", "price"]));
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"], "price");
    let r = &v["results"];
    let p = MarketParams::new(
        r["params"]["spot"].as_f64().unwrap(),
        r["params"]["strike"].as_f64().unwrap(),
        r["params"]["rate"].as_f64().unwrap(),
        r["params"]["vol"].as_f64().unwrap(),
        r["params"]["tau"].as_f64().unwrap(),
    )
    .unwrap();
    let quotes = r["quotes"].as_array().unwrap();
    assert!(agrees_to_12_digits(quotes[0]["value"].as_f64().unwrap(), bs_price(&p).value));
    let median = median_price(&p).unwrap();
    assert!(agrees_to_12_digits(quotes[1]["value"].as_f64().unwrap(), median.value));
    assert!(agrees_to_12_digits(quotes[1]["conditional_median"].as_f64().unwrap(), median.conditional_median.unwrap()));
    assert!(quotes[0]["conditional_median"].is_null());
}

#[test]
fn curve_csv_round_trips() {
    let out = medianbs(&["--format", "csv", "curve", "--preset", "fig2b", "--n", "25"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,mean,median,series");
    // Re-price at the grid point the row refers to; the printed x is itself
    // a 12-digit rounding of it.
    let grid = medianbs::pricing::linspace(0.01, 3.0, 25);
    let mut rows = 0;
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        let tau: f64 = cells[3].trim_start_matches("tau=").parse().unwrap();
        let x = grid[i % 25];
        assert!(agrees_to_12_digits(cells[0].parse().unwrap(), x), "{line}");
        let p = MarketParams::new(x, 1.0, 0.2, 1.0, tau).unwrap();
        assert!(agrees_to_12_digits(cells[1].parse().unwrap(), bs_price(&p).value), "{line}");
        assert!(agrees_to_12_digits(cells[2].parse().unwrap(), median_price(&p).unwrap().value), "{line}");
        rows += 1;
    }
    assert_eq!(rows, 50);
}

#[test]
fn growth_human_lists_both_methods() {
    let out = medianbs(&["growth", "--rates", "0.5,1.7", "--probs", "0.5,0.5", "--t", "100"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("exact 0.096674"), "{text}");
    assert!(text.contains("normal-approx 0.092087"), "{text}");
    assert!(text.contains("normal"), "{text}");
}

#[test]
fn validation_errors_exit_2() {
    let out = medianbs(&["price", "--spot", "1", "--strike", "1", "--rate", "0", "--tau", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--vol"));
    assert!(out.stdout.is_empty());

    let out = medianbs(&["price", "--spot", "-1", "--strike", "1", "--rate", "0", "--vol", "1", "--tau", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = medianbs(&["growth", "--rates", "0.5,1.7", "--probs", "0.5,0.4", "--t", "10"]);
    assert_eq!(out.status.code(), Some(2));

    let out = medianbs(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_3() {
    let out = medianbs(&[
        "--format", "json", "price", "--spot", "1", "--strike", "1e60", "--rate", "0", "--vol", "0.5", "--tau", "1",
        "--method", "median",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn oversized_enumeration_keeps_normal_approximation() {
    let out = medianbs(&[
        "--format",
        "csv",
        "growth",
        "--rates",
        "0.5,0.9,1.1,1.7",
        "--probs",
        "0.25,0.25,0.25,0.25",
        "--t",
        "1000",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("too large, use Monte Carlo"));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("prob_exceeds_threshold,normal-approx,")));
    assert!(text.lines().any(|l| l == "prob_exceeds_threshold,exact,"));
}

#[test]
fn io_failures_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.txt");
    let out = medianbs(&["empirical", "--file", missing.to_str().unwrap(), "--strike", "1"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn empirical_reads_sample_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# prices").unwrap();
    for i in 1..=1000 {
        writeln!(f, "{i}").unwrap();
    }
    let path = f.path().to_str().unwrap();
    let out = medianbs(&["--format", "csv", "empirical", "--file", path, "--strike", "500", "--method", "median"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("median,250.5,"), "{row}");

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "1.0\nnot-a-number").unwrap();
    let out = medianbs(&["empirical", "--file", bad.path().to_str().unwrap(), "--strike", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn mc_json_is_byte_identical() {
    let run = |workers: &str, chunk: &str| {
        medianbs(&with_example(&[
            "--format",
            "json",
            "mc",
            "--paths",
            "300000",
            "--seed",
            "99",
            "--workers",
            workers,
            "--chunk",
            chunk,
        ]))
    };
    let a = run("1", "4096");
    assert!(a.status.success());
    let b = run("1", "4096");
    let c = run("4", "4096");
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);

    // A different chunk size changes only the echoed config.
    let d = run("4", "1000");
    let mut va: Value = serde_json::from_slice(&a.stdout).unwrap();
    let mut vd: Value = serde_json::from_slice(&d.stdout).unwrap();
    va["results"]["config"]["chunk"] = Value::Null;
    vd["results"]["config"]["chunk"] = Value::Null;
    assert_eq!(va, vd);
}

#[test]
fn in_process_entry_point_matches_binary() {
    let args = with_example(&["medianbs", "--format", "csv", "density", "--grid", "20"]);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(medianbs::cli::run(&args, &mut out, &mut err), 0);
    let bin = medianbs(&args[1..]);
    assert_eq!(out, bin.stdout);
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "row,x,y");
    assert_eq!(text.lines().filter(|l| l.starts_with("pdf,")).count(), 20);
    for name in ["marker_mean", "marker_median", "area_left", "area_right"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}
