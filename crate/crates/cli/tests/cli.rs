use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wasser-infer"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn dist_two_sample_and_gaussian() {
    let dir = TempDir::new().unwrap();
    let x = write(dir.path(), "x.txt", "# header comment\n0\n1\n\n");
    let y = write(dir.path(), "y.txt", "0.5\n1.5\n");
    let v = json(&run(&["dist", s(&x), s(&y)]));
    assert_eq!(v["cost_p"].as_f64().unwrap(), 0.25);
    assert_eq!(v["method"], "exact_two_sample");

    // a point mass at 0 against N(0, 1) costs E Z^2 = 1
    let z = write(dir.path(), "z.txt", "0\n");
    let v = json(&run(&["dist", s(&z), "--gaussian", "0,1"]));
    assert!((v["cost_p"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn dist_csv_column() {
    let dir = TempDir::new().unwrap();
    let x = write(dir.path(), "x.csv", "a,b\n1,0\n2,0\n");
    let y = write(dir.path(), "y.csv", "a,b\n9,1\n9,2\n");
    let v = json(&run(&["dist", s(&x), s(&y), "--column", "b", "--p", "1"]));
    assert_eq!(v["cost_p"].as_f64().unwrap(), 1.5);
    let out = run(&["dist", s(&x), s(&y), "--column", "c"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_file_is_a_usage_error_with_empty_stdout() {
    let out = run(&["dist", "/nonexistent/x.txt", "/nonexistent/y.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn malformed_value_reports_its_line() {
    let dir = TempDir::new().unwrap();
    let x = write(dir.path(), "x.txt", "1\n2\nabc\n");
    let out = run(&["dist", s(&x), s(&x)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains('3'));
}

#[test]
fn test_rejects_for_identical_samples() {
    let dir = TempDir::new().unwrap();
    let body: String = (0..200).map(|i| format!("{}\n", (i as f64 * 0.37).sin())).collect();
    let x = write(dir.path(), "x.txt", &body);
    let y = write(dir.path(), "y.txt", &body);
    let v = json(&run(&["test", s(&x), s(&y), "--delta0", "0.5"]));
    assert_eq!(v["statistic"].as_f64().unwrap(), 0.0);
    assert_eq!(v["reject_null"], true);
}

#[test]
fn test_keeps_null_for_separated_samples() {
    let dir = TempDir::new().unwrap();
    let x = write(dir.path(), "x.txt", "1\n2\n");
    let y = write(dir.path(), "y.txt", "0\n0\n");
    let v = json(&run(&["test", s(&x), s(&y), "--delta0", "1"]));
    assert_eq!(v["statistic"].as_f64().unwrap(), 2.5);
    assert_eq!(v["reject_null"], false);
}

#[test]
fn invalid_alpha_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let x = write(dir.path(), "x.txt", "1\n2\n3\n");
    let out = run(&["test", s(&x), s(&x), "--delta0", "1", "--alpha", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let out = run(&["ci", s(&x), s(&x), "--alpha", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ci_csv_has_header_and_one_row() {
    let dir = TempDir::new().unwrap();
    let x = write(dir.path(), "x.txt", "0\n1\n2\n3\n");
    let y = write(dir.path(), "y.txt", "0.5\n1\n2.5\n3\n");
    let out = run(&["ci", s(&x), s(&y), "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("statistic,"));
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(str::to_owned).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn simulate_table1_variance_near_four_for_p2() {
    let out = run(&["simulate", "--table", "1"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    let (p, n, var) = (
        column(&header, "p"),
        column(&header, "n"),
        column(&header, "mean_sigma2"),
    );
    let cell = rows
        .iter()
        .find(|r| r[p].parse::<f64>().unwrap() == 2.0 && r[n] == "100000")
        .expect("p=2, n=100000 cell");
    let sigma2: f64 = cell[var].parse().unwrap();
    assert!((3.6..=4.4).contains(&sigma2), "{sigma2}");
}

#[test]
fn simulate_is_reproducible_and_writes_files() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = run(&[
            "simulate",
            "--table",
            "2",
            "--reps",
            "50",
            "--scale",
            "0.1",
            "--seed",
            "7",
            "--out",
            s(path),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let single = bin()
        .args([
            "simulate", "--table", "2", "--reps", "50", "--scale", "0.1", "--seed", "7",
        ])
        .env("WASSER_INFER_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(single.stdout, fs::read(&a).unwrap());

    let other = run(&[
        "simulate", "--table", "2", "--reps", "50", "--scale", "0.1", "--seed", "8",
    ]);
    assert_ne!(other.stdout, fs::read(&a).unwrap());
}

#[test]
fn simulate_table3_reports_margins() {
    let out = run(&["simulate", "--table", "3", "--reps", "5", "--scale", "0.05"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# delta0 p=2 1.414213562373"));
    assert!(text.contains("# delta0 p=3 1.611195"));
    let (header, rows) = csv_rows(&text);
    assert!(!rows.is_empty());
    assert!(header.contains(&"rejection_rate".to_owned()));
}

#[test]
fn simulate_rejects_unknown_table_and_bad_threads() {
    assert_eq!(run(&["simulate", "--table", "4"]).status.code(), Some(2));
    let out = bin()
        .args(["simulate", "--table", "1", "--scale", "0.001"])
        .env("WASSER_INFER_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

fn biased_csv(dir: &Path) -> PathBuf {
    let mut body = String::from("age,hours,sex,income\n");
    for i in 0..400 {
        let male = i % 2 == 0;
        let u = ((i * 7919) % 1000) as f64 / 1000.0;
        let age = (u - 0.5) * 3.0 + if male { 1.0 } else { 0.0 };
        let hours = ((i * 104_729) % 997) as f64 / 997.0 - 0.5;
        let label = if age + 0.3 * hours + ((i * 31) % 17) as f64 / 8.0 - 1.0 > 0.5 {
            ">50K"
        } else {
            "<=50K"
        };
        body.push_str(&format!(
            "{age},{hours},{},{label}\n",
            if male { "Male" } else { "Female" }
        ));
    }
    body.push_str("?,1,Male,>50K\n");
    write(dir, "adult.csv", &body)
}

#[test]
fn audit_reports_disparity() {
    let dir = TempDir::new().unwrap();
    let data = biased_csv(dir.path());
    let v = json(&run(&["audit", s(&data), "--features", "age,hours"]));
    assert_eq!(v["n0"], 200);
    assert_eq!(v["n1"], 200);
    assert_eq!(v["dropped_rows"], 1);
    assert!(v["di"].as_f64().unwrap() < 0.8);
    assert_eq!(v["logit_beta"].as_array().unwrap().len(), 3);

    let flipped = json(&run(&["audit", s(&data), "--features", "age,hours", "--di-flip"]));
    let product = v["di"].as_f64().unwrap() * flipped["di"].as_f64().unwrap();
    assert!((product - 1.0).abs() < 1e-12);
}

#[test]
fn audit_reads_a_config_file() {
    let dir = TempDir::new().unwrap();
    let data = biased_csv(dir.path());
    let config = write(
        dir.path(),
        "schema.cfg",
        "# schema\nfeatures = age, hours\nprotected = sex\n",
    );
    let v = json(&run(&["audit", s(&data), "--config", s(&config)]));
    assert_eq!(v["n0"], 200);
    let bad = write(dir.path(), "bad.cfg", "colour = blue\n");
    let out = run(&["audit", s(&data), "--config", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":1:"));
}

#[test]
fn repair_sweep_closes_the_gap() {
    let dir = TempDir::new().unwrap();
    let data = biased_csv(dir.path());
    let out = run(&["repair-sweep", s(&data), "--features", "age,hours", "--grid", "0,0.5,1"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["theta", "w2_squared", "ci_low", "ci_high", "di", "ber"]);
    assert_eq!(rows.len(), 3);
    let w: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(w[0] > w[1] && w[1] > w[2]);
    assert!(w[2] < 1e-12);
    let di: f64 = rows[2][4].parse().unwrap();
    assert!((di - 1.0).abs() < 0.05);

    let bad = run(&["repair-sweep", s(&data), "--features", "age,hours", "--grid", "0,1.5"]);
    assert_eq!(bad.status.code(), Some(2));
}
