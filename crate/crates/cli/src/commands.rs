use std::path::Path;

use serde::Serialize;
use wasser_infer::fairness::{
    audit, fit_logit_with, group_scores, load_csv_dataset, repair_sweep_oriented, write_sweep_csv, AuditOptions,
    AuditReport, DiOrientation, LabeledDataset, LogitOptions,
};
use wasser_infer::io::{load_sample, load_sample_column};
use wasser_infer::montecarlo::{
    run_table1, run_table2, run_table3, scale_location_delta0, write_rows_csv, DEFAULT_REPLICATIONS, EXPONENTS,
    LOCATION_SHIFTS, SCALE_LOCATION_CELLS, TEST_SIZES, VARIANCE_SIZES,
};
use wasser_infer::{
    confidence_interval, confidence_interval_one_sample, similarity_test, similarity_test_one_sample,
    wasserstein_pp_one_sample, wasserstein_pp_two_sample, Gaussian, Sample,
};

use crate::args::{AuditArgs, CiArgs, DistArgs, Format, Inputs, SchemaArgs, SimulateArgs, SweepArgs, TestArgs};
use crate::schema;
use crate::CliError;

/// A rendered payload and where it goes.
pub struct Output {
    pub bytes: Vec<u8>,
    pub path: Option<std::path::PathBuf>,
}

impl Output {
    fn stdout(bytes: Vec<u8>) -> Self {
        Self { bytes, path: None }
    }
}

enum Target {
    Sample(Sample),
    Normal(Gaussian),
}

fn read(path: &Path, column: Option<&str>) -> Result<Sample, CliError> {
    let sample = match column {
        Some(c) => load_sample_column(path, c),
        None => load_sample(path),
    };
    sample.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_inputs(inputs: &Inputs) -> Result<(Sample, Target), CliError> {
    let x = read(&inputs.x, inputs.column.as_deref())?;
    let target = match (&inputs.y, inputs.gaussian) {
        (_, Some((mu, sigma))) => Target::Normal(Gaussian::new(mu, sigma)?),
        (Some(y), None) => Target::Sample(read(y, inputs.column.as_deref())?),
        (None, None) => return Err(CliError::Usage("give a second sample or --gaussian MU,SIGMA".into())),
    };
    Ok((x, target))
}

fn note_outside_theory(p: f64) {
    if p <= 1.0 {
        eprintln!("note: p = {p} is outside the range p > 1 covered by the asymptotic theory");
    }
}

fn render<T: Serialize>(value: &T, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.serialize(value).map_err(|e| CliError::Internal(e.to_string()))?;
            w.into_inner().map_err(|e| CliError::Internal(e.to_string()))
        }
    }
}

pub fn dist(args: &DistArgs) -> Result<Output, CliError> {
    let inputs = &args.inputs;
    let (x, target) = load_inputs(inputs)?;
    let result = match &target {
        Target::Sample(y) => wasserstein_pp_two_sample(&x, y, inputs.p)?,
        Target::Normal(g) => wasserstein_pp_one_sample(&x, g, inputs.p, inputs.quad_order)?,
    };
    Ok(Output::stdout(render(&result, inputs.format.unwrap_or(Format::Json))?))
}

pub fn ci(args: &CiArgs) -> Result<Output, CliError> {
    let inputs = &args.inputs;
    let (x, target) = load_inputs(inputs)?;
    let interval = match &target {
        Target::Sample(y) => confidence_interval(&x, y, inputs.p, args.alpha)?,
        Target::Normal(g) => confidence_interval_one_sample(&x, g, inputs.p, args.alpha, inputs.quad_order)?,
    };
    note_outside_theory(inputs.p);
    Ok(Output::stdout(render(
        &interval,
        inputs.format.unwrap_or(Format::Json),
    )?))
}

pub fn test(args: &TestArgs) -> Result<Output, CliError> {
    let inputs = &args.inputs;
    let (x, target) = load_inputs(inputs)?;
    let verdict = match &target {
        Target::Sample(y) => similarity_test(&x, y, inputs.p, args.delta0, args.alpha)?,
        Target::Normal(g) => similarity_test_one_sample(&x, g, inputs.p, args.delta0, args.alpha, inputs.quad_order)?,
    };
    note_outside_theory(inputs.p);
    Ok(Output::stdout(render(&verdict, inputs.format.unwrap_or(Format::Json))?))
}

/// `round(n · scale)`, at least 2, duplicates removed in order.
fn scaled_sizes(sizes: &[usize], scale: f64) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let k = ((n as f64 * scale).round() as usize).max(2);
        if !out.contains(&k) {
            out.push(k);
        }
    }
    out
}

pub fn simulate(args: &SimulateArgs) -> Result<Output, CliError> {
    if !(args.scale.is_finite() && args.scale > 0.0) {
        return Err(CliError::Usage(format!("--scale must be positive, got {}", args.scale)));
    }
    let seed = args.seed;
    let mut comments = Vec::new();
    let rows = match args.table {
        1 => {
            let reps = args.reps.unwrap_or(1);
            run_table1(&EXPONENTS, &scaled_sizes(&VARIANCE_SIZES, args.scale), 1.0, reps, seed)?
        }
        2 => {
            let reps = args.reps.unwrap_or(DEFAULT_REPLICATIONS);
            let sizes = scaled_sizes(&TEST_SIZES, args.scale);
            run_table2(&EXPONENTS, &sizes, &LOCATION_SHIFTS, 1.0, 0.05, reps, seed)?
        }
        _ => {
            let reps = args.reps.unwrap_or(DEFAULT_REPLICATIONS);
            for p in EXPONENTS {
                let d = scale_location_delta0(p)?;
                comments.push(format!(
                    "delta0 p={p} {d:.12} (W_p between N(0,1) and N(1,2) by quadrature)"
                ));
            }
            let sizes = scaled_sizes(&TEST_SIZES, args.scale);
            run_table3(&EXPONENTS, &sizes, &SCALE_LOCATION_CELLS, 0.05, reps, seed)?
        }
    };
    let bytes = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = Vec::new();
            write_rows_csv(&mut out, &rows, &comments)?;
            out
        }
        Format::Json => render(&serde_json::json!({ "comments": comments, "rows": rows }), Format::Json)?,
    };
    Ok(Output {
        bytes,
        path: args.out.clone(),
    })
}

fn load_dataset(args: &SchemaArgs) -> Result<LabeledDataset, CliError> {
    let schema = schema::resolve(args)?;
    let data = load_csv_dataset(&args.data, &schema).map_err(|e| match e {
        wasser_infer::Error::Io(io) => CliError::Input(format!("{}: {io}", args.data.display())),
        other => other.into(),
    })?;
    if data.dropped_count() > 0 {
        eprintln!("dropped {} rows with missing values", data.dropped_count());
    }
    Ok(data)
}

fn logit_options(args: &SchemaArgs) -> LogitOptions {
    LogitOptions {
        max_iter: args.max_iter,
        tol: args.tol,
        ridge: args.ridge,
    }
}

fn orientation(args: &SchemaArgs) -> DiOrientation {
    if args.di_flip {
        DiOrientation::ReferenceOverProtected
    } else {
        DiOrientation::ProtectedOverReference
    }
}

/// Flat one-line form of [`AuditReport`] for CSV output.
#[derive(Serialize)]
struct AuditRow {
    statistic: f64,
    threshold: f64,
    reject_null: bool,
    delta0: f64,
    alpha: f64,
    ci_low: f64,
    ci_high: f64,
    sigma2: f64,
    p: f64,
    di: f64,
    ber: f64,
    cutoff: f64,
    n0: usize,
    n1: usize,
    dropped_rows: usize,
    logit_converged: bool,
}

impl From<&AuditReport> for AuditRow {
    fn from(r: &AuditReport) -> Self {
        let v = &r.verdict;
        Self {
            statistic: v.statistic,
            threshold: v.threshold,
            reject_null: v.reject_null,
            delta0: v.delta0,
            alpha: v.alpha,
            ci_low: v.ci_low,
            ci_high: v.ci_high,
            sigma2: v.sigma2,
            p: v.p,
            di: r.di,
            ber: r.ber,
            cutoff: r.cutoff,
            n0: r.n0,
            n1: r.n1,
            dropped_rows: r.dropped_rows,
            logit_converged: r.logit_converged,
        }
    }
}

pub fn audit_cmd(args: &AuditArgs) -> Result<Output, CliError> {
    let s = &args.schema;
    let data = load_dataset(s)?;
    let opts = AuditOptions {
        p: s.p,
        delta0: args.delta0,
        alpha: s.alpha,
        cutoff: s.cutoff,
        orientation: orientation(s),
        logit: logit_options(s),
    };
    let report = audit(&data, &opts)?;
    if !report.logit_converged {
        eprintln!(
            "warning: logistic fit stopped after {} iterations without converging",
            report.logit_iterations
        );
    }
    let bytes = match args.format.unwrap_or(Format::Json) {
        Format::Json => render(&report, Format::Json)?,
        Format::Csv => render(&AuditRow::from(&report), Format::Csv)?,
    };
    Ok(Output::stdout(bytes))
}

pub fn repair_sweep_cmd(args: &SweepArgs) -> Result<Output, CliError> {
    let s = &args.schema;
    let grid = match &args.grid {
        Some(g) => g.clone(),
        None if args.steps >= 1 => (0..=args.steps).map(|k| k as f64 / args.steps as f64).collect(),
        None => return Err(CliError::Usage("--steps must be at least 1".into())),
    };
    let data = load_dataset(s)?;
    let model = fit_logit_with(&data, &logit_options(s))?;
    if !model.converged {
        eprintln!(
            "warning: logistic fit stopped after {} iterations without converging",
            model.iterations
        );
    }
    let (s0, s1) = group_scores(&model, &data)?;
    let rows = repair_sweep_oriented(&s0, &s1, &grid, s.p, s.alpha, s.cutoff, orientation(s))?;
    let bytes = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = Vec::new();
            write_sweep_csv(&mut out, &rows)?;
            out
        }
        Format::Json => render(&rows, Format::Json)?,
    };
    Ok(Output {
        bytes,
        path: args.out.clone(),
    })
}
