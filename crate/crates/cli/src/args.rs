use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "wasser-infer",
    version,
    about = "Inference for the one-dimensional p-Wasserstein distance"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Empirical W_p^p between two samples, or a sample and a normal law.
    Dist(DistArgs),
    /// Asymptotic confidence interval for W_p^p.
    Ci(CiArgs),
    /// Similarity test of H0: W_p >= delta0 against H1: W_p < delta0.
    Test(TestArgs),
    /// Regenerate a simulation table as CSV.
    Simulate(SimulateArgs),
    /// Fit a logistic classifier and audit its scores across the protected groups.
    Audit(AuditArgs),
    /// Repaired-score metrics along a grid of repair amounts.
    RepairSweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// First sample: one value per line, or a CSV with --column.
    pub x: PathBuf,
    /// Second sample; omit when --gaussian is given.
    #[arg(required_unless_present = "gaussian", conflicts_with = "gaussian")]
    pub y: Option<PathBuf>,
    /// Compare against N(mu, sigma) instead of a second sample.
    #[arg(long, value_name = "MU,SIGMA", value_parser = parse_gaussian)]
    pub gaussian: Option<(f64, f64)>,
    /// Read this named column from headed CSV inputs.
    #[arg(long)]
    pub column: Option<String>,
    /// Exponent p of the transport cost.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Gauss-Legendre points per panel for the one-sample integral.
    #[arg(long, default_value_t = wasser_infer::DEFAULT_QUAD_ORDER)]
    pub quad_order: usize,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[command(flatten)]
    pub inputs: Inputs,
}

#[derive(Debug, Args)]
pub struct CiArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// The interval has level 1 - alpha.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[arg(long)]
    pub delta0: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub table: u8,
    /// Replications per cell [default: 1 for table 1, 1000 otherwise].
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Multiplies every sample size of the table's grid (sizes stay >= 2).
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct SchemaArgs {
    /// Headed CSV with features, label and protected attribute.
    pub data: PathBuf,
    /// key=value file: features, label, positive, negative, protected,
    /// protected_value, reference_value. Flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated numeric feature columns.
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    #[arg(long)]
    pub label: Option<String>,
    /// Label value meaning a positive outcome.
    #[arg(long)]
    pub positive: Option<String>,
    #[arg(long)]
    pub negative: Option<String>,
    #[arg(long)]
    pub protected: Option<String>,
    /// Attribute value of the protected group (S = 0).
    #[arg(long)]
    pub protected_value: Option<String>,
    #[arg(long)]
    pub reference_value: Option<String>,
    /// Classification cutoff on the score for DI and BER.
    #[arg(long, default_value_t = 0.5)]
    pub cutoff: f64,
    /// Report DI as P(> c | S=1) / P(> c | S=0).
    #[arg(long)]
    pub di_flip: bool,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// L2 penalty on the standardised slopes.
    #[arg(long, default_value_t = 0.0)]
    pub ridge: f64,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub schema: SchemaArgs,
    /// Similarity margin on the score distributions.
    #[arg(long, default_value_t = 0.05)]
    pub delta0: f64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub schema: SchemaArgs,
    /// Explicit comma-separated repair amounts in [0, 1].
    #[arg(long, value_delimiter = ',', conflicts_with = "steps")]
    pub grid: Option<Vec<f64>>,
    /// Evenly spaced grid 0, 1/steps, ..., 1.
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

fn parse_gaussian(s: &str) -> Result<(f64, f64), String> {
    let (mu, sigma) = s.split_once(',').ok_or("expected MU,SIGMA")?;
    let mu: f64 = mu.trim().parse().map_err(|e| format!("bad mean: {e}"))?;
    let sigma: f64 = sigma
        .trim()
        .parse()
        .map_err(|e| format!("bad standard deviation: {e}"))?;
    if !(mu.is_finite() && sigma.is_finite() && sigma > 0.0) {
        return Err("need a finite mean and a positive standard deviation".into());
    }
    Ok((mu, sigma))
}
