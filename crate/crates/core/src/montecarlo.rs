//! Seeded simulation of the variance estimator and the similarity test in
//! the Gaussian location and scale-location models.
//!
//! Replication `r` of a cell draws `X` from stream `(seed, 2r)` and `Y` from
//! stream `(seed, 2r + 1)` by inverse-CDF sampling. Replications run in
//! parallel and are reduced in index order, so a row depends only on its
//! configuration. Every cell of a table uses the same seed, which couples
//! cells through common random numbers.

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{inverse_normal_cdf, GaussianDist, SortedSample};
use crate::error::{Error, Result};
use crate::inference::{similarity_test, CpClosedForm, GaussianModel, DEFAULT_QUAD_ORDER};
use crate::rng::UniformStream;
use crate::transport::gaussian_wasserstein_pp;

/// Sample sizes of the level and power tables.
pub const TEST_SIZES: [usize; 8] = [50, 100, 200, 400, 500, 800, 1000, 2000];
/// Sample sizes of the variance table.
pub const VARIANCE_SIZES: [usize; 13] = [
    50, 100, 200, 400, 500, 800, 1000, 2000, 5000, 10000, 20000, 50000, 100000,
];
pub const EXPONENTS: [f64; 3] = [1.0, 2.0, 3.0];
pub const LOCATION_SHIFTS: [f64; 4] = [1.0, 0.9, 0.7, 0.5];
/// `(μ, λ)` cells of the scale-location table; the first is the null boundary.
pub const SCALE_LOCATION_CELLS: [(f64, f64); 4] = [(1.0, 2.0), (1.0, 1.5), (0.0, 2.0), (0.0, 1.5)];
pub const DEFAULT_REPLICATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub model: GaussianModel<f64>,
    pub p: f64,
    pub n: usize,
    pub m: usize,
    pub delta0: f64,
    pub alpha: f64,
    pub replications: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::domain("replications must be >= 1"));
        }
        if self.n < 2 || self.m < 2 {
            return Err(Error::SampleTooSmall {
                needed: 2,
                got: self.n.min(self.m),
            });
        }
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(Error::domain(format!("p must be >= 1, got {}", self.p)));
        }
        if !(self.delta0.is_finite() && self.delta0 > 0.0) {
            return Err(Error::domain(format!("delta0 must be positive, got {}", self.delta0)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        self.model.g()?;
        Ok(())
    }
}

/// One table cell. Flat so it maps onto a CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub model: &'static str,
    pub mu: f64,
    pub lambda: f64,
    pub p: f64,
    pub n: usize,
    pub m: usize,
    pub delta0: f64,
    pub alpha: f64,
    pub replications: usize,
    pub seed: u64,
    /// Fraction of replications rejecting `H0: W_p >= Δ0`.
    pub rejection_rate: f64,
    /// Average of `σ̂²_{n,m}` over replications.
    pub mean_sigma2: f64,
    /// Average of `W_p^p(F_n, G_m)` over replications.
    pub mean_statistic: f64,
    /// Binomial standard error of `rejection_rate`.
    pub stderr: f64,
    /// Standard error of `mean_sigma2` (0 for a single replication).
    pub sigma2_stderr: f64,
    /// `W_p^p(F, G)` of the generating model.
    pub target_cost: f64,
    /// Limiting variance `(1-λ')σ²(F,G) + λ'σ²(G,F)` of the generating model.
    pub target_sigma2: f64,
    /// Fraction of replications whose `1 - α` interval contains `target_cost`.
    pub coverage_rate: f64,
}

impl ExperimentRow {
    pub fn rejections(&self) -> usize {
        (self.rejection_rate * self.replications as f64).round() as usize
    }
}

/// `μ + σ Φ⁻¹(U_i)` for `n` uniforms from `stream`, sorted.
pub fn draw_sample(dist: &GaussianDist<f64>, n: usize, stream: &mut UniformStream) -> Result<SortedSample<f64>> {
    let raw: Vec<f64> = stream
        .take(n)
        .map(|u| dist.mu() + dist.sigma() * inverse_normal_cdf(u))
        .collect();
    SortedSample::from_raw(raw)
}

struct Outcome {
    statistic: f64,
    sigma2: f64,
    reject: bool,
    covered: bool,
}

fn replicate(
    cfg: &ExperimentConfig,
    f: &GaussianDist<f64>,
    g: &GaussianDist<f64>,
    target: f64,
    r: usize,
) -> Result<Outcome> {
    let r = r as u64;
    let x = draw_sample(f, cfg.n, &mut UniformStream::new(cfg.seed, 2 * r))?;
    let y = draw_sample(g, cfg.m, &mut UniformStream::new(cfg.seed, 2 * r + 1))?;
    let v = similarity_test(&x, &y, cfg.p, cfg.delta0, cfg.alpha)?;
    Ok(Outcome {
        statistic: v.statistic,
        sigma2: v.sigma2,
        reject: v.reject_null,
        covered: v.ci_low <= target && target <= v.ci_high,
    })
}

/// Runs one cell.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRow> {
    cfg.validate()?;
    let f = cfg.model.f();
    let g = cfg.model.g()?;
    let target_cost = gaussian_wasserstein_pp(&f, &g, cfg.p, DEFAULT_QUAD_ORDER)?;
    let outcomes: Vec<Outcome> = (0..cfg.replications)
        .into_par_iter()
        .map(|r| replicate(cfg, &f, &g, target_cost, r))
        .collect::<Result<_>>()?;

    let reps = cfg.replications as f64;
    let rejections = outcomes.iter().filter(|o| o.reject).count();
    let rejection_rate = rejections as f64 / reps;
    let mean_sigma2 = outcomes.iter().map(|o| o.sigma2).sum::<f64>() / reps;
    let mean_statistic = outcomes.iter().map(|o| o.statistic).sum::<f64>() / reps;
    let sigma2_stderr = if cfg.replications > 1 {
        let ss: f64 = outcomes.iter().map(|o| (o.sigma2 - mean_sigma2).powi(2)).sum();
        (ss / (reps - 1.0)).sqrt() / reps.sqrt()
    } else {
        0.0
    };
    let closed = CpClosedForm::new(cfg.model, cfg.p);
    let (model, lambda) = match cfg.model {
        GaussianModel::Location { .. } => ("location", 1.0),
        GaussianModel::ScaleLocation { lambda, .. } => ("scale_location", lambda),
    };
    Ok(ExperimentRow {
        model,
        mu: cfg.model.mu(),
        lambda,
        p: cfg.p,
        n: cfg.n,
        m: cfg.m,
        delta0: cfg.delta0,
        alpha: cfg.alpha,
        replications: cfg.replications,
        seed: cfg.seed,
        rejection_rate,
        mean_sigma2,
        mean_statistic,
        stderr: (rejection_rate * (1.0 - rejection_rate) / reps).sqrt(),
        sigma2_stderr,
        target_cost,
        target_sigma2: closed.asymptotic_variance(cfg.n, cfg.m),
        coverage_rate: outcomes.iter().filter(|o| o.covered).count() as f64 / reps,
    })
}

/// Variance consistency in the location model, `n = m`, one row per `(p, n)`.
/// The test is run at `Δ0 = |μ|` (or 1 when `μ = 0`) and `α = 0.05`.
pub fn run_table1(
    p_list: &[f64],
    n_list: &[usize],
    mu: f64,
    replications: usize,
    seed: u64,
) -> Result<Vec<ExperimentRow>> {
    let delta0 = if mu != 0.0 { mu.abs() } else { 1.0 };
    let mut rows = Vec::with_capacity(p_list.len() * n_list.len());
    for &p in p_list {
        for &n in n_list {
            rows.push(run_experiment(&ExperimentConfig {
                model: GaussianModel::Location { mu },
                p,
                n,
                m: n,
                delta0,
                alpha: 0.05,
                replications,
                seed,
            })?);
        }
    }
    Ok(rows)
}

/// Rejection frequencies in the location model `F = N(0,1)`, `G = N(μ,1)`.
pub fn run_table2(
    p_list: &[f64],
    n_list: &[usize],
    mu_list: &[f64],
    delta0: f64,
    alpha: f64,
    replications: usize,
    seed: u64,
) -> Result<Vec<ExperimentRow>> {
    let mut rows = Vec::with_capacity(p_list.len() * n_list.len() * mu_list.len());
    for &p in p_list {
        for &n in n_list {
            for &mu in mu_list {
                rows.push(run_experiment(&ExperimentConfig {
                    model: GaussianModel::Location { mu },
                    p,
                    n,
                    m: n,
                    delta0,
                    alpha,
                    replications,
                    seed,
                })?);
            }
        }
    }
    Ok(rows)
}

/// `Δ0 = W_p(N(0,1), N(1,2))`, the null boundary of the scale-location table.
pub fn scale_location_delta0(p: f64) -> Result<f64> {
    let f = GaussianDist::standard();
    let g = GaussianDist::new(1.0, 2.0)?;
    Ok(gaussian_wasserstein_pp(&f, &g, p, DEFAULT_QUAD_ORDER)?.powf(p.recip()))
}

/// Rejection frequencies in the scale-location model `G = N(μ, λ)`, with
/// `Δ0` computed per `p` by [`scale_location_delta0`].
pub fn run_table3(
    p_list: &[f64],
    n_list: &[usize],
    param_list: &[(f64, f64)],
    alpha: f64,
    replications: usize,
    seed: u64,
) -> Result<Vec<ExperimentRow>> {
    let mut rows = Vec::with_capacity(p_list.len() * n_list.len() * param_list.len());
    for &p in p_list {
        let delta0 = scale_location_delta0(p)?;
        for &n in n_list {
            for &(mu, lambda) in param_list {
                rows.push(run_experiment(&ExperimentConfig {
                    model: GaussianModel::ScaleLocation { mu, lambda },
                    p,
                    n,
                    m: n,
                    delta0,
                    alpha,
                    replications,
                    seed,
                })?);
            }
        }
    }
    Ok(rows)
}

/// Writes rows as CSV with a header line; `comments` become leading `# ` lines.
pub fn write_rows_csv<W: std::io::Write>(mut out: W, rows: &[ExperimentRow], comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_to_io)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_to_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(reps: usize) -> ExperimentConfig {
        ExperimentConfig {
            model: GaussianModel::Location { mu: 1.0 },
            p: 2.0,
            n: 50,
            m: 50,
            delta0: 1.0,
            alpha: 0.05,
            replications: reps,
            seed: 11,
        }
    }

    #[test]
    fn draw_sample_examples() {
        // a stream whose first uniform is 0.5 does not exist, so use the map directly
        let d = GaussianDist::new(3.0, 2.0).unwrap();
        assert_eq!(d.mu() + d.sigma() * inverse_normal_cdf(0.5), 3.0);

        let std = GaussianDist::standard();
        let a = draw_sample(&std, 100_000, &mut UniformStream::new(5, 0)).unwrap();
        assert!(a.mean().abs() < 0.02);
        let b = draw_sample(&std, 100_000, &mut UniformStream::new(5, 0)).unwrap();
        assert_eq!(a, b);
        assert!(draw_sample(&std, 0, &mut UniformStream::new(5, 0)).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(cfg(0).validate().is_err());
        let mut c = cfg(1);
        c.n = 1;
        assert!(c.validate().is_err());
        let mut c = cfg(1);
        c.alpha = 1.0;
        assert!(c.validate().is_err());
        let mut c = cfg(1);
        c.model = GaussianModel::ScaleLocation { mu: 0.0, lambda: 0.0 };
        assert!(c.validate().is_err());
    }

    #[test]
    fn row_accounting() {
        let row = run_experiment(&cfg(40)).unwrap();
        assert_eq!(row.rejection_rate, row.rejections() as f64 / 40.0);
        assert!((0.0..=1.0).contains(&row.rejection_rate));
        assert!((row.target_sigma2 - 4.0).abs() < 1e-10);
        assert_eq!(row.target_cost, 1.0);
        assert!(row.sigma2_stderr > 0.0);
        let single = run_experiment(&cfg(1)).unwrap();
        assert_eq!(single.sigma2_stderr, 0.0);
    }

    #[test]
    fn delta0_for_scale_location() {
        assert!((scale_location_delta0(2.0).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        assert!((scale_location_delta0(1.0).unwrap() - 1.166_630_941_175_372_6).abs() < 1e-12);
        assert!((scale_location_delta0(3.0).unwrap() - 1.611_195_223_180_489).abs() < 1e-12);
    }

    #[test]
    fn tables_emit_in_grid_order() {
        let rows = run_table2(&[1.0, 2.0], &[20, 30], &[1.0, 0.5], 1.0, 0.05, 5, 3).unwrap();
        let keys: Vec<(f64, usize, f64)> = rows.iter().map(|r| (r.p, r.n, r.mu)).collect();
        assert_eq!(
            keys,
            vec![
                (1.0, 20, 1.0),
                (1.0, 20, 0.5),
                (1.0, 30, 1.0),
                (1.0, 30, 0.5),
                (2.0, 20, 1.0),
                (2.0, 20, 0.5),
                (2.0, 30, 1.0),
                (2.0, 30, 0.5),
            ]
        );
        let t3 = run_table3(&[2.0], &[20], &SCALE_LOCATION_CELLS, 0.05, 3, 3).unwrap();
        assert_eq!(t3.len(), 4);
        assert!(t3
            .iter()
            .all(|r| r.model == "scale_location" && (r.delta0 - 2f64.sqrt()).abs() < 1e-14));
    }

    #[test]
    fn csv_has_header_and_comments() {
        let rows = run_table1(&[2.0], &[30], 1.0, 2, 1).unwrap();
        let mut buf = Vec::new();
        write_rows_csv(&mut buf, &rows, &["hello".to_string()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# hello"));
        assert!(lines
            .next()
            .unwrap()
            .starts_with("model,mu,lambda,p,n,m,delta0,alpha,replications,seed,rejection_rate"));
        assert_eq!(lines.count(), 1);
    }
}
