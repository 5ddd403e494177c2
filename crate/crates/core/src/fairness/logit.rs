use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::dataset::LabeledDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogitOptions {
    pub max_iter: usize,
    /// Convergence threshold on the max-norm of the gradient of the
    /// average penalised log-likelihood.
    pub tol: f64,
    /// L2 penalty on the slopes (not the intercept), per observation.
    pub ridge: f64,
}

impl Default for LogitOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tol: 1e-8,
            ridge: 0.0,
        }
    }
}

/// Fitted logistic regression on standardised features.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogitModel {
    /// Intercept first, then one slope per standardised feature.
    pub beta: Vec<f64>,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Average penalised log-likelihood after each accepted step, starting at `β = 0`.
    pub log_likelihood: Vec<f64>,
}

impl LogitModel {
    pub fn linear_predictor(&self, row: &[f64]) -> f64 {
        row.iter()
            .zip(self.means.iter().zip(&self.scales))
            .zip(&self.beta[1..])
            .fold(self.beta[0], |acc, ((&x, (&mu, &sd)), &b)| acc + b * (x - mu) / sd)
    }

    /// `1 / (1 + exp(-β·x̃))`.
    pub fn score(&self, row: &[f64]) -> f64 {
        sigmoid(self.linear_predictor(row))
    }
}

#[inline]
fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^η)` without overflow.
#[inline]
fn softplus(eta: f64) -> f64 {
    eta.max(0.0) + (-eta.abs()).exp().ln_1p()
}

pub fn fit_logit(data: &LabeledDataset, max_iter: usize, tol: f64) -> Result<LogitModel> {
    fit_logit_with(
        data,
        &LogitOptions {
            max_iter,
            tol,
            ..LogitOptions::default()
        },
    )
}

/// Damped Newton ascent on the average penalised Bernoulli log-likelihood.
///
/// When the Hessian is not positive definite a small diagonal ridge is added
/// and grown; `Singular` is returned only if that fails too. Hitting
/// `max_iter` is reported through `converged`, not as an error.
pub fn fit_logit_with(data: &LabeledDataset, opts: &LogitOptions) -> Result<LogitModel> {
    let positives = data.labels().iter().filter(|&&y| y == 1).count();
    let negatives = data.rows() - positives;
    if positives.min(negatives) < 2 {
        return Err(Error::SampleTooSmall {
            needed: 2,
            got: positives.min(negatives),
        });
    }
    let rows = data.rows();
    let d = data.feature_names().len();
    let (means, scales) = standardisation(data.features(), d);
    let design = DMatrix::from_fn(rows, d + 1, |i, k| {
        if k == 0 {
            1.0
        } else {
            (data.features()[i][k - 1] - means[k - 1]) / scales[k - 1]
        }
    });
    let y = DVector::from_iterator(rows, data.labels().iter().map(|&v| f64::from(v)));
    let nf = rows as f64;
    let ridge = opts.ridge;

    let objective = |beta: &DVector<f64>| {
        let eta = &design * beta;
        let ll: f64 = eta.iter().zip(y.iter()).map(|(&e, &yi)| yi * e - softplus(e)).sum();
        ll / nf - 0.5 * ridge * beta.rows(1, d).norm_squared()
    };

    let mut beta = DVector::zeros(d + 1);
    let mut current = objective(&beta);
    let mut trace = vec![current];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let eta = &design * &beta;
        let mu = eta.map(sigmoid);
        let mut grad = design.tr_mul(&(&y - &mu)) / nf;
        for k in 1..=d {
            grad[k] -= ridge * beta[k];
        }
        if grad.amax() < opts.tol {
            converged = true;
            break;
        }
        let w = mu.map(|m| m * (1.0 - m));
        let weighted = DMatrix::from_fn(rows, d + 1, |i, k| design[(i, k)] * w[i]);
        let mut hessian = design.tr_mul(&weighted) / nf;
        for k in 1..=d {
            hessian[(k, k)] += ridge;
        }
        let step = solve_spd(hessian, &grad)?;

        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = &beta + &step * scale;
            let value = objective(&candidate);
            if value >= current {
                beta = candidate;
                current = value;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        iterations += 1;
        if !accepted {
            // no ascent direction left at working precision
            converged = grad.amax() < opts.tol.sqrt();
            break;
        }
        trace.push(current);
    }
    Ok(LogitModel {
        beta: beta.iter().copied().collect(),
        means,
        scales,
        iterations,
        converged,
        log_likelihood: trace,
    })
}

fn standardisation(features: &[Vec<f64>], d: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = features.len() as f64;
    let means: Vec<f64> = (0..d)
        .map(|k| features.iter().map(|r| r[k]).sum::<f64>() / nf)
        .collect();
    let scales = (0..d)
        .map(|k| {
            let var = features.iter().map(|r| (r[k] - means[k]).powi(2)).sum::<f64>() / nf;
            if var > 0.0 {
                var.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    (means, scales)
}

/// Solves `H x = g` by Cholesky, adding a growing diagonal ridge on failure.
fn solve_spd(hessian: DMatrix<f64>, grad: &DVector<f64>) -> Result<DVector<f64>> {
    if let Some(ch) = hessian.clone().cholesky() {
        return Ok(ch.solve(grad));
    }
    let dim = hessian.nrows();
    let base = (hessian.trace().abs() / dim as f64).max(1e-12);
    let mut jitter = base * 1e-10;
    for _ in 0..8 {
        let mut h = hessian.clone();
        for k in 0..dim {
            h[(k, k)] += jitter;
        }
        if let Some(ch) = h.cholesky() {
            return Ok(ch.solve(grad));
        }
        jitter *= 100.0;
    }
    Err(Error::Singular(
        "Newton system is not positive definite even with ridge".into(),
    ))
}
