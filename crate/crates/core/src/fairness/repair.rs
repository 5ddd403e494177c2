use rayon::prelude::*;
use serde::Serialize;

use super::dataset::LabeledDataset;
use super::logit::LogitModel;
use crate::distributions::SortedSample;
use crate::error::{Error, Result};
use crate::inference::confidence_interval;
use crate::scalar::Real;
use crate::transport::wasserstein_pp_two_sample;

/// One point of a repair sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepairSweepRow<T> {
    pub theta: T,
    /// `W_p^p` between the repaired groups (`W_2^2` for the default `p = 2`).
    pub w2_squared: T,
    pub ci_low: T,
    pub ci_high: T,
    pub di: T,
    pub ber: T,
}

fn check_cutoff<T: Real>(cutoff: T) -> Result<()> {
    if cutoff > T::zero() && cutoff < T::one() {
        Ok(())
    } else {
        Err(Error::domain(format!("cutoff must lie in (0, 1), got {cutoff}")))
    }
}

fn check_theta<T: Real>(theta: T) -> Result<()> {
    if theta >= T::zero() && theta <= T::one() {
        Ok(())
    } else {
        Err(Error::domain(format!("repair amount must lie in [0, 1], got {theta}")))
    }
}

/// `#{score > cutoff} / n`.
fn positive_rate<T: Real>(s: &SortedSample<T>, cutoff: T) -> T {
    T::one() - s.cdf(cutoff)
}

/// `P(score > c | S=0) / P(score > c | S=1)`.
///
/// Returns `+∞` when only the denominator vanishes and `1` when both do.
pub fn disparate_impact<T: Real>(s0: &SortedSample<T>, s1: &SortedSample<T>, cutoff: T) -> Result<T> {
    check_cutoff(cutoff)?;
    let num = positive_rate(s0, cutoff);
    let den = positive_rate(s1, cutoff);
    Ok(if den > T::zero() {
        num / den
    } else if num > T::zero() {
        T::infinity()
    } else {
        T::one()
    })
}

/// `(P(score > c | S=0) + P(score <= c | S=1)) / 2`, the balanced error of
/// predicting `S = 1` from `score > c`.
pub fn balanced_error_rate<T: Real>(s0: &SortedSample<T>, s1: &SortedSample<T>, cutoff: T) -> Result<T> {
    check_cutoff(cutoff)?;
    Ok((positive_rate(s0, cutoff) + s1.cdf(cutoff)) / T::lit(2.0))
}

/// Moves both groups a fraction `theta` of the way to their barycenter.
///
/// The barycenter quantile is `π0 Q0 + π1 Q1` with `π_s ∝ n_s`; group `s` is
/// resampled at its own plotting positions `(2i-1)/(2 n_s)`, so sizes are kept.
pub fn geometric_repair<T: Real>(
    s0: &SortedSample<T>,
    s1: &SortedSample<T>,
    theta: T,
) -> Result<(SortedSample<T>, SortedSample<T>)> {
    check_theta(theta)?;
    let (n0, n1) = (s0.len(), s1.len());
    let total = T::from_count(n0 + n1);
    let (pi0, pi1) = (T::from_count(n0) / total, T::from_count(n1) / total);
    let keep = T::one() - theta;
    // evaluation order is fixed so that theta = 1 and n0 == n1 give identical groups
    let repair = |own: &SortedSample<T>, is_first: bool| {
        let n = own.len();
        let other = if is_first { s1 } else { s0 };
        let values = (1..=n)
            .map(|i| {
                let mine = own.order_stat(i);
                let theirs = other.quantile_at_ratio(2 * i - 1, 2 * n);
                let (q0, q1) = if is_first { (mine, theirs) } else { (theirs, mine) };
                let bary = pi0 * q0 + pi1 * q1;
                keep * mine + theta * bary
            })
            .collect();
        SortedSample::from_raw(values)
    };
    Ok((repair(s0, true)?, repair(s1, false)?))
}

/// Which group's positive rate is the numerator of the disparate impact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiOrientation {
    /// `P(> c | S=0) / P(> c | S=1)`.
    #[default]
    ProtectedOverReference,
    /// `P(> c | S=1) / P(> c | S=0)`.
    ReferenceOverProtected,
}

impl DiOrientation {
    pub fn disparate_impact<T: Real>(self, s0: &SortedSample<T>, s1: &SortedSample<T>, cutoff: T) -> Result<T> {
        match self {
            Self::ProtectedOverReference => disparate_impact(s0, s1, cutoff),
            Self::ReferenceOverProtected => disparate_impact(s1, s0, cutoff),
        }
    }
}

/// Repairs at each `theta` in `theta_grid` and records `W_p^p`, its
/// `1 - alpha` interval, DI and BER. Rows are ordered by `theta`.
pub fn repair_sweep<T: Real>(
    s0: &SortedSample<T>,
    s1: &SortedSample<T>,
    theta_grid: &[T],
    p: T,
    alpha: T,
    cutoff: T,
) -> Result<Vec<RepairSweepRow<T>>> {
    repair_sweep_oriented(s0, s1, theta_grid, p, alpha, cutoff, DiOrientation::default())
}

/// [`repair_sweep`] with an explicit DI orientation.
pub fn repair_sweep_oriented<T: Real>(
    s0: &SortedSample<T>,
    s1: &SortedSample<T>,
    theta_grid: &[T],
    p: T,
    alpha: T,
    cutoff: T,
    orientation: DiOrientation,
) -> Result<Vec<RepairSweepRow<T>>> {
    check_cutoff(cutoff)?;
    if theta_grid.is_empty() {
        return Err(Error::domain("repair grid is empty"));
    }
    let mut grid = theta_grid.to_vec();
    for &theta in &grid {
        check_theta(theta)?;
    }
    grid.sort_by(|a, b| a.partial_cmp(b).expect("grid validated finite"));
    grid.par_iter()
        .map(|&theta| {
            let (r0, r1) = geometric_repair(s0, s1, theta)?;
            let ci = confidence_interval(&r0, &r1, p, alpha)?;
            Ok(RepairSweepRow {
                theta,
                w2_squared: ci.statistic,
                ci_low: ci.ci_low,
                ci_high: ci.ci_high,
                di: orientation.disparate_impact(&r0, &r1, cutoff)?,
                ber: balanced_error_rate(&r0, &r1, cutoff)?,
            })
        })
        .collect()
}

/// `W_p^p` after repairing by `theta`, without the interval.
pub fn repaired_cost<T: Real>(s0: &SortedSample<T>, s1: &SortedSample<T>, theta: T, p: T) -> Result<T> {
    let (r0, r1) = geometric_repair(s0, s1, theta)?;
    Ok(wasserstein_pp_two_sample(&r0, &r1, p)?.cost_p)
}

/// Scores every row and splits by the protected attribute: `(S=0, S=1)`.
pub fn group_scores(model: &LogitModel, data: &LabeledDataset) -> Result<(SortedSample<f64>, SortedSample<f64>)> {
    let mut groups = (Vec::new(), Vec::new());
    for (row, &s) in data.features().iter().zip(data.protected()) {
        let score = model.score(row);
        if s == 0 {
            groups.0.push(score);
        } else {
            groups.1.push(score);
        }
    }
    Ok((SortedSample::from_raw(groups.0)?, SortedSample::from_raw(groups.1)?))
}
