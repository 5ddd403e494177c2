//! Score-distribution fairness audit: a logistic classifier, disparate
//! impact, balanced error rate, and geometric repair toward the Wasserstein
//! barycenter of the two protected groups.
//!
//! Group `S = 0` is the protected group. DI is `P(score > c | S=0) /
//! P(score > c | S=1)` unless [`DiOrientation::ReferenceOverProtected`] is chosen.

mod dataset;
mod logit;
mod repair;

use std::io::Write;

use serde::Serialize;

pub use dataset::{load_csv_dataset, read_csv_dataset, synthetic_biased_dataset, DatasetSchema, LabeledDataset};
pub use logit::{fit_logit, fit_logit_with, LogitModel, LogitOptions};
pub use repair::{
    balanced_error_rate, disparate_impact, geometric_repair, group_scores, repair_sweep, repair_sweep_oriented,
    repaired_cost, DiOrientation, RepairSweepRow,
};

use crate::error::Result;
use crate::inference::{similarity_test, SimilarityVerdict};
use crate::montecarlo::csv_to_io;

/// Settings for [`audit`].
#[derive(Debug, Clone, PartialEq)]
pub struct AuditOptions {
    pub p: f64,
    pub delta0: f64,
    pub alpha: f64,
    pub cutoff: f64,
    pub orientation: DiOrientation,
    pub logit: LogitOptions,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            p: 2.0,
            delta0: 0.05,
            alpha: 0.05,
            cutoff: 0.5,
            orientation: DiOrientation::default(),
            logit: LogitOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    /// Similarity test between the two groups' score distributions.
    pub verdict: SimilarityVerdict<f64>,
    pub di: f64,
    pub di_orientation: DiOrientation,
    pub ber: f64,
    pub cutoff: f64,
    pub n0: usize,
    pub n1: usize,
    pub dropped_rows: usize,
    pub logit_beta: Vec<f64>,
    pub logit_iterations: usize,
    pub logit_converged: bool,
}

/// Fits the classifier, scores both groups and tests their similarity.
pub fn audit(data: &LabeledDataset, opts: &AuditOptions) -> Result<AuditReport> {
    let model = fit_logit_with(data, &opts.logit)?;
    let (s0, s1) = group_scores(&model, data)?;
    let verdict = similarity_test(&s0, &s1, opts.p, opts.delta0, opts.alpha)?;
    Ok(AuditReport {
        verdict,
        di: opts.orientation.disparate_impact(&s0, &s1, opts.cutoff)?,
        di_orientation: opts.orientation,
        ber: balanced_error_rate(&s0, &s1, opts.cutoff)?,
        cutoff: opts.cutoff,
        n0: s0.len(),
        n1: s1.len(),
        dropped_rows: data.dropped_count(),
        logit_beta: model.beta.clone(),
        logit_iterations: model.iterations,
        logit_converged: model.converged,
    })
}

/// Writes sweep rows as CSV with columns `theta,w2_squared,ci_low,ci_high,di,ber`.
pub fn write_sweep_csv<W: Write>(out: W, rows: &[RepairSweepRow<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_to_io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn biased(n: usize) -> LabeledDataset {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        let mut protected = Vec::new();
        for i in 0..n {
            let s = (i % 2) as u8;
            let x = (i as f64 * 0.37).sin() * 2.0 + f64::from(s);
            features.push(vec![x, (i as f64 * 0.11).cos()]);
            labels.push(u8::from(x + 0.3 * (i as f64 * 1.7).sin() > 0.5));
            protected.push(s);
        }
        LabeledDataset::new(features, labels, protected, vec!["a".into(), "b".into()]).unwrap()
    }

    #[test]
    fn audit_reports_group_sizes_and_bias() {
        let data = biased(400);
        let report = audit(&data, &AuditOptions::default()).unwrap();
        assert_eq!((report.n0, report.n1), (200, 200));
        assert!(report.logit_converged);
        assert!(report.di < 1.0);
        assert!(report.ber < 0.5);
        assert!(!report.verdict.reject_null);
    }

    #[test]
    fn sweep_csv_header() {
        let rows = vec![RepairSweepRow {
            theta: 0.0,
            w2_squared: 0.1,
            ci_low: 0.0,
            ci_high: 0.2,
            di: 0.5,
            ber: 0.3,
        }];
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("theta,w2_squared,ci_low,ci_high,di,ber"));
    }
}
