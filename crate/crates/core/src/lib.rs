//! Inference for the one-dimensional p-Wasserstein distance.
//!
//! Exact empirical transport costs, an asymptotic variance estimator,
//! CLT-based confidence intervals and a similarity test, a Monte Carlo
//! harness, and a score-distribution fairness audit.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, with `F32` variants for single precision.

pub mod distributions;
pub mod error;
pub mod fairness;
pub mod inference;
pub mod io;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod transport;

pub use distributions::{
    empirical_quantile, inverse_normal_cdf, normal_cdf, normal_pdf, normal_quantile, sorted_sample_from, FnQuantile,
    GaussianDist, QuantileFunction, QuantileKind, SortedSample,
};
pub use error::{Error, Result};
pub use inference::{
    confidence_interval, confidence_interval_one_sample, cp_empirical, estimate_variance, estimate_variance_one_sample,
    similarity_test, similarity_test_one_sample, variance_oracle_integral, ConfidenceInterval, CpClosedForm,
    GaussianModel, OneSampleVariance, SimilarityVerdict, VarianceEstimate, DEFAULT_QUAD_ORDER,
};
pub use scalar::Real;
pub use transport::{
    gaussian_transport, gaussian_wasserstein_pp, wasserstein_pp_one_sample, wasserstein_pp_two_sample, TransportMethod,
    TransportResult,
};

pub type Sample = SortedSample<f64>;
pub type Gaussian = GaussianDist<f64>;
pub type Transport = TransportResult<f64>;
pub type Variance = VarianceEstimate<f64>;
pub type Interval = ConfidenceInterval<f64>;
pub type Verdict = SimilarityVerdict<f64>;
pub type Model = GaussianModel<f64>;
pub type SweepRow = fairness::RepairSweepRow<f64>;

pub type SampleF32 = SortedSample<f32>;
pub type GaussianF32 = GaussianDist<f32>;
pub type TransportF32 = TransportResult<f32>;
pub type VarianceF32 = VarianceEstimate<f32>;
pub type IntervalF32 = ConfidenceInterval<f32>;
pub type VerdictF32 = SimilarityVerdict<f32>;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
