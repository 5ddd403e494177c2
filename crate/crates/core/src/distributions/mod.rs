//! One-dimensional distributions exposed through their quantile functions.

mod normal;
mod quantile;
mod sample;

pub use normal::{inverse_normal_cdf, normal_cdf, normal_pdf, normal_quantile};
pub use quantile::{FnQuantile, GaussianDist, QuantileFunction, QuantileKind};
pub use sample::{empirical_quantile, sorted_sample_from, SortedSample};
