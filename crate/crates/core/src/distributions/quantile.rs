use serde::Serialize;

use super::normal::{inverse_normal_cdf, normal_cdf, normal_pdf};
use super::sample::SortedSample;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantileKind {
    Empirical,
    Gaussian,
    Custom,
}

/// A non-decreasing quantile map `t ∈ (0,1) → ℝ`.
pub trait QuantileFunction<T: Real>: Sync {
    fn eval(&self, t: T) -> T;

    fn kind(&self) -> QuantileKind;

    /// The matching distribution function, when available in closed form.
    fn cdf(&self, _x: T) -> Option<T> {
        None
    }

    /// The underlying sample for empirical quantiles.
    fn as_sample(&self) -> Option<&SortedSample<T>> {
        None
    }

    /// The underlying normal law for Gaussian quantiles.
    fn as_gaussian(&self) -> Option<&GaussianDist<T>> {
        None
    }
}

impl<T: Real> QuantileFunction<T> for SortedSample<T> {
    fn eval(&self, t: T) -> T {
        self.order_stat(self.rank_at(t))
    }

    fn kind(&self) -> QuantileKind {
        QuantileKind::Empirical
    }

    fn cdf(&self, x: T) -> Option<T> {
        Some(SortedSample::cdf(self, x))
    }

    fn as_sample(&self) -> Option<&SortedSample<T>> {
        Some(self)
    }
}

/// Normal distribution with location `mu` and standard deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianDist<T> {
    mu: T,
    sigma: T,
}

impl<T: Real> GaussianDist<T> {
    pub fn new(mu: T, sigma: T) -> Result<Self> {
        if !mu.is_finite() || !sigma.is_finite() || sigma <= T::zero() {
            return Err(Error::domain(format!(
                "gaussian needs finite mu and sigma > 0, got mu={mu} sigma={sigma}"
            )));
        }
        Ok(Self { mu, sigma })
    }

    pub fn standard() -> Self {
        Self {
            mu: T::zero(),
            sigma: T::one(),
        }
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn quantile(&self, t: T) -> T {
        self.mu + self.sigma * inverse_normal_cdf(t)
    }

    pub fn cdf(&self, x: T) -> T {
        normal_cdf((x - self.mu) / self.sigma)
    }

    pub fn pdf(&self, x: T) -> T {
        normal_pdf((x - self.mu) / self.sigma) / self.sigma
    }
}

impl<T: Real> QuantileFunction<T> for GaussianDist<T> {
    fn eval(&self, t: T) -> T {
        self.quantile(t)
    }

    fn kind(&self) -> QuantileKind {
        QuantileKind::Gaussian
    }

    fn cdf(&self, x: T) -> Option<T> {
        Some(GaussianDist::cdf(self, x))
    }

    fn as_gaussian(&self) -> Option<&GaussianDist<T>> {
        Some(self)
    }
}

/// Quantile function given by a closure. The closure must be non-decreasing.
pub struct FnQuantile<F> {
    f: F,
}

impl<F> FnQuantile<F> {
    pub fn new(f: F) -> Self {
        Self { f }
    }
}

impl<T: Real, F: Fn(T) -> T + Sync> QuantileFunction<T> for FnQuantile<F> {
    fn eval(&self, t: T) -> T {
        (self.f)(t)
    }

    fn kind(&self) -> QuantileKind {
        QuantileKind::Custom
    }
}
