use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// An ascending, finite, non-empty sample. Ties are allowed.
///
/// All empirical quantities in the crate (quantile functions, transport
/// costs, variance estimates) are functions of the order statistics, so the
/// sample is sorted once on construction and never mutated afterwards.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SortedSample<T> {
    values: Vec<T>,
}

impl<T: Real> SortedSample<T> {
    /// Validates and sorts `raw`.
    pub fn from_raw(mut raw: Vec<T>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(index) = raw.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        raw.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        Ok(Self { values: raw })
    }

    pub fn from_slice(raw: &[T]) -> Result<Self> {
        Self::from_raw(raw.to_vec())
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The `j`-th order statistic, 1-based.
    #[inline]
    pub fn order_stat(&self, j: usize) -> T {
        self.values[j - 1]
    }

    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        self.values[self.values.len() - 1]
    }

    pub fn mean(&self) -> T {
        self.values.iter().copied().sum::<T>() / T::from_count(self.len())
    }

    /// True when every observation is equal (a Dirac empirical measure).
    pub fn is_degenerate(&self) -> bool {
        self.min() == self.max()
    }

    /// Smallest rank `k` in `1..=n` with `k/n >= t`, i.e. the index of
    /// `inf{x : F_n(x) >= t}`. The comparison uses the same floating point
    /// quotient a caller computing `t = j/n` would, so `rank(j/n) == j`.
    pub fn rank_at(&self, t: T) -> usize {
        let n = self.len();
        let nf = T::from_count(n);
        let mut k = (t * nf).ceil().to_usize().unwrap_or(1).clamp(1, n);
        while k > 1 && T::from_count(k - 1) / nf >= t {
            k -= 1;
        }
        while k < n && T::from_count(k) / nf < t {
            k += 1;
        }
        k
    }

    /// Left-continuous empirical quantile `F_n⁻¹(t) = X_(⌈tn⌉)` for `0 < t <= 1`.
    pub fn quantile(&self, t: T) -> Result<T> {
        if !(t > T::zero() && t <= T::one()) {
            return Err(Error::domain(format!("empirical quantile needs 0 < t <= 1, got {t}")));
        }
        Ok(self.order_stat(self.rank_at(t)))
    }

    /// Rank of `F_n⁻¹(num/den)` computed in integer arithmetic:
    /// `⌈num·n/den⌉` clamped to `1..=n`.
    #[inline]
    pub fn rank_at_ratio(&self, num: usize, den: usize) -> usize {
        let n = self.len() as u128;
        let k = (num as u128 * n).div_ceil(den as u128);
        (k as usize).clamp(1, self.len())
    }

    /// `F_n⁻¹(num/den)` without floating point rounding in the index.
    #[inline]
    pub fn quantile_at_ratio(&self, num: usize, den: usize) -> T {
        self.order_stat(self.rank_at_ratio(num, den))
    }

    /// Empirical CDF `F_n(x) = #{X_i <= x} / n`.
    pub fn cdf(&self, x: T) -> T {
        let count = self.values.partition_point(|&v| v <= x);
        T::from_count(count) / T::from_count(self.len())
    }

    /// Applies a non-decreasing map to every value and revalidates.
    pub fn map_monotone(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::from_raw(self.values.iter().map(|&v| f(v)).collect())
    }
}

/// Free-function form of [`SortedSample::from_raw`].
pub fn sorted_sample_from<T: Real>(raw: &[T]) -> Result<SortedSample<T>> {
    SortedSample::from_slice(raw)
}

/// Free-function form of [`SortedSample::quantile`].
pub fn empirical_quantile<T: Real>(s: &SortedSample<T>, t: T) -> Result<T> {
    s.quantile(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_sorts_and_keeps_ties() {
        let s = sorted_sample_from(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        let s = sorted_sample_from(&[5.0]).unwrap();
        assert_eq!((s.values(), s.len()), (&[5.0][..], 1));
        let s = sorted_sample_from(&[1.0, 1.0, 0.0]).unwrap();
        assert_eq!(s.values(), &[0.0, 1.0, 1.0]);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(sorted_sample_from::<f64>(&[]), Err(Error::EmptySample)));
        assert!(matches!(
            sorted_sample_from(&[1.0, f64::NAN]),
            Err(Error::NonFiniteValue { index: 1 })
        ));
        assert!(matches!(
            sorted_sample_from(&[f64::NEG_INFINITY]),
            Err(Error::NonFiniteValue { index: 0 })
        ));
    }

    #[test]
    fn quantile_examples() {
        let s = sorted_sample_from(&[10.0, 20.0]).unwrap();
        assert_eq!(empirical_quantile(&s, 0.5).unwrap(), 10.0);
        assert_eq!(empirical_quantile(&s, 0.5 + 1e-12).unwrap(), 20.0);
        let s = sorted_sample_from(&[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(empirical_quantile(&s, 1.0).unwrap(), 2.0);
        assert_eq!(empirical_quantile(&s, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn quantile_domain() {
        let s = sorted_sample_from(&[0.0, 1.0]).unwrap();
        for t in [0.0, -0.5, 1.0 + 1e-12, f64::NAN] {
            assert!(matches!(s.quantile(t), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn grid_points_hit_order_statistics() {
        for n in [1usize, 2, 3, 7, 10, 49, 100, 1000, 99991] {
            let raw: Vec<f64> = (0..n).map(|i| i as f64).collect();
            let s = SortedSample::from_raw(raw).unwrap();
            for j in 1..=n {
                let t = j as f64 / n as f64;
                assert_eq!(s.rank_at(t), j, "n={n} j={j}");
                assert_eq!(s.rank_at_ratio(j, n), j);
            }
        }
    }

    #[test]
    fn ratio_matches_float_rank() {
        let s = SortedSample::from_raw((0..7).map(|i| i as f64).collect()).unwrap();
        for den in 1..30 {
            for num in 1..=den {
                assert_eq!(s.rank_at_ratio(num, den), s.rank_at(num as f64 / den as f64));
            }
        }
    }

    #[test]
    fn cdf_counts_ties() {
        let s = sorted_sample_from(&[0.0, 1.0, 1.0, 3.0]).unwrap();
        assert_eq!(s.cdf(-1.0), 0.0);
        assert_eq!(s.cdf(1.0), 0.75);
        assert_eq!(s.cdf(2.0), 0.75);
        assert_eq!(s.cdf(3.0), 1.0);
    }
}
