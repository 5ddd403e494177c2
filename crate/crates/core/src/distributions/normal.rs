//! Standard normal CDF and quantile.
//!
//! The CDF is evaluated through the upper tail `Q(z) = 1 - Φ(z)` for `z >= 0`:
//! a positive-term Taylor series for moderate `z` and the Laplace continued
//! fraction for the Mills ratio beyond [`SERIES_LIMIT`]. Both stay accurate in
//! relative terms deep into the tail, which the quantile refinement relies on.
//!
//! The quantile starts from Acklam's rational approximation (relative error
//! about 1.2e-9) and applies one Halley step against [`normal_cdf`].

use crate::error::{Error, Result};
use crate::scalar::Real;

const SERIES_LIMIT: f64 = 2.0;
const MAX_CF_TERMS: usize = 1000;

// Acklam's coefficients, quoted as published.
#[allow(clippy::excessive_precision)]
const A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];
const P_LOW: f64 = 0.02425;

/// Standard normal density.
#[inline]
pub fn normal_pdf<T: Real>(x: T) -> T {
    let inv_sqrt_2pi = T::FRAC_2_SQRT_PI() * T::FRAC_1_SQRT_2() * T::lit(0.5);
    inv_sqrt_2pi * (-(x * x) * T::lit(0.5)).exp()
}

/// Upper tail `1 - Φ(z)` for `z >= 0`.
fn upper_tail<T: Real>(z: T) -> T {
    if z < T::lit(SERIES_LIMIT) {
        // Φ(z) - 1/2 = φ(z) (z + z³/3 + z⁵/(3·5) + ...)
        let z2 = z * z;
        let mut term = z;
        let mut sum = z;
        let mut k = 1.0;
        loop {
            term = term * z2 / T::lit(2.0 * k + 1.0);
            sum = sum + term;
            if term <= sum * T::epsilon() {
                break;
            }
            k += 1.0;
        }
        T::lit(0.5) - normal_pdf(z) * sum
    } else {
        // Q(z) = φ(z) / (z + 1/(z + 2/(z + 3/(z + ...)))), modified Lentz.
        let tiny = T::min_positive_value() / T::epsilon();
        let mut f = z;
        let mut c = f;
        let mut d = T::zero();
        for k in 1..=MAX_CF_TERMS {
            let a = T::from_count(k);
            d = z + a * d;
            if d.abs() < tiny {
                d = tiny;
            }
            c = z + a / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = d.recip();
            let delta = c * d;
            f = f * delta;
            if (delta - T::one()).abs() <= T::epsilon() {
                break;
            }
        }
        normal_pdf(z) / f
    }
}

/// Standard normal cumulative distribution function `Φ(x)`.
pub fn normal_cdf<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x >= T::zero() {
        T::one() - upper_tail(x)
    } else {
        upper_tail(-x)
    }
}

/// Standard normal quantile `Φ⁻¹(t)`; `DomainError` unless `0 < t < 1`.
pub fn normal_quantile<T: Real>(t: T) -> Result<T> {
    if t > T::zero() && t < T::one() {
        Ok(inverse_normal_cdf(t))
    } else {
        Err(Error::domain(format!("normal quantile needs 0 < t < 1, got {t}")))
    }
}

/// Unchecked `Φ⁻¹`. Returns NaN outside `(0, 1)` and `∓∞` at the endpoints.
pub fn inverse_normal_cdf<T: Real>(t: T) -> T {
    if t.is_nan() || t < T::zero() || t > T::one() {
        return T::nan();
    }
    if t == T::zero() {
        return T::neg_infinity();
    }
    if t == T::one() {
        return T::infinity();
    }
    if t > T::lit(0.5) {
        // 1 - t is exact here.
        -lower_half_quantile(T::one() - t)
    } else {
        lower_half_quantile(t)
    }
}

fn poly<T: Real>(coeffs: &[f64], x: T) -> T {
    coeffs.iter().fold(T::zero(), |acc, &c| acc * x + T::lit(c))
}

/// Quantile for `0 < t <= 1/2`.
fn lower_half_quantile<T: Real>(t: T) -> T {
    let x = if t < T::lit(P_LOW) {
        let q = (T::lit(-2.0) * t.ln()).sqrt();
        poly(&C, q) / (poly(&D, q) * q + T::one())
    } else {
        let q = t - T::lit(0.5);
        let r = q * q;
        poly(&A, r) * q / (poly(&B, r) * r + T::one())
    };
    // Halley step: f(x) = Φ(x) - t, f' = φ, f'' = -xφ.
    let pdf = normal_pdf(x);
    if pdf == T::zero() {
        return x;
    }
    let u = (normal_cdf(x) - t) / pdf;
    x - u / (T::one() + x * u * T::lit(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_reference_points() {
        assert_eq!(normal_cdf(0.0_f64), 0.5);
        assert!((normal_cdf(1.0_f64) - 0.8413447460685429).abs() < 1e-15);
        assert!((normal_cdf(-1.0_f64) - (1.0 - normal_cdf(1.0_f64))).abs() < 1e-15);
    }

    #[test]
    fn quantile_reference_points() {
        assert_eq!(normal_quantile(0.5_f64).unwrap(), 0.0);
        assert!((normal_quantile(0.975_f64).unwrap() - 1.959963984540054).abs() < 1e-13);
        assert!((normal_quantile(0.95_f64).unwrap() - 1.6448536269514722).abs() < 1e-13);
    }

    #[test]
    fn quantile_rejects_outside_open_interval() {
        for t in [0.0_f64, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(normal_quantile(t), Err(Error::Domain(_))), "t={t}");
        }
    }

    #[test]
    fn single_precision_is_usable() {
        let z = normal_quantile(0.975_f32).unwrap();
        assert!((z - 1.959964).abs() < 1e-5);
        assert!((normal_cdf(z) - 0.975).abs() < 1e-6);
    }

    #[test]
    fn extreme_tails() {
        // mpmath: Φ⁻¹(1e-300) = -37.047096299361199...
        let z = normal_quantile(1e-300_f64).unwrap();
        assert!((z + 37.047_096_299_361_2).abs() < 1e-9);
        let z = normal_quantile(1.0_f64 - 1e-16).unwrap();
        assert!(z > 8.0 && z.is_finite());
    }
}
