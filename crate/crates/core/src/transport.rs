//! The p-th power transport cost `W_p^p` between one-dimensional distributions.
//!
//! In one dimension `W_p^p(F, G) = ∫_0^1 |F⁻¹(t) - G⁻¹(t)|^p dt`. For two
//! empirical measures both quantile functions are step functions, so the
//! integral is an exact finite sum over the merged breakpoint grid
//! `{i/n} ∪ {j/m}`. Breakpoints are kept as integer multiples of
//! `1/lcm(n, m)` so coincident steps are detected without rounding.

use num_integer::Integer;
use serde::Serialize;

use crate::distributions::{inverse_normal_cdf, normal_pdf, GaussianDist, QuantileFunction, SortedSample};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::{abs_pow, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportMethod {
    ExactTwoSample,
    QuadratureOneSample,
    ClosedFormGaussian,
}

/// A computed transport cost together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportResult<T> {
    /// `W_p^p`.
    pub cost_p: T,
    pub p: T,
    pub n: usize,
    /// Size of the second sample; 0 when the second marginal is analytic.
    pub m: usize,
    pub method: TransportMethod,
}

impl<T: Real> TransportResult<T> {
    /// `W_p = (W_p^p)^{1/p}`.
    pub fn distance(&self) -> T {
        self.cost_p.powf(self.p.recip())
    }

    /// The central limit theory behind the inference covers `p > 1` only.
    pub fn outside_theory(&self) -> bool {
        self.p <= T::one()
    }
}

pub(crate) fn check_exponent<T: Real>(p: T) -> Result<()> {
    if p.is_finite() && p >= T::one() {
        Ok(())
    } else {
        Err(Error::domain(format!("cost exponent must satisfy p >= 1, got {p}")))
    }
}

/// Exact `W_p^p(F_n, G_m)` between two empirical distributions.
pub fn wasserstein_pp_two_sample<T: Real>(
    x: &SortedSample<T>,
    y: &SortedSample<T>,
    p: T,
) -> Result<TransportResult<T>> {
    check_exponent(p)?;
    let cost_p = merged_grid_cost(x.values(), y.values(), p);
    Ok(TransportResult {
        cost_p,
        p,
        n: x.len(),
        m: y.len(),
        method: TransportMethod::ExactTwoSample,
    })
}

fn merged_grid_cost<T: Real>(x: &[T], y: &[T], p: T) -> T {
    let (n, m) = (x.len() as u128, y.len() as u128);
    let common = n.lcm(&m);
    let (step_x, step_y) = (common / n, common / m);
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = 0u128;
    let mut acc = T::zero();
    while i < x.len() && j < y.len() {
        let bx = (i as u128 + 1) * step_x;
        let by = (j as u128 + 1) * step_y;
        let next = bx.min(by);
        let width = T::lit((next - prev) as f64);
        acc = acc + width * abs_pow(x[i] - y[j], p);
        prev = next;
        if bx == next {
            i += 1;
        }
        if by == next {
            j += 1;
        }
    }
    acc / T::lit(common as f64)
}

/// `W_p^p(F_n, G)` against a quantile function `g`.
///
/// Each cell `((i-1)/n, i/n]` is integrated with a `quad_order`-point
/// Gauss–Legendre rule on a mesh graded toward 0 and 1 to absorb unbounded
/// quantiles. A cell is split where `g` crosses `X_(i)` unless `p` is an
/// even integer, with extra grading there for non-integer `p`. Empirical
/// `g` is handled exactly.
pub fn wasserstein_pp_one_sample<T: Real, Q: QuantileFunction<T> + ?Sized>(
    x: &SortedSample<T>,
    g: &Q,
    p: T,
    quad_order: usize,
) -> Result<TransportResult<T>> {
    check_exponent(p)?;
    if let Some(y) = g.as_sample() {
        return wasserstein_pp_two_sample(x, y, p);
    }
    let rule = GaussLegendre::new(quad_order)?;
    if let Some(normal) = g.as_gaussian() {
        return finish_one_sample(normal_one_sample(x, normal, p, &rule), p, x.len());
    }
    let n = x.len();
    let nf = T::from_count(n);
    let smooth = is_even_integer(p);
    let mesh = edge_mesh::<T>();
    let levels = kink_levels(p);
    let mut acc = T::zero();
    for i in 1..=n {
        let xi = x.order_stat(i);
        let a = if i == 1 { T::zero() } else { T::from_count(i - 1) / nf };
        let b = if i == n { T::one() } else { T::from_count(i) / nf };
        let kink = if smooth { None } else { crossing(g, xi, a, b) };
        acc = acc + integrate_cell(&rule, &mesh, a, b, kink, levels, |t: T| abs_pow(xi - g.eval(t), p));
    }
    finish_one_sample(acc, p, n)
}

fn finish_one_sample<T: Real>(cost_p: T, p: T, n: usize) -> Result<TransportResult<T>> {
    if !cost_p.is_finite() {
        return Err(Error::Numerical(
            "quantile function returned non-finite values on quadrature nodes".into(),
        ));
    }
    Ok(TransportResult {
        cost_p,
        p,
        n,
        m: 0,
        method: TransportMethod::QuadratureOneSample,
    })
}

/// One-sample cost against `N(μ, σ²)` after the change of variable
/// `t = Φ(z)`: cell `i` becomes `∫ |X_(i) - μ - σz|^p φ(z) dz` between
/// `Φ⁻¹((i-1)/n)` and `Φ⁻¹(i/n)`, a smooth integrand with a kink at
/// `z = (X_(i) - μ)/σ`. This avoids the resolution limit of `t` near 1.
fn normal_one_sample<T: Real>(x: &SortedSample<T>, g: &GaussianDist<T>, p: T, rule: &GaussLegendre<T>) -> T {
    let n = x.len();
    let nf = T::from_count(n);
    let reach = T::lit(38.0);
    let width = T::lit(0.5);
    let (mu, sigma) = (g.mu(), g.sigma());
    let smooth = is_even_integer(p);
    let edge = |i: usize| match i {
        0 => -reach,
        i if i == n => reach,
        i => inverse_normal_cdf(T::from_count(i) / nf),
    };
    let mut acc = T::zero();
    let mut lo = edge(0);
    for i in 1..=n {
        let hi = edge(i);
        let xi = x.order_stat(i);
        let kink = if smooth { None } else { Some((xi - mu) / sigma) };
        acc = acc + rule.integrate_kinked(lo, hi, kink, width, |z| abs_pow(xi - mu - sigma * z, p) * normal_pdf(z));
        lo = hi;
    }
    acc
}

fn is_even_integer<T: Real>(p: T) -> bool {
    p.fract() == T::zero() && (p * T::lit(0.5)).fract() == T::zero()
}

/// Breakpoints of a mesh graded geometrically (ratio 1/4) toward `t = 0`
/// and `t = 1`, where quantile functions may be unbounded.
fn edge_mesh<T: Real>() -> Vec<T> {
    let lower_floor = T::min_positive_value().sqrt();
    let upper_floor = T::lit(4.0) * T::epsilon();
    let quarter = T::lit(0.25);
    let mut mesh = vec![T::lit(0.5)];
    let mut h = T::lit(0.5) * quarter;
    while h > lower_floor {
        mesh.push(h);
        h = h * quarter;
    }
    let mut h = T::lit(0.5) * quarter;
    while h > upper_floor {
        mesh.push(T::one() - h);
        h = h * quarter;
    }
    mesh.sort_by(|a, b| a.partial_cmp(b).expect("finite mesh"));
    mesh
}

/// `∫_a^b f` on the pieces cut by `mesh` and, when given, by geometric
/// grading (`kink_levels` steps) toward `kink`, on both sides when it is
/// interior.
///
/// The unbounded sliver below the first mesh point at `t = 0`, and above the
/// last one at `t = 1`, is dropped.
fn integrate_cell<T: Real>(
    rule: &GaussLegendre<T>,
    mesh: &[T],
    a: T,
    b: T,
    kink: Option<T>,
    kink_levels: usize,
    f: impl Fn(T) -> T,
) -> T {
    let lo = if a == T::zero() { mesh[0] } else { a };
    let hi = if b == T::one() { mesh[mesh.len() - 1] } else { b };
    if lo >= hi {
        return T::zero();
    }
    let start = mesh.partition_point(|&m| m <= lo);
    let end = mesh.partition_point(|&m| m < hi);
    let mut cuts: Vec<T> = Vec::with_capacity(end.saturating_sub(start) + 2 * kink_levels + 3);
    cuts.push(lo);
    cuts.extend_from_slice(&mesh[start..end.max(start)]);
    cuts.push(hi);
    if let Some(c) = kink {
        let quarter = T::lit(0.25);
        if c > lo && c < hi {
            cuts.push(c);
            for (len, sign) in [(c - lo, -T::one()), (hi - c, T::one())] {
                let mut h = len;
                for _ in 0..kink_levels {
                    h = h * quarter;
                    cuts.push(c + sign * h);
                }
            }
        } else {
            // kink at or beyond an end: grade from that end down to its distance
            let (origin, gap, sign) = if c <= lo {
                (lo, lo - c, T::one())
            } else {
                (hi, c - hi, -T::one())
            };
            let mut h = hi - lo;
            for _ in 0..kink_levels {
                h = h * quarter;
                if h < gap {
                    break;
                }
                cuts.push(origin + sign * h);
            }
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite cuts"));
    }
    cuts.windows(2)
        .filter(|w| w[0] < w[1])
        .map(|w| rule.integrate(w[0], w[1], &f))
        .fold(T::zero(), |acc, v| acc + v)
}

/// Graded levels on each side of a crossing: none when `|x|^p` is smooth
/// there, otherwise enough that the ungraded innermost piece carries a
/// relative share below about `1e-12`.
fn kink_levels<T: Real>(p: T) -> usize {
    if p.fract() == T::zero() {
        0
    } else {
        // 4^{-k(p+1)} < 1e-12
        (T::lit(12.0) / (T::lit(0.6) * (p + T::one())))
            .ceil()
            .to_usize()
            .unwrap_or(20)
            .min(40)
    }
}

/// Where the non-decreasing `g` crosses `level`, searched in `[a, b]` and in
/// the neighbouring cell widths on either side, since a kink just outside a
/// cell still spoils polynomial quadrature inside it.
fn crossing<T: Real, Q: QuantileFunction<T> + ?Sized>(g: &Q, level: T, a: T, b: T) -> Option<T> {
    let eval = |t: T| {
        if t <= T::zero() {
            T::neg_infinity()
        } else if t >= T::one() {
            T::infinity()
        } else {
            g.eval(t)
        }
    };
    let len = b - a;
    let (ga, gb) = (eval(a), eval(b));
    let (lo, hi) = if level < ga {
        (a - len, a)
    } else if level > gb {
        (b, b + len)
    } else {
        (a, b)
    };
    if !(eval(lo) <= level && level <= eval(hi)) {
        return None;
    }
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = lo + (hi - lo) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval(mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo + (hi - lo) * T::lit(0.5))
}

/// `W_p^p` between two normal distributions.
///
/// Closed form when the scales agree (`|Δμ|^p`) or `p = 2`
/// (`Δμ² + Δσ²`); otherwise `E|Δμ + Δσ Z|^p` by composite Gauss–Legendre
/// quadrature in the standard normal variable, split at the kink.
pub fn gaussian_wasserstein_pp<T: Real>(
    f: &GaussianDist<T>,
    g: &GaussianDist<T>,
    p: T,
    quad_order: usize,
) -> Result<T> {
    Ok(gaussian_transport(f, g, p, quad_order)?.cost_p)
}

/// [`gaussian_wasserstein_pp`] wrapped as a [`TransportResult`].
pub fn gaussian_transport<T: Real>(
    f: &GaussianDist<T>,
    g: &GaussianDist<T>,
    p: T,
    quad_order: usize,
) -> Result<TransportResult<T>> {
    check_exponent(p)?;
    let dm = f.mu() - g.mu();
    let ds = f.sigma() - g.sigma();
    let cost_p = if ds == T::zero() {
        abs_pow(dm, p)
    } else if p == T::lit(2.0) {
        dm * dm + ds * ds
    } else {
        let rule = GaussLegendre::new(quad_order)?;
        let integrand = |z: T| abs_pow(dm + ds * z, p) * crate::distributions::normal_pdf(z);
        let reach = T::lit(38.0);
        rule.integrate_kinked(-reach, reach, Some(-dm / ds), T::lit(0.5), integrand)
    };
    Ok(TransportResult {
        cost_p,
        p,
        n: 0,
        m: 0,
        method: TransportMethod::ClosedFormGaussian,
    })
}
