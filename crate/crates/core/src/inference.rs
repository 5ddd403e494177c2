//! Central-limit inference for `W_p^p`: the influence function `c_p`, the
//! plug-in variance estimator, confidence intervals and the similarity test.
//!
//! For a sample `X` of size `n` and target quantile `G⁻¹`, the running sums
//!
//! ```text
//! d_1 = 0,
//! d_i = Σ_{j=2}^{i} [ |X_(j) - G⁻¹((j-1)/n)|^p - |X_(j-1) - G⁻¹((j-1)/n)|^p ]
//! ```
//!
//! are `c_p(t; F_n, G)` on `((i-1)/n, i/n]` up to an additive constant, so
//! their population variance is `∫ c̄_p²(t; F_n, G) dt`. The two-sample
//! estimate weights the two directions by `m/(n+m)` and `n/(n+m)`.

use serde::Serialize;

use crate::distributions::{inverse_normal_cdf, normal_pdf, GaussianDist, QuantileFunction, SortedSample};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::{abs_pow, abs_pow_derivative, Real};
use crate::transport::{check_exponent, wasserstein_pp_one_sample, wasserstein_pp_two_sample};

/// Default Gauss–Legendre order for quadrature against analytic targets.
pub const DEFAULT_QUAD_ORDER: usize = 16;

/// Plug-in variance estimate of the two-sample transport cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceEstimate<T> {
    /// `σ̂²_{1,n,m}`: variance of `d_{i,n,m}(X, Y)`.
    pub sigma2_1: T,
    /// `σ̂²_{2,n,m}`: variance of `d_{i,m,n}(Y, X)`.
    pub sigma2_2: T,
    /// `m/(n+m) σ̂²_1 + n/(n+m) σ̂²_2`.
    pub sigma2_combined: T,
    pub d1: Vec<T>,
    pub d2: Vec<T>,
}

/// Plug-in variance estimate for the one-sample cost `W_p^p(F_n, G)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneSampleVariance<T> {
    pub sigma2: T,
    pub d: Vec<T>,
}

/// Asymptotic confidence interval for `W_p^p(F, G)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfidenceInterval<T> {
    /// Empirical `W_p^p`, the interval centre.
    pub statistic: T,
    /// Variance estimate used for the half-width.
    pub sigma2: T,
    pub halfwidth: T,
    /// May be negative; see `ci_low_clipped`.
    pub ci_low: T,
    pub ci_high: T,
    /// `max(0, ci_low)`.
    pub ci_low_clipped: T,
    pub alpha: T,
    pub p: T,
    pub n: usize,
    /// 0 for intervals against an analytic target.
    pub m: usize,
    pub outside_theory: bool,
}

/// Outcome of testing `H0: W_p(F,G) >= Δ0` against `H1: W_p(F,G) < Δ0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityVerdict<T> {
    pub statistic: T,
    /// `Δ0^p - sqrt((n+m)/(nm)) σ̂ Φ⁻¹(1-α)`.
    pub threshold: T,
    pub reject_null: bool,
    pub delta0: T,
    pub alpha: T,
    pub ci_low: T,
    pub ci_high: T,
    pub ci_low_clipped: T,
    pub sigma2: T,
    pub p: T,
    pub n: usize,
    pub m: usize,
    pub outside_theory: bool,
}

/// The two Gaussian models with closed-form influence functions:
/// `F = N(0,1)` against `G = N(μ, 1)` or `G = N(μ, λ)` (λ a standard deviation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum GaussianModel<T> {
    Location { mu: T },
    ScaleLocation { mu: T, lambda: T },
}

impl<T: Real> GaussianModel<T> {
    pub fn mu(&self) -> T {
        match *self {
            GaussianModel::Location { mu } | GaussianModel::ScaleLocation { mu, .. } => mu,
        }
    }

    pub fn lambda(&self) -> T {
        match *self {
            GaussianModel::Location { .. } => T::one(),
            GaussianModel::ScaleLocation { lambda, .. } => lambda,
        }
    }

    pub fn f(&self) -> GaussianDist<T> {
        GaussianDist::standard()
    }

    pub fn g(&self) -> Result<GaussianDist<T>> {
        GaussianDist::new(self.mu(), self.lambda())
    }
}

/// Closed-form `c_p(t; F, G)` and `c_p(t; G, F)` for a [`GaussianModel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpClosedForm<T> {
    pub model: GaussianModel<T>,
    pub p: T,
}

impl<T: Real> CpClosedForm<T> {
    pub fn new(model: GaussianModel<T>, p: T) -> Self {
        Self { model, p }
    }

    /// `c_p(t; F, G)` in terms of `z = Φ⁻¹(t)`.
    fn fg_at(&self, z: T) -> T {
        let (mu, lambda, p) = (self.model.mu(), self.model.lambda(), self.p);
        let k = T::one() - lambda;
        if k == T::zero() {
            abs_pow_derivative(-mu, p) * z
        } else {
            (abs_pow(k * z - mu, p) - abs_pow(mu, p)) / k
        }
    }

    /// `c_p(t; G, F)` in terms of `z = Φ⁻¹(t)`.
    fn gf_at(&self, z: T) -> T {
        let (mu, lambda, p) = (self.model.mu(), self.model.lambda(), self.p);
        let k = lambda - T::one();
        if k == T::zero() {
            abs_pow_derivative(mu, p) * z
        } else {
            lambda / k * (abs_pow(k * z + mu, p) - abs_pow(mu, p))
        }
    }

    pub fn cp_fg(&self, t: T) -> T {
        self.fg_at(inverse_normal_cdf(t))
    }

    pub fn cp_gf(&self, t: T) -> T {
        self.gf_at(inverse_normal_cdf(t))
    }

    /// `σ²_p(F, G) = ∫ c̄_p²(t; F, G) dt`.
    pub fn variance_fg(&self) -> T {
        centred_second_moment(|z| self.fg_at(z))
    }

    /// `σ²_p(G, F)`.
    pub fn variance_gf(&self) -> T {
        centred_second_moment(|z| self.gf_at(z))
    }

    /// `(1-λ') σ²(F,G) + λ' σ²(G,F)` with `λ' = n/(n+m)`.
    pub fn asymptotic_variance(&self, n: usize, m: usize) -> T {
        let w = T::from_count(n) / T::from_count(n + m);
        (T::one() - w) * self.variance_fg() + w * self.variance_gf()
    }
}

/// `Var(c(Z))` for `Z ~ N(0,1)` by composite Gauss–Legendre in `z`.
fn centred_second_moment<T: Real>(c: impl Fn(T) -> T) -> T {
    let rule = GaussLegendre::<T>::new(DEFAULT_QUAD_ORDER).expect("static order");
    let reach = T::lit(38.0);
    let panels = 152;
    let mean = rule.integrate_composite(-reach, reach, panels, |z| c(z) * normal_pdf(z));
    rule.integrate_composite(-reach, reach, panels, |z| {
        let d = c(z) - mean;
        d * d * normal_pdf(z)
    })
}

fn check_level<T: Real>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha < T::one() {
        Ok(())
    } else {
        Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

fn check_size(got: usize) -> Result<()> {
    if got < 2 {
        Err(Error::SampleTooSmall { needed: 2, got })
    } else {
        Ok(())
    }
}

/// `c_p(t; F, G) = ∫_{F⁻¹(1/2)}^{F⁻¹(t)} h_p'(s - G⁻¹(F(s))) ds`, `h_p(x) = |x|^p`.
///
/// Empirical `f` gives the exact telescoped sum. Otherwise the integral is
/// taken over `s` by composite quadrature, split where an empirical `g`
/// jumps; `F` comes from `f.cdf` or, failing that, by inverting `f`.
pub fn cp_empirical<T, F, G>(t: T, f: &F, g: &G, p: T) -> Result<T>
where
    T: Real,
    F: QuantileFunction<T> + ?Sized,
    G: QuantileFunction<T> + ?Sized,
{
    if !(t > T::zero() && t < T::one()) {
        return Err(Error::domain(format!("c_p needs 0 < t < 1, got {t}")));
    }
    if !(p.is_finite() && p > T::one()) {
        return Err(Error::domain(format!("c_p needs p > 1, got {p}")));
    }
    if let Some(xs) = f.as_sample() {
        let n = xs.len();
        let target = |j: usize| match g.as_sample() {
            Some(ys) => ys.quantile_at_ratio(j - 1, n),
            None => g.eval(T::from_count(j - 1) / T::from_count(n)),
        };
        let step = |j: usize| {
            let y = target(j);
            abs_pow(xs.order_stat(j) - y, p) - abs_pow(xs.order_stat(j - 1) - y, p)
        };
        let i = xs.rank_at(t);
        let i0 = xs.rank_at_ratio(1, 2);
        let value = if i >= i0 {
            (i0 + 1..=i).map(step).sum()
        } else {
            -(i + 1..=i0).map(step).sum::<T>()
        };
        return Ok(value);
    }

    let start = f.eval(T::lit(0.5));
    let end = f.eval(t);
    let cdf = |s: T| f.cdf(s).unwrap_or_else(|| invert_quantile(f, s));
    let integrand = |s: T| abs_pow_derivative(s - g.eval(cdf(s)), p);

    let mut cuts = vec![start];
    if let Some(ys) = g.as_sample() {
        let m = ys.len();
        let (lo_t, hi_t) = if t < T::lit(0.5) {
            (t, T::lit(0.5))
        } else {
            (T::lit(0.5), t)
        };
        let mut inner: Vec<T> = (1..m)
            .map(|k| T::from_count(k) / T::from_count(m))
            .filter(|&u| u > lo_t && u < hi_t)
            .map(|u| f.eval(u))
            .collect();
        if t < T::lit(0.5) {
            inner.reverse();
        }
        cuts.extend(inner);
    }
    cuts.push(end);
    let rule = GaussLegendre::new(DEFAULT_QUAD_ORDER)?;
    // the integrand has a power-type kink wherever s crosses G⁻¹(F(s))
    let gap = |s: T| s - g.eval(cdf(s));
    let value: T = cuts
        .windows(2)
        .map(|w| {
            let (lo, hi) = if w[0] <= w[1] { (w[0], w[1]) } else { (w[1], w[0]) };
            let width = (hi - lo) / T::lit(32.0);
            if width.is_nan() || width <= T::zero() {
                return T::zero();
            }
            let kink = sign_change(&gap, lo, hi);
            let part = rule.integrate_kinked(lo, hi, kink, width, integrand);
            if w[0] <= w[1] {
                part
            } else {
                -part
            }
        })
        .sum();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Numerical("c_p integral is not finite".into()))
    }
}

/// Zero of `h` inside `(lo, hi)` by bisection, when `h` changes sign there.
fn sign_change<T: Real>(h: &impl Fn(T) -> T, lo: T, hi: T) -> Option<T> {
    let (mut a, mut b) = (lo, hi);
    let (ha, hb) = (h(a), h(b));
    let product = ha * hb;
    if product.is_nan() || product >= T::zero() {
        return None;
    }
    let rising = ha < T::zero();
    for _ in 0..200 {
        let mid = (a + b) * T::lit(0.5);
        if mid <= a || mid >= b {
            break;
        }
        if (h(mid) < T::zero()) == rising {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some((a + b) * T::lit(0.5))
}

/// `F(s)` from a quantile function by bisection on `(0, 1)`.
fn invert_quantile<T: Real, F: QuantileFunction<T> + ?Sized>(f: &F, s: T) -> T {
    let (mut lo, mut hi) = (T::zero(), T::one());
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if f.eval(mid) <= s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * T::lit(0.5)
}

/// Running sums `d_i` against the target values `target(j) = G⁻¹((j-1)/n)`.
fn displacement_sums<T: Real>(x: &SortedSample<T>, p: T, target: impl Fn(usize) -> T) -> Vec<T> {
    let n = x.len();
    let mut d = Vec::with_capacity(n);
    d.push(T::zero());
    let mut acc = T::zero();
    for j in 2..=n {
        let y = target(j);
        acc = acc + abs_pow(x.order_stat(j) - y, p) - abs_pow(x.order_stat(j - 1) - y, p);
        d.push(acc);
    }
    d
}

/// Population variance, two-pass.
fn population_variance<T: Real>(v: &[T]) -> T {
    let nf = T::from_count(v.len());
    let mean = v.iter().copied().sum::<T>() / nf;
    v.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / nf
}

/// The plug-in variance estimator `σ̂²_{n,m}` and its ingredients.
pub fn estimate_variance<T: Real>(x: &SortedSample<T>, y: &SortedSample<T>, p: T) -> Result<VarianceEstimate<T>> {
    check_exponent(p)?;
    check_size(x.len())?;
    check_size(y.len())?;
    let (n, m) = (x.len(), y.len());
    let d1 = displacement_sums(x, p, |j| y.quantile_at_ratio(j - 1, n));
    let d2 = displacement_sums(y, p, |j| x.quantile_at_ratio(j - 1, m));
    let sigma2_1 = population_variance(&d1);
    let sigma2_2 = population_variance(&d2);
    let total = T::from_count(n + m);
    let sigma2_combined = T::from_count(m) / total * sigma2_1 + T::from_count(n) / total * sigma2_2;
    Ok(VarianceEstimate {
        sigma2_1,
        sigma2_2,
        sigma2_combined,
        d1,
        d2,
    })
}

/// One-sample analogue: `d_i` with the analytic `G⁻¹((j-1)/n)`.
pub fn estimate_variance_one_sample<T: Real, Q: QuantileFunction<T> + ?Sized>(
    x: &SortedSample<T>,
    g: &Q,
    p: T,
) -> Result<OneSampleVariance<T>> {
    check_exponent(p)?;
    check_size(x.len())?;
    let n = x.len();
    let d = match g.as_sample() {
        Some(ys) => displacement_sums(x, p, |j| ys.quantile_at_ratio(j - 1, n)),
        None => displacement_sums(x, p, |j| g.eval(T::from_count(j - 1) / T::from_count(n))),
    };
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(
            "non-finite target quantile in variance estimate".into(),
        ));
    }
    Ok(OneSampleVariance {
        sigma2: population_variance(&d),
        d,
    })
}

/// `∫_0^1 c̄_p²(t; F_n, G_m) dt`, evaluated cell by cell.
///
/// Independent of [`estimate_variance`]: `c_p` is rebuilt by integrating
/// `h_p'` along `s` outward from the sample median, with `F_n(s)` obtained by
/// counting and `G_m⁻¹` by the floating point quantile lookup, and the
/// centred square is integrated with explicit cell widths.
pub fn variance_oracle_integral<T: Real>(x: &SortedSample<T>, y: &SortedSample<T>, p: T) -> Result<T> {
    check_exponent(p)?;
    check_size(x.len())?;
    check_size(y.len())?;
    let n = x.len();
    let xs = x.values();
    let median = x.rank_at(T::lit(0.5));
    // ∫ over [X_(j-1), X_(j)) of h'(s - G_m⁻¹(F_n(s))) ds
    let segment = |j: usize| {
        let (a, b) = (xs[j - 2], xs[j - 1]);
        if a == b {
            return T::zero();
        }
        let level = y.eval(x.cdf(a));
        abs_pow(b - level, p) - abs_pow(a - level, p)
    };
    let mut c = vec![T::zero(); n];
    for i in median + 1..=n {
        c[i - 1] = c[i - 2] + segment(i);
    }
    for i in (1..median).rev() {
        c[i - 1] = c[i] - segment(i + 1);
    }
    let nf = T::from_count(n);
    let widths: Vec<T> = (1..=n)
        .map(|i| T::from_count(i) / nf - T::from_count(i - 1) / nf)
        .collect();
    let mean: T = c.iter().zip(&widths).map(|(&ci, &w)| w * ci).sum();
    Ok(c.iter()
        .zip(&widths)
        .map(|(&ci, &w)| w * (ci - mean) * (ci - mean))
        .sum())
}

fn interval<T: Real>(statistic: T, sigma2: T, scale: T, alpha: T, p: T, n: usize, m: usize) -> ConfidenceInterval<T> {
    let z = inverse_normal_cdf(T::one() - alpha * T::lit(0.5));
    let halfwidth = scale * sigma2.sqrt() * z;
    let ci_low = statistic - halfwidth;
    ConfidenceInterval {
        statistic,
        sigma2,
        halfwidth,
        ci_low,
        ci_high: statistic + halfwidth,
        ci_low_clipped: ci_low.max(T::zero()),
        alpha,
        p,
        n,
        m,
        outside_theory: p <= T::one(),
    }
}

fn two_sample_scale<T: Real>(n: usize, m: usize) -> T {
    (T::from_count(n + m) / (T::from_count(n) * T::from_count(m))).sqrt()
}

/// `W_p^p(F_n, G_m) ± sqrt((n+m)/(nm)) σ̂_{n,m} Φ⁻¹(1 - α/2)`.
pub fn confidence_interval<T: Real>(
    x: &SortedSample<T>,
    y: &SortedSample<T>,
    p: T,
    alpha: T,
) -> Result<ConfidenceInterval<T>> {
    check_level(alpha)?;
    let var = estimate_variance(x, y, p)?;
    let cost = wasserstein_pp_two_sample(x, y, p)?;
    let (n, m) = (x.len(), y.len());
    Ok(interval(
        cost.cost_p,
        var.sigma2_combined,
        two_sample_scale(n, m),
        alpha,
        p,
        n,
        m,
    ))
}

/// `W_p^p(F_n, G) ± σ̂ Φ⁻¹(1 - α/2) / sqrt(n)` against an analytic target.
pub fn confidence_interval_one_sample<T: Real, Q: QuantileFunction<T> + ?Sized>(
    x: &SortedSample<T>,
    g: &Q,
    p: T,
    alpha: T,
    quad_order: usize,
) -> Result<ConfidenceInterval<T>> {
    check_level(alpha)?;
    let var = estimate_variance_one_sample(x, g, p)?;
    let cost = wasserstein_pp_one_sample(x, g, p, quad_order)?;
    let n = x.len();
    let scale = T::from_count(n).sqrt().recip();
    Ok(interval(cost.cost_p, var.sigma2, scale, alpha, p, n, 0))
}

fn check_delta0<T: Real>(delta0: T) -> Result<()> {
    if delta0.is_finite() && delta0 > T::zero() {
        Ok(())
    } else {
        Err(Error::domain(format!("delta0 must be positive, got {delta0}")))
    }
}

fn verdict<T: Real>(ci: ConfidenceInterval<T>, scale: T, delta0: T) -> SimilarityVerdict<T> {
    let z = inverse_normal_cdf(T::one() - ci.alpha);
    let threshold = delta0.powf(ci.p) - scale * ci.sigma2.sqrt() * z;
    SimilarityVerdict {
        statistic: ci.statistic,
        threshold,
        reject_null: ci.statistic < threshold,
        delta0,
        alpha: ci.alpha,
        ci_low: ci.ci_low,
        ci_high: ci.ci_high,
        ci_low_clipped: ci.ci_low_clipped,
        sigma2: ci.sigma2,
        p: ci.p,
        n: ci.n,
        m: ci.m,
        outside_theory: ci.outside_theory,
    }
}

/// Rejects `H0: W_p(F,G) >= Δ0` when
/// `W_p^p(F_n,G_m) < Δ0^p - sqrt((n+m)/(nm)) σ̂_{n,m} Φ⁻¹(1-α)`.
pub fn similarity_test<T: Real>(
    x: &SortedSample<T>,
    y: &SortedSample<T>,
    p: T,
    delta0: T,
    alpha: T,
) -> Result<SimilarityVerdict<T>> {
    check_delta0(delta0)?;
    let ci = confidence_interval(x, y, p, alpha)?;
    Ok(verdict(ci, two_sample_scale(x.len(), y.len()), delta0))
}

/// One-sample version of [`similarity_test`], at rate `sqrt(n)`.
pub fn similarity_test_one_sample<T: Real, Q: QuantileFunction<T> + ?Sized>(
    x: &SortedSample<T>,
    g: &Q,
    p: T,
    delta0: T,
    alpha: T,
    quad_order: usize,
) -> Result<SimilarityVerdict<T>> {
    check_delta0(delta0)?;
    let ci = confidence_interval_one_sample(x, g, p, alpha, quad_order)?;
    let scale = T::from_count(x.len()).sqrt().recip();
    Ok(verdict(ci, scale, delta0))
}
