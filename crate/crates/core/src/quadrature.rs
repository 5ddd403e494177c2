//! Fixed-order Gauss–Legendre quadrature.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Nodes and weights of an `order`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Builds the rule by Newton iteration on the Legendre polynomial, in `f64`.
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::domain(format!("quadrature order must be >= 2, got {order}")));
        }
        let mut nodes = vec![T::zero(); order];
        let mut weights = vec![T::zero(); order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = T::lit(-x);
            nodes[order - 1 - i] = T::lit(x);
            weights[i] = T::lit(w);
            weights[order - 1 - i] = T::lit(w);
        }
        if order % 2 == 1 {
            nodes[order / 2] = T::zero();
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `∫_a^b f` with a single application of the rule.
    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + w * f(mid + half * x);
        }
        acc * half
    }

    /// `∫_a^b f` over `panels` equal sub-panels.
    pub fn integrate_composite(&self, a: T, b: T, panels: usize, mut f: impl FnMut(T) -> T) -> T {
        let panels = panels.max(1);
        let h = (b - a) / T::from_count(panels);
        let mut acc = T::zero();
        for k in 0..panels {
            let lo = a + h * T::from_count(k);
            let hi = if k + 1 == panels { b } else { lo + h };
            acc = acc + self.integrate(lo, hi, &mut f);
        }
        acc
    }

    /// `∫_0^b f` for an integrand with an integrable singularity at `0`,
    /// using geometrically graded panels `[b r^{k+1}, b r^k]` down to `floor`.
    pub fn integrate_graded_from_zero(&self, b: T, floor: T, mut f: impl FnMut(T) -> T) -> T {
        let ratio = T::lit(0.25);
        let mut hi = b;
        let mut acc = T::zero();
        while hi > floor {
            let lo = hi * ratio;
            acc = acc + self.integrate(lo, hi, &mut f);
            hi = lo;
        }
        acc
    }

    /// `∫_a^b f` with panels no wider than `width`, graded geometrically
    /// toward `kink` when it lies inside `[a, b]` or within `b - a` of it.
    ///
    /// Suits integrands like `|x - kink|^q` that are continuous but not smooth.
    pub fn integrate_kinked(&self, a: T, b: T, kink: Option<T>, width: T, mut f: impl FnMut(T) -> T) -> T {
        let composite = |lo: T, hi: T, f: &mut dyn FnMut(T) -> T| {
            let panels = ((hi - lo) / width).ceil().to_usize().unwrap_or(1);
            self.integrate_composite(lo, hi, panels, f)
        };
        let Some(c) = kink else {
            return composite(a, b, &mut f);
        };
        let floor = width * T::epsilon();
        if c > a && c < b {
            let mut acc = T::zero();
            for (end, sign) in [(a, -T::one()), (b, T::one())] {
                let reach = (end - c).abs();
                let near = reach.min(width);
                acc = acc + self.integrate_graded_from_zero(near, floor, |u| f(c + sign * u));
                if reach > near {
                    let (lo, hi) = if sign > T::zero() { (c + near, b) } else { (a, c - near) };
                    acc = acc + composite(lo, hi, &mut f);
                }
            }
            return acc;
        }
        // kink outside: grade from the nearer endpoint down to the kink distance
        let len = b - a;
        let (gap, origin, sign) = if c <= a {
            (a - c, a, T::one())
        } else {
            (c - b, b, -T::one())
        };
        if gap >= len {
            return composite(a, b, &mut f);
        }
        let near = len.min(width);
        let stop = gap.max(floor);
        let ratio = T::lit(0.25);
        let mut acc = T::zero();
        let mut hi = near;
        while hi > stop {
            let lo = hi * ratio;
            acc = acc + self.integrate(lo, hi, |u| f(origin + sign * u));
            hi = lo;
        }
        acc = acc + self.integrate(T::zero(), hi, |u| f(origin + sign * u));
        if len > near {
            let (lo, hi) = if sign > T::zero() { (a + near, b) } else { (a, b - near) };
            acc = acc + composite(lo, hi, &mut f);
        }
        acc
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_order_below_two() {
        assert!(GaussLegendre::<f64>::new(1).is_err());
        assert!(GaussLegendre::<f64>::new(0).is_err());
    }

    #[test]
    fn weights_sum_to_two() {
        for k in 2..40 {
            let gl = GaussLegendre::<f64>::new(k).unwrap();
            let s: f64 = gl.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "k={k} sum={s}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2k_minus_1() {
        for k in 2..20 {
            let gl = GaussLegendre::<f64>::new(k).unwrap();
            let deg = 2 * k - 1;
            let got = gl.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((got - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn known_three_point_rule() {
        let gl = GaussLegendre::<f64>::new(3).unwrap();
        let r = (0.6f64).sqrt();
        assert!((gl.nodes()[0] + r).abs() < 1e-15);
        assert_eq!(gl.nodes()[1], 0.0);
        assert!((gl.weights()[1] - 8.0 / 9.0).abs() < 1e-15);
        assert!((gl.weights()[2] - 5.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn graded_handles_log_singularity() {
        // ∫_0^1 -ln t dt = 1
        let gl = GaussLegendre::<f64>::new(16).unwrap();
        let got = gl.integrate_graded_from_zero(1.0, 1e-100, |t| -t.ln());
        assert!((got - 1.0).abs() < 1e-13, "{got}");
    }

    #[test]
    fn composite_smooth() {
        let gl = GaussLegendre::<f64>::new(8).unwrap();
        let got = gl.integrate_composite(0.0, std::f64::consts::PI, 4, f64::sin);
        assert!((got - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kinked_power_is_integrated_to_round_off() {
        let rule = GaussLegendre::<f64>::new(16).unwrap();
        let want = (1.3f64.powf(2.5) + 1.7f64.powf(2.5)) / 2.5;
        let got = rule.integrate_kinked(-1.0, 2.0, Some(0.3), 0.5, |x: f64| (x - 0.3).abs().powf(1.5));
        assert!((got - want).abs() < 1e-13 * want, "{got} {want}");
        let smooth = rule.integrate_kinked(0.0, 1.0, Some(3.0), 0.25, |x: f64| x * x);
        assert!((smooth - 1.0 / 3.0).abs() < 1e-15);
        // kink just outside either end
        for (a, b, c) in [(0.0f64, 0.4f64, 0.404f64), (0.304, 0.7, 0.3)] {
            let want = ((b - c).abs().powf(2.5) - (a - c).abs().powf(2.5)).abs() / 2.5;
            let got = rule.integrate_kinked(a, b, Some(c), 0.5, |x: f64| (x - c).abs().powf(1.5));
            assert!((got - want).abs() < 1e-14 * want, "{got} {want}");
        }
    }
}
