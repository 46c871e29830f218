//! Globally adaptive Gauss–Legendre quadrature along straight complex segments.
//!
//! Each panel is integrated with a 16-point rule and with the two 16-point
//! halves; the difference is the panel's error estimate. The panel with the
//! largest estimate is bisected until the summed estimate drops below
//! `max(abs_tol, rel_tol · |I|)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

const ORDER: usize = 16;
const MAX_PANELS: usize = 20_000;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let gl = GaussLegendre::new(NonZeroUsize::new(ORDER).unwrap());
        gl.as_node_weight_pairs().to_vec()
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
    /// False if the panel budget ran out before the tolerance was met.
    pub converged: bool,
}

impl QuadResult {
    fn zero() -> Self {
        QuadResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    fn add(&mut self, other: QuadResult) {
        self.value += other.value;
        self.error += other.error;
        self.evaluations += other.evaluations;
        self.converged &= other.converged;
    }
}

fn gl_panel<F: Fn(Complex64) -> Complex64>(f: &F, a: Complex64, b: Complex64) -> Complex64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = Complex64::new(0.0, 0.0);
    for &(x, w) in rule() {
        s += w * f(mid + half * x);
    }
    s * half
}

struct Panel {
    a: Complex64,
    b: Complex64,
    value: Complex64,
    error: f64,
}

impl Panel {
    fn new<F: Fn(Complex64) -> Complex64>(f: &F, a: Complex64, b: Complex64) -> Self {
        let m = 0.5 * (a + b);
        let coarse = gl_panel(f, a, b);
        let fine = gl_panel(f, a, m) + gl_panel(f, m, b);
        Panel {
            a,
            b,
            value: fine,
            error: (fine - coarse).norm(),
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// `∫_a^b f(t) dt` along the straight segment from `a` to `b`.
pub fn integrate_segment<F>(f: &F, a: Complex64, b: Complex64, rel_tol: f64, abs_tol: f64) -> QuadResult
where
    F: Fn(Complex64) -> Complex64,
{
    integrate_panels(f, &[(a, b)], rel_tol, abs_tol, 4)
}

/// Integral along a polyline through `points`, sharing one global error budget.
pub fn integrate_polyline<F>(f: &F, points: &[Complex64], rel_tol: f64, abs_tol: f64) -> QuadResult
where
    F: Fn(Complex64) -> Complex64,
{
    if points.len() < 2 {
        return QuadResult::zero();
    }
    let segs: Vec<_> = points.windows(2).map(|w| (w[0], w[1])).collect();
    integrate_panels(f, &segs, rel_tol, abs_tol, 1)
}

/// `∫_a^b f(x) dx` on the real axis.
pub fn integrate_real<F>(f: &F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> QuadResult
where
    F: Fn(Complex64) -> Complex64,
{
    integrate_segment(f, Complex64::from(a), Complex64::from(b), rel_tol, abs_tol)
}

fn integrate_panels<F>(f: &F, segs: &[(Complex64, Complex64)], rel_tol: f64, abs_tol: f64, split: usize) -> QuadResult
where
    F: Fn(Complex64) -> Complex64,
{
    let mut heap = BinaryHeap::new();
    for &(a, b) in segs {
        if a == b {
            continue;
        }
        for i in 0..split {
            let u0 = i as f64 / split as f64;
            let u1 = (i + 1) as f64 / split as f64;
            heap.push(Panel::new(f, a + (b - a) * u0, a + (b - a) * u1));
        }
    }
    let per_panel = 3 * ORDER;
    let mut evaluations = heap.len() * per_panel;
    let mut converged = true;
    loop {
        let total: Complex64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.error).sum();
        let tol = abs_tol.max(rel_tol * total.norm());
        if err <= tol || heap.is_empty() {
            break;
        }
        if heap.len() >= MAX_PANELS {
            converged = false;
            break;
        }
        // split a batch of the worst panels before re-summing
        let batch = (heap.len() / 8).max(1);
        for _ in 0..batch {
            let Some(p) = heap.pop() else { break };
            if p.error <= tol / (heap.len() as f64 + 1.0) * 1e-3 {
                heap.push(p);
                break;
            }
            let m = 0.5 * (p.a + p.b);
            heap.push(Panel::new(f, p.a, m));
            heap.push(Panel::new(f, m, p.b));
            evaluations += 2 * per_panel;
        }
    }
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    QuadResult {
        value,
        error,
        evaluations,
        converged,
    }
}

/// Sums several independently integrated pieces.
pub fn combine(parts: impl IntoIterator<Item = QuadResult>) -> QuadResult {
    let mut out = QuadResult::zero();
    for p in parts {
        out.add(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polynomial_is_exact() {
        let f = |t: Complex64| t.powu(7) * 3.0 - t;
        let (a, b) = (c(-1.0, 0.5), c(2.0, -1.0));
        let exact = (b.powu(8) - a.powu(8)) * (3.0 / 8.0) - (b * b - a * a) / 2.0;
        let r = integrate_segment(&f, a, b, 1e-14, 0.0);
        assert!((r.value - exact).norm() < 1e-12 * exact.norm());
        assert!(r.converged);
    }

    #[test]
    fn oscillatory_real_integral() {
        let f = |t: Complex64| (t * 40.0).cos() * (-t * t).exp();
        let r = integrate_real(&f, -6.0, 6.0, 1e-12, 0.0);
        // ∫ e^{-x²} cos(kx) = sqrt(π) e^{-k²/4}
        let exact = std::f64::consts::PI.sqrt() * (-400.0f64).exp();
        assert!((r.value.re - exact).abs() < 1e-12);
    }

    #[test]
    fn peaked_integrand_refines() {
        let f = |t: Complex64| 1.0 / ((t - 0.3) * (t - 0.3) + 1e-6);
        let r = integrate_real(&f, 0.0, 1.0, 1e-10, 0.0);
        let exact = (0.7f64 / 1e-3).atan() / 1e-3 + (0.3f64 / 1e-3).atan() / 1e-3;
        assert_relative_eq!(r.value.re, exact, max_relative = 1e-9);
    }

    #[test]
    fn polyline_equals_sum_of_segments() {
        let f = |t: Complex64| (t * c(0.0, 1.0)).exp();
        let pts = [c(0.0, 0.0), c(1.0, 1.0), c(3.0, 0.5), c(4.0, 2.0)];
        let r = integrate_polyline(&f, &pts, 1e-13, 0.0);
        let exact = ((pts[3] * c(0.0, 1.0)).exp() - 1.0) / c(0.0, 1.0);
        assert!((r.value - exact).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn exponential_path_independence(x in -3.0f64..3.0, y in -2.0f64..2.0, k in 0.1f64..5.0) {
            let f = |t: Complex64| (t * k).exp();
            let b = c(x, y);
            let direct = integrate_segment(&f, c(0.0, 0.0), b, 1e-13, 0.0).value;
            let bent = integrate_polyline(&f, &[c(0.0, 0.0), c(x, 0.0), b], 1e-13, 0.0).value;
            let exact = ((b * k).exp() - 1.0) / k;
            prop_assert!((direct - exact).norm() < 1e-11 * exact.norm().max(1.0));
            prop_assert!((bent - exact).norm() < 1e-11 * exact.norm().max(1.0));
        }
    }
}
