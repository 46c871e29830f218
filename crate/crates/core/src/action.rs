//! Closed-form semi-classical action.
//!
//! `S(p, t) = ∫_0^t [Ip + (p + A(t'))² / 2] dt'` with the reference point
//! `S(p, 0) = 0`. Expanding `(p + A)²` over the sine terms of `A` gives
//! products `sin u_j sin u_l = [cos(u_j − u_l) − cos(u_j + u_l)] / 2`, each of
//! which has an elementary antiderivative, so `S` is evaluated exactly for
//! any complex `t`.

use num_complex::Complex64;

use crate::field::{field_of, potential_of, FieldConfig, Harmonic};

/// `S`, `∂S/∂t` and `∂²S/∂t²` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionEvaluation {
    pub s: Complex64,
    pub ds: Complex64,
    pub d2s: Complex64,
}

/// Action of a fixed field and drift momentum, with the harmonic expansion cached.
#[derive(Debug, Clone)]
pub struct Action {
    cfg: FieldConfig,
    p: f64,
    harmonics: Vec<Harmonic>,
}

impl Action {
    pub fn new(cfg: &FieldConfig, p: f64) -> Self {
        Action {
            cfg: *cfg,
            p,
            harmonics: cfg.harmonics(),
        }
    }

    pub fn config(&self) -> &FieldConfig {
        &self.cfg
    }

    pub fn momentum(&self) -> f64 {
        self.p
    }

    pub fn omega(&self) -> f64 {
        self.cfg.omega
    }

    pub fn vector_potential(&self, t: Complex64) -> Complex64 {
        potential_of(&self.harmonics, self.cfg.omega, t)
    }

    pub fn electric_field(&self, t: Complex64) -> Complex64 {
        field_of(&self.harmonics, self.cfg.omega, t)
    }

    pub fn value(&self, t: Complex64) -> Complex64 {
        let w = self.cfg.omega;
        let p = self.p;
        let mut s = t * (self.cfg.ip + 0.5 * p * p);
        for h in &self.harmonics {
            let k = h.order as f64 * w;
            // ∫ sin(k t' + φ) dt'
            s += p * h.amp * (Complex64::from(h.phase.cos()) - (t * k + h.phase).cos()) / k;
        }
        for a in &self.harmonics {
            for b in &self.harmonics {
                let diff = cos_integral(a.order as i64 - b.order as i64, a.phase - b.phase, w, t);
                let sum = cos_integral(a.order as i64 + b.order as i64, a.phase + b.phase, w, t);
                s += 0.25 * a.amp * b.amp * (diff - sum);
            }
        }
        s
    }

    /// `S' = Ip + (p + A)² / 2`.
    pub fn first(&self, t: Complex64) -> Complex64 {
        let k = self.p + self.vector_potential(t);
        0.5 * k * k + self.cfg.ip
    }

    pub fn evaluate(&self, t: Complex64) -> ActionEvaluation {
        let k = self.p + self.vector_potential(t);
        ActionEvaluation {
            s: self.value(t),
            ds: 0.5 * k * k + self.cfg.ip,
            d2s: -k * self.electric_field(t),
        }
    }

    /// `(S', S'', S''')` without the action value itself.
    pub fn derivatives(&self, t: Complex64) -> (Complex64, Complex64, Complex64) {
        let k = self.p + self.vector_potential(t);
        let e = self.electric_field(t);
        let de = self.cfg.field_derivative(t);
        (0.5 * k * k + self.cfg.ip, -k * e, e * e - k * de)
    }

    /// `S(t + T) − S(t)`: real, independent of `t`.
    pub fn cycle_phase(&self) -> f64 {
        self.value(Complex64::from(self.cfg.period())).re
    }
}

/// `∫_0^t cos(m ω t' + ψ) dt'`.
fn cos_integral(m: i64, psi: f64, omega: f64, t: Complex64) -> Complex64 {
    if m == 0 {
        t * psi.cos()
    } else {
        let k = m as f64 * omega;
        ((t * k + psi).sin() - psi.sin()) / k
    }
}

pub fn action(cfg: &FieldConfig, p: f64, t: Complex64) -> Complex64 {
    Action::new(cfg, p).value(t)
}

pub fn action_derivatives(cfg: &FieldConfig, p: f64, t: Complex64) -> ActionEvaluation {
    Action::new(cfg, p).evaluate(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_segment;
    use crate::testutil::fd4;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quad_action(cfg: &FieldConfig, p: f64, a: Complex64, b: Complex64) -> Complex64 {
        let integrand = |t: Complex64| {
            let k = p + cfg.vector_potential(t);
            cfg.ip + 0.5 * k * k
        };
        integrate_segment(&integrand, a, b, 1e-13, 0.0).value
    }

    #[test]
    fn reference_point() {
        let cfg = FieldConfig::reference(33.0);
        assert_eq!(action(&cfg, 0.4, c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn free_particle() {
        let cfg = FieldConfig::new(0.0, 0.057, 0.7, 0.5).unwrap();
        let t = c(13.0, -4.0);
        let ev = action_derivatives(&cfg, 0.3, t);
        assert_relative_eq!((ev.s - t * (0.5 + 0.045)).norm(), 0.0, epsilon = 1e-14);
        assert_relative_eq!(ev.ds.re, 0.545, max_relative = 1e-15);
        assert_eq!(ev.d2s, c(0.0, 0.0));
    }

    #[test]
    fn matches_quadrature_for_equal_amplitudes() {
        let cfg = FieldConfig::reference(45.0);
        let t = c(0.5, 0.3) / cfg.omega;
        let exact = quad_action(&cfg, 0.0, c(0.0, 0.0), t);
        let s = action(&cfg, 0.0, t);
        assert!((s - exact).norm() < 1e-10 * exact.norm(), "{s} vs {exact}");
    }

    #[test]
    fn equal_orders_and_phase_shift() {
        // n1 == n2 exercises the zero-frequency cross term.
        let cfg = FieldConfig::reference(30.0).with_orders(1, 1).unwrap().with_phase(0.7).unwrap();
        let t = c(2.0, 0.8) / cfg.omega;
        let exact = quad_action(&cfg, -0.2, c(0.0, 0.0), t);
        assert!((action(&cfg, -0.2, t) - exact).norm() < 1e-10 * exact.norm());
    }

    #[test]
    fn second_derivative_by_finite_differences() {
        let cfg = FieldConfig::reference(45.0);
        let act = Action::new(&cfg, 0.3);
        // deterministic low-discrepancy sample of 100 points, |Re ωt| < π, 0 < Im ωt < 2
        for i in 0..100 {
            let x = -PI + 2.0 * PI * ((i as f64 * 0.618_033_988_7) % 1.0);
            let y = 2.0 * ((i as f64 * 0.754_877_666_2) % 1.0);
            let t = c(x, y) / cfg.omega;
            let h = Complex64::from(1e-3 / cfg.omega);
            let fd = fd4(|s| act.first(s), t, h);
            let d2 = act.evaluate(t).d2s;
            assert!((fd - d2).norm() < 1e-8 * d2.norm().max(1e-3), "at {t}: {fd} vs {d2}");
        }
    }

    #[test]
    fn third_derivative_by_finite_differences() {
        let cfg = FieldConfig::reference(20.0);
        let act = Action::new(&cfg, -0.1);
        let t = c(0.3, 1.1) / cfg.omega;
        let h = Complex64::from(1e-3 / cfg.omega);
        let fd = fd4(|s| act.evaluate(s).d2s, t, h);
        let (_, _, d3) = act.derivatives(t);
        assert!((fd - d3).norm() < 1e-8 * d3.norm());
    }

    fn arb_cfg() -> impl Strategy<Value = FieldConfig> {
        (0.05f64..0.15, 0.03f64..0.09, 0.0f64..FRAC_PI_2, -1.0f64..1.0).prop_map(|(e0, w, th, phi)| {
            FieldConfig::new(e0, w, th, 0.5).unwrap().with_phase(phi).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn closed_form_matches_segment_quadrature(
            cfg in arb_cfg(), p in -1.0f64..1.0,
            x0 in -10.0f64..10.0, y0 in -3.0f64..3.0, x1 in -10.0f64..10.0, y1 in -3.0f64..3.0,
        ) {
            let w = cfg.omega;
            let (a, b) = (c(x0, y0) / w, c(x1, y1) / w);
            let act = Action::new(&cfg, p);
            let exact = quad_action(&cfg, p, a, b);
            let diff = act.value(b) - act.value(a);
            prop_assert!((diff - exact).norm() <= 1e-9 * exact.norm().max(act.value(b).norm()).max(1.0));
        }

        #[test]
        fn period_increment_is_constant(cfg in arb_cfg(), p in -1.0f64..1.0, x in -5.0f64..5.0, y in -2.0f64..2.0) {
            let act = Action::new(&cfg, p);
            let t = c(x, y) / cfg.omega;
            let inc = act.value(t + cfg.period()) - act.value(t);
            let dphi = act.cycle_phase();
            prop_assert!((inc - dphi).norm() < 1e-10 * dphi.abs().max(1.0));
        }

        #[test]
        fn analytic_in_time(cfg in arb_cfg(), p in -1.0f64..1.0, x in -3.0f64..3.0, y in 0.0f64..2.5) {
            let act = Action::new(&cfg, p);
            let t = c(x, y) / cfg.omega;
            let h = 1e-3 / cfg.omega;
            let dx = fd4(|s| act.value(s), t, c(h, 0.0));
            let dy = fd4(|s| act.value(s), t, c(0.0, h));
            let ds = act.first(t);
            prop_assert!((dx - dy).norm() < 1e-8 * ds.norm().max(1.0));
            prop_assert!((dx - ds).norm() < 1e-8 * ds.norm().max(1.0));
        }
    }
}
