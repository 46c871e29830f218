//! Every saddle of the two-colour field, found independently as roots of a
//! polynomial in `z = e^{iωt}` (Durand–Kerner), must be returned by the
//! Newton grid search, and nothing else.

use std::f64::consts::TAU;

use proptest::prelude::*;
use switchover_core::saddle::{circular_distance, reduce_to_window};
use switchover_core::{Complex64, FieldConfig, SaddleSearch};

const CAP: f64 = 6.0;

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn durand_kerner(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let c: Vec<Complex64> = coeffs.iter().map(|a| a / lead).collect();
    let mut roots: Vec<Complex64> = (0..deg).map(|k| Complex64::new(0.4, 0.9).powu(k as u32 + 1)).collect();
    for _ in 0..5000 {
        let mut delta: f64 = 0.0;
        for i in 0..deg {
            let num = horner(&c, roots[i]);
            let den: Complex64 = (0..deg).filter(|&j| j != i).map(|j| roots[i] - roots[j]).product();
            let step = num / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    // Newton polish on the original polynomial
    let d: Vec<Complex64> = (1..=deg).map(|k| c[k] * k as f64).collect();
    for r in roots.iter_mut() {
        for _ in 0..5 {
            let f = horner(&c, *r);
            let df = horner(&d, *r);
            if df.norm() > 0.0 {
                *r -= f / df;
            }
        }
    }
    roots
}

/// Saddles in `ωt` from `p + A(τ) = ±i sqrt(2 Ip)`, multiplied through by `z^N`.
fn polynomial_saddles(cfg: &FieldConfig, p: f64) -> Vec<Complex64> {
    let h = cfg.harmonics();
    let n_max = h.iter().map(|h| h.order).max().unwrap() as usize;
    let kappa = (2.0 * cfg.ip).sqrt();
    let mut out = Vec::new();
    for s in [1.0, -1.0] {
        let mut c = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
        for hh in &h {
            let n = hh.order as usize;
            // amp sin(nτ + φ) = amp (z^n e^{iφ} − z^{−n} e^{−iφ}) / 2i
            c[n_max + n] += hh.amp * Complex64::from_polar(1.0, hh.phase) / Complex64::new(0.0, 2.0);
            c[n_max - n] -= hh.amp * Complex64::from_polar(1.0, -hh.phase) / Complex64::new(0.0, 2.0);
        }
        c[n_max] += Complex64::new(p, -s * kappa);
        for z in durand_kerner(&c) {
            let tau = Complex64::new(z.arg(), -z.norm().ln());
            out.push(reduce_to_window(tau));
        }
    }
    out
}

fn check(cfg: &FieldConfig, p: f64) -> Result<(), TestCaseError> {
    let expected: Vec<Complex64> = polynomial_saddles(cfg, p).into_iter().filter(|t| t.im > 0.0).collect();
    let found = SaddleSearch::default().with_im_cap(CAP).run(cfg, p);
    for e in expected.iter().filter(|t| t.im > 1e-6 && t.im < CAP - 0.05) {
        prop_assert!(
            found.iter().any(|f| circular_distance(f.wt, *e) < 1e-7),
            "missed root {e} at theta = {}, p = {p}",
            cfg.theta
        );
    }
    for f in &found {
        prop_assert!(
            expected.iter().any(|e| circular_distance(f.wt, *e) < 1e-7),
            "spurious root {} at theta = {}, p = {p}",
            f.wt,
            cfg.theta
        );
        prop_assert!(f.wt.re >= -TAU / 4.0 && f.wt.re < 3.0 * TAU / 4.0);
    }
    Ok(())
}

#[test]
fn reference_angles() {
    for th in [5.0, 19.0, 25.0, 45.0, 80.0] {
        for p in [-1.0, 0.0, 0.7] {
            check(&FieldConfig::reference(th), p).unwrap();
        }
    }
}

#[test]
fn omega_three_omega() {
    let cfg = FieldConfig::reference(45.0).with_orders(1, 3).unwrap();
    check(&cfg, 0.2).unwrap();
    assert_eq!(polynomial_saddles(&cfg, 0.2).len(), 12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn search_is_complete(theta_deg in 3.0f64..87.0, p in -1.5f64..1.5, phi2 in -0.5f64..0.5) {
        let cfg = FieldConfig::reference(theta_deg).with_phase(phi2).unwrap();
        check(&cfg, p)?;
    }
}
