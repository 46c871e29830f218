//! Second-order saddle where A and C merge, and its dependence on γ.

use nalgebra::{Matrix4x3, Vector3, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::track::{labelled, theta_trace};
use super::Label;
use crate::action::Action;
use crate::error::{Error, Result};
use crate::field::{equal_amplitude_gamma, field_of, omega_for_equal_amplitude_gamma, potential_of, FieldConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoalescencePoint {
    pub theta_star: f64,
    pub r_star: f64,
    /// Complex time where `S' = S'' = 0`, a.u.
    pub t_star: Complex64,
    pub wt_star: Complex64,
    /// Equal-amplitude Keldysh parameter `4ω sqrt(Ip / 5I0)`.
    pub gamma: f64,
    pub residual_ds: f64,
    pub residual_d2s: f64,
}

/// Residuals `(S', S''/ω)` and their Jacobian in `(Re ωt, Im ωt, θ)`.
fn system(cfg: &FieldConfig, p: f64, wt: Complex64) -> (Vector4<f64>, Matrix4x3<f64>) {
    let w = cfg.omega;
    let t = wt / w;
    let act = Action::new(cfg, p);
    let (ds, d2s, d3s) = act.derivatives(t);
    let k = p + act.vector_potential(t);
    let e = act.electric_field(t);
    let dh = cfg.harmonics_dtheta();
    let a_th = potential_of(&dh, w, t);
    let e_th = field_of(&dh, w, t);

    let f1 = ds;
    let f2 = d2s / w;
    let f1_tau = d2s / w;
    let f2_tau = d3s / (w * w);
    let f1_th = k * a_th;
    let f2_th = (-a_th * e - k * e_th) / w;

    let i = Complex64::i();
    let cols = [(f1_tau, f2_tau), (i * f1_tau, i * f2_tau), (f1_th, f2_th)];
    let mut jac = Matrix4x3::zeros();
    for (c, (g1, g2)) in cols.iter().enumerate() {
        jac[(0, c)] = g1.re;
        jac[(1, c)] = g1.im;
        jac[(2, c)] = g2.re;
        jac[(3, c)] = g2.im;
    }
    (Vector4::new(f1.re, f1.im, f2.re, f2.im), jac)
}

/// Gauss–Newton on the four real residuals; returns `(ωt*, θ*)`.
fn solve(base: &FieldConfig, p: f64, wt0: Complex64, theta0: f64) -> Result<(Complex64, f64)> {
    let mut x = Vector3::new(wt0.re, wt0.im, theta0);
    let eval = |x: &Vector3<f64>| -> Option<(Vector4<f64>, Matrix4x3<f64>)> {
        let cfg = base.with_theta(x[2]).ok()?;
        Some(system(&cfg, p, Complex64::new(x[0], x[1])))
    };
    let (mut r, mut j) = eval(&x).ok_or_else(|| Error::Coalescence("seed outside the valid θ range".into()))?;
    for _ in 0..100 {
        let svd = j.svd(true, true);
        let dx = svd
            .solve(&(-r), 1e-14)
            .map_err(|e| Error::Coalescence(format!("least-squares step failed: {e}")))?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let cand = x + dx * lambda;
            if let Some((rc, jc)) = eval(&cand) {
                if rc.norm() < r.norm() || rc.norm() < 1e-15 {
                    accepted = Some((cand, rc, jc));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((cand, rc, jc)) = accepted else {
            break;
        };
        let step = (cand - x).norm();
        x = cand;
        r = rc;
        j = jc;
        if step < 1e-14 {
            break;
        }
    }
    let ds = r[0].hypot(r[1]);
    let d2s = r[2].hypot(r[3]) * base.omega;
    if ds < 1e-9 && d2s < 1e-9 {
        Ok((Complex64::new(x[0], x[1]), x[2]))
    } else {
        Err(Error::Coalescence(format!(
            "no convergence: last iterate wt = {:.6}{:+.6}i, theta = {:.4} deg, |S'| = {ds:.2e}, |S''| = {d2s:.2e}",
            x[0],
            x[1],
            x[2].to_degrees()
        )))
    }
}

fn point(base: &FieldConfig, p: f64, wt: Complex64, theta: f64) -> Result<CoalescencePoint> {
    let cfg = base.with_theta(theta)?;
    let act = Action::new(&cfg, p);
    let t = wt / cfg.omega;
    let (ds, d2s, _) = act.derivatives(t);
    let r_star = theta.tan();
    if !(r_star > 0.0 && r_star < 1.0) {
        return Err(Error::Coalescence(format!("converged to R = {r_star}, outside (0, 1)")));
    }
    Ok(CoalescencePoint {
        theta_star: theta,
        r_star,
        t_star: t,
        wt_star: wt,
        gamma: equal_amplitude_gamma(cfg.omega, cfg.ip, cfg.intensity()),
        residual_ds: ds.norm(),
        residual_d2s: d2s.norm(),
    })
}

/// Coalescence of A and C at `p = 0`. The mixing angle of `base` is ignored.
pub fn find_coalescence(base: &FieldConfig, p: f64) -> Result<CoalescencePoint> {
    if p != 0.0 {
        return Err(Error::InvalidConfig(
            "coalescence is only located at p = 0; away from it the pair passes a branch point".into(),
        ));
    }
    let trace = theta_trace(base, 0.2f64.to_radians(), 0.25f64.to_radians())?;
    let seed = trace
        .iter()
        .filter_map(|st| {
            let a = labelled(&st.roots, Label::A)?;
            let c = labelled(&st.roots, Label::C)?;
            Some(((a - c).norm(), 0.5 * (a + c), st.s))
        })
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .ok_or_else(|| Error::Coalescence("no A/C pair along the θ sweep".into()))?;
    let (wt, theta) = solve(base, p, seed.1, seed.2)?;
    point(base, p, wt, theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RStarRow {
    pub gamma: f64,
    pub omega: f64,
    pub theta_star: f64,
    pub r_star: f64,
    pub wt_star: Complex64,
    /// `1/(4γ)`.
    pub large_gamma: f64,
    /// `1 − (135/32)^{1/3} γ^{3/2}`.
    pub small_gamma: f64,
    /// `1/(sqrt(10) γ)`, the leading large-γ term in this γ convention.
    pub large_gamma_leading: f64,
    /// `1 − (135/32)^{1/3} γ^{2/3}`, the leading small-γ term.
    pub small_gamma_leading: f64,
}

/// `(135/32)^{1/3}`.
pub fn small_gamma_coefficient() -> f64 {
    (135.0f64 / 32.0).cbrt()
}

/// `R*(γ)` with γ realised through ω at fixed `Ip`, `I0`.
pub fn rstar_curve(gammas: &[f64], ip: f64, i0: f64) -> Result<Vec<RStarRow>> {
    let mut order: Vec<usize> = (0..gammas.len()).collect();
    order.sort_by(|&a, &b| gammas[a].total_cmp(&gammas[b]));
    let mut rows: Vec<Option<RStarRow>> = vec![None; gammas.len()];
    let mut prev: Option<(Complex64, f64)> = None;
    for idx in order {
        let gamma = gammas[idx];
        if !(gamma > 0.0) {
            return Err(Error::InvalidConfig(format!("gamma = {gamma} must be positive")));
        }
        let omega = omega_for_equal_amplitude_gamma(gamma, ip, i0);
        let base = FieldConfig::new(i0.sqrt(), omega, std::f64::consts::FRAC_PI_4, ip)?;
        let cp = match find_coalescence(&base, 0.0) {
            Ok(cp) => cp,
            Err(e) => {
                let (wt, th) = prev.ok_or(e)?;
                let (wt, th) = solve(&base, 0.0, wt, th)?;
                point(&base, 0.0, wt, th)?
            }
        };
        prev = Some((cp.wt_star, cp.theta_star));
        let c = small_gamma_coefficient();
        rows[idx] = Some(RStarRow {
            gamma,
            omega,
            theta_star: cp.theta_star,
            r_star: cp.r_star,
            wt_star: cp.wt_star,
            large_gamma: 1.0 / (4.0 * gamma),
            small_gamma: 1.0 - c * gamma.powf(1.5),
            large_gamma_leading: 1.0 / (10f64.sqrt() * gamma),
            small_gamma_leading: 1.0 - c * gamma.powf(2.0 / 3.0),
        });
    }
    Ok(rows.into_iter().map(|r| r.expect("every row filled")).collect())
}
