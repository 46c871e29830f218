//! Electron displacement along the two-legged complex-time path: straight
//! down from `t_s` to `Re t_s`, then along the real axis.
//!
//! `x(t) = ∫_{t_s}^{t} (p + A) dt' = p (t − t_s) + F(t) − F(t_s)` with `F` the
//! antiderivative of `A`, so both legs are closed form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::FieldConfig;
use crate::saddle::{label_saddles, Label, SaddlePoint, SaddleSearch};

/// Real-time samples per optical period.
pub const SAMPLES_PER_PERIOD: usize = 512;
/// Points on the vertical leg.
const LEG1_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub label: Label,
    pub p: f64,
    /// Saddle time, a.u.
    pub t_s: Complex64,
    /// Real times from `Re t_s` to the end of the window, a.u.
    pub t_grid: Vec<f64>,
    pub x: Vec<Complex64>,
    /// `Re x(Re t_s)`.
    pub x_exit: f64,
    /// Vertical leg: `(t, x)` from `t_s` down to `Re t_s`.
    pub leg1: Vec<(Complex64, Complex64)>,
}

impl TrajectoryRecord {
    pub fn wt(&self, omega: f64) -> Vec<f64> {
        self.t_grid.iter().map(|t| t * omega).collect()
    }
}

/// Displacement relative to the saddle time.
pub fn displacement(cfg: &FieldConfig, p: f64, t_s: Complex64, t: Complex64) -> Complex64 {
    p * (t - t_s) + cfg.potential_integral(t) - cfg.potential_integral(t_s)
}

/// Trajectory launched from `saddle`; `t_end` defaults to `Re t_s` plus two periods.
pub fn trajectory(saddle: &SaddlePoint, cfg: &FieldConfig, p: f64, t_end: Option<f64>) -> TrajectoryRecord {
    let t_s = saddle.t;
    let t0 = t_s.re;
    let t_end = t_end.unwrap_or(t0 + 2.0 * cfg.period()).max(t0);
    let dt = cfg.period() / SAMPLES_PER_PERIOD as f64;
    let n = ((t_end - t0) / dt).ceil() as usize;
    let mut t_grid: Vec<f64> = (0..n).map(|i| t0 + i as f64 * dt).collect();
    t_grid.push(t_end);
    let x: Vec<Complex64> = t_grid
        .iter()
        .map(|&t| displacement(cfg, p, t_s, Complex64::new(t, 0.0)))
        .collect();
    let leg1 = (0..=LEG1_SAMPLES)
        .map(|i| {
            let t = Complex64::new(t0, t_s.im * (1.0 - i as f64 / LEG1_SAMPLES as f64));
            let t = if i == 0 { t_s } else { t };
            (t, displacement(cfg, p, t_s, t))
        })
        .collect();
    TrajectoryRecord {
        label: saddle.label,
        p,
        t_s,
        x_exit: x[0].re,
        t_grid,
        x,
        leg1,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryBand {
    pub label: Label,
    pub records: Vec<TrajectoryRecord>,
    /// Momenta where the labelled saddle could not be followed.
    pub missing: Vec<f64>,
    pub truncated: bool,
}

/// Trajectories of one labelled orbit over a momentum list.
pub fn trajectory_band(label: Label, cfg: &FieldConfig, momenta: &[f64], t_end: Option<f64>) -> Result<TrajectoryBand> {
    let search = SaddleSearch::default().with_im_cap(crate::contour::CONTOUR_IM_CAP);
    let mut records = Vec::new();
    let mut missing = Vec::new();
    for &p in momenta {
        let mut saddles = search.run(cfg, p);
        let found = label_saddles(cfg, p, &mut saddles)
            .ok()
            .and_then(|_| saddles.into_iter().find(|s| s.label == label));
        match found {
            Some(s) => records.push(trajectory(&s, cfg, p, t_end)),
            None => missing.push(p),
        }
    }
    Ok(TrajectoryBand {
        label,
        truncated: !missing.is_empty(),
        records,
        missing,
    })
}

/// Labelled saddles at `(cfg, p)` and their trajectories.
pub fn trajectories(cfg: &FieldConfig, p: f64, t_end: Option<f64>) -> Result<Vec<TrajectoryRecord>> {
    let mut saddles = SaddleSearch::default().with_im_cap(crate::contour::CONTOUR_IM_CAP).run(cfg, p);
    label_saddles(cfg, p, &mut saddles)?;
    saddles.sort_by_key(|s| s.label);
    Ok(saddles.iter().map(|s| trajectory(s, cfg, p, t_end)).collect())
}
