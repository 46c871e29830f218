//! Complex ionisation times: roots of `S'(t) = Ip + (p + A(t))² / 2`.
//!
//! All searching happens in the dimensionless variable `τ = ωt`. Roots are
//! reported in the canonical window `Re τ ∈ [−π/2, 3π/2)`, upper half-plane
//! only.

mod coalescence;
pub mod track;

pub use coalescence::{find_coalescence, rstar_curve, CoalescencePoint, RStarRow};
pub use track::{label_saddles, track_saddles, Continuation, SaddleSweep, SweepNode, TrackedRoot};

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::action::Action;
use crate::error::{Error, Result};
use crate::field::FieldConfig;

/// Left edge of the canonical window in `ωt`.
pub const WINDOW_START: f64 = -FRAC_PI_2;
/// `|S'|` a root must reach, a.u.
pub const SADDLE_TOLERANCE: f64 = 1e-10;
/// Separation in `ωt` below which two saddles count as coalescing.
pub const COALESCENCE_GUARD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    A,
    B,
    C,
    D,
    Unassigned,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::A, Label::B, Label::C, Label::D];

    pub fn index(self) -> Option<usize> {
        match self {
            Label::A => Some(0),
            Label::B => Some(1),
            Label::C => Some(2),
            Label::D => Some(3),
            Label::Unassigned => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Label::A => "A",
            Label::B => "B",
            Label::C => "C",
            Label::D => "D",
            Label::Unassigned => "?",
        };
        f.write_str(s)
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Label::A),
            "B" | "b" => Ok(Label::B),
            "C" | "c" => Ok(Label::C),
            "D" | "d" => Ok(Label::D),
            other => Err(Error::InvalidConfig(format!("unknown orbit label '{other}'"))),
        }
    }
}

/// Sign in `p + A(t_s) = ±i sqrt(2 Ip)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    fn of(kinetic: Complex64) -> Branch {
        if kinetic.im >= 0.0 {
            Branch::Plus
        } else {
            Branch::Minus
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddlePoint {
    /// Complex time in a.u.
    pub t: Complex64,
    /// `ω t`.
    pub wt: Complex64,
    pub label: Label,
    pub branch: Branch,
    /// 1 for a simple root, 2 when `|S''|` vanishes numerically.
    pub order: u32,
    /// `|S'(t_s)|`.
    pub residual: f64,
    /// Set by the contour construction.
    pub contributes: bool,
    /// Another saddle lies within [`COALESCENCE_GUARD`].
    pub degenerate: bool,
}

impl SaddlePoint {
    pub(crate) fn from_wt(act: &Action, wt: Complex64) -> Self {
        let w = act.omega();
        let t = wt / w;
        let k = act.momentum() + act.vector_potential(t);
        let d2s = -k * act.electric_field(t);
        SaddlePoint {
            t,
            wt,
            label: Label::Unassigned,
            branch: Branch::of(k),
            order: if d2s.norm() < 1e-9 { 2 } else { 1 },
            residual: act.first(t).norm(),
            contributes: false,
            degenerate: false,
        }
    }
}

/// Newton search settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleSearch {
    pub seeds_re: usize,
    pub seeds_im: usize,
    /// Upper bound on `Im ωt`.
    pub im_cap: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    /// Convergence on the Newton step in `ωt`.
    pub step_tol: f64,
    pub residual_tol: f64,
    pub dedupe_tol: f64,
}

impl Default for SaddleSearch {
    fn default() -> Self {
        SaddleSearch {
            seeds_re: 48,
            seeds_im: 24,
            im_cap: 3.0,
            max_iter: 200,
            max_halvings: 20,
            step_tol: 1e-12,
            residual_tol: SADDLE_TOLERANCE,
            dedupe_tol: 1e-8,
        }
    }
}

impl SaddleSearch {
    pub fn with_im_cap(mut self, cap: f64) -> Self {
        self.im_cap = cap;
        self
    }

    /// All roots in the window with `0 < Im ωt < im_cap`, sorted by `(Re, Im)`.
    pub fn run(&self, cfg: &FieldConfig, p: f64) -> Vec<SaddlePoint> {
        let act = Action::new(cfg, p);
        if cfg.harmonics().is_empty() {
            return Vec::new();
        }
        let mut roots: Vec<SaddlePoint> = Vec::new();
        let dx = TAU / self.seeds_re as f64;
        let dy = self.im_cap / self.seeds_im as f64;
        for i in 0..self.seeds_re {
            for j in 0..self.seeds_im {
                let seed = Complex64::new(WINDOW_START + (i as f64 + 0.5) * dx, (j as f64 + 0.5) * dy);
                let Some(wt) = newton(&act, seed, self) else { continue };
                let wt = reduce_to_window(wt);
                if !(wt.im > 0.0 && wt.im < self.im_cap) {
                    continue;
                }
                let cand = SaddlePoint::from_wt(&act, wt);
                if cand.residual >= self.residual_tol {
                    continue;
                }
                match roots.iter_mut().find(|r| circular_distance(r.wt, wt) < self.dedupe_tol) {
                    Some(r) if cand.residual < r.residual => *r = cand,
                    Some(_) => {}
                    None => roots.push(cand),
                }
            }
        }
        sort_canonical(&mut roots);
        mark_degenerate(&mut roots);
        roots
    }
}

/// Saddles with the default search settings.
pub fn find_saddles(cfg: &FieldConfig, p: f64) -> Vec<SaddlePoint> {
    SaddleSearch::default().run(cfg, p)
}

/// Like [`find_saddles`] but errors with a diagnostic if nothing converged.
pub fn require_saddles(cfg: &FieldConfig, p: f64, search: &SaddleSearch) -> Result<Vec<SaddlePoint>> {
    let roots = search.run(cfg, p);
    if roots.is_empty() {
        return Err(Error::NoSaddles(format!(
            "no root of S' with 0 < Im wt < {} (E0 = {}, theta = {:.4} rad, p = {p})",
            search.im_cap, cfg.e0, cfg.theta
        )));
    }
    Ok(roots)
}

/// Damped Newton iteration on `S'` in the variable `ωt`.
pub(crate) fn newton(act: &Action, seed: Complex64, opts: &SaddleSearch) -> Option<Complex64> {
    let w = act.omega();
    let ip = act.config().ip;
    let p = act.momentum();
    let eval = |tau: Complex64| {
        let t = tau / w;
        let k = p + act.vector_potential(t);
        (0.5 * k * k + ip, -k * act.electric_field(t) / w)
    };
    let mut tau = seed;
    let (mut f, mut df) = eval(tau);
    for _ in 0..opts.max_iter {
        if !f.is_finite() || df.norm() == 0.0 {
            return None;
        }
        let step = -f / df;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let cand = tau + step * lambda;
            let (fc, dfc) = eval(cand);
            if fc.norm() < f.norm() || fc.norm() < opts.residual_tol * 1e-3 {
                accepted = Some((cand, fc, dfc));
                break;
            }
            lambda *= 0.5;
        }
        let (cand, fc, dfc) = match accepted {
            Some(a) => a,
            // at the floating-point floor no step reduces |f| any further
            None if f.norm() < opts.residual_tol => return Some(tau),
            None => return None,
        };
        let moved = (cand - tau).norm();
        tau = cand;
        f = fc;
        df = dfc;
        if moved < opts.step_tol && f.norm() < opts.residual_tol {
            return Some(tau);
        }
        if tau.im.abs() > 50.0 {
            return None;
        }
    }
    (f.norm() < opts.residual_tol).then_some(tau)
}

/// Polish a root from a nearby starting point, without any window reduction.
pub(crate) fn polish(act: &Action, seed: Complex64) -> Option<Complex64> {
    newton(act, seed, &SaddleSearch::default())
}

/// Maps `Re ωt` into `[−π/2, 3π/2)`.
pub fn reduce_to_window(wt: Complex64) -> Complex64 {
    let mut re = (wt.re - WINDOW_START).rem_euclid(TAU) + WINDOW_START;
    if re >= WINDOW_START + TAU {
        re -= TAU;
    }
    Complex64::new(re, wt.im)
}

/// Distance in `ωt` treating `Re` as periodic.
pub fn circular_distance(a: Complex64, b: Complex64) -> f64 {
    let d = (a.re - b.re).rem_euclid(TAU);
    let dre = d.min(TAU - d);
    dre.hypot(a.im - b.im)
}

pub(crate) fn sort_canonical(roots: &mut [SaddlePoint]) {
    roots.sort_by(|a, b| a.wt.re.total_cmp(&b.wt.re).then(a.wt.im.total_cmp(&b.wt.im)));
}

pub(crate) fn mark_degenerate(roots: &mut [SaddlePoint]) {
    let n = roots.len();
    for i in 0..n {
        roots[i].degenerate = roots[i].order > 1
            || (0..n).any(|j| j != i && circular_distance(roots[i].wt, roots[j].wt) < COALESCENCE_GUARD);
    }
}

/// Closed-form saddles of the single-colour field `E cos(ωt)`.
///
/// Solves `sin(ωt_s) = (p ∓ i sqrt(2 Ip)) ω / E` and returns `(ωt_s, branch)`
/// in the canonical window, upper half-plane only.
pub fn analytic_saddles_monochromatic(e: f64, omega: f64, ip: f64, p: f64) -> Vec<(Complex64, Branch)> {
    single_harmonic_roots(-e / omega, 1, 0.0, ip, p)
}

/// Closed-form saddles when only one colour is present (θ = 0 or π/2).
pub fn monochromatic_saddles(cfg: &FieldConfig, p: f64) -> Result<Vec<(Complex64, Branch)>> {
    let h = cfg.harmonics();
    match h.as_slice() {
        [one] => Ok(single_harmonic_roots(one.amp, one.order, one.phase, cfg.ip, p)),
        _ => Err(Error::InvalidConfig(format!(
            "closed-form saddles need a single-colour field, got {} harmonics",
            h.len()
        ))),
    }
}

/// Roots of `p + c sin(nτ + φ) = ±iκ` with `0 < Im τ`.
fn single_harmonic_roots(c: f64, n: u32, phase: f64, ip: f64, p: f64) -> Vec<(Complex64, Branch)> {
    let kappa = (2.0 * ip).sqrt();
    let n = n as f64;
    let mut out = Vec::new();
    for branch in [Branch::Plus, Branch::Minus] {
        let w = (Complex64::new(0.0, branch.sign() * kappa) - p) / c;
        let u0 = w.asin();
        for u in [u0, PI - u0] {
            // τ = (u − φ + 2πm)/n; n distinct roots per period for each family
            for m in 0..(n as i64) {
                let tau = (u - phase + TAU * m as f64) / n;
                if tau.im > 0.0 {
                    out.push((reduce_to_window(tau), branch));
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    out
}
