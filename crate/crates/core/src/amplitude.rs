//! Saddle-point amplitudes, spectra and per-orbit yields.
//!
//! Each contributing saddle adds the Gaussian term
//! `P · sqrt(2π/|S''|) · e^{−iφ_out} · e^{−i conj(S_s)}`, the conjugate of
//! the steepest-descent estimate of `∫ conj(P) e^{iS}` through the saddle
//! (see [`crate::contour`] for why the conjugate integrand is deformed).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::Action;
use crate::contour::{build_contour, ChainSaddle, ContourChain, QUADRATURE_REL_TOL};
use crate::error::{Error, Result};
use crate::field::FieldConfig;
use crate::quadrature::{integrate_polyline, integrate_real, QuadResult};
use crate::saddle::{Label, WINDOW_START};

/// Short-range (hydrogenic) prefactor `i (2 Ip)^{1/4} / sqrt(π)`; independent of `k`.
pub fn prefactor(_k: f64, ip: f64) -> Complex64 {
    Complex64::new(0.0, (2.0 * ip).powf(0.25) / std::f64::consts::PI.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitAmplitude {
    pub label: Label,
    pub p: f64,
    pub psi: Complex64,
    /// Saddle position used, `ωt`.
    pub wt: Complex64,
    pub degenerate: bool,
}

/// One Gaussian term for a saddle the chain passes through.
pub fn spm_contribution(saddle: &ChainSaddle, cfg: &FieldConfig, p: f64, degenerate: bool) -> Result<OrbitAmplitude> {
    let act = Action::new(cfg, p);
    let t = saddle.wt / cfg.omega;
    let ev = act.evaluate(t);
    let curv = ev.d2s.norm();
    if curv < 1e-9 {
        return Err(Error::DegenerateSaddle {
            re_wt: saddle.wt.re,
            im_wt: saddle.wt.im,
            d2s: curv,
        });
    }
    let width = (2.0 * std::f64::consts::PI / curv).sqrt();
    let phase = Complex64::from_polar(1.0, -saddle.phi_out) * (-Complex64::i() * ev.s.conj()).exp();
    Ok(OrbitAmplitude {
        label: saddle.label,
        p,
        psi: prefactor(0.0, cfg.ip) * width * phase,
        wt: saddle.wt,
        degenerate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpmResult {
    pub p: f64,
    pub total: Complex64,
    /// Every contributing saddle, including excluded ones (flagged by `excluded`).
    pub orbits: Vec<OrbitAmplitude>,
    pub excluded: Vec<Label>,
    pub degenerate: bool,
}

impl SpmResult {
    pub fn orbit(&self, label: Label) -> Option<&OrbitAmplitude> {
        self.orbits.iter().find(|o| o.label == label)
    }

    pub fn contributing(&self) -> Vec<Label> {
        self.orbits.iter().map(|o| o.label).collect()
    }
}

/// SPM terms for a chain that has already been built.
pub fn spm_from_chain(chain: &ContourChain, cfg: &FieldConfig, p: f64, exclude: &[Label]) -> Result<SpmResult> {
    let mut orbits = Vec::with_capacity(chain.contributing.len());
    let mut total = Complex64::new(0.0, 0.0);
    for c in &chain.contributing {
        let degenerate = chain.saddles[c.index].degenerate;
        let o = spm_contribution(c, cfg, p, degenerate)?;
        if !exclude.contains(&o.label) {
            total += o.psi;
        }
        orbits.push(o);
    }
    Ok(SpmResult {
        p,
        total,
        orbits,
        excluded: exclude.to_vec(),
        degenerate: chain.degenerate,
    })
}

/// `Ψ_SPM(p)`: sum over the saddles on the contour, minus any excluded labels.
pub fn spm_amplitude(cfg: &FieldConfig, p: f64, exclude: &[Label]) -> Result<SpmResult> {
    let chain = build_contour(cfg, p)?;
    spm_from_chain(&chain, cfg, p, exclude)
}

/// `P ∫ e^{−iS} dt` along the real axis over one window.
pub fn direct_amplitude(cfg: &FieldConfig, p: f64) -> QuadResult {
    let act = Action::new(cfg, p);
    let f = |t: Complex64| (-Complex64::i() * act.value(t)).exp();
    let a = WINDOW_START / cfg.omega;
    let b = a + cfg.period();
    let mut r = integrate_real(&f, a, b, QUADRATURE_REL_TOL * 1e-2, 1e-15);
    r.value *= prefactor(0.0, cfg.ip);
    r
}

/// Exact per-cycle amplitude: the window integral with the two endpoint
/// legs removed, i.e. the sum of the thimble integrals the SPM approximates.
///
/// With `ΔS = S(t + T) − S(t)` real, the right leg is the left leg shifted by
/// one period, so `window = thimbles + (1 − e^{−iΔS}) · leg`.
pub fn cell_amplitude(chain: &ContourChain, cfg: &FieldConfig, p: f64) -> Complex64 {
    let act = Action::new(cfg, p);
    let w = cfg.omega;
    let f = |tau: Complex64| (Complex64::i() * act.value(tau / w)).exp() / w;
    let leg = integrate_polyline(&f, &chain.left_leg, QUADRATURE_REL_TOL * 1e-2, 1e-15).value;
    let leg = prefactor(0.0, cfg.ip) * leg.conj();
    let ds = act.cycle_phase();
    direct_amplitude(cfg, p).value - (1.0 - Complex64::from_polar(1.0, -ds)) * leg
}

/// Relative discrepancy `||Ψ_SPM| − |Ψ_cell|| / |Ψ_cell|` at one momentum.
pub fn spm_relative_error(cfg: &FieldConfig, p: f64) -> Result<(f64, bool)> {
    let chain = build_contour(cfg, p)?;
    let spm = spm_from_chain(&chain, cfg, p, &[])?;
    let exact = cell_amplitude(&chain, cfg, p);
    Ok(((spm.total.norm() - exact.norm()).abs() / exact.norm(), spm.degenerate))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub cfg: FieldConfig,
    pub rows: Vec<SpmResult>,
}

impl SpectrumTable {
    pub fn momenta(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.p).collect()
    }

    /// `|Ψ_s|` per row, zero where the orbit does not contribute.
    pub fn magnitudes(&self, label: Label) -> Vec<f64> {
        self.rows.iter().map(|r| r.orbit(label).map_or(0.0, |o| o.psi.norm())).collect()
    }

    pub fn degenerate_fraction(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().filter(|r| r.degenerate).count() as f64 / self.rows.len() as f64
    }
}

/// Evenly spaced grid `[lo, hi]` with `n` points.
pub fn momentum_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// SPM spectrum on a sorted momentum grid, evaluated in parallel.
pub fn spectrum(cfg: &FieldConfig, p_grid: &[f64], exclude: &[Label]) -> Result<SpectrumTable> {
    if p_grid.windows(2).any(|w| !(w[0] < w[1])) || p_grid.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidConfig("momentum grid must be finite and strictly increasing".into()));
    }
    let rows = p_grid
        .par_iter()
        .map(|&p| spm_amplitude(cfg, p, exclude))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumTable { cfg: *cfg, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitYield {
    pub label: Label,
    pub value: f64,
    /// Grid points dropped because the saddle pair was near coalescence.
    pub excluded_points: usize,
    /// More than 5% of the grid was dropped.
    pub low_confidence: bool,
}

/// `Y_s = ∫ |Ψ_s|² dp` by the trapezoid rule over non-degenerate grid points.
pub fn orbit_yield(table: &SpectrumTable, label: Label) -> OrbitYield {
    let pts: Vec<(f64, f64)> = table
        .rows
        .iter()
        .filter(|r| !r.degenerate)
        .map(|r| (r.p, r.orbit(label).map_or(0.0, |o| o.psi.norm_sqr())))
        .collect();
    let value = pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
    let excluded = table.rows.len() - pts.len();
    OrbitYield {
        label,
        value,
        excluded_points: excluded,
        low_confidence: excluded as f64 > 0.05 * table.rows.len() as f64,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YieldRow {
    pub gamma: f64,
    pub omega: f64,
    pub theta: f64,
    /// Momentum range actually integrated, `[−p_max, p_max]`.
    pub p_max: f64,
    /// `Y_A … Y_D`.
    pub yields: [f64; 4],
    /// Row-normalised `Y_s / Σ Y`.
    pub fractions: [f64; 4],
    pub excluded_points: usize,
    pub low_confidence: bool,
}

/// Momentum grid settings for yields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YieldGrid {
    pub p_max: f64,
    pub count: usize,
    /// Widen the range until `|Ψ|` at both edges is below this fraction of its peak.
    pub edge_ratio: f64,
    /// Fix the range instead of widening it.
    pub fixed: bool,
}

impl Default for YieldGrid {
    fn default() -> Self {
        YieldGrid {
            p_max: 2.0,
            count: 801,
            edge_ratio: 1e-3,
            fixed: false,
        }
    }
}

/// Per-orbit yields of one configuration on a symmetric grid that is
/// widened until the spectrum has decayed at the edges.
pub fn yields_for(cfg: &FieldConfig, grid: &YieldGrid) -> Result<YieldRow> {
    let a_peak = (0..256)
        .map(|i| cfg.vector_potential(Complex64::from(cfg.period() * i as f64 / 256.0)).re.abs())
        .fold(0.0, f64::max);
    let mut p_max = if grid.fixed { grid.p_max } else { grid.p_max.max(1.25 * a_peak) };
    let mut table;
    let mut tries = 0;
    loop {
        table = spectrum(cfg, &momentum_grid(-p_max, p_max, grid.count), &[])?;
        let tot: Vec<f64> = table.rows.iter().map(|r| r.total.norm()).collect();
        let peak = tot.iter().copied().fold(0.0, f64::max);
        let edge = tot[0].max(*tot.last().unwrap());
        tries += 1;
        if grid.fixed || edge <= grid.edge_ratio * peak || tries >= 5 {
            break;
        }
        p_max *= 1.4;
    }
    let ys: Vec<OrbitYield> = Label::ALL.iter().map(|&l| orbit_yield(&table, l)).collect();
    let yields = [ys[0].value, ys[1].value, ys[2].value, ys[3].value];
    let sum: f64 = yields.iter().sum();
    let fractions = yields.map(|y| if sum > 0.0 { y / sum } else { 0.0 });
    Ok(YieldRow {
        gamma: cfg.keldysh_gamma()?,
        omega: cfg.omega,
        theta: cfg.theta,
        p_max,
        yields,
        fractions,
        excluded_points: ys[0].excluded_points,
        low_confidence: ys[0].low_confidence,
    })
}

/// Yields versus γ, realised by changing ω at fixed `Ip` and `I0`.
pub fn yield_vs_gamma(ip: f64, i0: f64, gammas: &[f64], theta: f64, grid: &YieldGrid) -> Result<Vec<YieldRow>> {
    gammas
        .iter()
        .map(|&g| {
            let probe = FieldConfig::new(i0.sqrt(), 1.0, theta, ip)?;
            let cfg = probe.with_omega(probe.omega_for_gamma(g)?)?;
            yields_for(&cfg, grid)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hydrogen_prefactor() {
        let pf = prefactor(0.0, 0.5);
        assert_eq!(pf.re, 0.0);
        assert_relative_eq!(pf.im, 0.564_19, max_relative = 1e-5);
        assert_eq!(prefactor(1.0, 0.5), pf);
        // P⁴π² = 2 Ip · i⁴
        assert_relative_eq!((pf.powi(4) * std::f64::consts::PI.powi(2)).re, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_field_window_integral() {
        let cfg = FieldConfig::new(0.0, 0.057, 0.3, 0.5).unwrap();
        let p = 0.2;
        let e = 0.5 + 0.5 * p * p;
        let a = WINDOW_START / cfg.omega;
        let b = a + cfg.period();
        let exact = prefactor(0.0, 0.5) * ((-Complex64::i() * e * b).exp() - (-Complex64::i() * e * a).exp())
            / (-Complex64::i() * e);
        let got = direct_amplitude(&cfg, p).value;
        assert!((got - exact).norm() < 1e-10);
    }

    #[test]
    fn monochromatic_terms_have_equal_magnitude() {
        let cfg = FieldConfig::reference(0.0);
        let r = spm_amplitude(&cfg, 0.0, &[]).unwrap();
        assert_eq!(r.orbits.len(), 2);
        assert_relative_eq!(r.orbits[0].psi.norm(), r.orbits[1].psi.norm(), max_relative = 1e-9);
    }

    #[test]
    fn exclusion_drops_the_term() {
        let cfg = FieldConfig::reference(45.0);
        let all = spm_amplitude(&cfg, 0.0, &[]).unwrap();
        let no_d = spm_amplitude(&cfg, 0.0, &[Label::D]).unwrap();
        let d = all.orbit(Label::D).unwrap().psi;
        assert!((all.total - d - no_d.total).norm() < 1e-14);
    }

    #[test]
    fn grid_helper() {
        let g = momentum_grid(-2.0, 2.0, 801);
        assert_eq!(g.len(), 801);
        assert_eq!(g[400], 0.0);
        assert_eq!(g[800], 2.0);
    }
}
