//! Steepest-descent contour through the saddle landscape.
//!
//! The amplitude integrand is `e^{−iS}`, whose modulus `e^{Im S}` grows into
//! the upper half-plane. The contour is therefore built for the conjugate
//! integrand `e^{+iS}` (equal to the conjugate of `e^{−iS}` on the real
//! axis) and the result conjugated at the end. Under that convention a
//! descent path keeps `Re S` fixed while `Im S` increases, and the valleys at
//! infinity are the sectors where `Im S → +∞`.
//!
//! Far from the real axis the highest harmonic `c sin(nτ + φ)` dominates and
//! `Im S ≈ −M cos X` with `X = 2n Re τ + 2φ`, `M > 0`. Valley `k` is the
//! sector around `X = π + 2πk`; there are `2n` of them per period.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::Action;
use crate::error::{Error, Result};
use crate::field::FieldConfig;
use crate::quadrature::{integrate_polyline, QuadResult};
use crate::saddle::{
    label_saddles, mark_degenerate, Label, SaddlePoint, SaddleSearch, COALESCENCE_GUARD, WINDOW_START,
};

/// Search cap used when collecting saddles for the contour.
pub const CONTOUR_IM_CAP: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub h_min: f64,
    pub h_max: f64,
    /// Local error per RK4 step (step doubling), `ωt` units.
    pub tol: f64,
    /// Required rise of `Im S` above `max(Im S_start, 0)` before a path
    /// counts as suppressed.
    pub floor: f64,
    pub stokes_radius: f64,
    pub max_steps: usize,
    /// Top harmonic must exceed the rest of `p + A` by this factor.
    pub dominance: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            h_min: 1e-3,
            h_max: 1e-1,
            tol: 1e-9,
            floor: 30.0,
            stokes_radius: 1e-4,
            max_steps: 50_000,
            dominance: 20.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PathEnd {
    /// Suppressed sector `Im S → +∞`, unwrapped index.
    Valley(i64),
    /// Sector `Im S → −∞` (ascent paths only).
    Hill(i64),
    /// Crossed the real axis at this `Re ωt`.
    RealAxis(f64),
    /// Ran into another saddle (index into the saddle list, period shift).
    Stokes { saddle: usize, shift: i64 },
}

/// One traced constant-`Re S` curve in the `ωt` plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteepestPath {
    /// Points up to the suppression floor (or the termination point).
    pub points: Vec<Complex64>,
    pub end: PathEnd,
    /// `Re S` on the curve.
    pub level: f64,
    /// Unit direction of the first step.
    pub direction: Complex64,
}

/// The action as a function of `τ = ωt`, with the geometry needed for tracing.
pub(crate) struct Landscape {
    act: Action,
    omega: f64,
    /// Dominant term `(|c|, n, φ)` of the vector potential at large `Im τ`.
    top: (f64, u32, f64),
    others: Vec<(f64, u32)>,
    p: f64,
    /// Saddle positions in `ωt` and their `Re S`.
    saddles: Vec<Complex64>,
    opts: TraceOptions,
}

impl Landscape {
    pub(crate) fn new(cfg: &FieldConfig, p: f64, saddles: &[SaddlePoint], opts: TraceOptions) -> Result<Self> {
        // merge equal orders into one effective term
        let mut by_order: BTreeMap<u32, Complex64> = BTreeMap::new();
        for h in cfg.harmonics() {
            *by_order.entry(h.order).or_default() += Complex64::from_polar(h.amp, h.phase);
        }
        let terms: Vec<(f64, u32, f64)> = by_order
            .into_iter()
            .filter(|(_, z)| z.norm() > 0.0)
            .map(|(n, z)| (z.norm(), n, z.arg()))
            .collect();
        let Some(&top) = terms.last() else {
            return Err(Error::Topology("vanishing field has no saddle landscape".into()));
        };
        Ok(Landscape {
            act: Action::new(cfg, p),
            omega: cfg.omega,
            top,
            others: terms[..terms.len() - 1].iter().map(|&(a, n, _)| (a, n)).collect(),
            p,
            saddles: saddles.iter().map(|s| s.wt).collect(),
            opts,
        })
    }

    pub(crate) fn s(&self, tau: Complex64) -> Complex64 {
        self.act.value(tau / self.omega)
    }

    /// `dS/dτ`.
    pub(crate) fn ds(&self, tau: Complex64) -> Complex64 {
        self.act.first(tau / self.omega) / self.omega
    }

    /// `d²S/dτ²`.
    pub(crate) fn d2s(&self, tau: Complex64) -> Complex64 {
        self.act.evaluate(tau / self.omega).d2s / (self.omega * self.omega)
    }

    pub(crate) fn valleys_per_period(&self) -> i64 {
        2 * self.top.1 as i64
    }

    /// Asymptotic sector coordinate `X`, if the top harmonic dominates at `tau`.
    fn sector_x(&self, tau: Complex64) -> Option<f64> {
        let y = tau.im;
        let (c, n, phi) = self.top;
        let lead = c * (n as f64 * y).exp();
        let rest = self.p.abs() + self.others.iter().map(|&(a, m)| a * (m as f64 * y).exp()).sum::<f64>();
        if y <= 0.0 || lead <= self.opts.dominance * rest {
            return None;
        }
        Some(2.0 * n as f64 * tau.re + 2.0 * phi)
    }

    fn flow(&self, tau: Complex64, sigma: f64) -> Complex64 {
        let g = self.ds(tau);
        Complex64::new(0.0, sigma) * g.conj() / g.norm()
    }

    fn rk4(&self, tau: Complex64, h: f64, sigma: f64) -> Complex64 {
        let k1 = self.flow(tau, sigma);
        let k2 = self.flow(tau + k1 * (0.5 * h), sigma);
        let k3 = self.flow(tau + k2 * (0.5 * h), sigma);
        let k4 = self.flow(tau + k3 * h, sigma);
        tau + (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0)
    }

    /// Newton projection onto `Re S = level` along the gradient of `Re S`.
    fn project(&self, mut tau: Complex64, level: f64) -> (Complex64, f64) {
        for _ in 0..4 {
            let s = self.s(tau);
            let miss = s.re - level;
            if miss.abs() <= 1e-14 * s.norm().max(1.0) {
                return (tau, miss);
            }
            let g = self.ds(tau);
            tau -= miss * g.conj() / g.norm_sqr();
        }
        (tau, self.s(tau).re - level)
    }

    /// Follows `Re S = const` from `start`; `sigma = +1` raises `Im S`.
    pub(crate) fn trace(
        &self,
        start: Complex64,
        first_dir: Option<Complex64>,
        sigma: f64,
        skip: Option<usize>,
    ) -> Result<SteepestPath> {
        let o = &self.opts;
        let s0 = self.s(start);
        let level = s0.re;
        let scale = s0.norm().max(1.0);
        let floor = if sigma > 0.0 {
            s0.im.max(0.0) + o.floor
        } else {
            s0.im.min(0.0) - o.floor
        };
        let mut points = vec![start];
        let mut tau = start;
        let direction;
        if let Some(d) = first_dir {
            let (t1, _) = self.project(start + d * 1e-3, level);
            tau = t1;
            points.push(tau);
            direction = d;
        } else {
            direction = self.flow(start, sigma);
        }
        let mut recording = true;
        let mut h = 1e-2;
        let mut steps = 0usize;
        while steps < o.max_steps {
            steps += 1;
            let full = self.rk4(tau, h, sigma);
            let half = self.rk4(self.rk4(tau, 0.5 * h, sigma), 0.5 * h, sigma);
            let err = (full - half).norm();
            if err > o.tol && h > 1e-7 {
                h *= 0.5;
                continue;
            }
            let (next, miss) = self.project(half, level);
            let allowed = 1e-6 * scale + 1e-12 * self.s(next).norm();
            if !(miss.abs() <= allowed) {
                if h > 1e-7 {
                    h *= 0.5;
                    continue;
                }
                return Err(Error::Trace {
                    reason: format!("lost the level set Re S = {level:.6} by {miss:.2e} at wt = {next:.6}"),
                    steps,
                });
            }
            // Stokes connection, or slow down when passing close to a saddle
            let mut shrink = None;
            let mut stokes = None;
            for (j, &sj) in self.saddles.iter().enumerate() {
                for m in -2i64..=2 {
                    if Some(j) == skip && m == 0 {
                        continue;
                    }
                    let d = (next - (sj + TAU * m as f64)).norm();
                    if d < o.stokes_radius {
                        stokes = Some((j, m));
                    } else if d < 4.0 * h && h > 1e-7 {
                        shrink = Some(d / 4.0);
                    }
                }
            }
            if let Some((saddle, shift)) = stokes {
                points.push(self.saddles[saddle] + TAU * shift as f64);
                return Ok(SteepestPath {
                    points,
                    end: PathEnd::Stokes { saddle, shift },
                    level,
                    direction,
                });
            }
            if let Some(hs) = shrink {
                if hs < h {
                    h = hs.max(1e-7);
                    continue;
                }
            }
            if next.im <= 0.0 && tau.im > 0.0 {
                let f = tau.im / (tau.im - next.im);
                let cross = tau + (next - tau) * f;
                points.push(Complex64::new(cross.re, 0.0));
                return Ok(SteepestPath {
                    points,
                    end: PathEnd::RealAxis(cross.re),
                    level,
                    direction,
                });
            }
            tau = next;
            let im = self.s(tau).im;
            if recording {
                points.push(tau);
                if (sigma > 0.0 && im >= floor) || (sigma < 0.0 && im <= floor) {
                    recording = false;
                }
            }
            if !recording {
                if let Some(x) = self.sector_x(tau) {
                    let beyond = if sigma > 0.0 { im >= floor } else { im <= floor };
                    if sigma > 0.0 && x.cos() < -0.5 && beyond {
                        let k = ((x - PI) / TAU).round() as i64;
                        return Ok(SteepestPath {
                            points,
                            end: PathEnd::Valley(k),
                            level,
                            direction,
                        });
                    }
                    if sigma < 0.0 && x.cos() > 0.5 && beyond {
                        let k = (x / TAU).round() as i64;
                        return Ok(SteepestPath {
                            points,
                            end: PathEnd::Hill(k),
                            level,
                            direction,
                        });
                    }
                }
            }
            if err < o.tol / 32.0 {
                h = (2.0 * h).min(o.h_max);
            }
        }
        Err(Error::Trace {
            reason: format!("no termination from wt = {start:.6} (sigma = {sigma})"),
            steps,
        })
    }
}

/// Both steepest-descent directions at a simple saddle, as angles in the `ωt` plane.
///
/// They solve `2φ + arg S'' = π/2 (mod 2π)` for the conjugate integrand and
/// differ by π.
pub fn descent_directions(saddle: &SaddlePoint, cfg: &FieldConfig, p: f64) -> Result<[f64; 2]> {
    let d2s = Action::new(cfg, p).evaluate(saddle.t).d2s;
    if d2s.norm() < 1e-9 {
        return Err(Error::DegenerateSaddle {
            re_wt: saddle.wt.re,
            im_wt: saddle.wt.im,
            d2s: d2s.norm(),
        });
    }
    let phi = 0.5 * (FRAC_PI_2 - d2s.arg());
    Ok([phi, phi + PI])
}

/// Traces one descent path from `saddle` in direction `phi`.
pub fn trace_descent_path(saddle: &SaddlePoint, phi: f64, cfg: &FieldConfig, p: f64) -> Result<SteepestPath> {
    let saddles = collect_saddles(cfg, p);
    let skip = saddles.iter().position(|s| (s.wt - saddle.wt).norm() < 1e-8);
    let land = Landscape::new(cfg, p, &saddles, TraceOptions::default())?;
    land.trace(saddle.wt, Some(Complex64::from_polar(1.0, phi)), 1.0, skip)
}

fn collect_saddles(cfg: &FieldConfig, p: f64) -> Vec<SaddlePoint> {
    SaddleSearch::default().with_im_cap(CONTOUR_IM_CAP).run(cfg, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentKind {
    /// From a window endpoint on the real axis into the first valley (or back).
    EndpointLeg,
    /// Descent paths through a saddle.
    Saddle { index: usize, shift: i64 },
    /// Straight connection between two points in the same valley.
    Valley,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    /// Polyline in `ωt`.
    pub points: Vec<Complex64>,
}

/// A saddle the chain passes through.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSaddle {
    pub index: usize,
    pub shift: i64,
    pub label: Label,
    /// Saddle position of the copy used, `ωt`.
    pub wt: Complex64,
    /// Direction angle in which the chain leaves the saddle.
    pub phi_out: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourChain {
    pub segments: Vec<Segment>,
    /// Real-axis window endpoints in `ωt`.
    pub start: Complex64,
    pub end: Complex64,
    pub contributing: Vec<ChainSaddle>,
    /// All saddles considered, with `contributes` filled in.
    pub saddles: Vec<SaddlePoint>,
    /// Descent-path pair per saddle (`None` if tracing failed).
    pub paths: Vec<Option<[SteepestPath; 2]>>,
    /// The left endpoint leg, up to its valley.
    pub left_leg: Vec<Complex64>,
    /// A contributing saddle lies within the coalescence guard of another.
    pub degenerate: bool,
    pub valleys_per_period: i64,
}

impl ContourChain {
    /// All points of the chain in order, consecutive duplicates removed.
    pub fn polyline(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = Vec::new();
        for seg in &self.segments {
            for &z in &seg.points {
                if out.last().map_or(true, |l| (l - z).norm() > 0.0) {
                    out.push(z);
                }
            }
        }
        out
    }

    pub fn contributing_labels(&self) -> Vec<Label> {
        let mut l: Vec<Label> = self.contributing.iter().map(|c| c.label).collect();
        l.sort();
        l
    }
}

fn valley_of(path: &SteepestPath) -> Option<i64> {
    match path.end {
        PathEnd::Valley(k) => Some(k),
        _ => None,
    }
}

fn shift_points(points: &[Complex64], m: i64) -> Vec<Complex64> {
    points.iter().map(|z| z + TAU * m as f64).collect()
}

/// Builds the steepest-descent chain homotopic to the real window
/// `[−π/2, 3π/2]` in `ωt` and marks the saddles it passes through.
pub fn build_contour(cfg: &FieldConfig, p: f64) -> Result<ContourChain> {
    build_contour_with(cfg, p, TraceOptions::default())
}

pub fn build_contour_with(cfg: &FieldConfig, p: f64, opts: TraceOptions) -> Result<ContourChain> {
    let mut saddles = collect_saddles(cfg, p);
    if saddles.is_empty() {
        return Err(Error::Topology(format!("no saddles below Im wt = {CONTOUR_IM_CAP}")));
    }
    // labels are cosmetic here; a failed continuation leaves them unassigned
    if label_saddles(cfg, p, &mut saddles).is_err() {
        saddles.iter_mut().for_each(|s| s.label = Label::Unassigned);
    }
    mark_degenerate(&mut saddles);
    let land = Landscape::new(cfg, p, &saddles, opts)?;
    let period_valleys = land.valleys_per_period();

    let paths: Vec<Option<[SteepestPath; 2]>> = saddles
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let d2 = land.d2s(s.wt);
            if d2.norm() < 1e-9 {
                return None;
            }
            let phi = 0.5 * (FRAC_PI_2 - d2.arg());
            let a = land.trace(s.wt, Some(Complex64::from_polar(1.0, phi)), 1.0, Some(i)).ok()?;
            let b = land.trace(s.wt, Some(Complex64::from_polar(1.0, phi + PI)), 1.0, Some(i)).ok()?;
            Some([a, b])
        })
        .collect();

    // left leg, continued through any saddle it runs into
    let x_l = Complex64::new(WINDOW_START, 0.0);
    let leg = land.trace(x_l, None, 1.0, None)?;
    let mut left_leg = leg.points.clone();
    let k_l = match leg.end {
        PathEnd::Valley(k) => k,
        PathEnd::Stokes { saddle, shift } => {
            let cont = paths[saddle]
                .as_ref()
                .ok_or_else(|| Error::Topology(format!("left leg hit saddle {saddle} whose paths failed")))?;
            left_leg.extend(shift_points(&cont[0].points, shift).into_iter().skip(1));
            valley_of(&cont[0]).map(|k| k + period_valleys * shift).ok_or_else(|| {
                Error::Topology(format!("left leg continues through saddle {saddle} but does not reach a valley"))
            })?
        }
        other => return Err(Error::Topology(format!("left endpoint leg ended at {other:?}"))),
    };
    let k_r = k_l + period_valleys;

    // valley graph: usable saddles and their periodic copies
    let mut edges: Vec<(i64, i64, usize, i64)> = Vec::new();
    for (i, pr) in paths.iter().enumerate() {
        let Some([a, b]) = pr else { continue };
        let (Some(ka), Some(kb)) = (valley_of(a), valley_of(b)) else { continue };
        if ka == kb {
            continue;
        }
        for m in -3i64..=3 {
            edges.push((ka + period_valleys * m, kb + period_valleys * m, i, m));
        }
    }
    let route = bfs(&edges, k_l, k_r).ok_or_else(|| {
        let summary: Vec<String> = saddles
            .iter()
            .zip(&paths)
            .map(|(s, pr)| match pr {
                Some([a, b]) => format!("{} {:.4} -> {:?} / {:?}", s.label, s.wt, a.end, b.end),
                None => format!("{} {:.4} -> trace failed", s.label, s.wt),
            })
            .collect();
        Error::Topology(format!(
            "no valley chain from {k_l} to {k_r}; saddles: [{}]",
            summary.join("; ")
        ))
    })?;

    let mut segments = vec![Segment {
        kind: SegmentKind::EndpointLeg,
        points: left_leg.clone(),
    }];
    let mut contributing = Vec::new();
    let mut valley = k_l;
    for &(i, m) in &route {
        let [a, b] = paths[i].as_ref().expect("routed saddles have paths");
        let base = period_valleys * m;
        let (into, out) = if valley_of(a).map(|k| k + base) == Some(valley) { (a, b) } else { (b, a) };
        let mut pts: Vec<Complex64> = shift_points(&into.points, m).into_iter().rev().collect();
        pts.extend(shift_points(&out.points, m).into_iter().skip(1));
        let prev_end = *segments.last().and_then(|s| s.points.last()).expect("non-empty chain");
        segments.push(Segment {
            kind: SegmentKind::Valley,
            points: vec![prev_end, pts[0]],
        });
        segments.push(Segment {
            kind: SegmentKind::Saddle { index: i, shift: m },
            points: pts,
        });
        contributing.push(ChainSaddle {
            index: i,
            shift: m,
            label: saddles[i].label,
            wt: saddles[i].wt + TAU * m as f64,
            phi_out: out.direction.arg(),
        });
        valley = valley_of(out).expect("routed path ends in a valley") + base;
    }
    let right_leg: Vec<Complex64> = shift_points(&left_leg, 1).into_iter().rev().collect();
    let prev_end = *segments.last().and_then(|s| s.points.last()).expect("non-empty chain");
    segments.push(Segment {
        kind: SegmentKind::Valley,
        points: vec![prev_end, right_leg[0]],
    });
    segments.push(Segment {
        kind: SegmentKind::EndpointLeg,
        points: right_leg,
    });

    for c in &contributing {
        saddles[c.index].contributes = true;
    }
    let degenerate = contributing.iter().any(|c| {
        saddles
            .iter()
            .enumerate()
            .any(|(j, s)| j != c.index && crate::saddle::circular_distance(s.wt, c.wt) < COALESCENCE_GUARD)
    });
    Ok(ContourChain {
        segments,
        start: x_l,
        end: x_l + TAU,
        contributing,
        saddles,
        paths,
        left_leg,
        degenerate,
        valleys_per_period: period_valleys,
    })
}

/// Shortest route through the valley graph; ties broken by edge order.
fn bfs(edges: &[(i64, i64, usize, i64)], from: i64, to: i64) -> Option<Vec<(usize, i64)>> {
    let mut prev: BTreeMap<i64, (i64, usize, i64)> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = vec![from];
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut route = Vec::new();
            let mut cur = to;
            while cur != from {
                let (u, i, m) = prev[&cur];
                route.push((i, m));
                cur = u;
            }
            route.reverse();
            return Some(route);
        }
        for &(a, b, i, m) in edges {
            let next = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !seen.contains(&next) {
                seen.push(next);
                prev.insert(next, (v, i, m));
                queue.push_back(next);
            }
        }
    }
    None
}

/// Tolerance for [`contour_quadrature`] and the real-axis oracle.
pub const QUADRATURE_REL_TOL: f64 = 1e-9;

/// `∫ e^{+iS} dt` along the chain (the conjugate integrand, no prefactor).
pub fn chain_integral(chain: &ContourChain, cfg: &FieldConfig, p: f64) -> QuadResult {
    let act = Action::new(cfg, p);
    let w = cfg.omega;
    let f = |tau: Complex64| (Complex64::i() * act.value(tau / w)).exp() / w;
    integrate_polyline(&f, &chain.polyline(), QUADRATURE_REL_TOL, 1e-15)
}

/// Amplitude `P ∫ e^{−iS} dt` over the window, evaluated along the chain.
pub fn contour_quadrature(chain: &ContourChain, cfg: &FieldConfig, p: f64) -> QuadResult {
    let mut r = chain_integral(chain, cfg, p);
    r.value = crate::amplitude::prefactor(0.0, cfg.ip) * r.value.conj();
    r
}

/// Contributing set decided the other way round: a saddle contributes when
/// one of its steepest-ascent paths crosses the real window.
pub fn contributing_by_ascent(cfg: &FieldConfig, p: f64) -> Result<Vec<(SaddlePoint, [PathEnd; 2])>> {
    let saddles = collect_saddles(cfg, p);
    let land = Landscape::new(cfg, p, &saddles, TraceOptions::default())?;
    saddles
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let d2 = land.d2s(s.wt);
            if d2.norm() < 1e-9 {
                return Err(Error::DegenerateSaddle {
                    re_wt: s.wt.re,
                    im_wt: s.wt.im,
                    d2s: d2.norm(),
                });
            }
            // ascent directions are the descent ones rotated by π/2
            let phi = 0.5 * (FRAC_PI_2 - d2.arg()) + FRAC_PI_2;
            let a = land.trace(s.wt, Some(Complex64::from_polar(1.0, phi)), -1.0, Some(i))?;
            let b = land.trace(s.wt, Some(Complex64::from_polar(1.0, phi + PI)), -1.0, Some(i))?;
            Ok((*s, [a.end, b.end]))
        })
        .collect()
}

/// `Im S` / `Re S` sampled on a regular grid over the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeGrid {
    pub nx: usize,
    pub ny: usize,
    pub im_max: f64,
    /// Row-major `(re_wt, im_wt, im_s, re_s)`, `x` fastest.
    pub cells: Vec<[f64; 4]>,
}

pub fn landscape(cfg: &FieldConfig, p: f64, nx: usize, ny: usize, im_max: f64) -> LandscapeGrid {
    let act = Action::new(cfg, p);
    let w = cfg.omega;
    let cells = (0..ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let y = im_max * (j as f64 + 0.5) / ny as f64;
            let act = &act;
            (0..nx).map(move |i| {
                let x = WINDOW_START + TAU * (i as f64 + 0.5) / nx as f64;
                let s = act.value(Complex64::new(x, y) / w);
                [x, y, s.im, s.re]
            })
        })
        .collect();
    LandscapeGrid { nx, ny, im_max, cells }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::action;
    use crate::quadrature::integrate_real;

    #[test]
    fn descent_direction_formula() {
        // S'' = i: 2φ + π/2 = π/2 gives φ ∈ {0, π}
        let d2 = Complex64::i();
        let phi = 0.5 * (FRAC_PI_2 - d2.arg());
        assert!(phi.abs() < 1e-15);
    }

    #[test]
    fn descent_directions_raise_im_s() {
        let cfg = FieldConfig::reference(45.0);
        for p in [-0.7, 0.0, 0.4] {
            let act = Action::new(&cfg, p);
            for s in crate::saddle::find_saddles(&cfg, p) {
                let dirs = descent_directions(&s, &cfg, p).unwrap();
                assert!(((dirs[1] - dirs[0]) - PI).abs() < 1e-15);
                let s0 = act.value(s.t).im;
                for phi in dirs {
                    let t = (s.wt + Complex64::from_polar(1e-3, phi)) / cfg.omega;
                    assert!(act.value(t).im > s0);
                }
            }
        }
    }

    #[test]
    fn monochromatic_chain() {
        let cfg = FieldConfig::reference(0.0);
        let chain = build_contour(&cfg, 0.0).unwrap();
        assert_eq!(chain.contributing_labels(), vec![Label::A, Label::D]);
        assert_eq!(chain.valleys_per_period, 2);
    }

    #[test]
    fn chain_is_continuous_and_anchored() {
        let cfg = FieldConfig::reference(45.0);
        let chain = build_contour(&cfg, 0.0).unwrap();
        assert_eq!(chain.start, Complex64::new(WINDOW_START, 0.0));
        assert_eq!(chain.segments[0].points[0], chain.start);
        let last = chain.segments.last().unwrap().points.last().copied().unwrap();
        assert!((last - chain.end).norm() < 1e-12);
        for w in chain.segments.windows(2) {
            let a = *w[0].points.last().unwrap();
            let b = w[1].points[0];
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn paths_stay_on_level_set_and_climb() {
        let cfg = FieldConfig::reference(25.0);
        let chain = build_contour(&cfg, 0.1).unwrap();
        let act = Action::new(&cfg, 0.1);
        for (s, pr) in chain.saddles.iter().zip(&chain.paths) {
            let Some(pair) = pr else { continue };
            let s0 = act.value(s.t);
            for path in pair {
                let mut prev = f64::NEG_INFINITY;
                for &z in &path.points {
                    let v = act.value(z / cfg.omega);
                    assert!((v.re - s0.re).abs() < 1e-6 * s0.norm().max(1.0));
                    assert!(v.im >= prev - 1e-9);
                    prev = v.im;
                }
            }
        }
    }

    #[test]
    fn deformation_invariance_at_equal_amplitudes() {
        let cfg = FieldConfig::reference(45.0);
        let chain = build_contour(&cfg, 0.0).unwrap();
        let on_chain = chain_integral(&chain, &cfg, 0.0).value;
        let act = Action::new(&cfg, 0.0);
        let f = |t: Complex64| (Complex64::i() * act.value(t)).exp();
        let real = integrate_real(&f, WINDOW_START / cfg.omega, (WINDOW_START + TAU) / cfg.omega, 1e-12, 0.0).value;
        assert!((on_chain - real).norm() < 1e-7 * real.norm(), "{on_chain} vs {real}");
    }

    #[test]
    fn landscape_grid_shape() {
        let g = landscape(&FieldConfig::reference(45.0), 0.0, 20, 10, 3.0);
        assert_eq!(g.cells.len(), 200);
        assert!(g.cells[0][0] > WINDOW_START && g.cells[0][1] > 0.0);
        let [x, y, ims, res] = g.cells[57];
        let cfg = FieldConfig::reference(45.0);
        let s = action(&cfg, 0.0, Complex64::new(x, y) / cfg.omega);
        assert_eq!((ims, res), (s.im, s.re));
        // row-major in Re
        assert!(g.cells[1][0] > g.cells[0][0] && g.cells[1][1] == g.cells[0][1]);
    }
}
