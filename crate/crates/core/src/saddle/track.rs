//! Parameter continuation and A–D labelling.
//!
//! Labels are fixed once, on a nearly pure second-harmonic field
//! (θ = 85°, p = 0) where the four events sit close to Re ωt = −π/2, 0,
//! π/2, π. From there the roots are carried by predictor/corrector
//! continuation, first in θ and then in p, to the requested configuration.
//! Labels never depend on the direction of a user sweep.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    circular_distance, find_saddles, mark_degenerate, polish, reduce_to_window, Branch, Label, SaddlePoint,
    SaddleSearch, COALESCENCE_GUARD,
};
use crate::action::Action;
use crate::error::{Error, Result};
use crate::field::FieldConfig;

/// Mixing angle at which labels are assigned.
pub const ANCHOR_THETA_DEG: f64 = 85.0;
/// Search cap used at the anchor; B and C climb above the default cap at small θ.
pub const TRACK_IM_CAP: f64 = 6.0;
/// Roots that leave through the top of the plane are dropped from a track.
const DROP_IM: f64 = 15.0;
/// Smallest θ a track is carried to; below it B and C are far above any cap.
const THETA_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackedRoot {
    /// `ωt`, not reduced to the window.
    pub wt: Complex64,
    pub label: Label,
    pub branch: Branch,
    /// Within the coalescence guard of another root at this node.
    pub degenerate: bool,
}

/// One accepted continuation node.
#[derive(Debug, Clone, PartialEq)]
pub struct PathState {
    pub s: f64,
    pub roots: Vec<TrackedRoot>,
}

/// Step control for [`Continuation::run`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Continuation {
    pub max_step: f64,
    pub min_step: f64,
    pub guard: f64,
    /// Largest move of a root in one step, `ωt` units.
    pub max_move: f64,
}

impl Continuation {
    pub fn theta() -> Self {
        Continuation {
            max_step: 0.5f64.to_radians(),
            min_step: 1e-9,
            guard: COALESCENCE_GUARD,
            max_move: 0.1,
        }
    }

    pub fn momentum() -> Self {
        Continuation {
            max_step: 0.02,
            min_step: 1e-9,
            guard: COALESCENCE_GUARD,
            max_move: 0.1,
        }
    }

    /// Carries `start` (valid at `s0`) through every value of `stops`.
    ///
    /// `stops` must be monotone and all on one side of `s0`. Returns the
    /// state at each stop and the full list of accepted nodes.
    pub fn run<F>(&self, at: F, start: Vec<TrackedRoot>, s0: f64, stops: &[f64]) -> Result<(Vec<PathState>, Vec<PathState>)>
    where
        F: Fn(f64) -> (FieldConfig, f64),
    {
        let mut roots = start;
        let mut s = s0;
        let mut h = self.max_step;
        let mut out = Vec::with_capacity(stops.len());
        let mut trace = vec![PathState { s, roots: roots.clone() }];
        for &stop in stops {
            let dir = if stop >= s { 1.0 } else { -1.0 };
            while (stop - s) * dir > 1e-14 {
                let h_try = h.min((stop - s).abs());
                let s_new = if h_try == (stop - s).abs() { stop } else { s + dir * h_try };
                let (cfg, p) = at(s_new);
                let forced = h_try <= self.min_step;
                match self.step(&Action::new(&cfg, p), &roots, forced) {
                    Some(next) => {
                        roots = next;
                        s = s_new;
                        trace.push(PathState { s, roots: roots.clone() });
                        h = (h_try * 1.5).min(self.max_step);
                    }
                    None if forced => {
                        return Err(Error::Continuation(format!("step size underflow at s = {s:.6e}")));
                    }
                    None => h = h_try * 0.5,
                }
            }
            // remaining gap is below 1e-14; report the stop exactly
            s = stop;
            out.push(PathState { s, roots: roots.clone() });
        }
        Ok((out, trace))
    }

    fn step(&self, act: &Action, roots: &[TrackedRoot], forced: bool) -> Option<Vec<TrackedRoot>> {
        let n = roots.len();
        let sep: Vec<f64> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| circular_distance(roots[i].wt, roots[j].wt))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let pairs = guard_pairs(roots, self.guard);
        let in_pair = |i: usize| pairs.iter().any(|&(a, b)| a == i || b == i);

        let mut next: Vec<TrackedRoot> = roots.to_vec();
        for i in (0..n).filter(|&i| !in_pair(i)) {
            let w = polish(act, roots[i].wt)?;
            let moved = (w - roots[i].wt).norm();
            if moved > self.max_move || moved > 0.3 * sep[i] {
                return None;
            }
            next[i] = self.refresh(act, roots[i], w, false);
        }
        for &(i, j) in &pairs {
            let (a, b) = (roots[i], roots[j]);
            let found = local_pair(act, a.wt, b.wt, self.guard)?;
            let (c0, c1) = (found[0], found[1]);
            // compare separation vectors so a pair drifting together stays cheap to follow
            let rel_old = a.wt - b.wt;
            let rel_new = c0 - c1;
            let same = (rel_new - rel_old).norm();
            let swap = (rel_new + rel_old).norm();
            let (wi, wj) = if same.min(swap) < 0.5 * same.max(swap) {
                if same <= swap {
                    (c0, c1)
                } else {
                    (c1, c0)
                }
            } else {
                if !forced && (same.max(swap) > 0.0) && (a.wt - b.wt).norm() > 1e-3 * self.guard {
                    // try a shorter step before resorting to the tie-break rule
                    return None;
                }
                // identity is ambiguous: the root first in canonical order gets the earlier label
                let (first, second) = if canonical_before(c0, c1) { (c0, c1) } else { (c1, c0) };
                if a.label <= b.label {
                    (first, second)
                } else {
                    (second, first)
                }
            };
            if (wi - a.wt).norm().max((wj - b.wt).norm()) > self.max_move {
                return None;
            }
            next[i] = self.refresh(act, a, wi, true);
            next[j] = self.refresh(act, b, wj, true);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if circular_distance(next[i].wt, next[j].wt) < 1e-9 {
                    return None;
                }
            }
        }
        let flags: Vec<bool> = (0..n)
            .map(|i| (0..n).any(|j| j != i && circular_distance(next[i].wt, next[j].wt) < self.guard))
            .collect();
        for (r, f) in next.iter_mut().zip(flags) {
            r.degenerate |= f;
        }
        next.retain(|r| r.wt.im < DROP_IM);
        Some(next)
    }

    fn refresh(&self, act: &Action, old: TrackedRoot, wt: Complex64, degenerate: bool) -> TrackedRoot {
        let k = act.momentum() + act.vector_potential(wt / act.omega());
        TrackedRoot {
            wt,
            label: old.label,
            branch: if k.im >= 0.0 { Branch::Plus } else { Branch::Minus },
            degenerate,
        }
    }
}

/// Pairs of roots closer than `guard`, closest first, each root used once.
fn guard_pairs(roots: &[TrackedRoot], guard: f64) -> Vec<(usize, usize)> {
    let mut cand = Vec::new();
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            let d = circular_distance(roots[i].wt, roots[j].wt);
            if d < guard {
                cand.push((d, i, j));
            }
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut used = vec![false; roots.len()];
    let mut out = Vec::new();
    for (_, i, j) in cand {
        if !used[i] && !used[j] {
            used[i] = true;
            used[j] = true;
            out.push((i, j));
        }
    }
    out
}

/// Both roots of a near-coalescing pair, from a small local seed grid.
fn local_pair(act: &Action, a: Complex64, b: Complex64, guard: f64) -> Option<[Complex64; 2]> {
    let mid = 0.5 * (a + b);
    let half = 2.0 * guard;
    let mut seeds = vec![a, b];
    for i in 0..7 {
        for j in 0..7 {
            let off = Complex64::new(-half + half * i as f64 / 3.0, -half + half * j as f64 / 3.0);
            seeds.push(mid + off);
        }
    }
    let mut found: Vec<Complex64> = Vec::new();
    for s in seeds {
        let Some(w) = polish(act, s) else { continue };
        if (w - mid).norm() > half + 0.5 * (a - b).norm() {
            continue;
        }
        if found.iter().all(|f| (f - w).norm() > 1e-8) {
            found.push(w);
        }
    }
    if found.len() == 2 {
        Some([found[0], found[1]])
    } else {
        None
    }
}

/// Ordering used when continuation cannot tell two roots apart: by `Im` when
/// they are stacked vertically, otherwise by `Re`.
pub(crate) fn canonical_before(x: Complex64, y: Complex64) -> bool {
    let dre = wrap_pi(x.re - y.re);
    let dim = x.im - y.im;
    if dre.abs() < dim.abs() {
        dim < 0.0
    } else {
        dre < 0.0
    }
}

fn wrap_pi(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

/// Anchor roots with labels A–D assigned by proximity to the four
/// second-harmonic event times.
fn anchor_roots(cfg: &FieldConfig) -> Result<Vec<TrackedRoot>> {
    let anchor = cfg.with_theta(ANCHOR_THETA_DEG.to_radians())?;
    let found = SaddleSearch::default().with_im_cap(TRACK_IM_CAP).run(&anchor, 0.0);
    if found.is_empty() {
        return Err(Error::NoSaddles(format!(
            "no saddles at the labelling anchor (E0 = {}, omega = {})",
            anchor.e0, anchor.omega
        )));
    }
    let mut roots: Vec<TrackedRoot> = found
        .iter()
        .map(|s| TrackedRoot {
            wt: s.wt,
            label: Label::Unassigned,
            branch: s.branch,
            degenerate: s.degenerate,
        })
        .collect();
    if roots.len() == 4 && cfg.n1 == 1 && cfg.n2 == 2 {
        let shift = -0.5 * cfg.phi2;
        let targets: Vec<f64> = (0..4).map(|k| shift - FRAC_PI_2 + k as f64 * FRAC_PI_2).collect();
        let mut best = (f64::INFINITY, [0usize; 4]);
        for perm in permutations4() {
            let cost: f64 = (0..4)
                .map(|k| {
                    let d = (roots[perm[k]].wt.re - targets[k]).rem_euclid(2.0 * PI);
                    d.min(2.0 * PI - d)
                })
                .sum();
            if cost < best.0 {
                best = (cost, perm);
            }
        }
        for (k, &idx) in best.1.iter().enumerate() {
            roots[idx].label = Label::ALL[k];
        }
    }
    Ok(roots)
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let v = [a, b, c, d];
                    if (0..4).all(|i| (0..4).all(|j| i == j || v[i] != v[j])) {
                        out.push(v);
                    }
                }
            }
        }
    }
    out
}

/// Labelled roots at `(cfg, p)`, carried from the anchor.
pub fn tracked_roots(cfg: &FieldConfig, p: f64) -> Result<Vec<TrackedRoot>> {
    let start = anchor_roots(cfg)?;
    let base = *cfg;
    let theta_end = cfg.theta.max(THETA_FLOOR);
    let (at_theta, _) = Continuation::theta().run(
        |th| (base.with_theta(th).expect("theta stays in range"), 0.0),
        start,
        ANCHOR_THETA_DEG.to_radians(),
        &[theta_end],
    )?;
    let roots = at_theta.into_iter().next().map(|s| s.roots).unwrap_or_default();
    if p == 0.0 {
        return Ok(roots);
    }
    let mid = base.with_theta(theta_end)?;
    let (at_p, _) = Continuation::momentum().run(|q| (mid, q), roots, 0.0, &[p])?;
    Ok(at_p.into_iter().next().map(|s| s.roots).unwrap_or_default())
}

/// Copies labels from `tracked` onto `saddles` by nearest match of the same branch.
pub(crate) fn apply_labels(saddles: &mut [SaddlePoint], tracked: &[TrackedRoot], tol: f64) {
    for s in saddles.iter_mut() {
        let best = tracked
            .iter()
            .filter(|r| r.branch == s.branch)
            .map(|r| (circular_distance(r.wt, s.wt), r))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match best {
            Some((d, r)) if d < tol => {
                s.label = r.label;
                s.degenerate |= r.degenerate;
            }
            _ => s.label = Label::Unassigned,
        }
    }
}

/// Assigns A–D labels to `saddles` found at `(cfg, p)`.
pub fn label_saddles(cfg: &FieldConfig, p: f64, saddles: &mut [SaddlePoint]) -> Result<()> {
    let tracked = tracked_roots(cfg, p)?;
    let tol = if cfg.theta < THETA_FLOOR { 1e-2 } else { 1e-6 };
    apply_labels(saddles, &tracked, tol);
    Ok(())
}

/// Found-and-labelled saddles at one sweep node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepNode {
    pub theta: f64,
    pub omega: f64,
    pub p: f64,
    pub saddles: Vec<SaddlePoint>,
}

impl SweepNode {
    pub fn get(&self, label: Label) -> Option<&SaddlePoint> {
        self.saddles.iter().find(|s| s.label == label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleSweep {
    pub nodes: Vec<SweepNode>,
}

/// Finds and labels the saddles at every configuration of a sweep.
///
/// Sweeps in θ alone share one continuation from the anchor; anything else
/// is labelled node by node.
pub fn track_saddles(sweep: &[FieldConfig], p: f64) -> Result<SaddleSweep> {
    if sweep.is_empty() {
        return Ok(SaddleSweep { nodes: Vec::new() });
    }
    let base = sweep[0];
    let theta_only = sweep
        .iter()
        .all(|c| FieldConfig { theta: base.theta, ..*c } == base);
    let tracked: Vec<Vec<TrackedRoot>> = if theta_only && p == 0.0 {
        theta_tracks(&base, sweep.iter().map(|c| c.theta).collect())?
    } else {
        sweep.iter().map(|c| tracked_roots(c, p)).collect::<Result<_>>()?
    };
    let mut nodes = Vec::with_capacity(sweep.len());
    for (cfg, tr) in sweep.iter().zip(tracked) {
        let mut saddles = find_saddles(cfg, p);
        if saddles.is_empty() {
            return Err(Error::NoSaddles(format!("theta = {:.6} rad, E0 = {}", cfg.theta, cfg.e0)));
        }
        let tol = if cfg.theta < THETA_FLOOR { 1e-2 } else { 1e-6 };
        apply_labels(&mut saddles, &tr, tol);
        mark_degenerate(&mut saddles);
        nodes.push(SweepNode {
            theta: cfg.theta,
            omega: cfg.omega,
            p,
            saddles,
        });
    }
    Ok(SaddleSweep { nodes })
}

/// Tracked roots at each θ in `thetas` (any order), for p = 0.
fn theta_tracks(base: &FieldConfig, thetas: Vec<f64>) -> Result<Vec<Vec<TrackedRoot>>> {
    let anchor = ANCHOR_THETA_DEG.to_radians();
    let start = anchor_roots(base)?;
    let at = |th: f64| (base.with_theta(th).expect("theta stays in range"), 0.0);
    let mut below: Vec<f64> = thetas.iter().map(|t| t.max(THETA_FLOOR)).filter(|&t| t <= anchor).collect();
    let mut above: Vec<f64> = thetas.iter().copied().filter(|&t| t > anchor).collect();
    below.sort_by(|a, b| b.total_cmp(a));
    below.dedup();
    above.sort_by(|a, b| a.total_cmp(b));
    above.dedup();
    let (down, _) = Continuation::theta().run(at, start.clone(), anchor, &below)?;
    let (up, _) = Continuation::theta().run(at, start, anchor, &above)?;
    let lookup = |th: f64| -> Vec<TrackedRoot> {
        let key = if th <= anchor { th.max(THETA_FLOOR) } else { th };
        down.iter()
            .chain(up.iter())
            .find(|s| s.s == key)
            .map(|s| s.roots.clone())
            .unwrap_or_default()
    };
    Ok(thetas.iter().map(|&t| lookup(t)).collect())
}

/// Full θ trace from the anchor down to `theta_min`, every accepted node.
pub(crate) fn theta_trace(base: &FieldConfig, theta_min: f64, max_step: f64) -> Result<Vec<PathState>> {
    let start = anchor_roots(base)?;
    let cont = Continuation {
        max_step,
        ..Continuation::theta()
    };
    let (_, trace) = cont.run(
        |th| (base.with_theta(th).expect("theta stays in range"), 0.0),
        start,
        ANCHOR_THETA_DEG.to_radians(),
        &[theta_min],
    )?;
    Ok(trace)
}

/// The tracked root with a given label, reduced to the window.
pub fn labelled(roots: &[TrackedRoot], label: Label) -> Option<Complex64> {
    roots.iter().find(|r| r.label == label).map(|r| reduce_to_window(r.wt))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(theta_deg: f64) -> SweepNode {
        let cfg = FieldConfig::reference(theta_deg);
        track_saddles(&[cfg], 0.0).unwrap().nodes.remove(0)
    }

    #[test]
    fn labels_at_equal_amplitudes() {
        let n = node(45.0);
        let a = n.get(Label::A).unwrap().wt;
        let b = n.get(Label::B).unwrap().wt;
        let c = n.get(Label::C).unwrap().wt;
        let d = n.get(Label::D).unwrap().wt;
        assert!(a.re < -0.9 && a.re > -1.0);
        assert!(b.re.abs() < 1e-8);
        assert!((c.re + a.re).abs() < 1e-8 && (c.im - a.im).abs() < 1e-8);
        assert!((d.re - PI).abs() < 1e-8);
        assert_eq!(n.get(Label::A).unwrap().branch, Branch::Minus);
        assert_eq!(n.get(Label::B).unwrap().branch, Branch::Plus);
        assert_eq!(n.get(Label::C).unwrap().branch, Branch::Minus);
        assert_eq!(n.get(Label::D).unwrap().branch, Branch::Plus);
    }

    #[test]
    fn labels_below_coalescence() {
        let n = node(15.0);
        let a = n.get(Label::A).unwrap().wt;
        let c = n.get(Label::C).unwrap().wt;
        let b = n.get(Label::B).unwrap().wt;
        assert!(a.re.abs() < 1e-8 && c.re.abs() < 1e-8 && b.re.abs() < 1e-8);
        // A is the low root on the imaginary axis, C and B sit above it
        assert!((a.im - 0.7731).abs() < 1e-3, "{a}");
        assert!((c.im - 1.7644).abs() < 1e-3, "{c}");
        assert!((b.im - 2.1218).abs() < 1e-3, "{b}");
    }

    #[test]
    fn monochromatic_end() {
        let n = node(0.0);
        assert_eq!(n.saddles.len(), 2);
        assert!(n.get(Label::A).unwrap().wt.re.abs() < 1e-10);
        assert!((n.get(Label::D).unwrap().wt.re - PI).abs() < 1e-10);
    }

    #[test]
    fn sweep_direction_does_not_matter() {
        let up: Vec<_> = [8.0, 15.0, 25.0, 45.0].iter().map(|&d| FieldConfig::reference(d)).collect();
        let down: Vec<_> = up.iter().rev().copied().collect();
        let a = track_saddles(&up, 0.0).unwrap();
        let mut b = track_saddles(&down, 0.0).unwrap();
        b.nodes.reverse();
        assert_eq!(a, b);
    }

    #[test]
    fn free_particle_sweep_fails() {
        let cfg = FieldConfig::new(0.0, 0.057, 0.5, 0.5).unwrap();
        assert!(matches!(track_saddles(&[cfg], 0.0), Err(Error::NoSaddles(_))));
    }

    #[test]
    fn momentum_continuation_keeps_labels() {
        let cfg = FieldConfig::reference(45.0);
        let mut s = find_saddles(&cfg, 0.5);
        label_saddles(&cfg, 0.5, &mut s).unwrap();
        let labels: Vec<Label> = s.iter().map(|x| x.label).collect();
        for l in Label::ALL {
            assert_eq!(labels.iter().filter(|&&x| x == l).count(), 1, "{labels:?}");
        }
    }

    #[test]
    fn tie_break_order() {
        assert!(canonical_before(Complex64::new(0.0, 0.5), Complex64::new(0.0, 1.0)));
        assert!(canonical_before(Complex64::new(-0.3, 1.0), Complex64::new(0.3, 1.0)));
        assert!(!canonical_before(Complex64::new(0.3, 1.0), Complex64::new(-0.3, 1.0)));
    }
}
