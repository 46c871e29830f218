//! θ sweep of the contributing-saddle set.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::build_contour;
use crate::error::Result;
use crate::field::FieldConfig;
use crate::saddle::{find_coalescence, CoalescencePoint, Label, SaddlePoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchoverRow {
    pub theta: f64,
    pub ratio: f64,
    pub p: f64,
    /// Labelled saddles with `contributes` filled in.
    pub saddles: Vec<SaddlePoint>,
    pub contributing: Vec<Label>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Switchover {
    pub rows: Vec<SwitchoverRow>,
    /// Present when the sweep has more than one angle, `p = 0`, and θ* lies inside it.
    pub coalescence: Option<CoalescencePoint>,
}

/// Contour classification at each mixing angle (radians) of `thetas`.
pub fn switchover(base: &FieldConfig, thetas: &[f64], p: f64) -> Result<Switchover> {
    let rows = thetas
        .par_iter()
        .map(|&th| {
            let cfg = base.with_theta(th)?;
            let chain = build_contour(&cfg, p)?;
            let mut saddles = chain.saddles.clone();
            saddles.sort_by(|a, b| a.label.cmp(&b.label).then(a.wt.re.total_cmp(&b.wt.re)));
            Ok(SwitchoverRow {
                theta: th,
                ratio: cfg.ratio(),
                p,
                contributing: chain.contributing_labels(),
                degenerate: chain.degenerate,
                saddles,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lo = thetas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = thetas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let coalescence = if thetas.len() > 1 && p == 0.0 {
        find_coalescence(base, 0.0)
            .ok()
            .filter(|c| c.theta_star >= lo && c.theta_star <= hi)
    } else {
        None
    };
    Ok(Switchover { rows, coalescence })
}
