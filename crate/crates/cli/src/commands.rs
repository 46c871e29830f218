//! One function per subcommand. Each writes its tables under `cfg.out` and
//! returns the paths in a fixed order.

use std::path::PathBuf;

use switchover_core::amplitude::{momentum_grid, orbit_yield, spectrum, yield_vs_gamma, YieldGrid};
use switchover_core::contour::{build_contour, landscape, SegmentKind};
use switchover_core::saddle::rstar_curve;
use switchover_core::table::{Cell, SweepTable};
use switchover_core::trajectory::{trajectory_band, TrajectoryRecord};
use switchover_core::units::{convert_units, Unit};
use switchover_core::{action, switchover, Complex64, Label};

use crate::{CliResult, RunConfig};

/// Default mixing angles of the switchover sweep in degrees: 0, 1, …, 90.
pub fn default_thetas() -> Vec<f64> {
    (0..=90).map(|d| d as f64).collect()
}

/// Default γ list for the yield sweep (≈ 330–3000 nm at 4e14 W/cm²).
pub const DEFAULT_YIELD_GAMMAS: [f64; 8] = [0.2, 0.3, 0.4, 0.5, 0.675, 0.9, 1.2, 1.5];

/// Default γ list for R*(γ): 25 points log-spaced over [0.05, 5].
pub fn default_rstar_gammas() -> Vec<f64> {
    (0..25).map(|i| 0.05 * 100f64.powf(i as f64 / 24.0)).collect()
}

/// Momentum for the single-momentum commands: `--p-min` if given, else 0.
fn single_momentum(cfg: &RunConfig) -> f64 {
    cfg.p_range.map_or(0.0, |r| r.0)
}

fn label_list(labels: &[Label]) -> String {
    let s: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
    s.join(";")
}

fn labels_cell(labels: &[Label]) -> Cell {
    Cell::Text(label_list(labels))
}

pub fn cmd_landscape(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let f = &cfg.field;
    let p = single_momentum(cfg);
    let nx = cfg.grid_res;
    let ny = (cfg.grid_res / 2).max(2);
    let im_max = 3.0;
    let chain = build_contour(f, p)?;

    let mut grid = SweepTable::new(
        "landscape",
        &[("re_wt", "rad"), ("im_wt", "rad"), ("imS", "a.u."), ("reS", "a.u.")],
    );
    cfg.describe(&mut grid, "landscape");
    grid.meta("p_au", p).meta("nx", nx).meta("ny", ny).meta("im_wt_max", im_max);
    for c in landscape(f, p, nx, ny, im_max).cells {
        grid.push(c.iter().map(|&x| Cell::Num(x)).collect())?;
    }

    let mut saddles = SweepTable::new(
        "saddles",
        &[
            ("label", "-"),
            ("branch", "-"),
            ("re_wt", "rad"),
            ("im_wt", "rad"),
            ("reS", "a.u."),
            ("imS", "a.u."),
            ("residual", "a.u."),
            ("order", "-"),
            ("contributes", "-"),
            ("degenerate", "-"),
        ],
    );
    cfg.describe(&mut saddles, "landscape");
    saddles.meta("p_au", p).meta("contributing", label_list(&chain.contributing_labels()));
    let mut sorted = chain.saddles.clone();
    sorted.sort_by(|a, b| a.label.cmp(&b.label).then(a.wt.re.total_cmp(&b.wt.re)));
    for s in &sorted {
        let sv = action(f, p, s.t);
        saddles.push(vec![
            s.label.to_string().into(),
            s.branch.to_string().into(),
            s.wt.re.into(),
            s.wt.im.into(),
            sv.re.into(),
            sv.im.into(),
            s.residual.into(),
            (s.order as i64).into(),
            s.contributes.into(),
            s.degenerate.into(),
        ])?;
    }

    let mut contour = SweepTable::new(
        "contour",
        &[("path", "-"), ("kind", "-"), ("label", "-"), ("re_wt", "rad"), ("im_wt", "rad")],
    );
    cfg.describe(&mut contour, "landscape");
    contour.meta("p_au", p).meta("valleys_per_period", chain.valleys_per_period);
    let mut id = 0i64;
    let mut push_path = |t: &mut SweepTable, kind: &str, label: String, pts: &[Complex64]| -> CliResult<()> {
        for z in pts {
            t.push(vec![id.into(), kind.into(), label.clone().into(), z.re.into(), z.im.into()])?;
        }
        id += 1;
        Ok(())
    };
    for seg in &chain.segments {
        let (kind, label) = match seg.kind {
            SegmentKind::EndpointLeg => ("endpoint_leg", "-".to_string()),
            SegmentKind::Saddle { index, .. } => ("saddle", chain.saddles[index].label.to_string()),
            SegmentKind::Valley => ("valley", "-".to_string()),
        };
        push_path(&mut contour, kind, label, &seg.points)?;
    }
    for (s, paths) in chain.saddles.iter().zip(&chain.paths) {
        for path in paths.iter().flatten() {
            push_path(&mut contour, "descent", s.label.to_string(), &path.points)?;
        }
    }

    println!("contributing saddles at p = {p}: {:?}", chain.contributing_labels());
    Ok(vec![
        cfg.write("landscape", &grid)?,
        cfg.write("saddles", &saddles)?,
        cfg.write("contour", &contour)?,
    ])
}

pub fn cmd_switchover(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let degrees = cfg.thetas_deg.clone().unwrap_or_else(default_thetas);
    let thetas: Vec<f64> = degrees.iter().map(|d| d.to_radians()).collect();
    let p = single_momentum(cfg);
    let sw = switchover(&cfg.field, &thetas, p)?;

    let mut cols: Vec<(String, &str)> = vec![
        ("theta_deg".into(), "deg"),
        ("ratio".into(), "-"),
        ("contributing_count".into(), "-"),
        ("contributing".into(), "-"),
        ("degenerate".into(), "-"),
    ];
    for l in Label::ALL {
        cols.push((format!("re_wt_{l}"), "rad"));
        cols.push((format!("im_wt_{l}"), "rad"));
        cols.push((format!("contributes_{l}"), "-"));
    }
    let cols_ref: Vec<(&str, &str)> = cols.iter().map(|(n, u)| (n.as_str(), *u)).collect();
    let mut t = SweepTable::new("switchover", &cols_ref);
    cfg.describe(&mut t, "switchover");
    t.meta("p_au", p);
    match &sw.coalescence {
        Some(c) => {
            t.meta("theta_star_deg", switchover_core::table::format_float(c.theta_star.to_degrees()))
                .meta("r_star", switchover_core::table::format_float(c.r_star))
                .meta("re_wt_star", switchover_core::table::format_float(c.wt_star.re))
                .meta("im_wt_star", switchover_core::table::format_float(c.wt_star.im));
        }
        None => {
            t.meta("coalescence", "none");
        }
    }
    for (row, deg) in sw.rows.iter().zip(&degrees) {
        let mut cells: Vec<Cell> = vec![
            (*deg).into(),
            row.ratio.into(),
            row.contributing.len().into(),
            labels_cell(&row.contributing),
            row.degenerate.into(),
        ];
        for l in Label::ALL {
            match row.saddles.iter().find(|s| s.label == l) {
                Some(s) => cells.extend([s.wt.re.into(), s.wt.im.into(), s.contributes.into()]),
                None => cells.extend([f64::NAN.into(), f64::NAN.into(), false.into()]),
            }
        }
        t.push(cells)?;
    }

    match &sw.coalescence {
        Some(c) => println!(
            "coalescence: theta* = {:.4} deg, R* = {:.4}, wt* = {:.5}{:+.5}i",
            c.theta_star.to_degrees(),
            c.r_star,
            c.wt_star.re,
            c.wt_star.im
        ),
        None => println!("coalescence: none in sweep"),
    }
    let switches = sw.rows.windows(2).filter(|w| w[0].contributing.len() != w[1].contributing.len()).count();
    println!("{} angles, contributing count changes {switches} time(s)", sw.rows.len());
    Ok(vec![cfg.write("switchover", &t)?])
}

pub fn cmd_spectrum(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let (lo, hi) = cfg.p_range.unwrap_or((-2.0, 2.0));
    let n = cfg.p_count.unwrap_or(801);
    let table = spectrum(&cfg.field, &momentum_grid(lo, hi, n), &cfg.exclude)?;

    let mut cols: Vec<(String, &str)> = vec![
        ("p".into(), "a.u."),
        ("abs_total".into(), "a.u."),
        ("re_total".into(), "a.u."),
        ("im_total".into(), "a.u."),
    ];
    for l in Label::ALL {
        cols.push((format!("abs_{l}"), "a.u."));
        cols.push((format!("re_{l}"), "a.u."));
        cols.push((format!("im_{l}"), "a.u."));
    }
    cols.push(("contributing".into(), "-"));
    cols.push(("degenerate".into(), "-"));
    let cols_ref: Vec<(&str, &str)> = cols.iter().map(|(n, u)| (n.as_str(), *u)).collect();
    let mut t = SweepTable::new("spectrum", &cols_ref);
    cfg.describe(&mut t, "spectrum");
    t.meta("p_min", lo).meta("p_max", hi).meta("p_count", n);
    t.meta(
        "excluded_from_yields",
        "grid points flagged degenerate (contributing saddle within the coalescence guard)",
    );
    for l in Label::ALL {
        let y = orbit_yield(&table, l);
        t.meta(&format!("yield_{l}"), switchover_core::table::format_float(y.value));
        if l == Label::A {
            t.meta("yield_excluded_points", y.excluded_points).meta("yield_low_confidence", y.low_confidence);
        }
    }
    for r in &table.rows {
        let mut cells: Vec<Cell> = vec![r.p.into(), r.total.norm().into(), r.total.re.into(), r.total.im.into()];
        for l in Label::ALL {
            let z = r.orbit(l).map_or(Complex64::new(0.0, 0.0), |o| o.psi);
            cells.extend([z.norm().into(), z.re.into(), z.im.into()]);
        }
        cells.push(labels_cell(&r.contributing()));
        cells.push(r.degenerate.into());
        t.push(cells)?;
    }
    println!("spectrum: {} momenta in [{lo}, {hi}]", table.rows.len());
    Ok(vec![cfg.write("spectrum", &t)?])
}

pub fn cmd_yields(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let gammas = cfg.gammas.clone().unwrap_or_else(|| DEFAULT_YIELD_GAMMAS.to_vec());
    let mut grid = YieldGrid::default();
    if let Some((lo, hi)) = cfg.p_range {
        grid.p_max = lo.abs().max(hi.abs());
    }
    if let Some(n) = cfg.p_count {
        grid.count = n;
    }
    let rows = yield_vs_gamma(cfg.field.ip, cfg.i0, &gammas, cfg.field.theta, &grid)?;

    let mut cols: Vec<(String, &str)> = vec![
        ("gamma".into(), "-"),
        ("omega".into(), "a.u."),
        ("wavelength".into(), "nm"),
        ("theta_deg".into(), "deg"),
        ("p_max".into(), "a.u."),
    ];
    for l in Label::ALL {
        cols.push((format!("Y_{l}"), "a.u."));
    }
    for l in Label::ALL {
        cols.push((format!("frac_{l}"), "-"));
    }
    cols.push(("excluded_points".into(), "-"));
    cols.push(("low_confidence".into(), "-"));
    let cols_ref: Vec<(&str, &str)> = cols.iter().map(|(n, u)| (n.as_str(), *u)).collect();
    let mut t = SweepTable::new("yields", &cols_ref);
    cfg.describe(&mut t, "yields");
    t.meta("p_count", grid.count)
        .meta("edge_ratio", grid.edge_ratio)
        .meta("gamma_realised_by", "omega at fixed intensity and Ip");
    for r in &rows {
        let mut cells: Vec<Cell> = vec![
            r.gamma.into(),
            r.omega.into(),
            convert_units(r.omega, Unit::FrequencyAu, Unit::WavelengthNm)?.into(),
            r.theta.to_degrees().into(),
            r.p_max.into(),
        ];
        cells.extend(r.yields.iter().map(|&y| Cell::Num(y)));
        cells.extend(r.fractions.iter().map(|&y| Cell::Num(y)));
        cells.push(r.excluded_points.into());
        cells.push(r.low_confidence.into());
        t.push(cells)?;
        println!(
            "gamma = {:.4}: Y_B/sum = {:.4e}, Y_D/sum = {:.4}",
            r.gamma, r.fractions[1], r.fractions[3]
        );
    }
    Ok(vec![cfg.write("yields", &t)?])
}

pub fn cmd_rstar(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let gammas = cfg.gammas.clone().unwrap_or_else(default_rstar_gammas);
    let rows = rstar_curve(&gammas, cfg.field.ip, cfg.i0)?;
    let mut t = SweepTable::new(
        "rstar",
        &[
            ("gamma", "-"),
            ("omega", "a.u."),
            ("theta_star_deg", "deg"),
            ("r_star", "-"),
            ("re_wt_star", "rad"),
            ("im_wt_star", "rad"),
            ("asymptote_large_gamma", "-"),
            ("asymptote_small_gamma", "-"),
            ("leading_large_gamma", "-"),
            ("leading_small_gamma", "-"),
        ],
    );
    cfg.describe(&mut t, "rstar");
    t.meta("gamma_convention", "4 omega sqrt(Ip / 5 I0), realised by omega")
        .meta("asymptote_large_gamma", "1/(4 gamma)")
        .meta("asymptote_small_gamma", "1 - (135/32)^(1/3) gamma^(3/2)")
        .meta("leading_large_gamma", "1/(sqrt(10) gamma)")
        .meta("leading_small_gamma", "1 - (135/32)^(1/3) gamma^(2/3)");
    for r in &rows {
        t.push(vec![
            r.gamma.into(),
            r.omega.into(),
            r.theta_star.to_degrees().into(),
            r.r_star.into(),
            r.wt_star.re.into(),
            r.wt_star.im.into(),
            r.large_gamma.into(),
            r.small_gamma.into(),
            r.large_gamma_leading.into(),
            r.small_gamma_leading.into(),
        ])?;
        println!("gamma = {:.4}: R* = {:.5}", r.gamma, r.r_star);
    }
    Ok(vec![cfg.write("rstar", &t)?])
}

pub fn cmd_trajectories(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let (lo, hi) = cfg.p_range.unwrap_or((-0.05, 0.05));
    let n = cfg.p_count.unwrap_or(11);
    let mut momenta = momentum_grid(lo, hi, n);
    // the band always carries its p = 0 member when 0 is inside the range
    if lo <= 0.0 && hi >= 0.0 && !momenta.contains(&0.0) {
        momenta.push(0.0);
        momenta.sort_by(f64::total_cmp);
    }
    let f = &cfg.field;
    let mut traj = SweepTable::new(
        "trajectories",
        &[("wt", "rad"), ("re_x", "a.u."), ("im_x", "a.u."), ("label", "-"), ("p", "a.u.")],
    );
    cfg.describe(&mut traj, "trajectories");
    traj.meta("t_end", "Re t_s + 2 periods");
    let mut exits = SweepTable::new(
        "trajectory_exits",
        &[("label", "-"), ("p", "a.u."), ("re_wt_s", "rad"), ("im_wt_s", "rad"), ("x_exit", "a.u.")],
    );
    cfg.describe(&mut exits, "trajectories");
    let push = |traj: &mut SweepTable, exits: &mut SweepTable, r: &TrajectoryRecord| -> CliResult<()> {
        for (t, x) in r.t_grid.iter().zip(&r.x) {
            traj.push(vec![(t * f.omega).into(), x.re.into(), x.im.into(), r.label.to_string().into(), r.p.into()])?;
        }
        let wt = r.t_s * f.omega;
        exits.push(vec![r.label.to_string().into(), r.p.into(), wt.re.into(), wt.im.into(), r.x_exit.into()])?;
        Ok(())
    };
    for l in Label::ALL {
        let band = trajectory_band(l, f, &momenta, None)?;
        if band.truncated {
            let m: Vec<String> = band.missing.iter().map(|p| p.to_string()).collect();
            traj.meta(&format!("band_{l}_truncated"), m.join(";"));
        }
        for r in &band.records {
            push(&mut traj, &mut exits, r)?;
        }
    }
    println!("trajectories: {} momenta per orbit", momenta.len());
    Ok(vec![cfg.write("trajectories", &traj)?, cfg.write("trajectory_exits", &exits)?])
}
