//! Contour construction checked against two independent oracles: the
//! real-axis integral (Cauchy) and the steepest-ascent classification.

use switchover_core::contour::{contributing_by_ascent, PathEnd};
use switchover_core::{build_contour, contour_quadrature, direct_amplitude, FieldConfig};

#[test]
fn chain_integral_equals_real_axis_integral() {
    let samples = [
        (0.0, 0.0),
        (5.0, 0.4),
        (8.0, 0.0),
        (12.0, -0.8),
        (15.0, 0.0),
        (19.0, 0.2),
        (20.0, 0.0),
        (25.0, 1.1),
        (45.0, 0.0),
        (45.0, -1.5),
        (60.0, 0.6),
        (80.0, 0.0),
        (90.0, -0.3),
    ];
    for (th, p) in samples {
        let cfg = FieldConfig::reference(th);
        let chain = build_contour(&cfg, p).unwrap();
        let along = contour_quadrature(&chain, &cfg, p);
        let real = direct_amplitude(&cfg, p);
        let rel = (along.value - real.value).norm() / real.value.norm();
        assert!(rel < 1e-6, "theta = {th}, p = {p}: rel = {rel:.3e}");
    }
}

/// A saddle lies on the descent chain exactly when one of its ascent paths
/// comes down onto the real axis.
#[test]
fn ascent_paths_agree_with_chain() {
    for (th, p) in [(8.0, 0.0), (15.0, 0.3), (25.0, 0.0), (45.0, 0.0), (45.0, 0.8), (80.0, -0.5)] {
        let cfg = FieldConfig::reference(th);
        let chain = build_contour(&cfg, p).unwrap();
        let dual = contributing_by_ascent(&cfg, p).unwrap();
        for (s, ends) in dual {
            let hits_axis = ends.iter().any(|e| matches!(e, PathEnd::RealAxis(_)));
            let on_chain = chain.saddles.iter().find(|c| (c.wt - s.wt).norm() < 1e-9).unwrap().contributes;
            assert_eq!(hits_axis, on_chain, "theta = {th}, p = {p}, saddle {} ends {ends:?}", s.wt);
        }
    }
}

#[test]
fn contributing_counts_across_the_switchover() {
    for (th, n) in [(8.0, 2), (15.0, 2), (25.0, 4), (45.0, 4), (80.0, 4)] {
        let chain = build_contour(&FieldConfig::reference(th), 0.0).unwrap();
        assert_eq!(chain.contributing.len(), n, "theta = {th}");
    }
}
