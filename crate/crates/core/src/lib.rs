//! Saddle-point analysis of strong-field ionisation in a two-colour
//! (ω–2ω) field whose intensity is shifted from one colour to the other.
//!
//! The pipeline: [`field`] → [`action`] → [`saddle`] (roots, labels,
//! coalescence) → [`contour`] (which saddles the deformed contour passes
//! through) → [`amplitude`] (SPM spectra and yields) and [`trajectory`].

pub mod action;
pub mod amplitude;
pub mod contour;
pub mod error;
pub mod field;
pub mod quadrature;
pub mod saddle;
pub mod switchover;
pub mod table;
pub mod trajectory;
pub mod units;

/// Version of the engine, recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use action::{action, action_derivatives, Action, ActionEvaluation};
pub use amplitude::{
    direct_amplitude, orbit_yield, spectrum, spm_amplitude, yield_vs_gamma, OrbitAmplitude, SpectrumTable, SpmResult,
    YieldGrid, YieldRow,
};
pub use contour::{build_contour, contour_quadrature, ContourChain, PathEnd, SteepestPath};
pub use error::{Error, Result};
pub use field::{equal_amplitude_gamma, omega_for_equal_amplitude_gamma, FieldConfig, Harmonic};
pub use num_complex::Complex64;
pub use saddle::{
    analytic_saddles_monochromatic, find_coalescence, find_saddles, label_saddles, monochromatic_saddles,
    rstar_curve, track_saddles, Branch, CoalescencePoint, Label, RStarRow, SaddlePoint, SaddleSearch, SaddleSweep,
    SweepNode,
};
pub use switchover::{switchover, Switchover, SwitchoverRow};
pub use table::{Cell, SweepTable};
pub use trajectory::{trajectory, trajectory_band, TrajectoryBand, TrajectoryRecord};
pub use units::{convert_units, Unit};
