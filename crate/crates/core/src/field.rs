//! Two-colour linearly polarised field, analytic in complex time.
//!
//! The field is `E(t) = E1 cos(n1 ωt) − E2 cos(n2 ωt + φ2)` with
//! `E1 = E0 cos θ`, `E2 = E0 sin θ`. The vector potential is the zero-mean
//! antiderivative `A = −∫E dt`; every term is a pure sine of an integer
//! harmonic, so no integration constant is needed for any `φ2`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{convert_units, Unit};

/// One term `amp · sin(order · ωt + phase)` of the vector potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub amp: f64,
    pub order: u32,
    pub phase: f64,
}

impl Harmonic {
    #[inline]
    fn arg(&self, omega: f64, t: Complex64) -> Complex64 {
        t * (self.order as f64 * omega) + self.phase
    }
}

/// Full physical scenario, atomic units throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    /// Total field amplitude, `E0 = sqrt(I0)`.
    pub e0: f64,
    /// Fundamental angular frequency.
    pub omega: f64,
    /// Mixing angle in radians, `[0, π/2]`.
    pub theta: f64,
    /// Relative phase of the second colour.
    pub phi2: f64,
    pub n1: u32,
    pub n2: u32,
    /// Ionisation potential.
    pub ip: f64,
}

impl FieldConfig {
    /// ω–2ω field with zero relative phase.
    pub fn new(e0: f64, omega: f64, theta: f64, ip: f64) -> Result<Self> {
        let cfg = FieldConfig {
            e0,
            omega,
            theta,
            phi2: 0.0,
            n1: 1,
            n2: 2,
            ip,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Builds a configuration from laboratory units (W/cm², nm, degrees, a.u. for `ip`).
    pub fn from_lab(intensity_wcm2: f64, wavelength_nm: f64, theta_deg: f64, ip: f64) -> Result<Self> {
        let i0 = convert_units(intensity_wcm2, Unit::IntensityWcm2, Unit::IntensityAu)?;
        let omega = convert_units(wavelength_nm, Unit::WavelengthNm, Unit::FrequencyAu)?;
        Self::new(i0.sqrt(), omega, theta_deg.to_radians(), ip)
    }

    /// The scenario of the colour-switchover study: 4e14 W/cm², 800 nm, hydrogen.
    pub fn reference(theta_deg: f64) -> Self {
        Self::from_lab(4e14, 800.0, theta_deg, 0.5).expect("reference parameters are valid")
    }

    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        self.theta = theta;
        self.validate()?;
        Ok(self)
    }

    /// Sets the mixing angle from the amplitude ratio `R = E2/E1 = tan θ`.
    pub fn with_ratio(self, ratio: f64) -> Result<Self> {
        if !(ratio >= 0.0) {
            return Err(Error::InvalidConfig(format!("amplitude ratio {ratio} must be >= 0")));
        }
        self.with_theta(ratio.atan())
    }

    pub fn with_phase(mut self, phi2: f64) -> Result<Self> {
        self.phi2 = phi2;
        self.validate()?;
        Ok(self)
    }

    pub fn with_orders(mut self, n1: u32, n2: u32) -> Result<Self> {
        self.n1 = n1;
        self.n2 = n2;
        self.validate()?;
        Ok(self)
    }

    pub fn with_omega(mut self, omega: f64) -> Result<Self> {
        self.omega = omega;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return bad(format!("omega = {} must be positive", self.omega));
        }
        if !(self.ip > 0.0) || !self.ip.is_finite() {
            return bad(format!("Ip = {} must be positive", self.ip));
        }
        if !(self.e0 >= 0.0) || !self.e0.is_finite() {
            return bad(format!("E0 = {} must be non-negative", self.e0));
        }
        if !(0.0..=FRAC_PI_2 + 1e-12).contains(&self.theta) {
            return bad(format!("theta = {} rad outside [0, pi/2]", self.theta));
        }
        if self.n1 == 0 || self.n2 == 0 {
            return bad("harmonic orders must be positive".into());
        }
        if !self.phi2.is_finite() {
            return bad("phi2 must be finite".into());
        }
        Ok(())
    }

    pub fn e1(&self) -> f64 {
        self.e0 * self.theta.cos()
    }

    pub fn e2(&self) -> f64 {
        self.e0 * self.theta.sin()
    }

    pub fn ratio(&self) -> f64 {
        self.theta.tan()
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn intensity(&self) -> f64 {
        self.e0 * self.e0
    }

    /// Vector-potential terms with non-zero amplitude.
    pub fn harmonics(&self) -> Vec<Harmonic> {
        let mut h = Vec::with_capacity(2);
        // cos(π/2) is 6e-17, not 0
        let e1 = if (self.theta - FRAC_PI_2).abs() < 1e-15 { 0.0 } else { self.e1() };
        let e2 = self.e2();
        if e1 != 0.0 {
            h.push(Harmonic {
                amp: -e1 / (self.n1 as f64 * self.omega),
                order: self.n1,
                phase: 0.0,
            });
        }
        if e2 != 0.0 {
            h.push(Harmonic {
                amp: e2 / (self.n2 as f64 * self.omega),
                order: self.n2,
                phase: self.phi2,
            });
        }
        h
    }

    /// ∂/∂θ of the vector-potential terms (same orders and phases).
    pub fn harmonics_dtheta(&self) -> Vec<Harmonic> {
        vec![
            Harmonic {
                amp: self.e0 * self.theta.sin() / (self.n1 as f64 * self.omega),
                order: self.n1,
                phase: 0.0,
            },
            Harmonic {
                amp: self.e0 * self.theta.cos() / (self.n2 as f64 * self.omega),
                order: self.n2,
                phase: self.phi2,
            },
        ]
    }

    pub fn electric_field(&self, t: Complex64) -> Complex64 {
        field_of(&self.harmonics(), self.omega, t)
    }

    pub fn vector_potential(&self, t: Complex64) -> Complex64 {
        potential_of(&self.harmonics(), self.omega, t)
    }

    /// dE/dt.
    pub fn field_derivative(&self, t: Complex64) -> Complex64 {
        self.harmonics()
            .iter()
            .map(|h| {
                let k = h.order as f64 * self.omega;
                h.amp * k * k * h.arg(self.omega, t).sin()
            })
            .sum()
    }

    /// An antiderivative of A(t) (the excursion up to a constant).
    pub fn potential_integral(&self, t: Complex64) -> Complex64 {
        self.harmonics()
            .iter()
            .map(|h| -h.amp * h.arg(self.omega, t).cos() / (h.order as f64 * self.omega))
            .sum()
    }

    /// Cycle-averaged quiver energy `Σ E_j² / (4 n_j² ω²)`.
    pub fn ponderomotive_energy(&self) -> f64 {
        let w1 = self.n1 as f64 * self.omega;
        let w2 = self.n2 as f64 * self.omega;
        self.e1().powi(2) / (4.0 * w1 * w1) + self.e2().powi(2) / (4.0 * w2 * w2)
    }

    /// Keldysh parameter `sqrt(Ip / 2Up)`.
    pub fn keldysh_gamma(&self) -> Result<f64> {
        let up = self.ponderomotive_energy();
        if !(up > 0.0) {
            return Err(Error::InvalidConfig(
                "Keldysh parameter undefined for a vanishing field (Up = 0)".into(),
            ));
        }
        Ok((self.ip / (2.0 * up)).sqrt())
    }

    /// Frequency that realises the Keldysh parameter `gamma` at fixed `E0`, `θ`, `Ip`.
    pub fn omega_for_gamma(&self, gamma: f64) -> Result<f64> {
        if !(gamma > 0.0) || self.e0 <= 0.0 {
            return Err(Error::InvalidConfig(format!("cannot realise gamma = {gamma}")));
        }
        let w = (self.theta.cos() / self.n1 as f64).powi(2) + (self.theta.sin() / self.n2 as f64).powi(2);
        Ok(gamma * self.e0 * (w / (2.0 * self.ip)).sqrt())
    }
}

/// Keldysh parameter of the equal-amplitude ω–2ω field, `4ω sqrt(Ip / 5I0)`.
pub fn equal_amplitude_gamma(omega: f64, ip: f64, i0: f64) -> f64 {
    4.0 * omega * (ip / (5.0 * i0)).sqrt()
}

/// Inverse of [`equal_amplitude_gamma`] in ω.
pub fn omega_for_equal_amplitude_gamma(gamma: f64, ip: f64, i0: f64) -> f64 {
    gamma / (4.0 * (ip / (5.0 * i0)).sqrt())
}

pub(crate) fn potential_of(harmonics: &[Harmonic], omega: f64, t: Complex64) -> Complex64 {
    harmonics.iter().map(|h| h.amp * h.arg(omega, t).sin()).sum()
}

pub(crate) fn field_of(harmonics: &[Harmonic], omega: f64, t: Complex64) -> Complex64 {
    harmonics
        .iter()
        .map(|h| -h.amp * (h.order as f64 * omega) * h.arg(omega, t).cos())
        .sum()
}
