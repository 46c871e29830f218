//! Conversions between laboratory units and atomic units.
//!
//! Everything inside the engine is in atomic units; these helpers are only
//! meant for the command-line boundary.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// 1 a.u. of intensity in W/cm².
pub const AU_INTENSITY_WCM2: f64 = 3.509_447_58e16;
/// ω[a.u.] · λ[nm].
pub const AU_OMEGA_NM: f64 = 45.563_352_6;
/// 1 a.u. of energy (Hartree) in eV.
pub const AU_ENERGY_EV: f64 = 27.211_386;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    IntensityWcm2,
    IntensityAu,
    WavelengthNm,
    FrequencyAu,
    EnergyEv,
    EnergyAu,
}

impl Unit {
    fn name(self) -> &'static str {
        match self {
            Unit::IntensityWcm2 => "W/cm2",
            Unit::IntensityAu => "au-intensity",
            Unit::WavelengthNm => "nm",
            Unit::FrequencyAu => "au-frequency",
            Unit::EnergyEv => "eV",
            Unit::EnergyAu => "au-energy",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "W/cm2" | "W/cm²" | "wcm2" => Unit::IntensityWcm2,
            "au-intensity" => Unit::IntensityAu,
            "nm" => Unit::WavelengthNm,
            "au-frequency" => Unit::FrequencyAu,
            "eV" | "ev" => Unit::EnergyEv,
            "au-energy" | "hartree" => Unit::EnergyAu,
            other => {
                return Err(Error::UnknownUnits {
                    from: other.to_string(),
                    to: "?".into(),
                })
            }
        })
    }
}

/// Converts `value` between two units of the same physical dimension.
///
/// Wavelength and frequency are inversely related, so `nm -> au-frequency`
/// maps λ to ω = 45.5633526 / λ.
pub fn convert_units(value: f64, from: Unit, to: Unit) -> Result<f64> {
    use Unit::*;
    let out = match (from, to) {
        (a, b) if a == b => value,
        (IntensityWcm2, IntensityAu) => value / AU_INTENSITY_WCM2,
        (IntensityAu, IntensityWcm2) => value * AU_INTENSITY_WCM2,
        (WavelengthNm, FrequencyAu) | (FrequencyAu, WavelengthNm) => AU_OMEGA_NM / value,
        (EnergyEv, EnergyAu) => value / AU_ENERGY_EV,
        (EnergyAu, EnergyEv) => value * AU_ENERGY_EV,
        _ => {
            return Err(Error::UnknownUnits {
                from: from.to_string(),
                to: to.to_string(),
            })
        }
    };
    Ok(out)
}
