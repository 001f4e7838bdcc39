//! Physical constants and conversions between laboratory units and Hartree
//! atomic units. Everything inside the crate works in atomic units.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// 1 Eh expressed in cm⁻¹.
pub const CM1_PER_HARTREE: f64 = 219474.6313632;
/// 1 Eh expressed in kelvin (E/k_B).
pub const KELVIN_PER_HARTREE: f64 = 3.1577502e5;
/// Bohr radius in cm.
pub const BOHR_IN_CM: f64 = 5.29177210903e-9;
/// Atomic unit of time in s.
pub const AU_TIME_IN_S: f64 = 2.4188843265e-17;
/// Atomic unit of rate coefficient a0³/t_au in cm³/s.
pub const AU_RATE_IN_CM3_PER_S: f64 = BOHR_IN_CM * BOHR_IN_CM * BOHR_IN_CM / AU_TIME_IN_S;
/// Atomic mass unit in electron masses.
pub const AMU_IN_ME: f64 = 1822.888486209;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    Energy,
    Length,
    Time,
    Area,
    Rate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unit {
    Hartree,
    InverseCm,
    Kelvin,
    MilliKelvin,
    MicroKelvin,
    Bohr,
    Centimeter,
    Nanometer,
    AuTime,
    Second,
    Bohr2,
    Centimeter2,
    AuRate,
    Cm3PerS,
}

impl Unit {
    pub fn dimension(self) -> Dimension {
        use Unit::*;
        match self {
            Hartree | InverseCm | Kelvin | MilliKelvin | MicroKelvin => Dimension::Energy,
            Bohr | Centimeter | Nanometer => Dimension::Length,
            AuTime | Second => Dimension::Time,
            Bohr2 | Centimeter2 => Dimension::Area,
            AuRate | Cm3PerS => Dimension::Rate,
        }
    }

    /// Value of one of this unit in atomic units of its dimension.
    fn in_au(self) -> f64 {
        use Unit::*;
        match self {
            Hartree | Bohr | AuTime | Bohr2 | AuRate => 1.0,
            InverseCm => 1.0 / CM1_PER_HARTREE,
            Kelvin => 1.0 / KELVIN_PER_HARTREE,
            MilliKelvin => 1e-3 / KELVIN_PER_HARTREE,
            MicroKelvin => 1e-6 / KELVIN_PER_HARTREE,
            Centimeter => 1.0 / BOHR_IN_CM,
            Nanometer => 1e-7 / BOHR_IN_CM,
            Second => 1.0 / AU_TIME_IN_S,
            Centimeter2 => 1.0 / (BOHR_IN_CM * BOHR_IN_CM),
            Cm3PerS => 1.0 / AU_RATE_IN_CM3_PER_S,
        }
    }

    fn symbol(self) -> &'static str {
        use Unit::*;
        match self {
            Hartree => "Eh",
            InverseCm => "cm-1",
            Kelvin => "K",
            MilliKelvin => "mK",
            MicroKelvin => "uK",
            Bohr => "a0",
            Centimeter => "cm",
            Nanometer => "nm",
            AuTime => "t_au",
            Second => "s",
            Bohr2 => "a0^2",
            Centimeter2 => "cm^2",
            AuRate => "au_rate",
            Cm3PerS => "cm3/s",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use Unit::*;
        let unit = match s.trim() {
            "Eh" | "hartree" | "au_energy" => Hartree,
            "cm-1" | "cm^-1" | "cm⁻¹" => InverseCm,
            "K" => Kelvin,
            "mK" => MilliKelvin,
            "uK" | "μK" | "µK" => MicroKelvin,
            "a0" | "bohr" => Bohr,
            "cm" => Centimeter,
            "nm" => Nanometer,
            "t_au" | "au_time" => AuTime,
            "s" => Second,
            "a0^2" | "a0²" => Bohr2,
            "cm^2" | "cm²" => Centimeter2,
            "au_rate" => AuRate,
            "cm3/s" | "cm^3/s" | "cm³/s" => Cm3PerS,
            other => return Err(Error::UnknownUnit(other.to_string())),
        };
        Ok(unit)
    }
}

/// Converts `value` from one unit to another of the same dimension.
pub fn convert(value: f64, from: Unit, to: Unit) -> Result<f64> {
    if from.dimension() != to.dimension() {
        return Err(Error::DimensionMismatch {
            from: from.to_string(),
            to: to.to_string(),
        });
    }
    if from == to {
        return Ok(value);
    }

    Ok(value * from.in_au() / to.in_au())
}

pub fn cm1_to_hartree(x: f64) -> f64 {
    x / CM1_PER_HARTREE
}

pub fn hartree_to_cm1(x: f64) -> f64 {
    x * CM1_PER_HARTREE
}

/// k_B T in Hartree for a temperature in kelvin.
pub fn kelvin_to_hartree(t: f64) -> f64 {
    t / KELVIN_PER_HARTREE
}

pub fn hartree_to_kelvin(e: f64) -> f64 {
    e * KELVIN_PER_HARTREE
}

pub fn au_rate_to_cm3_per_s(k: f64) -> f64 {
    k * AU_RATE_IN_CM3_PER_S
}

pub fn cm3_per_s_to_au_rate(k: f64) -> f64 {
    k / AU_RATE_IN_CM3_PER_S
}
