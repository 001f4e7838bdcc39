//! Classical capture references and the small experimental helpers.

use std::f64::consts::PI;

use crate::units::{au_rate_to_cm3_per_s, kelvin_to_hartree};

const BOLTZMANN_SI: f64 = 1.380649e-23;
const AMU_KG: f64 = 1.66053906660e-27;
/// ⁶Li mass in u.
pub const LI6_MASS_U: f64 = 6.0151228874;

/// Langevin capture model for a −C₄/R⁴ interaction (atomic units).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Langevin {
    pub c4: f64,
    pub mass: f64,
}

impl Langevin {
    pub fn new(c4: f64, mass: f64) -> Self {
        Self { c4, mass }
    }

    /// σ_L = 2π√(C₄/E) in a₀², E in Hartree.
    pub fn sigma(&self, energy: f64) -> f64 {
        2.0 * PI * (self.c4 / energy).sqrt()
    }

    /// Energy-independent K_L = 2π√(2C₄/μ), atomic units.
    pub fn rate_au(&self) -> f64 {
        2.0 * PI * (2.0 * self.c4 / self.mass).sqrt()
    }

    /// cm³/s.
    pub fn rate(&self) -> f64 {
        au_rate_to_cm3_per_s(self.rate_au())
    }

    /// σ_L(k_B T)·√(2k_B T/μ) in cm³/s, T in kelvin.
    pub fn rate_thermal(&self, t_eff: f64) -> f64 {
        let e = kelvin_to_hartree(t_eff);
        au_rate_to_cm3_per_s(self.sigma(e) * (2.0 * e / self.mass).sqrt())
    }

    /// Collision rate in s⁻¹ for an atom density in cm⁻³.
    pub fn rate_density(&self, density: f64) -> f64 {
        density * self.rate()
    }

    /// Classical capture cutoff (4μ²C₄E)^{1/4} in units of ħ.
    pub fn critical_partial_wave(&self, energy: f64) -> f64 {
        (4.0 * self.mass * self.mass * self.c4 * energy).powf(0.25)
    }
}

/// Centre-of-mass temperature (m_a T_b + m_b T_a)/(m_a + m_b).
pub fn t_eff(mass_a: f64, t_a: f64, mass_b: f64, t_b: f64) -> f64 {
    (mass_a * t_b + mass_b * t_a) / (mass_a + mass_b)
}

/// Peak density in cm⁻³ of a thermal ⁶Li cloud with N atoms, radial trap
/// frequency ω (rad/s), axial size σ_ax (m) and temperature T (K).
pub fn atom_density(n_atoms: f64, omega_rad: f64, sigma_ax: f64, temperature: f64) -> f64 {
    let m = LI6_MASS_U * AMU_KG;
    let per_m3 = m * omega_rad * omega_rad * n_atoms
        / ((2.0 * PI).powf(1.5) * BOLTZMANN_SI * temperature * sigma_ax);
    per_m3 * 1e-6
}

/// Product fraction rescaled for the share of runs where the 5D5/2 state was
/// not reached.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Corrected {
    pub value: f64,
    /// Set when the rescaled fraction exceeds one.
    pub out_of_range: bool,
}

pub fn d52_preparation_correction(measured_fraction: f64, leak: f64) -> Corrected {
    let value = measured_fraction / (1.0 - leak);
    if value > 1.0 {
        log::warn!(
            "corrected fraction {value:.4} exceeds 1 (measured {measured_fraction}, leak {leak})"
        );
    }
    Corrected {
        value,
        out_of_range: value > 1.0,
    }
}

pub const DEFAULT_LEAK: f64 = 0.175;

/// exp(−K n t) with K in cm³/s, n in cm⁻³ and t in s.
pub fn survival_curve(k_total: f64, density: f64, times: &[f64]) -> Vec<f64> {
    times
        .iter()
        .map(|&t| (-k_total * density * t).exp())
        .collect()
}
