//! Rate tables: energy-resolved and thermalized rate coefficients per process.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::langevin::Langevin;
use super::process::{Entrance, PerProcess, ProcessLabel};
use super::thermal::{langevin_average, AverageEstimator, RateCurve};
use crate::error::Result;
use crate::units::{au_rate_to_cm3_per_s, hartree_to_kelvin, kelvin_to_hartree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ScatteringModel {
    Fcqs,
    Mcqs,
}

impl fmt::Display for ScatteringModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScatteringModel::Fcqs => "FCQS",
            ScatteringModel::Mcqs => "MCQS",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateRow {
    /// Collision energy E/k_B or temperature, kelvin.
    pub kelvin: f64,
    pub process: ProcessLabel,
    /// a₀²; absent on thermalized rows.
    pub sigma: Option<f64>,
    /// cm³/s.
    pub rate: f64,
    pub rate_over_langevin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateTable {
    pub model: ScatteringModel,
    pub entrance: Entrance,
    pub thermal: bool,
    pub j_max: Option<i32>,
    /// Free-form description of the energy grid and propagator settings.
    pub grid: String,
    pub rows: Vec<RateRow>,
}

impl RateTable {
    /// Rows K(E) = √(2E/μ)·σ(E) for every process open from the entrance.
    /// `energies` are collision energies in Hartree.
    pub fn from_cross_sections(
        model: ScatteringModel,
        entrance: Entrance,
        langevin: &Langevin,
        energies: &[f64],
        sigma: &[PerProcess<f64>],
    ) -> Self {
        let kl = langevin.rate();
        let mut rows = Vec::new();
        for (&e, s) in energies.iter().zip(sigma) {
            let v = (2.0 * e / langevin.mass).sqrt();
            for &p in entrance.processes() {
                let rate = au_rate_to_cm3_per_s(v * s[p]);
                rows.push(RateRow {
                    kelvin: hartree_to_kelvin(e),
                    process: p,
                    sigma: Some(s[p]),
                    rate,
                    rate_over_langevin: rate / kl,
                });
            }
        }
        Self {
            model,
            entrance,
            thermal: false,
            j_max: None,
            grid: String::new(),
            rows,
        }
    }

    pub fn processes(&self) -> Vec<ProcessLabel> {
        let mut p: Vec<ProcessLabel> = self.rows.iter().map(|r| r.process).collect();
        p.sort();
        p.dedup();
        p
    }

    /// K(E) of one process as an interpolating curve.
    pub fn curve(&self, process: ProcessLabel) -> Result<RateCurve> {
        let (e, k): (Vec<f64>, Vec<f64>) = self
            .rows
            .iter()
            .filter(|r| r.process == process)
            .map(|r| (kelvin_to_hartree(r.kelvin), r.rate))
            .unzip();
        RateCurve::new(e, k)
    }

    /// Maxwell–Boltzmann averages at the given temperatures (kelvin).
    pub fn thermalize(&self, langevin: &Langevin, temperatures: &[f64]) -> Result<RateTable> {
        self.thermalize_with(langevin, temperatures, AverageEstimator::Thermal)
    }

    pub fn thermalize_with(
        &self,
        langevin: &Langevin,
        temperatures: &[f64],
        estimator: AverageEstimator,
    ) -> Result<RateTable> {
        let mut rows = Vec::new();
        let curves: Vec<(ProcessLabel, RateCurve)> = self
            .processes()
            .into_iter()
            .map(|p| self.curve(p).map(|c| (p, c)))
            .collect::<Result<_>>()?;
        for &t in temperatures {
            for (p, curve) in &curves {
                let rate = langevin_average(curve, kelvin_to_hartree(t), langevin, estimator)?;
                rows.push(RateRow {
                    kelvin: t,
                    process: *p,
                    sigma: None,
                    rate,
                    rate_over_langevin: rate / langevin.rate_thermal(t),
                });
            }
        }
        Ok(RateTable {
            thermal: true,
            rows,
            ..self.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_unit_consistent() {
        let l = Langevin::new(82.2, 10481.62);
        let energies: Vec<f64> = (0..5).map(|i| 1e-12 * 10f64.powi(i)).collect();
        let sigma: Vec<PerProcess<f64>> = energies
            .iter()
            .map(|&e| PerProcess::splat(0.5 * l.sigma(e)))
            .collect();
        let table = RateTable::from_cross_sections(
            ScatteringModel::Mcqs,
            Entrance::D52,
            &l,
            &energies,
            &sigma,
        );
        assert_eq!(table.rows.len(), 20);
        for r in &table.rows {
            assert!((r.rate_over_langevin - 0.5).abs() < 1e-12);
        }
    }
}
