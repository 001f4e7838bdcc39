//! Maxwell–Boltzmann averages of energy-resolved rate coefficients.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::{FiniteAboveNegOneF64, GaussLaguerre};
use serde::{Deserialize, Serialize};

use super::langevin::Langevin;
use crate::error::{Error, Result};
use crate::units::hartree_to_kelvin;

pub const QUADRATURE_NODES: usize = 48;
/// The energy grid has to reach this factor below and above k_B T.
pub const COVERAGE_FACTOR: f64 = 300.0;

fn laguerre() -> &'static GaussLaguerre {
    static RULE: OnceLock<GaussLaguerre> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLaguerre::new(
            NonZeroUsize::new(QUADRATURE_NODES).unwrap(),
            FiniteAboveNegOneF64::new(0.5).unwrap(),
        )
    })
}

/// Shape-preserving piecewise cubic (Fritsch–Butland slopes).
#[derive(Clone, Debug)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::Config(
                "monotone interpolation needs at least two matching points".into(),
            ));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config(
                "interpolation abscissae must increase strictly".into(),
            ));
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let (a, b) = (delta[i - 1], delta[i]);
            if a * b > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / a + w2 / b);
            }
        }
        let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
            let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if s * d0 <= 0.0 {
                0.0
            } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
                3.0 * d0
            } else {
                s
            }
        };
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            d[0] = end(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self { x, y, d })
    }

    /// Clamped to the end values outside the data range.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = self.x.partition_point(|&v| v <= t) - 1;
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

/// Rate coefficient K(E) in cm³/s on an increasing grid of collision
/// energies (Hartree), interpolated in ln E.
#[derive(Clone, Debug)]
pub struct RateCurve {
    pub energies: Vec<f64>,
    pub rates: Vec<f64>,
    interp: MonotoneCubic,
}

impl RateCurve {
    pub fn new(energies: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        if energies.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::Config("rate curve energies must be positive".into()));
        }
        let interp = MonotoneCubic::new(energies.iter().map(|e| e.ln()).collect(), rates.clone())?;
        Ok(Self {
            energies,
            rates,
            interp,
        })
    }

    pub fn eval(&self, energy: f64) -> f64 {
        self.interp.eval(energy.ln())
    }

    fn check_coverage(&self, kt: f64) -> Result<()> {
        let lo = kt / COVERAGE_FACTOR;
        let hi = kt * COVERAGE_FACTOR;
        let (first, last) = (self.energies[0], *self.energies.last().unwrap());
        // one part in 1e9 of slack for grids generated in kelvin
        if first > lo * (1.0 + 1e-9) || last < hi * (1.0 - 1e-9) {
            return Err(Error::Coverage(format!(
                "need [{:.3e}, {:.3e}] K for T = {:.3e} K, grid spans [{:.3e}, {:.3e}] K",
                hartree_to_kelvin(lo),
                hartree_to_kelvin(hi),
                hartree_to_kelvin(kt),
                hartree_to_kelvin(first),
                hartree_to_kelvin(last)
            )));
        }
        Ok(())
    }
}

/// 2/(√π (k_B T)^{3/2}) ∫ K(E) √E e^{−E/k_B T} dE with k_B T in Hartree.
fn boltzmann_average(kt: f64, f: impl Fn(f64) -> f64) -> f64 {
    2.0 / std::f64::consts::PI.sqrt() * laguerre().integrate(|x| f(x * kt))
}

/// Thermal rate coefficient at temperature `kt` (Hartree), cm³/s.
pub fn thermal_rate(curve: &RateCurve, kt: f64) -> Result<f64> {
    curve.check_coverage(kt)?;
    Ok(boltzmann_average(kt, |e| curve.eval(e)))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AverageEstimator {
    /// Plain thermal average.
    Thermal,
    /// Thermal average weighted by min(1, σ/σ_L) and renormalized by the
    /// average weight, so saturated and constant curves are returned as is.
    #[default]
    LangevinWeighted,
}

/// Langevin average of K(E) at temperature `kt` (Hartree), cm³/s.
pub fn langevin_average(
    curve: &RateCurve,
    kt: f64,
    langevin: &Langevin,
    estimator: AverageEstimator,
) -> Result<f64> {
    curve.check_coverage(kt)?;
    match estimator {
        AverageEstimator::Thermal => Ok(boltzmann_average(kt, |e| curve.eval(e))),
        AverageEstimator::LangevinWeighted => {
            let kl = langevin.rate();
            // σ/σ_L = K/K_L at equal velocity
            let weight = |e: f64| (curve.eval(e).max(0.0) / kl).min(1.0);
            let norm = boltzmann_average(kt, weight);
            if norm <= 0.0 {
                return Ok(0.0);
            }
            Ok(boltzmann_average(kt, |e| weight(e) * curve.eval(e)) / norm)
        }
    }
}
