//! Coupled-channel propagation and extraction of K and S matrices.

pub mod linalg;
pub mod logderiv;
pub mod matching;
pub mod outer;
pub mod problem;
pub mod riccati;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use logderiv::{propagate, Grid};
pub use matching::{asymmetry, k_to_s, unitarity_error, Reference};
use outer::OuterLeg;
pub use problem::{CoupledProblem, PotentialFn};
pub use riccati::riccati_bessel;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagatorSettings {
    /// Bohr.
    pub r_min: f64,
    /// Bohr. Matching radius when the outer region is disabled.
    pub r_max: f64,
    /// Bohr.
    pub step: f64,
    /// Radius beyond which channels are treated as uncoupled; see
    /// [`outer`]. `None` propagates all channels coupled out to r_max.
    pub outer_start: Option<f64>,
    /// Push r_max out until the long-range residual is small against every
    /// open channel's kinetic energy.
    pub auto_extend: bool,
    /// Require W(r_min) to exceed E by `start_margin` in every channel.
    pub check_start: bool,
    /// Hartree.
    pub start_margin: f64,
    /// Largest tolerated relative asymmetry of K before symmetrization.
    pub asymmetry_tolerance: f64,
    /// A channel leaves the outer propagation once the leading correction to
    /// its phase-amplitude reference drops below this.
    pub wkb_tolerance: f64,
    /// Outer-region step times the largest local wavenumber of the channels
    /// still being propagated.
    pub outer_kh: f64,
}

impl Default for PropagatorSettings {
    fn default() -> Self {
        Self {
            r_min: 4.0,
            r_max: 10000.0,
            step: 0.005,
            outer_start: Some(60.0),
            auto_extend: true,
            check_start: true,
            start_margin: 0.05,
            asymmetry_tolerance: 1e-6,
            wkb_tolerance: 1e-7,
            outer_kh: 0.02,
        }
    }
}

impl PropagatorSettings {
    /// Fully coupled propagation to a fixed r_max.
    pub fn coupled(r_min: f64, r_max: f64, step: f64) -> Self {
        Self {
            r_min,
            r_max,
            step,
            outer_start: None,
            auto_extend: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_max > self.r_min && self.step > 0.0) {
            return Err(Error::Config(format!(
                "need 0 < r_min < r_max and step > 0 (got {}, {}, {})",
                self.r_min, self.r_max, self.step
            )));
        }
        if self.step > 0.1 * (self.r_max - self.r_min) {
            return Err(Error::Config(
                "step is too coarse for the radial range".into(),
            ));
        }
        if let Some(o) = self.outer_start {
            if !(o > self.r_min + 2.0 * self.step) {
                return Err(Error::Config(format!(
                    "outer_start {o} must lie beyond r_min"
                )));
            }
        }
        Ok(())
    }
}

/// Scattering result at one energy for one symmetry block.
#[derive(Clone, Debug)]
pub struct SMatrixBlock {
    /// Hartree.
    pub energy: f64,
    /// Indices of the open asymptotic channels, in threshold order.
    pub open: Vec<usize>,
    pub k: DMatrix<f64>,
    pub s: DMatrix<Complex<f64>>,
    /// Relative asymmetry of K before symmetrization.
    pub asymmetry: f64,
    pub r_match: f64,
}

impl SMatrixBlock {
    pub fn unitarity_error(&self) -> f64 {
        unitarity_error(&self.s)
    }

    /// Position of an asymptotic channel among the open ones.
    pub fn open_position(&self, channel: usize) -> Option<usize> {
        self.open.iter().position(|&c| c == channel)
    }

    /// |S_{f←i}|² for asymptotic channel indices.
    pub fn probability(&self, to: usize, from: usize) -> f64 {
        match (self.open_position(to), self.open_position(from)) {
            (Some(f), Some(i)) => self.s[(f, i)].norm_sqr(),
            _ => 0.0,
        }
    }
}

/// Long-range coefficients in the asymptotic basis: V − diag(threshold +
/// centrifugal) = −c4/R⁴ − c6/R⁶ beyond the fit radius.
struct LongRange {
    c4: DMatrix<f64>,
    c6: DMatrix<f64>,
}

fn fit_long_range(problem: &CoupledProblem, r0: f64) -> Result<LongRange> {
    let (r1, r2, r3) = (r0, 2.0 * r0, 1.5 * r0);
    let residual = |r: f64| {
        let mut v = problem.asymptotic_potential(r);
        for i in 0..problem.dim() {
            let l = problem.ells[i] as f64;
            v[(i, i)] -= problem.thresholds[i] + l * (l + 1.0) / (2.0 * problem.mass * r * r);
        }
        v
    };
    let (d1, d2, d3) = (residual(r1), residual(r2), residual(r3));
    let a1 = -&d1 * r1.powi(4);
    let a2 = -&d2 * r2.powi(4);
    let c6 = (&a1 - &a2) / (r1.powi(-2) - r2.powi(-2));
    let c4 = &a1 - &c6 / (r1 * r1);
    let pred = -&c4 / r3.powi(4) - &c6 / r3.powi(6);
    let scale = d3.amax();
    if (&pred - &d3).amax() > 1e-6 * scale + 1e-15 {
        return Err(Error::Config(format!(
            "potential is not of C4/C6 form beyond {r0} a0; disable the outer region"
        )));
    }
    Ok(LongRange { c4, c6 })
}

/// Radius where |residual| / kinetic energy drops below 1e-3 for every open channel.
fn extended_r_max(problem: &CoupledProblem, energy: f64, start: f64) -> f64 {
    let open = problem.open_channels(energy);
    let mut r = start;
    while r < 1e7 {
        let res = problem.residual_diagonal(r);
        if open
            .iter()
            .all(|&i| res[i].abs() < 1e-3 * (energy - problem.thresholds[i]))
        {
            break;
        }
        r *= 1.25;
    }
    r
}

/// Scattering matrices at several energies of one problem.
pub fn solve(
    problem: &CoupledProblem,
    energies: &[f64],
    settings: &PropagatorSettings,
) -> Vec<Result<SMatrixBlock>> {
    if let Err(e) = settings.validate() {
        let msg = e.to_string();
        return energies
            .iter()
            .map(|_| Err(Error::Config(msg.clone())))
            .collect();
    }
    let n = problem.dim();
    let mut results: Vec<Option<Result<SMatrixBlock>>> = energies.iter().map(|_| None).collect();

    let start_diag = problem.potential(settings.r_min).diagonal();
    let mut live = Vec::new();
    for (slot, &e) in energies.iter().enumerate() {
        if problem.open_channels(e).is_empty() {
            results[slot] = Some(Err(Error::BelowThreshold { energy: e }));
        } else if settings.check_start && start_diag.iter().any(|&v| v - e < settings.start_margin)
        {
            results[slot] = Some(Err(Error::StartNotForbidden {
                r_min: settings.r_min,
            }));
        } else {
            live.push(slot);
        }
    }
    if live.is_empty() {
        return results.into_iter().map(Option::unwrap).collect();
    }

    let long_range = match settings.outer_start {
        Some(r0) => match fit_long_range(problem, r0) {
            Ok(lr) => Some((r0, lr)),
            Err(e) => {
                let msg = e.to_string();
                for &slot in &live {
                    results[slot] = Some(Err(Error::Config(msg.clone())));
                }
                return results.into_iter().map(Option::unwrap).collect();
            }
        },
        None => None,
    };

    let r_end = match &long_range {
        Some((r0, _)) => *r0,
        None if settings.auto_extend => live
            .iter()
            .map(|&s| extended_r_max(problem, energies[s], settings.r_max))
            .fold(settings.r_max, f64::max),
        None => settings.r_max,
    };
    let grid = match Grid::covering(settings.r_min, r_end, settings.step) {
        Ok(g) => g,
        Err(e) => {
            let msg = e.to_string();
            return energies
                .iter()
                .map(|_| Err(Error::Config(msg.clone())))
                .collect();
        }
    };
    let r_match = grid.r_max();
    let live_energies: Vec<f64> = live.iter().map(|&s| energies[s]).collect();
    let ys = propagate(problem, &live_energies, grid);
    let v_match = problem.asymptotic_potential(r_match);

    for (&slot, y) in live.iter().zip(ys) {
        let energy = energies[slot];
        results[slot] = Some(y.and_then(|y| {
            let y = problem.to_asymptotic(DMatrix::from_row_slice(n, n, &y));
            let open = problem.open_channels(energy);
            let wavenumber =
                |i: usize| (2.0 * problem.mass * (energy - problem.thresholds[i])).sqrt();
            let closed_log_derivative = |i: usize| {
                let ell = problem.ells[i];
                let lterm = (ell * (ell + 1)) as f64 / (2.0 * problem.mass * r_match * r_match);
                let kappa = (2.0 * problem.mass * (v_match[(i, i)] - lterm - energy))
                    .max(1e-30)
                    .sqrt();
                matching::closed_log_derivative(ell, kappa, r_match)
            };
            let (y, refs, closed, r_end) = match &long_range {
                None => {
                    let refs = open
                        .iter()
                        .map(|&i| Reference::free(problem.ells[i], wavenumber(i), r_match))
                        .collect();
                    let closed = (0..n)
                        .filter(|i| !open.contains(i))
                        .map(|i| (i, closed_log_derivative(i)))
                        .collect();
                    (y, refs, closed, r_match)
                }
                Some((_, lr)) => {
                    let same = |a: usize, b: usize| {
                        (problem.thresholds[a] - problem.thresholds[b]).abs() < 1e-12
                    };
                    let legs: Vec<OuterLeg> = (0..n)
                        .map(|i| {
                            if open.contains(&i) {
                                let group = (0..=i).find(|&g| same(g, i)).unwrap();
                                OuterLeg::Open(
                                    matching::OuterChannel {
                                        mass: problem.mass,
                                        k: wavenumber(i),
                                        ell: problem.ells[i],
                                        c4: lr.c4[(i, i)],
                                        c6: lr.c6[(i, i)],
                                    },
                                    group,
                                )
                            } else {
                                OuterLeg::Closed(closed_log_derivative(i))
                            }
                        })
                        .collect();
                    let mut couplings = Vec::new();
                    for &i in &open {
                        for &j in &open {
                            let (c4, c6) = (lr.c4[(i, j)], lr.c6[(i, j)]);
                            if i != j && same(i, j) && (c4 != 0.0 || c6 != 0.0) {
                                couplings.push(outer::Coupling { i, j, c4, c6 });
                            }
                        }
                    }
                    let m = outer::propagate_outer(
                        &y,
                        r_match,
                        &legs,
                        &couplings,
                        problem.mass,
                        settings.wkb_tolerance,
                        settings.outer_kh,
                    )?;
                    (m.y, m.references, m.closed, m.r_end)
                }
            };
            let k = matching::k_from_log_derivative(&y, &open, &refs, &closed)?;
            let asym = asymmetry(&k);
            if !(asym <= settings.asymmetry_tolerance) {
                return Err(Error::MatchingCheck(format!(
                    "K asymmetry {asym:.2e} at E = {energy:.6e} Eh"
                )));
            }
            let k = (&k + k.transpose()) * 0.5;
            let s = k_to_s(&k)?;
            Ok(SMatrixBlock {
                energy,
                open,
                k,
                s,
                asymmetry: asym,
                r_match: r_end,
            })
        }));
    }
    results.into_iter().map(Option::unwrap).collect()
}
