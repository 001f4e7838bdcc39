//! Cross sections from S-matrix blocks: the partial-wave sum in the Ω = 0⁺
//! block (FCQS) and the sum over total angular momentum and parity in the
//! full case (e) basis (MCQS).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::langevin::Langevin;
use super::process::{ChannelGroup, Entrance, PerProcess, ProcessLabel};
use crate::basis::enumerate_case_e;
use crate::error::{Error, Result};
use crate::potentials::adiabats::Rotation;
use crate::potentials::PotentialSurfaceSet;
use crate::propagator::{solve, CoupledProblem, PropagatorSettings, SMatrixBlock};

/// Default relative size of the trailing terms of a converged J or ℓ sum.
pub const SUM_TOLERANCE: f64 = 1e-4;

/// Largest J needed at collision energy `energy` (Hartree): the classical
/// capture cutoff rounded up, plus eight.
pub fn j_max(langevin: &Langevin, energy: f64) -> i32 {
    langevin.critical_partial_wave(energy).ceil() as i32 + 8
}

/// The last three terms are each below `tol` times the total. A vanishing
/// total counts as converged.
pub fn sum_converged(terms: &[f64], tol: f64) -> bool {
    let total: f64 = terms.iter().sum();
    if total == 0.0 {
        return true;
    }
    terms.len() >= 3
        && terms[terms.len() - 3..]
            .iter()
            .all(|t| t.abs() < tol * total.abs())
}

/// Process cross sections (a₀²) for one block, summed over the open entrance
/// channels of `entrance` and the open exit channels of each process:
/// π/k² Σ_i Σ_f |S_fi|², without dividing by the number of entrance channels.
/// Elastic uses |δ_fi − S_fi|².
pub fn block_cross_sections(
    block: &SMatrixBlock,
    groups: &[ChannelGroup],
    entrance: ChannelGroup,
    entrance_threshold: f64,
    mass: f64,
) -> PerProcess<f64> {
    let mut sigma = PerProcess::zero();
    let k2 = 2.0 * mass * (block.energy - entrance_threshold);
    if k2 <= 0.0 {
        return sigma;
    }
    for (ci, &i) in block.open.iter().enumerate() {
        if groups[i] != entrance {
            continue;
        }
        for (cf, &f) in block.open.iter().enumerate() {
            let Some(process) = ProcessLabel::classify(entrance, groups[f]) else {
                continue;
            };
            let s = block.s[(cf, ci)];
            sigma[process] += if process == ProcessLabel::EC {
                let d = if ci == cf { 1.0 } else { 0.0 };
                (s.re - d).powi(2) + s.im * s.im
            } else {
                s.norm_sqr()
            };
        }
    }
    sigma.map(|v| PI / k2 * v)
}

/// Cross sections of one (J, p) block at one collision energy.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSigma {
    /// Collision energy above the entrance threshold, Hartree.
    pub energy: f64,
    pub big_j: i32,
    pub parity: i32,
    pub sigma: PerProcess<f64>,
}

/// A solved case (e) block.
#[derive(Clone, Debug)]
pub struct BlockResult {
    pub sigma: BlockSigma,
    pub smatrix: SMatrixBlock,
}

/// Solves one (J, p) block at several collision energies above the entrance
/// threshold. Returns the channel labels alongside the per-energy results.
#[allow(clippy::too_many_arguments)]
pub fn solve_case_e_block(
    surface: &PotentialSurfaceSet,
    mass: f64,
    big_j: i32,
    parity: i32,
    entrance: Entrance,
    energies: &[f64],
    settings: &PropagatorSettings,
    rotation: Rotation,
) -> Result<(Vec<String>, Vec<Result<BlockResult>>)> {
    let problem = CoupledProblem::case_e(surface, big_j, parity, mass, rotation)?;
    let groups: Vec<ChannelGroup> = enumerate_case_e(big_j, parity, &surface.thresholds)
        .iter()
        .map(ChannelGroup::of)
        .collect();
    let e0 = entrance.threshold(&surface.thresholds);
    let totals: Vec<f64> = energies.iter().map(|e| e0 + e).collect();
    let results = solve(&problem, &totals, settings)
        .into_iter()
        .zip(energies)
        .map(|(r, &energy)| {
            r.map(|smatrix| BlockResult {
                sigma: BlockSigma {
                    energy,
                    big_j,
                    parity,
                    sigma: block_cross_sections(&smatrix, &groups, entrance.group(), e0, mass),
                },
                smatrix,
            })
            .map_err(|e| annotate(e, big_j, parity))
        })
        .collect();
    Ok((problem.labels.clone(), results))
}

fn annotate(e: Error, big_j: i32, parity: i32) -> Error {
    let tag = format!("J = {big_j}, p = {parity:+}");
    match e {
        Error::MatchingCheck(m) => Error::MatchingCheck(format!("{m} ({tag})")),
        Error::Convergence(m) => Error::Convergence(format!("{m} ({tag})")),
        other => other,
    }
}

/// Σ_J (2J+1) σ(E, J, p) over the blocks of one parity.
pub fn parity_cross_section(blocks: &[BlockSigma], parity: i32) -> PerProcess<f64> {
    let mut out = PerProcess::zero();
    for b in blocks.iter().filter(|b| b.parity == parity) {
        out.add_scaled(&b.sigma, (2 * b.big_j + 1) as f64);
    }
    out
}

/// (σ₊ + σ₋)/2.
pub fn total_cross_section(plus: &PerProcess<f64>, minus: &PerProcess<f64>) -> PerProcess<f64> {
    PerProcess(std::array::from_fn(|i| 0.5 * (plus.0[i] + minus.0[i])))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McqsSettings {
    /// J beyond the capture cutoff computed up front.
    pub j_margin: i32,
    /// Hard limit on J when extending an unconverged sum.
    pub j_cap: i32,
    pub tolerance: f64,
    pub coriolis: bool,
}

impl Default for McqsSettings {
    fn default() -> Self {
        Self {
            j_margin: 8,
            j_cap: 80,
            tolerance: SUM_TOLERANCE,
            coriolis: true,
        }
    }
}

/// Parity-resolved and total MCQS cross sections at one collision energy.
#[derive(Clone, Debug)]
pub struct McqsPoint {
    /// Hartree above the entrance threshold.
    pub energy: f64,
    pub plus: PerProcess<f64>,
    pub minus: PerProcess<f64>,
    pub total: PerProcess<f64>,
    /// Highest J included.
    pub j_last: i32,
    pub converged: bool,
    /// Largest trailing (2J+1)σ_J relative to its sum over the inelastic processes.
    pub tail: f64,
    pub blocks: Vec<BlockSigma>,
}

impl McqsPoint {
    /// Composes a point from its (J, p) blocks and checks convergence over the
    /// inelastic processes among `processes`.
    pub fn from_blocks(
        energy: f64,
        mut blocks: Vec<BlockSigma>,
        processes: &[ProcessLabel],
        tol: f64,
    ) -> Self {
        blocks.sort_by_key(|b| (b.big_j, -b.parity));
        let plus = parity_cross_section(&blocks, 1);
        let minus = parity_cross_section(&blocks, -1);
        let j_last = blocks.iter().map(|b| b.big_j).max().unwrap_or(-1);
        let mut converged = true;
        let mut tail = 0.0f64;
        for parity in [1, -1] {
            for &p in processes.iter().filter(|&&p| p != ProcessLabel::EC) {
                let terms: Vec<f64> = blocks
                    .iter()
                    .filter(|b| b.parity == parity)
                    .map(|b| (2 * b.big_j + 1) as f64 * b.sigma[p])
                    .collect();
                converged &= sum_converged(&terms, tol);
                let total: f64 = terms.iter().sum();
                if total > 0.0 {
                    let last = terms
                        .iter()
                        .rev()
                        .take(3)
                        .fold(0.0f64, |m, t| m.max(t.abs()));
                    tail = tail.max(last / total);
                }
            }
        }
        Self {
            energy,
            total: total_cross_section(&plus, &minus),
            plus,
            minus,
            j_last,
            converged,
            tail,
            blocks,
        }
    }

    /// The point itself, or a convergence error naming the trailing term.
    pub fn require_converged(&self) -> Result<&Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Convergence(format!(
                "J sum at E = {:.4e} Eh stopped at J = {} with trailing terms {:.2e} of the total",
                self.energy, self.j_last, self.tail
            )))
        }
    }

    /// K(E) = √(2E/μ)·σ in atomic units.
    pub fn rate_au(&self, process: ProcessLabel, mass: f64) -> f64 {
        (2.0 * self.energy / mass).sqrt() * self.total[process]
    }
}

/// MCQS cross sections at several collision energies (Hartree above the
/// entrance threshold). Blocks run in parallel; the J sum starts at the
/// capture estimate and is extended one J at a time until converged or
/// `j_cap` is reached.
pub fn mcqs_cross_sections(
    surface: &PotentialSurfaceSet,
    langevin: &Langevin,
    entrance: Entrance,
    energies: &[f64],
    propagator: &PropagatorSettings,
    settings: &McqsSettings,
) -> Vec<Result<McqsPoint>> {
    let rotation = if settings.coriolis {
        Rotation::Full
    } else {
        Rotation::NoCoriolis
    };
    let n = energies.len();
    let mut blocks: Vec<Vec<BlockSigma>> = vec![Vec::new(); n];
    let mut failed: Vec<Option<Error>> = (0..n).map(|_| None).collect();
    let mut next_j = vec![0; n];
    let mut target: Vec<i32> = energies
        .iter()
        .map(|&e| {
            (langevin.critical_partial_wave(e).ceil() as i32 + settings.j_margin)
                .min(settings.j_cap)
        })
        .collect();

    loop {
        // (J, p, energy slots) still to do
        let mut work: Vec<(i32, i32, Vec<usize>)> = Vec::new();
        let j_top = (0..n)
            .filter(|&i| failed[i].is_none())
            .map(|i| target[i])
            .max();
        let Some(j_top) = j_top else { break };
        for big_j in 0..=j_top {
            let slots: Vec<usize> = (0..n)
                .filter(|&i| failed[i].is_none() && next_j[i] <= big_j && big_j <= target[i])
                .collect();
            if !slots.is_empty() {
                work.push((big_j, 1, slots.clone()));
                work.push((big_j, -1, slots));
            }
        }
        if work.is_empty() {
            break;
        }
        let outcomes: Vec<_> = work
            .par_iter()
            .map(|(big_j, parity, slots)| {
                let es: Vec<f64> = slots.iter().map(|&i| energies[i]).collect();
                solve_case_e_block(
                    surface,
                    langevin.mass,
                    *big_j,
                    *parity,
                    entrance,
                    &es,
                    propagator,
                    rotation,
                )
            })
            .collect();
        for ((big_j, parity, slots), outcome) in work.into_iter().zip(outcomes) {
            match outcome {
                Err(e) => {
                    let msg = e.to_string();
                    for &i in &slots {
                        failed[i].get_or_insert_with(|| Error::Config(msg.clone()));
                    }
                }
                Ok((_, results)) => {
                    for (&i, r) in slots.iter().zip(results) {
                        match r {
                            Ok(b) => blocks[i].push(b.sigma),
                            Err(e) => {
                                failed[i].get_or_insert(annotate(e, big_j, parity));
                            }
                        }
                    }
                }
            }
        }
        let mut extend = false;
        for i in 0..n {
            next_j[i] = target[i] + 1;
            if failed[i].is_some() {
                continue;
            }
            let point = McqsPoint::from_blocks(
                energies[i],
                blocks[i].clone(),
                entrance.processes(),
                settings.tolerance,
            );
            if !point.converged && target[i] < settings.j_cap {
                target[i] += 1;
                extend = true;
            }
        }
        if !extend {
            break;
        }
    }

    blocks
        .into_iter()
        .zip(failed)
        .zip(energies)
        .map(|((b, f), &e)| match f {
            Some(err) => Err(err),
            None => Ok(McqsPoint::from_blocks(
                e,
                b,
                entrance.processes(),
                settings.tolerance,
            )),
        })
        .collect()
}

/// FCQS cross sections at one collision energy.
#[derive(Clone, Debug)]
pub struct FcqsPoint {
    /// Hartree above the entrance threshold.
    pub energy: f64,
    pub sigma: PerProcess<f64>,
    /// π/k²(2ℓ+1)|S_ℓ|² per partial wave.
    pub partial: Vec<PerProcess<f64>>,
    pub converged: bool,
}

impl FcqsPoint {
    /// Composes a point from per-ℓ blocks as returned by [`solve_fcqs_block`]
    /// (without the 2ℓ+1 factor), ordered by ℓ from zero.
    pub fn from_blocks(
        energy: f64,
        blocks: &[BlockSigma],
        processes: &[ProcessLabel],
        tol: f64,
    ) -> Self {
        let mut point = FcqsPoint {
            energy,
            sigma: PerProcess::zero(),
            partial: Vec::with_capacity(blocks.len()),
            converged: false,
        };
        for b in blocks {
            let s = b.sigma.map(|v| (2 * b.big_j + 1) as f64 * v);
            point.partial.push(s);
            point.sigma.add_scaled(&s, 1.0);
        }
        point.converged = point.converged_for(processes, tol);
        point
    }

    fn converged_for(&self, processes: &[ProcessLabel], tol: f64) -> bool {
        processes
            .iter()
            .filter(|&&p| p != ProcessLabel::EC)
            .all(|&p| {
                let terms: Vec<f64> = self.partial.iter().map(|s| s[p]).collect();
                sum_converged(&terms, tol)
            })
    }

    pub fn require_converged(&self) -> Result<&Self> {
        if self.converged {
            return Ok(self);
        }
        let tail = self.partial.last().map(|s| s.inelastic()).unwrap_or(0.0);
        Err(Error::Convergence(format!(
            "partial-wave sum at E = {:.4e} Eh stopped at ℓ = {} with last term {:.3e} a0² of {:.3e}",
            self.energy,
            self.partial.len().saturating_sub(1),
            tail,
            self.sigma.inelastic()
        )))
    }
}

/// Solves the Ω = 0⁺ block for one partial wave. The block cross sections are
/// π/k²|S_ℓ|², stored with `big_j = ℓ` and parity +1 so that
/// [`parity_cross_section`] yields the partial-wave sum.
pub fn solve_fcqs_block(
    surface: &PotentialSurfaceSet,
    mass: f64,
    ell: i32,
    entrance: Entrance,
    energies: &[f64],
    settings: &PropagatorSettings,
) -> Result<(Vec<String>, Vec<Result<BlockResult>>)> {
    let th = &surface.thresholds;
    let problem = CoupledProblem::omega_block(surface, "0+", ell, mass)?;
    let groups: Vec<ChannelGroup> = problem
        .thresholds
        .iter()
        .map(|&t| ChannelGroup::nearest(t, th))
        .collect();
    // the asymptotic eigenvalue stands in for the nominal threshold
    let e0 = groups
        .iter()
        .position(|&g| g == entrance.group())
        .map(|k| problem.thresholds[k])
        .unwrap_or_else(|| entrance.threshold(th));
    let totals: Vec<f64> = energies.iter().map(|e| e0 + e).collect();
    let results = solve(&problem, &totals, settings)
        .into_iter()
        .zip(energies)
        .map(|(r, &energy)| {
            r.map(|smatrix| BlockResult {
                sigma: BlockSigma {
                    energy,
                    big_j: ell,
                    parity: 1,
                    sigma: block_cross_sections(&smatrix, &groups, entrance.group(), e0, mass),
                },
                smatrix,
            })
            .map_err(|e| match e {
                Error::MatchingCheck(m) => Error::MatchingCheck(format!("{m} (ℓ = {ell})")),
                other => other,
            })
        })
        .collect();
    Ok((problem.labels.clone(), results))
}

/// FCQS cross sections: the four-channel Ω = 0⁺ block with one shared partial
/// wave ℓ, σ = π/k² Σ_ℓ (2ℓ+1)|S_ℓ|². Partial waves are computed in parallel
/// batches until the trailing three terms are below `tol` or `ell_cap` is hit.
pub fn fcqs_cross_sections(
    surface: &PotentialSurfaceSet,
    mass: f64,
    entrance: Entrance,
    energies: &[f64],
    propagator: &PropagatorSettings,
    ell_cap: i32,
    tol: f64,
) -> Vec<Result<FcqsPoint>> {
    const BATCH: i32 = 8;
    let n = energies.len();
    let mut points: Vec<FcqsPoint> = energies
        .iter()
        .map(|&energy| FcqsPoint {
            energy,
            sigma: PerProcess::zero(),
            partial: Vec::new(),
            converged: false,
        })
        .collect();
    let mut failed: Vec<Option<Error>> = (0..n).map(|_| None).collect();
    let mut ell0 = 0;
    while ell0 <= ell_cap {
        let live: Vec<usize> = (0..n)
            .filter(|&i| failed[i].is_none() && !points[i].converged)
            .collect();
        if live.is_empty() {
            break;
        }
        let es: Vec<f64> = live.iter().map(|&i| energies[i]).collect();
        let ells: Vec<i32> = (ell0..(ell0 + BATCH).min(ell_cap + 1)).collect();
        let outcomes: Vec<_> = ells
            .par_iter()
            .map(|&ell| solve_fcqs_block(surface, mass, ell, entrance, &es, propagator))
            .collect();
        for (&ell, outcome) in ells.iter().zip(outcomes) {
            match outcome {
                Err(e) => {
                    let msg = e.to_string();
                    for &i in &live {
                        failed[i].get_or_insert_with(|| Error::Config(msg.clone()));
                    }
                }
                Ok((_, rs)) => {
                    for (&i, r) in live.iter().zip(rs) {
                        match r {
                            Ok(b) if failed[i].is_none() => {
                                let s = b.sigma.sigma.map(|v| (2 * ell + 1) as f64 * v);
                                points[i].partial.push(s);
                                points[i].sigma.add_scaled(&s, 1.0);
                            }
                            Ok(_) => {}
                            Err(e) => {
                                failed[i].get_or_insert(e);
                            }
                        }
                    }
                }
            }
        }
        for &i in &live {
            points[i].converged = points[i].converged_for(entrance.processes(), tol);
        }
        ell0 += BATCH;
    }
    points
        .into_iter()
        .zip(failed)
        .map(|(p, f)| match f {
            Some(e) => Err(e),
            None => Ok(p),
        })
        .collect()
}
