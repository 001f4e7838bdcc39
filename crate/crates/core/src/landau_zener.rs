//! Landau–Zener estimates: single and double passage through a linearized
//! crossing, and the four-channel network around the X₁ crossing.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{Entrance, PerProcess, ProcessLabel};
use crate::potentials::adiabats::omega_block_indices;
use crate::potentials::PotentialSurfaceSet;
use crate::units::cm1_to_hartree;

/// A linearized two-state crossing in atomic units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LzCrossing {
    /// a₀.
    pub r_c: f64,
    /// Half the adiabatic gap at R_c.
    pub w_c: f64,
    /// Difference of the diabatic slopes, Eₕ/a₀.
    pub df: f64,
    /// Potential at R_c relative to the entrance threshold.
    pub u_c: f64,
}

impl LzCrossing {
    pub fn validate(&self) -> Result<()> {
        if !(self.w_c >= 0.0 && self.df > 0.0) {
            return Err(Error::Config(format!(
                "crossing needs W_c >= 0 and dF > 0 (got {}, {})",
                self.w_c, self.df
            )));
        }
        Ok(())
    }

    /// Local velocity √(2(E − U_c)/μ) at collision energy E.
    pub fn velocity(&self, energy: f64, mass: f64) -> Result<f64> {
        let excess = energy - self.u_c;
        if excess <= 0.0 {
            return Err(Error::ClassicallyForbidden { excess });
        }
        Ok((2.0 * excess / mass).sqrt())
    }
}

/// exp(−2πW_c²/(v_c dF)) for one passage at collision energy E (Hartree).
pub fn lz_probability(crossing: &LzCrossing, energy: f64, mass: f64) -> Result<f64> {
    crossing.validate()?;
    let v = crossing.velocity(energy, mass)?;
    Ok((-2.0 * PI * crossing.w_c * crossing.w_c / (v * crossing.df)).exp())
}

/// 2P(1 − P): one transition on the way in or on the way out.
pub fn double_path(p: f64) -> f64 {
    2.0 * p * (1.0 - p)
}

/// Published X₁ half-gap, Eₕ.
pub const X1_W: f64 = 0.001795;
pub const X1_R: f64 = 11.06;
/// Published single-passage probability at X₁.
pub const X1_P: f64 = 0.769;
/// X₁ energy below the S+D asymptote, cm⁻¹.
pub const X1_DEPTH_CM1: f64 = 3450.0;

/// Slope difference that reproduces P = 0.769 at E = 0 with W = 0.001795 Eₕ
/// and U_c = −3450 cm⁻¹, obtained by inverting the Landau–Zener formula.
pub fn x1_default_df(mass: f64) -> f64 {
    let v = (2.0 * cm1_to_hartree(X1_DEPTH_CM1) / mass).sqrt();
    2.0 * PI * X1_W * X1_W / (v * -X1_P.ln())
}

/// Two-level X₁ crossing with the derived default slope difference.
pub fn x1_default_crossing(mass: f64) -> LzCrossing {
    LzCrossing {
        r_c: X1_R,
        w_c: X1_W,
        df: x1_default_df(mass),
        u_c: -cm1_to_hartree(X1_DEPTH_CM1),
    }
}

/// Which reading of the four-channel expressions to evaluate. The printed
/// NRCE and FSQ formulas for the 5D5/2 entrance each reproduce the other's
/// printed number.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formula {
    Printed,
    #[default]
    ValueConsistent,
}

impl std::str::FromStr for Formula {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "printed" => Ok(Formula::Printed),
            "value-consistent" => Ok(Formula::ValueConsistent),
            _ => Err(format!(
                "unknown formula variant '{s}' (printed or value-consistent)"
            )),
        }
    }
}

/// Single-passage factor along a path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    T,
    NotT,
    B,
    NotB,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathTerm {
    pub entrance: Entrance,
    pub process: ProcessLabel,
    /// Number of equivalent paths (in or out).
    pub paths: f64,
    pub factors: Vec<Factor>,
}

/// Four-channel network: crossings T (upper) and B (lower), statistical
/// entrance weights of the Ω = 0⁺ state, and the path table.
#[derive(Clone, Debug, PartialEq)]
pub struct LzNetwork {
    pub crossings: [&'static str; 2],
    pub weights: [(Entrance, f64); 2],
    pub paths: Vec<PathTerm>,
}

/// Probabilities from one entrance; EC holds the weight not transferred.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkOutcome {
    pub weight: f64,
    pub probabilities: PerProcess<f64>,
}

impl LzNetwork {
    pub fn four_channel(formula: Formula) -> Self {
        use Factor::*;
        let (nrce, fsq) = match formula {
            Formula::ValueConsistent => (vec![T, NotT, B], vec![T, NotT, NotB]),
            Formula::Printed => (vec![T, NotT, NotB], vec![T, NotT, B]),
        };
        let term = |entrance, process, factors| PathTerm {
            entrance,
            process,
            paths: 2.0,
            factors,
        };
        Self {
            crossings: ["T", "B"],
            weights: [(Entrance::D52, 1.0 / 12.0), (Entrance::D32, 1.0 / 8.0)],
            paths: vec![
                term(Entrance::D52, ProcessLabel::NRCE, nrce),
                term(Entrance::D52, ProcessLabel::FSQ, fsq),
                term(Entrance::D32, ProcessLabel::NRCE, vec![NotB, B]),
            ],
        }
    }

    pub fn weight(&self, entrance: Entrance) -> f64 {
        self.weights
            .iter()
            .find(|w| w.0 == entrance)
            .map(|w| w.1)
            .unwrap_or(0.0)
    }

    pub fn evaluate(&self, p_t: f64, p_b: f64, entrance: Entrance) -> NetworkOutcome {
        let weight = self.weight(entrance);
        let mut probabilities = PerProcess::zero();
        for term in self.paths.iter().filter(|t| t.entrance == entrance) {
            let product: f64 = term
                .factors
                .iter()
                .map(|f| match f {
                    Factor::T => p_t,
                    Factor::NotT => 1.0 - p_t,
                    Factor::B => p_b,
                    Factor::NotB => 1.0 - p_b,
                })
                .product();
            probabilities[term.process] += weight * term.paths * product;
        }
        probabilities[ProcessLabel::EC] = weight - probabilities.inelastic();
        NetworkOutcome {
            weight,
            probabilities,
        }
    }
}

/// Network probabilities for single-passage probabilities P_T and P_B.
pub fn fclz_network(
    p_t: f64,
    p_b: f64,
    entrance: Entrance,
    formula: Formula,
) -> Result<NetworkOutcome> {
    for (name, p) in [("P_T", p_t), ("P_B", p_b)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("{name} = {p} is not a probability")));
        }
    }
    Ok(LzNetwork::four_channel(formula).evaluate(p_t, p_b, entrance))
}

/// Search window for the X₁ avoided crossings, a₀.
pub const SEARCH_WINDOW: (f64, f64) = (8.0, 14.0);
/// Gaps below this (Eₕ) are treated as true crossings.
const MIN_GAP: f64 = 1e-8;
/// Half-width of the finite-difference stencil for diabatic slopes, a₀.
const SLOPE_STEP: f64 = 0.5;

/// An avoided crossing between adjacent Ω = 0⁺ adiabats. `u` is the mean
/// adiabatic energy at R_c relative to S+S.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AvoidedCrossing {
    /// Lower adiabat index (0-based, ascending energy).
    pub lower: usize,
    pub r_c: f64,
    pub w_c: f64,
    pub df: f64,
    pub u: f64,
}

impl AvoidedCrossing {
    /// The crossing seen from an entrance threshold (Hartree above S+S).
    pub fn relative_to(&self, threshold: f64) -> LzCrossing {
        LzCrossing {
            r_c: self.r_c,
            w_c: self.w_c,
            df: self.df,
            u_c: self.u - threshold,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FclzFromPotentials {
    pub top: AvoidedCrossing,
    pub bottom: AvoidedCrossing,
    pub p_t: f64,
    /// P_B seen from 5D5/2 and from 5D3/2.
    pub p_b52: f64,
    pub p_b32: f64,
    /// (R, ascending adiabats) around the crossings.
    pub curves: Vec<(f64, Vec<f64>)>,
}

fn omega0_matrix(surface: &PotentialSurfaceSet, idx: &[usize], r: f64) -> DMatrix<f64> {
    let m = surface.matrix(r);
    DMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}

fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// Golden-section minimum of `f` on [a, b].
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-9 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Avoided crossings between adjacent Ω = 0⁺ adiabats inside the search
/// window, linearized: W_c is half the minimum gap and dF the difference of
/// the eigenvalues of dH/dR projected on the two adiabatic states at R_c.
pub fn omega0_avoided_crossings(surface: &PotentialSurfaceSet) -> Vec<AvoidedCrossing> {
    let idx = omega_block_indices("0+");
    let n = idx.len();
    let (lo, hi) = SEARCH_WINDOW;
    let step = 0.01;
    let grid: Vec<f64> = (0..=((hi - lo) / step).round() as usize)
        .map(|i| lo + i as f64 * step)
        .collect();
    let gaps: Vec<Vec<f64>> = grid
        .iter()
        .map(|&r| {
            let (e, _) = sorted_eigen(omega0_matrix(surface, &idx, r));
            e.windows(2).map(|w| w[1] - w[0]).collect()
        })
        .collect();
    let mut out = Vec::new();
    for k in 0..n - 1 {
        for i in 1..grid.len() - 1 {
            let (g0, g1, g2) = (gaps[i - 1][k], gaps[i][k], gaps[i + 1][k]);
            if !(g1 < g0 && g1 <= g2) {
                continue;
            }
            let gap = |r: f64| {
                let (e, _) = sorted_eigen(omega0_matrix(surface, &idx, r));
                e[k + 1] - e[k]
            };
            let r_c = golden_min(gap, grid[i - 1], grid[i + 1]);
            let (e, v) = sorted_eigen(omega0_matrix(surface, &idx, r_c));
            let min_gap = e[k + 1] - e[k];
            if min_gap < MIN_GAP {
                continue;
            }
            let dh = (omega0_matrix(surface, &idx, r_c + SLOPE_STEP)
                - omega0_matrix(surface, &idx, r_c - SLOPE_STEP))
                / (2.0 * SLOPE_STEP);
            let basis = v.columns(k, 2).into_owned();
            let proj = basis.transpose() * dh * &basis;
            let slopes = SymmetricEigen::new(proj).eigenvalues;
            out.push(AvoidedCrossing {
                lower: k,
                r_c,
                w_c: 0.5 * min_gap,
                df: (slopes[0] - slopes[1]).abs(),
                u: 0.5 * (e[k] + e[k + 1]),
            });
        }
    }
    out
}

/// Locates the two X₁ avoided crossings in the Ω = 0⁺ block (T above B) and
/// evaluates their single-passage probabilities at zero collision energy.
pub fn fclz_from_potentials(
    surface: &PotentialSurfaceSet,
    mass: f64,
) -> Result<FclzFromPotentials> {
    let mut found = omega0_avoided_crossings(surface);
    if found.len() != 2 {
        return Err(Error::Topology(format!(
            "expected two avoided crossings in [{}, {}] a0, found {} at R = {:?}",
            SEARCH_WINDOW.0,
            SEARCH_WINDOW.1,
            found.len(),
            found.iter().map(|c| c.r_c).collect::<Vec<_>>()
        )));
    }
    found.sort_by(|a, b| a.u.total_cmp(&b.u));
    let (bottom, top) = (found[0], found[1]);
    let th = &surface.thresholds;
    let p_t = lz_probability(&top.relative_to(th.sd52), 0.0, mass)?;
    let p_b52 = lz_probability(&bottom.relative_to(th.sd52), 0.0, mass)?;
    let p_b32 = lz_probability(&bottom.relative_to(th.sd32), 0.0, mass)?;
    let idx = omega_block_indices("0+");
    let (r0, r1) = (bottom.r_c.min(top.r_c) - 1.0, bottom.r_c.max(top.r_c) + 1.0);
    let curves = (0..=100)
        .map(|i| {
            let r = r0 + (r1 - r0) * i as f64 / 100.0;
            (r, sorted_eigen(omega0_matrix(surface, &idx, r)).0)
        })
        .collect();
    Ok(FclzFromPotentials {
        top,
        bottom,
        p_t,
        p_b52,
        p_b32,
        curves,
    })
}
