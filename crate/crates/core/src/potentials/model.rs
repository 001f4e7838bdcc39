//! Model parameters as read from configuration and the construction of a
//! [`PotentialSurfaceSet`] from them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::pec::{PecModel, PecParams};
use super::soc::{diabatize_swap, SocModel, SocShape, X1Coupling};
use super::spline::CubicSpline;
use super::surface::PotentialSurfaceSet;
use super::table::read_table;
use crate::basis::{
    atomic_fine_structure_matrix, enumerate_case_a, Asymptote, Thresholds, N_STATES,
};
use crate::error::{Error, Result};
use crate::units::{cm1_to_hartree, hartree_to_cm1};

/// Default model shipped with the crate.
pub const DEFAULT_MODEL_TOML: &str = include_str!("../../data/default_model.toml");

/// Curve used by each of the 16 states, in matrix order.
pub const STATE_CURVES: [&str; N_STATES] = [
    "11Sigma", "21Sigma", "31Sigma", "13Pi", "13Sigma", "23Sigma", "13Pi", "13Sigma", "23Sigma",
    "11Pi", "13Pi", "13Delta", "13Pi", "11Delta", "13Delta", "13Delta",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub reduced_mass_au: f64,
    pub c4_au: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdParams {
    pub ion_s_cm1: f64,
    pub sd32_cm1: f64,
    pub fine_structure_cm1: f64,
}

impl ThresholdParams {
    pub fn thresholds(&self) -> Thresholds {
        Thresholds::from_cm1(self.ion_s_cm1, self.sd32_cm1, self.fine_structure_cm1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct X1Params {
    pub w_au: f64,
    pub rc: f64,
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SocShapeKind {
    Constant,
    TanhSwitch,
    Tabulated,
    /// Constant at the separated-atom fine-structure value.
    Atomic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SocParams {
    pub shape: SocShapeKind,
    /// Constant value, or the short-range value of a tanh switch, cm⁻¹.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude_cm1: Option<f64>,
    /// Long-range value, cm⁻¹. Defaults to the atomic value for S+D pairs and 0 otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asymptote_cm1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    /// Two-column table (R in a0, value in Eh).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    /// Partner pair "i_j" whose inner branch is exchanged with this one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swap_with: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_swap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blend_width: Option<f64>,
}

/// Which reference the tabulated X₁ crossing energy is measured from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossingReference {
    /// Above the S+S asymptote.
    Ground,
    /// Below the S+D(3/2) asymptote.
    SdThreshold,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingTargets {
    pub x1_r: f64,
    pub x1_energy_cm1: f64,
    pub x1_reference: CrossingReference,
    pub x3_r: f64,
    pub x3_energy_cm1: f64,
    /// Relative tolerance before a warning is emitted.
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub system: SystemParams,
    pub thresholds: ThresholdParams,
    pub x1: X1Params,
    pub crossings: CrossingTargets,
    pub pec: BTreeMap<String, PecParams>,
    #[serde(default)]
    pub soc: BTreeMap<String, SocParams>,
}

impl Default for ModelParams {
    fn default() -> Self {
        toml::from_str(DEFAULT_MODEL_TOML).expect("bundled model parses")
    }
}

/// Parses "i_j" (1-based) into 0-based indices.
pub fn parse_pair(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("coupling key '{key}' should look like '8_11'"));
    let (a, b) = key.split_once('_').ok_or_else(bad)?;
    let a: usize = a.parse().map_err(|_| bad())?;
    let b: usize = b.parse().map_err(|_| bad())?;
    if a == 0 || b == 0 || a > N_STATES || b > N_STATES {
        return Err(bad());
    }
    Ok((a.min(b) - 1, a.max(b) - 1))
}

fn resolve(base: Option<&Path>, file: &str) -> PathBuf {
    match base {
        Some(dir) if Path::new(file).is_relative() => dir.join(file),
        _ => PathBuf::from(file),
    }
}

/// Reported position of a diabatic crossing next to its tabulated target.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossingDiagnostic {
    pub name: &'static str,
    pub r: f64,
    /// Energy of the crossing above S+S, cm⁻¹.
    pub energy_cm1: f64,
    /// Energy in the units of the target's reference, cm⁻¹.
    pub compared_energy_cm1: f64,
    pub target_r: f64,
    pub target_energy_cm1: f64,
    pub within_tolerance: bool,
}

impl ModelParams {
    pub fn thresholds(&self) -> Thresholds {
        self.thresholds.thresholds()
    }

    pub fn x1(&self) -> X1Coupling {
        X1Coupling {
            w: self.x1.w_au,
            rc: self.x1.rc,
            delta: self.x1.delta,
        }
    }

    /// Builds the surface; relative table paths are taken from `base_dir`.
    pub fn build_surface(&self, base_dir: Option<&Path>) -> Result<PotentialSurfaceSet> {
        let thresholds = self.thresholds();
        thresholds.validate().map_err(Error::Config)?;
        let states = enumerate_case_a();

        let mut curves: BTreeMap<&str, PecModel> = BTreeMap::new();
        for (idx, name) in STATE_CURVES.iter().enumerate() {
            let asymptote = states[idx].asymptote;
            let threshold = thresholds.asymptote_energy(asymptote);
            if let Some(existing) = curves.get(name) {
                debug_assert_eq!(existing.threshold, threshold);
                continue;
            }
            let params = self
                .pec
                .get(*name)
                .ok_or_else(|| Error::Config(format!("missing [pec.{name}] section")))?;
            let model = match &params.table {
                Some(file) => PecModel::tabulated(
                    name,
                    &resolve(base_dir, file),
                    threshold,
                    params.c4.unwrap_or(self.system.c4_au),
                )?,
                None => PecModel::morse_long_range(name, params, threshold, self.system.c4_au)?,
            };
            curves.insert(name, model);
        }
        for key in self.pec.keys() {
            if !STATE_CURVES.contains(&key.as_str()) {
                return Err(Error::Config(format!("unknown curve [pec.{key}]")));
            }
        }
        let pecs: Vec<PecModel> = STATE_CURVES.iter().map(|n| curves[n].clone()).collect();

        let atomic = atomic_fine_structure_matrix(&thresholds);
        let mut shapes: BTreeMap<(usize, usize), SocShape> = BTreeMap::new();
        // every S+D pair with a non-zero atomic value starts at that constant
        for i in 0..N_STATES {
            for j in i..N_STATES {
                if atomic[(i, j)].abs() > 1e-15 {
                    shapes.insert((i, j), SocShape::Constant(atomic[(i, j)]));
                }
            }
        }
        for (key, p) in &self.soc {
            let pair = parse_pair(key)?;
            let intra_sd = states[pair.0].asymptote == Asymptote::SD
                && states[pair.1].asymptote == Asymptote::SD;
            let default_asymptote = if intra_sd { atomic[pair] } else { 0.0 };
            let asymptote = p
                .asymptote_cm1
                .map(cm1_to_hartree)
                .unwrap_or(default_asymptote);
            let need = |v: Option<f64>, what: &str| {
                v.ok_or_else(|| Error::Config(format!("[soc.{key}] needs '{what}'")))
            };
            let shape = match p.shape {
                SocShapeKind::Atomic => SocShape::Constant(atomic[pair]),
                SocShapeKind::Constant => {
                    SocShape::Constant(cm1_to_hartree(need(p.amplitude_cm1, "amplitude_cm1")?))
                }
                SocShapeKind::TanhSwitch => SocShape::TanhSwitch {
                    short_range: cm1_to_hartree(need(p.amplitude_cm1, "amplitude_cm1")?),
                    asymptote,
                    center: p.center.unwrap_or(10.0),
                    width: p.width.unwrap_or(0.5),
                },
                SocShapeKind::Tabulated => {
                    let file = p
                        .table
                        .as_ref()
                        .ok_or_else(|| Error::Config(format!("[soc.{key}] needs 'table'")))?;
                    let (r, v) = read_table(&resolve(base_dir, file))?;
                    SocShape::Tabulated(CubicSpline::new(r, v))
                }
            };
            shapes.insert(pair, shape);
        }

        let mut socs: Vec<SocModel> = Vec::new();
        let mut swapped: BTreeMap<(usize, usize), SocModel> = BTreeMap::new();
        for (key, p) in &self.soc {
            let Some(partner_key) = &p.swap_with else {
                continue;
            };
            let a = parse_pair(key)?;
            let b = parse_pair(partner_key)?;
            if swapped.contains_key(&a) || swapped.contains_key(&b) {
                return Err(Error::Config(format!(
                    "[soc.{key}] takes part in two swaps"
                )));
            }
            let shape_of = |pair| {
                shapes.get(&pair).cloned().ok_or_else(|| {
                    Error::Config(format!(
                        "swap partner {partner_key} of [soc.{key}] is undefined"
                    ))
                })
            };
            let (sa, sb) = diabatize_swap(
                &SocModel {
                    pair: a,
                    shape: shape_of(a)?,
                },
                &SocModel {
                    pair: b,
                    shape: shape_of(b)?,
                },
                p.r_swap.unwrap_or(self.x1.rc),
                p.blend_width.unwrap_or(self.x1.delta),
            );
            swapped.insert(a, sa);
            swapped.insert(b, sb);
        }
        for (pair, shape) in shapes {
            match swapped.remove(&pair) {
                Some(model) => socs.push(model),
                None => socs.push(SocModel { pair, shape }),
            }
        }

        PotentialSurfaceSet::new(pecs, socs, self.x1(), thresholds)
    }

    /// Locates the X₁ (states 2/3) and X₃ (states 8/11) diabatic crossings
    /// and compares them with the tabulated targets.
    pub fn crossing_diagnostics(&self, surface: &PotentialSurfaceSet) -> Vec<CrossingDiagnostic> {
        let t = &self.crossings;
        let mut out = Vec::new();
        let sd32 = hartree_to_cm1(surface.thresholds.sd32);

        if let Some((r, e)) = nearest_crossing(surface, 1, 2, 8.0, 14.0, t.x1_r) {
            let e_cm = hartree_to_cm1(e);
            let compared = match t.x1_reference {
                CrossingReference::Ground => e_cm,
                CrossingReference::SdThreshold => sd32 - e_cm,
            };
            out.push(CrossingDiagnostic {
                name: "X1",
                r,
                energy_cm1: e_cm,
                compared_energy_cm1: compared,
                target_r: t.x1_r,
                target_energy_cm1: t.x1_energy_cm1,
                within_tolerance: relative_miss(r, t.x1_r) <= t.tolerance
                    && relative_miss(compared, t.x1_energy_cm1) <= t.tolerance,
            });
        }
        if let Some((r, e)) = nearest_crossing(surface, 7, 10, 5.0, 8.0, t.x3_r) {
            let e_cm = hartree_to_cm1(e);
            out.push(CrossingDiagnostic {
                name: "X3",
                r,
                energy_cm1: e_cm,
                compared_energy_cm1: e_cm,
                target_r: t.x3_r,
                target_energy_cm1: t.x3_energy_cm1,
                within_tolerance: relative_miss(r, t.x3_r) <= t.tolerance
                    && relative_miss(e_cm, t.x3_energy_cm1) <= t.tolerance,
            });
        }
        out
    }

    /// Builds the surface and logs a warning for every crossing off target.
    pub fn build_checked(
        &self,
        base_dir: Option<&Path>,
    ) -> Result<(PotentialSurfaceSet, Vec<CrossingDiagnostic>)> {
        let surface = self.build_surface(base_dir)?;
        let diagnostics = self.crossing_diagnostics(&surface);
        for d in &diagnostics {
            if !d.within_tolerance {
                log::warn!(
                    "{} crossing of the model curves at R = {:.3} a0, {:.1} cm-1 (target {:.2} a0, {:.1} cm-1)",
                    d.name,
                    d.r,
                    d.compared_energy_cm1,
                    d.target_r,
                    d.target_energy_cm1
                );
            }
        }
        if !diagnostics.iter().any(|d| d.name == "X1") {
            log::warn!("no X1 crossing between states 2 and 3 in [8, 14] a0");
        }
        Ok((surface, diagnostics))
    }
}

fn relative_miss(value: f64, target: f64) -> f64 {
    ((value - target) / target).abs()
}

/// Crossings of the diagonal elements i and j inside [lo, hi], found by
/// scanning for sign changes and bisecting. Returns (R, energy) pairs.
pub fn diabatic_crossings(
    surface: &PotentialSurfaceSet,
    i: usize,
    j: usize,
    lo: f64,
    hi: f64,
) -> Vec<(f64, f64)> {
    let diff = |r: f64| {
        let m = surface.matrix(r);
        (m[(i, i)] - m[(j, j)], m[(i, i)])
    };
    let n = 400;
    let step = (hi - lo) / n as f64;
    let mut found = Vec::new();
    let mut prev = lo;
    let mut f_prev = diff(lo).0;
    for k in 1..=n {
        let r = lo + k as f64 * step;
        let f = diff(r).0;
        if f_prev.signum() != f.signum() {
            let (mut a, mut b, mut fa) = (prev, r, f_prev);
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                let fm = diff(mid).0;
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            let r_c = 0.5 * (a + b);
            found.push((r_c, diff(r_c).1));
        }
        prev = r;
        f_prev = f;
    }
    found
}

fn nearest_crossing(
    surface: &PotentialSurfaceSet,
    i: usize,
    j: usize,
    lo: f64,
    hi: f64,
    target: f64,
) -> Option<(f64, f64)> {
    diabatic_crossings(surface, i, j, lo, hi)
        .into_iter()
        .min_by(|a, b| (a.0 - target).abs().total_cmp(&(b.0 - target).abs()))
}
