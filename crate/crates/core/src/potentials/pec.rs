use std::path::Path;

use serde::{Deserialize, Serialize};

use super::spline::CubicSpline;
use super::table::read_table;
use crate::error::{Error, Result};
use crate::units::cm1_to_hartree;

/// Constants of one model curve as written in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PecParams {
    /// Equilibrium distance, a0.
    pub re: f64,
    /// Well depth below the dissociation energy, cm⁻¹.
    pub de_cm1: f64,
    /// Long-range coefficient of -C6/R⁶, a.u. (sign as tabulated).
    pub c6: f64,
    /// Overrides the shared -C4/R⁴ coefficient.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c4: Option<f64>,
    /// Morse steepness, 1/a0. Solved from the switch-point match when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morse_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch_radius: Option<f64>,
    /// Half-width of the Morse→long-range blend, a0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch_width: Option<f64>,
    /// Two-column table (R in a0, V in Eh) replacing the analytic form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
}

const DEFAULT_SWITCH_WIDTH: f64 = 1.0;

#[derive(Clone, Debug)]
pub enum PecForm {
    MorseLongRange {
        re: f64,
        de: f64,
        a: f64,
        switch_radius: f64,
        switch_width: f64,
    },
    Tabulated {
        spline: CubicSpline,
        /// -C6 tail coefficient fixed by value continuity at the last sample.
        tail_c6: f64,
    },
}

/// One potential energy curve, Hartree versus a0.
#[derive(Clone, Debug)]
pub struct PecModel {
    pub label: String,
    pub threshold: f64,
    pub c4: f64,
    pub c6: f64,
    pub form: PecForm,
}

/// C² step rising from 0 at t = -1 to 1 at t = +1, exactly constant outside.
fn smooth_step(t: f64) -> f64 {
    if t <= -1.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let u = 0.5 * (t + 1.0);
        u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }
}

fn long_range(r: f64, c4: f64, c6: f64) -> f64 {
    let r2 = r * r;
    let r4 = r2 * r2;
    -c4 / r4 - c6 / (r4 * r2)
}

impl PecModel {
    /// Analytic Morse curve joined smoothly to -C4/R⁴ - C6/R⁶.
    ///
    /// Without explicit overrides the switch radius is placed at least 3 a0
    /// outside R_e and beyond the turnover of a repulsive C6 term, and the
    /// Morse steepness is solved so both branches agree there.
    pub fn morse_long_range(
        label: &str,
        params: &PecParams,
        threshold: f64,
        shared_c4: f64,
    ) -> Result<Self> {
        let fit_error = |reason: String| Error::ModelFit {
            what: label.to_string(),
            reason,
        };
        if !(params.re > 0.0 && params.de_cm1 > 0.0) {
            return Err(fit_error(format!(
                "need Re > 0 and De > 0, got {} and {}",
                params.re, params.de_cm1
            )));
        }
        let c4 = params.c4.unwrap_or(shared_c4);
        let c6 = params.c6;
        let re = params.re;
        let de = cm1_to_hartree(params.de_cm1);
        let switch_width = params.switch_width.unwrap_or(DEFAULT_SWITCH_WIDTH);

        let turnover = if c6 < 0.0 && c4 > 0.0 {
            (1.5 * c6.abs() / c4).sqrt()
        } else {
            0.0
        };
        let switch_radius = params
            .switch_radius
            .unwrap_or_else(|| (re + 3.0).max(turnover + 1.0) + switch_width);
        if switch_radius - switch_width <= re {
            return Err(fit_error(format!(
                "switch region [{:.2}, {:.2}] reaches the equilibrium distance {re}",
                switch_radius - switch_width,
                switch_radius + switch_width
            )));
        }

        let a = match params.morse_a {
            Some(a) if a > 0.0 => a,
            Some(a) => {
                return Err(fit_error(format!(
                    "Morse steepness must be positive, got {a}"
                )))
            }
            None => {
                let tail = long_range(switch_radius, c4, c6);
                let fraction = 1.0 + tail / de;
                if !(tail < 0.0 && fraction > 0.0) {
                    return Err(fit_error(format!(
                        "long-range value {tail:.3e} Eh at R = {switch_radius:.2} is not inside (-De, 0) with De = {de:.3e} Eh"
                    )));
                }
                -(1.0 - fraction.sqrt()).ln() / (switch_radius - re)
            }
        };

        Ok(Self {
            label: label.to_string(),
            threshold,
            c4,
            c6,
            form: PecForm::MorseLongRange {
                re,
                de,
                a,
                switch_radius,
                switch_width,
            },
        })
    }

    /// Curve interpolated from a table, continued inward linearly and outward
    /// with the long-range tail.
    pub fn tabulated(label: &str, path: &Path, threshold: f64, c4: f64) -> Result<Self> {
        let (r, v) = read_table(path)?;
        Self::from_samples(label, r, v, threshold, c4)
    }

    pub fn from_samples(
        label: &str,
        r: Vec<f64>,
        v: Vec<f64>,
        threshold: f64,
        c4: f64,
    ) -> Result<Self> {
        let r_last = *r.last().expect("table checked non-empty");
        let v_last = *v.last().expect("table checked non-empty");
        let r6 = r_last.powi(6);
        // threshold - C4/R⁴ - C6/R⁶ = v_last at the last sample
        let tail_c6 = -(v_last - threshold + c4 / r_last.powi(4)) * r6;
        Ok(Self {
            label: label.to_string(),
            threshold,
            c4,
            c6: tail_c6,
            form: PecForm::Tabulated {
                spline: CubicSpline::new(r, v),
                tail_c6,
            },
        })
    }

    pub fn value(&self, r: f64) -> f64 {
        match &self.form {
            PecForm::MorseLongRange {
                re,
                de,
                a,
                switch_radius,
                switch_width,
            } => {
                let s = smooth_step((r - switch_radius) / switch_width);
                let morse = if s < 1.0 {
                    let y = (-a * (r - re)).exp();
                    de * ((1.0 - y) * (1.0 - y) - 1.0)
                } else {
                    0.0
                };
                let tail = if s > 0.0 {
                    long_range(r, self.c4, self.c6)
                } else {
                    0.0
                };
                self.threshold + (1.0 - s) * morse + s * tail
            }
            PecForm::Tabulated { spline, tail_c6 } => {
                if r > spline.x_max() {
                    self.threshold + long_range(r, self.c4, *tail_c6)
                } else if r < spline.x_min() {
                    let (v0, d0) = spline.eval_with_derivative(spline.x_min());
                    v0 + d0 * (r - spline.x_min())
                } else {
                    spline.eval(r)
                }
            }
        }
    }

    pub fn morse_parameters(&self) -> Option<(f64, f64, f64, f64)> {
        match self.form {
            PecForm::MorseLongRange {
                re,
                de,
                a,
                switch_radius,
                ..
            } => Some((re, de, a, switch_radius)),
            PecForm::Tabulated { .. } => None,
        }
    }
}
