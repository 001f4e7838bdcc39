//! Narrow peaks in scanned cross sections and the block behind each.

use std::collections::BTreeMap;

use ionscat::observables::{ProcessLabel, ScatteringModel};
use ionscat::{Error, Result};

use crate::tables::{float, num, Table};

/// A peak has to exceed both neighbours by this factor.
pub const PEAK_RATIO: f64 = 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceRecord {
    pub process: ProcessLabel,
    /// J, or ℓ for FCQS scans.
    pub big_j: i32,
    pub parity: i32,
    pub energy_k: f64,
    /// a₀².
    pub sigma: f64,
    /// Full width at half maximum on the scan grid, kelvin.
    pub width_k: f64,
}

/// One process along the energy grid.
#[derive(Clone, Debug, Default)]
pub struct Series {
    pub process: Option<ProcessLabel>,
    pub energies_k: Vec<f64>,
    pub total: Vec<f64>,
    /// Contribution of each (J, p) block to the total at each energy.
    pub shares: Vec<Vec<(i32, i32, f64)>>,
}

fn crossing(e0: f64, s0: f64, e1: f64, s1: f64, level: f64) -> f64 {
    if s1 == s0 {
        return e0;
    }
    e0 + (level - s0) * (e1 - e0) / (s1 - s0)
}

/// Peaks of `series` whose value exceeds both grid neighbours by more than
/// [`PEAK_RATIO`]; end points are never peaks.
pub fn find_resonances(series: &Series) -> Vec<ResonanceRecord> {
    let (e, s) = (&series.energies_k, &series.total);
    let Some(process) = series.process else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for k in 1..s.len().saturating_sub(1) {
        if !(s[k] > PEAK_RATIO * s[k - 1] && s[k] > PEAK_RATIO * s[k + 1]) {
            continue;
        }
        let half = 0.5 * s[k];
        let mut lo = k;
        while lo > 0 && s[lo] > half {
            lo -= 1;
        }
        let left = if s[lo] <= half {
            crossing(e[lo], s[lo], e[lo + 1], s[lo + 1], half)
        } else {
            e[0]
        };
        let mut hi = k;
        while hi + 1 < s.len() && s[hi] > half {
            hi += 1;
        }
        let right = if s[hi] <= half {
            crossing(e[hi - 1], s[hi - 1], e[hi], s[hi], half)
        } else {
            e[s.len() - 1]
        };
        let (big_j, parity) = series
            .shares
            .get(k)
            .and_then(|b| {
                b.iter()
                    .copied()
                    .max_by(|x, y| x.2.total_cmp(&y.2).then(y.0.cmp(&x.0)))
            })
            .map_or((-1, 0), |(j, p, _)| (j, p));
        out.push(ResonanceRecord {
            process,
            big_j,
            parity,
            energy_k: e[k],
            sigma: s[k],
            width_k: right - left,
        });
    }
    out
}

/// Per-process series from an xsec table. Block shares carry the 2J+1
/// weight, and the 1/2 of the parity average for MCQS.
pub fn series_from_xsec(table: &Table) -> Result<Vec<Series>> {
    let model: ScatteringModel = match table.get_meta("model") {
        Some("FCQS") => ScatteringModel::Fcqs,
        Some("MCQS") => ScatteringModel::Mcqs,
        other => {
            return Err(Error::Archive(format!(
                "unknown model {other:?} in xsec table"
            )))
        }
    };
    let half = if model == ScatteringModel::Mcqs {
        0.5
    } else {
        1.0
    };
    let (ce, cp, cj, cq, cs) = (
        table.column("energy_K")?,
        table.column("process")?,
        table.column("J_or_ell")?,
        table.column("parity")?,
        table.column("sigma_a0sq")?,
    );
    // process -> energy (bits) -> (energy, total, shares)
    type Slot = (f64, Option<f64>, Vec<(i32, i32, f64)>);
    let mut by: BTreeMap<ProcessLabel, BTreeMap<u64, Slot>> = BTreeMap::new();
    for row in &table.rows {
        let e = float(&row[ce])?;
        let p: ProcessLabel = row[cp].parse().map_err(Error::Archive)?;
        let v = float(&row[cs])?;
        let slot = by
            .entry(p)
            .or_default()
            .entry(e.to_bits())
            .or_insert((e, None, Vec::new()));
        match (row[cj].as_str(), row[cq].as_str()) {
            ("sum", "total") => slot.1 = Some(v),
            ("sum", _) => {}
            (j, q) => {
                let big_j: i32 = j
                    .parse()
                    .map_err(|_| Error::Archive(format!("bad J '{j}'")))?;
                let parity = if q == "-" { -1 } else { 1 };
                slot.2
                    .push((big_j, parity, half * (2 * big_j + 1) as f64 * v));
            }
        }
    }
    Ok(by
        .into_iter()
        .map(|(p, slots)| {
            let mut s = Series {
                process: Some(p),
                ..Series::default()
            };
            // energies with failed blocks have no total and are left out
            for (e, total, shares) in slots.into_values().filter(|x| x.1.is_some()) {
                s.energies_k.push(e);
                s.total.push(total.unwrap());
                s.shares.push(shares);
            }
            s
        })
        .collect())
}

pub fn resonance_table(records: &[ResonanceRecord], hash: &str) -> Table {
    let mut t = Table::new(&[
        "process",
        "J_or_ell",
        "parity",
        "peak_energy_K",
        "peak_sigma_a0sq",
        "width_K",
    ]);
    t.meta("hash", hash);
    t.meta(
        "criterion",
        format!("peak above {PEAK_RATIO}x both neighbours"),
    );
    for r in records {
        t.push(vec![
            r.process.to_string(),
            r.big_j.to_string(),
            if r.parity < 0 { "-" } else { "+" }.into(),
            num(r.energy_k),
            num(r.sigma),
            num(r.width_k),
        ]);
    }
    t
}
