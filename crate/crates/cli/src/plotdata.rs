//! CSV bundles behind the standard figure styles, one file per panel.

use std::fs;
use std::path::{Path, PathBuf};

use ionscat::basis::{enumerate_case_a, FrameTransform};
use ionscat::observables::{Langevin, ProcessLabel};
use ionscat::potentials::adiabats::{adiabats_case_c, adiabats_case_e, Rotation};
use ionscat::potentials::PotentialSurfaceSet;
use ionscat::units::{hartree_to_cm1, kelvin_to_hartree};
use ionscat::{Error, Result};

use crate::config::Resolved;
use crate::runner::{self, RATES_ENERGY_FILE, RATES_FILE, XSEC_FILE};
use crate::tables::{float, num, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Style {
    Xsec,
    Rates,
    Pecs,
    Adiabats,
}

/// Outer end of the potential panels, a₀.
pub const PEC_R_MAX: f64 = 60.0;
pub const PEC_STEP: f64 = 0.05;

/// Reads a scan artifact, checking it belongs to the current configuration.
pub fn artifact(out: &Path, name: &str, hash: &str, producer: &str) -> Result<Table> {
    let path = out.join(name);
    if !path.exists() {
        return Err(Error::Config(format!(
            "missing {}; run `ionscat {producer}` with this configuration first",
            path.display()
        )));
    }
    let table = Table::read(&path)?;
    match table.get_meta("hash") {
        Some(h) if h == hash => Ok(table),
        other => Err(Error::Config(format!(
            "{} was written by configuration {} but the current one is {hash}; rerun `ionscat {producer}`",
            path.display(),
            other.unwrap_or("<none>")
        ))),
    }
}

/// Writes the panels of `style` under `out/plotdata` and returns their paths.
pub fn emit(run: &Resolved, out: &Path, style: Style, j_values: &[i32]) -> Result<Vec<PathBuf>> {
    // check every input before writing anything
    let inputs: Vec<Table> = match style {
        Style::Xsec => vec![artifact(out, XSEC_FILE, &run.hash, "xsec-scan")?],
        Style::Rates => {
            let mut missing = Vec::new();
            let mut tables = Vec::new();
            for (name, producer) in [
                (RATES_ENERGY_FILE, "xsec-scan"),
                (RATES_FILE, "thermal-rates"),
                (XSEC_FILE, "xsec-scan"),
            ] {
                match artifact(out, name, &run.hash, producer) {
                    Ok(t) => tables.push(t),
                    Err(e) => missing.push(e.to_string()),
                }
            }
            if !missing.is_empty() {
                return Err(Error::Config(missing.join("; ")));
            }
            tables
        }
        Style::Pecs | Style::Adiabats => Vec::new(),
    };
    let dir = out.join("plotdata");
    fs::create_dir_all(&dir)?;
    let mut panels: Vec<(String, Table)> = match style {
        Style::Xsec => xsec_panels(run, &inputs[0])?,
        Style::Rates => rate_panels(run, &inputs[0], &inputs[1], &inputs[2])?,
        Style::Pecs => pec_panels(&run.surface()?),
        Style::Adiabats => adiabat_panels(run, &run.surface()?, j_values),
    };
    let mut written = Vec::new();
    for (name, table) in &mut panels {
        if table.get_meta("hash").is_none() {
            table.meta.insert(0, ("hash".into(), run.hash.clone()));
        }
        let path = dir.join(name);
        table.write(&path)?;
        written.push(path);
    }
    Ok(written)
}

fn xsec_panels(run: &Resolved, xsec: &Table) -> Result<Vec<(String, Table)>> {
    let langevin = Langevin::new(run.c4(), run.mass());
    let (ce, cp, cj, cq, cs) = (
        xsec.column("energy_K")?,
        xsec.column("process")?,
        xsec.column("J_or_ell")?,
        xsec.column("parity")?,
        xsec.column("sigma_a0sq")?,
    );
    let mut out = Vec::new();
    for process in run.config.scan.processes() {
        // energy -> (+, -, total)
        let mut rows: Vec<(f64, [Option<f64>; 3])> = Vec::new();
        for row in xsec.rows.iter().filter(|r| r[cj] == "sum") {
            if row[cp] != process.to_string() {
                continue;
            }
            let e = float(&row[ce])?;
            let slot = match row[cq].as_str() {
                "+" => 0,
                "-" => 1,
                _ => 2,
            };
            if rows.last().map(|r| r.0) != Some(e) {
                rows.push((e, [None; 3]));
            }
            rows.last_mut().unwrap().1[slot] = Some(float(&row[cs])?);
        }
        let mut t = Table::new(&[
            "energy_K",
            "sigma_plus_a0sq",
            "sigma_minus_a0sq",
            "sigma_total_a0sq",
            "sigma_langevin_a0sq",
        ]);
        t.meta("hash", &run.hash);
        t.meta(
            "panel",
            format!(
                "{} {} from {}",
                run.config.scan.model, process, run.config.scan.entrance
            ),
        );
        t.meta("missing", "empty cells where a parity was not scanned");
        for (e, v) in rows {
            let cell = |x: Option<f64>| x.map(num).unwrap_or_default();
            t.push(vec![
                num(e),
                cell(v[0]),
                cell(v[1]),
                cell(v[2]),
                num(langevin.sigma(kelvin_to_hartree(e))),
            ]);
        }
        out.push((format!("xsec_{process}.csv"), t));
    }
    Ok(out)
}

/// Rows of a rate table pivoted to one column per process.
fn pivot(
    table: &Table,
    key: &str,
    processes: &[ProcessLabel],
) -> Result<Vec<(f64, Vec<Option<f64>>)>> {
    let (ck, cp, cr) = (
        table.column(key)?,
        table.column("process")?,
        table.column("rate_cm3s")?,
    );
    let mut rows: Vec<(f64, Vec<Option<f64>>)> = Vec::new();
    for row in &table.rows {
        let x = float(&row[ck])?;
        let p: ProcessLabel = row[cp].parse().map_err(Error::Archive)?;
        let Some(k) = processes.iter().position(|&q| q == p) else {
            continue;
        };
        if rows.last().map(|r| r.0) != Some(x) {
            rows.push((x, vec![None; processes.len()]));
        }
        rows.last_mut().unwrap().1[k] = Some(float(&row[cr])?);
    }
    Ok(rows)
}

fn rate_panels(
    run: &Resolved,
    energy: &Table,
    thermal: &Table,
    xsec: &Table,
) -> Result<Vec<(String, Table)>> {
    let langevin = Langevin::new(run.c4(), run.mass());
    let processes = run.config.scan.processes();
    let header = |first: &str, last: &str| {
        let mut c = vec![first.to_string()];
        c.extend(processes.iter().map(|p| format!("K_{p}_cm3s")));
        c.push(last.to_string());
        c
    };
    let build =
        |first: &str, last: &str, rows: Vec<(f64, Vec<Option<f64>>)>, kl: &dyn Fn(f64) -> f64| {
            let mut t = Table {
                columns: header(first, last),
                ..Table::default()
            };
            t.meta("hash", &run.hash);
            for (x, v) in rows {
                let mut row = vec![num(x)];
                row.extend(v.into_iter().map(|c| c.map(num).unwrap_or_default()));
                row.push(num(kl(x)));
                t.push(row);
            }
            t
        };

    let mut out = Vec::new();
    let e_rows = pivot(energy, "energy_K", &processes)?;
    out.push((
        "rates_energy.csv".to_string(),
        build("energy_K", "K_L_cm3s", e_rows, &|_| langevin.rate()),
    ));
    let t_rows = pivot(thermal, "T_K", &processes)?;
    out.push((
        "rates_thermal.csv".to_string(),
        build("T_K", "K_L_th_cm3s", t_rows, &|t| langevin.rate_thermal(t)),
    ));

    // dense thermal curve over the temperatures the energy grid supports
    let totals = runner::totals_from_xsec(xsec)?;
    if totals.len() >= 2 {
        let (lo, hi) = (totals[0].0 * 300.0, totals[totals.len() - 1].0 / 300.0);
        if hi > lo {
            let n = ((hi / lo).log10() * 10.0).ceil().max(1.0) as usize;
            let temps: Vec<f64> = (0..=n)
                .map(|i| lo * (hi / lo).powf(i as f64 / n as f64))
                .collect();
            let rates = runner::rate_table(run, &totals);
            let curve = runner::thermal_table(run, &rates, &temps, false)?;
            let rows = pivot(&curve, "T_K", &processes)?;
            out.push((
                "rates_thermal_curve.csv".to_string(),
                build("T_K", "K_L_th_cm3s", rows, &|t| langevin.rate_thermal(t)),
            ));
        }
    }
    Ok(out)
}

fn radial_grid(r_min: f64, r_max: f64, step: f64) -> Vec<f64> {
    let n = ((r_max - r_min) / step).round() as usize;
    (0..=n)
        .map(|i| r_min + (r_max - r_min) * i as f64 / n as f64)
        .collect()
}

/// Spin-free curves and spin-orbit couplings in cm⁻¹ above S+S.
pub fn pec_panels(surface: &PotentialSurfaceSet) -> Vec<(String, Table)> {
    let grid = radial_grid(3.0, PEC_R_MAX, PEC_STEP);
    let states = enumerate_case_a();
    let mut columns = vec!["R_a0".to_string()];
    columns.extend(
        states
            .iter()
            .map(|s| format!("V{}_{}_{}", s.index, s.asymptote.label(), s.term_label)),
    );
    let mut pecs = Table {
        columns,
        ..Table::default()
    };
    pecs.meta("units", "cm-1 relative to the S+S asymptote");
    for &r in &grid {
        let mut row = vec![num(r)];
        row.extend(surface.pecs.iter().map(|p| num(hartree_to_cm1(p.value(r)))));
        pecs.push(row);
    }

    let mut columns = vec!["R_a0".to_string()];
    columns.extend(
        surface
            .socs
            .iter()
            .map(|s| format!("A_{}_{}", s.pair.0 + 1, s.pair.1 + 1)),
    );
    let mut soc = Table {
        columns,
        ..Table::default()
    };
    soc.meta("units", "cm-1");
    for &r in &grid {
        let mut row = vec![num(r)];
        row.extend(surface.socs.iter().map(|s| num(hartree_to_cm1(s.value(r)))));
        soc.push(row);
    }
    vec![("pecs.csv".into(), pecs), ("soc.csv".into(), soc)]
}

/// Case (c) adiabats per Ω block and case (e) adiabats for each J and parity.
pub fn adiabat_panels(
    run: &Resolved,
    surface: &PotentialSurfaceSet,
    j_values: &[i32],
) -> Vec<(String, Table)> {
    let grid = radial_grid(3.0, PEC_R_MAX, PEC_STEP);
    let curves = |rows: Vec<Vec<f64>>, meta: String| {
        let n = rows.first().map_or(0, |r| r.len());
        let mut columns = vec!["R_a0".to_string()];
        columns.extend((1..=n).map(|k| format!("V{k}_cm1")));
        let mut t = Table {
            columns,
            ..Table::default()
        };
        t.meta("panel", meta);
        t.meta(
            "units",
            "cm-1 relative to the S+S asymptote, ascending at each R",
        );
        for (&r, row) in grid.iter().zip(rows) {
            let mut cells = vec![num(r)];
            cells.extend(row.into_iter().map(|v| num(hartree_to_cm1(v))));
            t.push(cells);
        }
        t
    };
    let mut out = Vec::new();
    for (block, rows) in adiabats_case_c(surface, &grid) {
        let tag = block.replace('+', "p").replace('-', "m");
        out.push((
            format!("adiabats_omega_{tag}.csv"),
            curves(rows, format!("Hund case (c), Omega = {block}")),
        ));
    }
    let rotation = if run.config.scan.coriolis {
        Rotation::Full
    } else {
        Rotation::NoCoriolis
    };
    for &big_j in j_values {
        for parity in [1, -1] {
            let ft = FrameTransform::new(big_j, parity, &surface.thresholds);
            let rows = adiabats_case_e(surface, &ft, run.mass(), &grid, rotation);
            let tag = if parity > 0 { 'p' } else { 'm' };
            out.push((
                format!("adiabats_J{big_j}{tag}.csv"),
                curves(
                    rows,
                    format!("Hund case (e), J = {big_j}, parity {parity:+}"),
                ),
            ));
        }
    }
    out
}
