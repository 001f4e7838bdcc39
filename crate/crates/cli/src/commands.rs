//! Subcommand implementations. Each prints a short report on stdout.

use std::path::Path;

use ionscat::basis::enumerate_case_e;
use ionscat::landau_zener::{
    double_path, fclz_from_potentials, fclz_network, lz_probability, x1_default_crossing, Formula,
    LzCrossing,
};
use ionscat::observables::Entrance;
use ionscat::units::{hartree_to_cm1, kelvin_to_hartree};
use ionscat::Result;

use crate::config::Resolved;
use crate::plotdata::{self, artifact, Style};
use crate::resonances::{find_resonances, resonance_table, series_from_xsec};
use crate::runner::{self, RATES_FILE, XSEC_FILE};

/// How a command finished when it did not fail outright.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Complete,
    /// Some blocks failed or some sums did not converge.
    Partial,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Complete => 0,
            Status::Partial => 4,
        }
    }
}

pub fn pec_dump(run: &Resolved, out: &Path) -> Result<Status> {
    std::fs::create_dir_all(out)?;
    for (name, mut table) in plotdata::pec_panels(&run.surface()?) {
        table.meta.insert(0, ("hash".into(), run.hash.clone()));
        let path = out.join(name);
        table.write(&path)?;
        println!("wrote {}", path.display());
    }
    Ok(Status::Complete)
}

pub fn channels(run: &Resolved, only: Option<i32>, j_max: i32) -> Result<Status> {
    let thresholds = run.model.thresholds();
    match only {
        Some(big_j) => {
            for parity in [1, -1] {
                let list = enumerate_case_e(big_j, parity, &thresholds);
                println!("J = {big_j}, parity {parity:+}: {} channels", list.len());
                println!("  #  asymptote  ja   jb   j  l  threshold/cm-1");
                for (k, c) in list.iter().enumerate() {
                    println!(
                        "{:3}  {:9} {:>4} {:>4} {:3} {:2}  {:.3}",
                        k + 1,
                        c.asymptote.label(),
                        c.ja.to_string(),
                        c.jb.to_string(),
                        c.j,
                        c.ell,
                        hartree_to_cm1(c.threshold)
                    );
                }
            }
        }
        None => {
            println!("  J  n(+)  n(-)");
            for big_j in 0..=j_max {
                println!(
                    "{big_j:3}  {:4}  {:4}",
                    enumerate_case_e(big_j, 1, &thresholds).len(),
                    enumerate_case_e(big_j, -1, &thresholds).len()
                );
            }
        }
    }
    Ok(Status::Complete)
}

fn print_crossing(name: &str, c: &LzCrossing, energy: f64, mass: f64) -> Result<()> {
    let p = lz_probability(c, energy, mass)?;
    println!(
        "{name}: R_c = {:.4} a0, W = {:.6e} Eh, dF = {:.6e} Eh/a0, U_c = {:.1} cm-1",
        c.r_c,
        c.w_c,
        c.df,
        hartree_to_cm1(c.u_c)
    );
    println!(
        "  single-path P = {p:.4}, double-path 2P(1-P) = {:.4}",
        double_path(p)
    );
    Ok(())
}

fn print_network(p_t: f64, p_b52: f64, p_b32: f64, formula: Formula) -> Result<()> {
    println!(
        "network ({formula:?}) with P_T = {p_t:.4}, P_B(5/2) = {p_b52:.4}, P_B(3/2) = {p_b32:.4}"
    );
    for (entrance, p_b) in [(Entrance::D52, p_b52), (Entrance::D32, p_b32)] {
        let o = fclz_network(p_t, p_b, entrance, formula)?;
        let cells: Vec<String> = o
            .probabilities
            .iter()
            .map(|(p, v)| format!("{p} {v:.4}"))
            .collect();
        println!(
            "  {entrance} (weight {:.4}): {}",
            o.weight,
            cells.join(", ")
        );
    }
    Ok(())
}

pub fn lz(
    run: &Resolved,
    from_potentials: bool,
    formula: Option<Formula>,
    energy_k: f64,
) -> Result<Status> {
    let mass = run.mass();
    let lz = &run.config.lz;
    let formula = formula.unwrap_or(lz.formula);
    let energy = kelvin_to_hartree(energy_k);
    if from_potentials {
        let f = fclz_from_potentials(&run.surface()?, mass)?;
        let th = run.model.thresholds();
        print_crossing("T", &f.top.relative_to(th.sd52), energy, mass)?;
        print_crossing("B", &f.bottom.relative_to(th.sd52), energy, mass)?;
        print_network(f.p_t, f.p_b52, f.p_b32, formula)?;
    } else {
        let crossing = lz.crossing.unwrap_or_else(|| x1_default_crossing(mass));
        print_crossing("X1", &crossing, energy, mass)?;
        print_network(lz.p_t, lz.p_b52, lz.p_b32, formula)?;
    }
    Ok(Status::Complete)
}

pub fn xsec_scan(run: &Resolved, out: &Path, resume: bool) -> Result<Status> {
    let outcome = runner::run_scan(run, out, resume)?;
    println!(
        "{} blocks computed, {} taken from the archive, {} energies",
        outcome.computed,
        outcome.resumed,
        outcome.points.len()
    );
    for f in &outcome.failures {
        println!(
            "failed: E = {:.4e} K, J = {}, p = {:+}: {}",
            f.energy_k, f.key.big_j, f.key.parity, f.message
        );
    }
    for e in outcome.unconverged() {
        println!("not converged: E = {e:.4e} K");
    }
    println!("outputs in {}", out.display());
    Ok(if outcome.complete() {
        Status::Complete
    } else {
        Status::Partial
    })
}

pub fn thermal_rates(run: &Resolved, out: &Path, temperatures: &[f64]) -> Result<Status> {
    let xsec = artifact(out, XSEC_FILE, &run.hash, "xsec-scan")?;
    let totals = runner::totals_from_xsec(&xsec)?;
    let rates = runner::rate_table(run, &totals);
    let temps = if temperatures.is_empty() {
        &run.config.scan.temperatures_k
    } else {
        temperatures
    };
    let table = runner::thermal_table(run, &rates, temps, true)?;
    for row in &table.rows {
        println!("{}", row.join("  "));
    }
    table.write(&out.join(RATES_FILE))?;
    Ok(Status::Complete)
}

pub fn resonance_find(run: &Resolved, out: &Path) -> Result<Status> {
    let xsec = artifact(out, XSEC_FILE, &run.hash, "xsec-scan")?;
    let mut records = Vec::new();
    for series in series_from_xsec(&xsec)? {
        records.extend(find_resonances(&series));
    }
    for r in &records {
        println!(
            "{} at {:.4e} K: sigma {:.4e} a0^2, width {:.3e} K, mainly J = {} ({:+})",
            r.process, r.energy_k, r.sigma, r.width_k, r.big_j, r.parity
        );
    }
    if records.is_empty() {
        println!("no resonances");
    }
    resonance_table(&records, &run.hash).write(&out.join("resonances.csv"))?;
    Ok(Status::Complete)
}

pub fn plot_data(run: &Resolved, out: &Path, style: Style, j_values: &[i32]) -> Result<Status> {
    for path in plotdata::emit(run, out, style, j_values)? {
        println!("wrote {}", path.display());
    }
    Ok(Status::Complete)
}
