//! Energy × (J, p) sweeps: planning, parallel execution, archiving and the
//! tables assembled from the archived blocks.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::mpsc;

use ionscat::observables::{
    solve_case_e_block, solve_fcqs_block, BlockResult, BlockSigma, FcqsPoint, Langevin, McqsPoint,
    PerProcess, ProcessLabel, RateTable, ScatteringModel,
};
use ionscat::potentials::adiabats::Rotation;
use ionscat::potentials::PotentialSurfaceSet;
use ionscat::units::kelvin_to_hartree;
use ionscat::{Error, Result};
use rayon::prelude::*;

use crate::archive::{Archive, BlockKey, BlockRecord};
use crate::config::{OutputFormat, Resolved};
use crate::tables::{num, Table};

pub const XSEC_FILE: &str = "xsec.csv";
pub const RATES_ENERGY_FILE: &str = "rates_energy.csv";
pub const RATES_FILE: &str = "rates.csv";
pub const FAILED_FILE: &str = "failed_blocks.csv";

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub key: BlockKey,
    pub energy_k: f64,
    pub message: String,
}

/// Composed cross sections at one grid energy.
#[derive(Clone, Debug)]
pub struct EnergyPoint {
    pub index: usize,
    pub energy_k: f64,
    pub blocks: Vec<BlockSigma>,
    /// Per parity Σ(2J+1)σ; FCQS has only the + entry.
    pub parity_sums: Vec<(i32, PerProcess<f64>)>,
    pub total: PerProcess<f64>,
    pub j_last: i32,
    pub converged: bool,
    pub failed: bool,
}

#[derive(Clone, Debug)]
pub struct ScanOutcome {
    pub points: Vec<EnergyPoint>,
    pub failures: Vec<Failure>,
    pub computed: usize,
    pub resumed: usize,
}

impl ScanOutcome {
    pub fn unconverged(&self) -> Vec<f64> {
        self.points
            .iter()
            .filter(|p| !p.failed && !p.converged)
            .map(|p| p.energy_k)
            .collect()
    }

    pub fn complete(&self) -> bool {
        self.failures.is_empty() && self.unconverged().is_empty()
    }
}

/// Blocks solved in one propagation: one (J, p) over a fixed set of energies.
struct WorkItem {
    big_j: i32,
    parity: i32,
    slots: Vec<usize>,
}

type ItemResult = Result<(Vec<String>, Vec<Result<BlockResult>>)>;

struct Sweep<'a> {
    run: &'a Resolved,
    surface: &'a PotentialSurfaceSet,
    archive: Archive,
    energies_k: Vec<f64>,
    energies: Vec<f64>,
    resume: bool,
}

impl Sweep<'_> {
    fn solve(&self, item: &WorkItem) -> ItemResult {
        let scan = &self.run.config.scan;
        let es: Vec<f64> = item.slots.iter().map(|&i| self.energies[i]).collect();
        let settings = &self.run.config.propagator;
        match scan.model {
            ScatteringModel::Mcqs => {
                let rotation = if scan.coriolis {
                    Rotation::Full
                } else {
                    Rotation::NoCoriolis
                };
                solve_case_e_block(
                    self.surface,
                    self.run.mass(),
                    item.big_j,
                    item.parity,
                    scan.entrance,
                    &es,
                    settings,
                    rotation,
                )
            }
            ScatteringModel::Fcqs => solve_fcqs_block(
                self.surface,
                self.run.mass(),
                item.big_j,
                scan.entrance,
                &es,
                settings,
            ),
        }
    }

    fn key(&self, i: usize, big_j: i32, parity: i32) -> BlockKey {
        BlockKey {
            energy_index: i,
            big_j,
            parity,
        }
    }
}

/// Initial J (or ℓ) targets from the capture estimate.
fn initial_targets(run: &Resolved, energies: &[f64]) -> Vec<i32> {
    let scan = &run.config.scan;
    let langevin = Langevin::new(run.c4(), run.mass());
    energies
        .iter()
        .map(|&e| (langevin.critical_partial_wave(e).ceil() as i32 + scan.j_margin).min(scan.j_cap))
        .collect()
}

fn compose(
    run: &Resolved,
    index: usize,
    energy_k: f64,
    energy: f64,
    mut blocks: Vec<BlockSigma>,
    failed: bool,
) -> EnergyPoint {
    let scan = &run.config.scan;
    let processes = scan.entrance.processes();
    blocks.sort_by_key(|b| (b.big_j, -b.parity));
    let (parity_sums, total, converged) = match scan.model {
        ScatteringModel::Mcqs => {
            let p = McqsPoint::from_blocks(energy, blocks.clone(), processes, scan.tolerance);
            let sums = scan
                .parities()
                .into_iter()
                .map(|q| (q, if q > 0 { p.plus } else { p.minus }))
                .collect();
            (sums, p.total, p.converged)
        }
        ScatteringModel::Fcqs => {
            let p = FcqsPoint::from_blocks(energy, &blocks, processes, scan.tolerance);
            (vec![(1, p.sigma)], p.sigma, p.converged)
        }
    };
    EnergyPoint {
        index,
        energy_k,
        j_last: blocks.iter().map(|b| b.big_j).max().unwrap_or(-1),
        blocks,
        parity_sums,
        total,
        converged,
        failed,
    }
}

/// Runs the sweep described by `run`, writing one archive record per block
/// and, when requested, the cross-section and rate tables.
pub fn run_scan(run: &Resolved, out: &Path, resume: bool) -> Result<ScanOutcome> {
    let surface = run.surface()?;
    fs::create_dir_all(out)?;
    fs::write(out.join("config.resolved.toml"), run.resolved_toml())?;
    let archive = Archive::new(out, &run.hash);
    archive.create()?;

    let energies_k = run.config.scan.grid();
    let energies: Vec<f64> = energies_k.iter().map(|&e| kelvin_to_hartree(e)).collect();
    let sweep = Sweep {
        run,
        surface: &surface,
        archive,
        energies_k,
        energies,
        resume,
    };
    let outcome = execute(&sweep)?;
    if run.config.wants(OutputFormat::Csv) {
        write_tables(run, out, &outcome)?;
    }
    write_failures(out, &run.hash, &outcome.failures)?;
    Ok(outcome)
}

fn execute(sweep: &Sweep) -> Result<ScanOutcome> {
    let run = sweep.run;
    let scan = &run.config.scan;
    let n = sweep.energies.len();
    let parities = scan.parities();
    let keep_s = run.config.wants(OutputFormat::Archive);
    let model = scan.model.to_string();
    let entrance = scan.entrance.to_string();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(run.config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start workers: {e}")))?;

    let mut records: BTreeMap<BlockKey, BlockRecord> = BTreeMap::new();
    let mut failures: Vec<Failure> = Vec::new();
    let mut failed = vec![false; n];
    let mut target = initial_targets(run, &sweep.energies);
    // J values up to done[i] have been attempted at energy i
    let mut done = vec![-1; n];
    let (mut computed, mut resumed) = (0, 0);

    loop {
        let mut work = Vec::new();
        for chunk in (0..n).collect::<Vec<_>>().chunks(scan.chunk) {
            let top = chunk.iter().map(|&i| target[i]).max().unwrap_or(-1);
            for big_j in 0..=top {
                for &parity in &parities {
                    let slots: Vec<usize> = chunk
                        .iter()
                        .copied()
                        .filter(|&i| !failed[i] && done[i] < big_j && big_j <= target[i])
                        .collect();
                    if slots.is_empty() {
                        continue;
                    }
                    if sweep.resume {
                        for &i in &slots {
                            let key = sweep.key(i, big_j, parity);
                            if !records.contains_key(&key) {
                                if let Some(r) = sweep.archive.read(&key) {
                                    records.insert(key, r);
                                    resumed += 1;
                                }
                            }
                        }
                    }
                    // the whole set is solved again if any member is missing,
                    // so each block always comes from the same propagation
                    if slots
                        .iter()
                        .all(|&i| records.contains_key(&sweep.key(i, big_j, parity)))
                    {
                        continue;
                    }
                    work.push(WorkItem {
                        big_j,
                        parity,
                        slots,
                    });
                }
            }
        }

        if !work.is_empty() {
            log::info!("solving {} blocks", work.len());
            let (tx, rx) = mpsc::channel::<(usize, ItemResult)>();
            std::thread::scope(|s| -> Result<()> {
                let (work, pool) = (&work, &pool);
                s.spawn(move || {
                    pool.install(|| {
                        work.par_iter()
                            .enumerate()
                            .for_each_with(tx, |tx, (k, item)| {
                                let _ = tx.send((k, sweep.solve(item)));
                            })
                    })
                });
                // single writer
                for (k, result) in rx {
                    let item = &work[k];
                    let keys: Vec<BlockKey> = item
                        .slots
                        .iter()
                        .map(|&i| sweep.key(i, item.big_j, item.parity))
                        .collect();
                    match result {
                        Err(e) => {
                            for (&i, key) in item.slots.iter().zip(keys) {
                                failed[i] = true;
                                failures.push(Failure {
                                    key,
                                    energy_k: sweep.energies_k[i],
                                    message: e.to_string(),
                                });
                            }
                        }
                        Ok((labels, results)) => {
                            for ((&i, key), r) in item.slots.iter().zip(keys).zip(results) {
                                match r {
                                    Ok(block) => {
                                        if records.contains_key(&key) {
                                            continue;
                                        }
                                        let record = BlockRecord::new(
                                            key,
                                            &run.hash,
                                            &model,
                                            &entrance,
                                            sweep.energies_k[i],
                                            sweep.energies[i],
                                            &labels,
                                            &block.smatrix,
                                            block.sigma.sigma,
                                            keep_s,
                                        );
                                        sweep.archive.write(&record)?;
                                        records.insert(key, record);
                                        computed += 1;
                                    }
                                    Err(e) => {
                                        failed[i] = true;
                                        failures.push(Failure {
                                            key,
                                            energy_k: sweep.energies_k[i],
                                            message: e.to_string(),
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
                Ok(())
            })?;
        }

        // extend the J sum where the trailing terms are still large
        let mut extend = false;
        for i in 0..n {
            done[i] = target[i];
            if failed[i] || target[i] >= scan.j_cap {
                continue;
            }
            let point = compose(
                run,
                i,
                sweep.energies_k[i],
                sweep.energies[i],
                blocks_at(&records, i),
                false,
            );
            if !point.converged {
                target[i] += 1;
                extend = true;
            }
        }
        if !extend {
            break;
        }
    }

    failures.sort_by(|a, b| a.key.cmp(&b.key));
    let points = (0..n)
        .map(|i| {
            compose(
                run,
                i,
                sweep.energies_k[i],
                sweep.energies[i],
                blocks_at(&records, i),
                failed[i],
            )
        })
        .collect::<Vec<_>>();
    for p in points.iter().filter(|p| !p.failed && !p.converged) {
        log::warn!(
            "sum at {:.4e} K not converged at J = {} (cap {})",
            p.energy_k,
            p.j_last,
            scan.j_cap
        );
    }
    Ok(ScanOutcome {
        points,
        failures,
        computed,
        resumed,
    })
}

fn blocks_at(records: &BTreeMap<BlockKey, BlockRecord>, i: usize) -> Vec<BlockSigma> {
    records
        .values()
        .filter(|r| r.key.energy_index == i)
        .map(|r| BlockSigma {
            energy: r.energy_hartree,
            big_j: r.key.big_j,
            parity: r.key.parity,
            sigma: r.sigma,
        })
        .collect()
}

fn parity_label(p: i32) -> &'static str {
    if p > 0 {
        "+"
    } else {
        "-"
    }
}

/// Metadata shared by all tables of a run.
pub fn common_meta(table: &mut Table, run: &Resolved) {
    let scan = &run.config.scan;
    let prop = &run.config.propagator;
    let grid = match &scan.energies_k {
        Some(e) => format!("explicit {} points", e.len()),
        None => format!(
            "log {:e}..{:e} K {}/decade",
            scan.e_min_k, scan.e_max_k, scan.points_per_decade
        ),
    };
    table
        .meta("hash", &run.hash)
        .meta("model", scan.model)
        .meta("entrance", scan.entrance)
        .meta(
            "grid",
            format!(
                "{grid}; r_min {} a0, step {} a0, r_max {} a0",
                prop.r_min, prop.step, prop.r_max
            ),
        );
}

pub fn xsec_table(run: &Resolved, outcome: &ScanOutcome) -> Table {
    let scan = &run.config.scan;
    let processes = scan.processes();
    let mut t = Table::new(&["energy_K", "process", "J_or_ell", "parity", "sigma_a0sq"]);
    common_meta(&mut t, run);
    let j_max = outcome.points.iter().map(|p| p.j_last).max().unwrap_or(-1);
    t.meta("J_max", j_max);
    t.meta(
        "rows",
        "per block sigma without the 2J+1 weight; 'sum' rows are sum_J (2J+1) sigma per parity; 'total' is the reported cross section",
    );
    let unconverged = outcome.unconverged();
    if !unconverged.is_empty() {
        t.meta(
            "unconverged_K",
            unconverged
                .iter()
                .map(|&e| num(e))
                .collect::<Vec<_>>()
                .join(" "),
        );
    }
    for p in &outcome.points {
        let e = num(p.energy_k);
        for b in &p.blocks {
            for &proc in &processes {
                t.push(vec![
                    e.clone(),
                    proc.to_string(),
                    b.big_j.to_string(),
                    parity_label(b.parity).into(),
                    num(b.sigma[proc]),
                ]);
            }
        }
        if p.failed {
            continue;
        }
        for (parity, s) in &p.parity_sums {
            for &proc in &processes {
                t.push(vec![
                    e.clone(),
                    proc.to_string(),
                    "sum".into(),
                    parity_label(*parity).into(),
                    num(s[proc]),
                ]);
            }
        }
        for &proc in &processes {
            t.push(vec![
                e.clone(),
                proc.to_string(),
                "sum".into(),
                "total".into(),
                num(p.total[proc]),
            ]);
        }
    }
    t
}

/// Total cross sections per energy (kelvin) read back from an xsec table.
pub fn totals_from_xsec(table: &Table) -> Result<Vec<(f64, PerProcess<f64>)>> {
    let (ce, cp, cj, cq, cs) = (
        table.column("energy_K")?,
        table.column("process")?,
        table.column("J_or_ell")?,
        table.column("parity")?,
        table.column("sigma_a0sq")?,
    );
    let mut out: Vec<(f64, PerProcess<f64>)> = Vec::new();
    for row in &table.rows {
        if row[cj] != "sum" || row[cq] != "total" {
            continue;
        }
        let e = crate::tables::float(&row[ce])?;
        let p: ProcessLabel = row[cp].parse().map_err(Error::Archive)?;
        let s = crate::tables::float(&row[cs])?;
        match out.last_mut() {
            Some((last, v)) if *last == e => v[p] = s,
            _ => {
                let mut v = PerProcess::zero();
                v[p] = s;
                out.push((e, v));
            }
        }
    }
    Ok(out)
}

pub fn rate_table(run: &Resolved, totals: &[(f64, PerProcess<f64>)]) -> RateTable {
    let scan = &run.config.scan;
    let langevin = Langevin::new(run.c4(), run.mass());
    let energies: Vec<f64> = totals.iter().map(|(e, _)| kelvin_to_hartree(*e)).collect();
    let sigma: Vec<PerProcess<f64>> = totals.iter().map(|(_, s)| *s).collect();
    let mut table =
        RateTable::from_cross_sections(scan.model, scan.entrance, &langevin, &energies, &sigma);
    let keep = scan.processes();
    table.rows.retain(|r| keep.contains(&r.process));
    table
}

pub fn energy_rates_table(run: &Resolved, rates: &RateTable) -> Table {
    let mut t = Table::new(&[
        "energy_K",
        "process",
        "sigma_a0sq",
        "rate_cm3s",
        "rate_over_KL",
    ]);
    common_meta(&mut t, run);
    t.meta("K_L_cm3s", num(Langevin::new(run.c4(), run.mass()).rate()));
    for r in &rates.rows {
        t.push(vec![
            num(r.kelvin),
            r.process.to_string(),
            num(r.sigma.unwrap_or(f64::NAN)),
            num(r.rate),
            num(r.rate_over_langevin),
        ]);
    }
    t
}

/// Thermal averages at `temperatures` (kelvin). With `strict` unset,
/// temperatures the energy grid does not cover are skipped with a warning.
pub fn thermal_table(
    run: &Resolved,
    rates: &RateTable,
    temperatures: &[f64],
    strict: bool,
) -> Result<Table> {
    let scan = &run.config.scan;
    let langevin = Langevin::new(run.c4(), run.mass());
    let mut t = Table::new(&["T_K", "process", "rate_cm3s", "rate_over_KL"]);
    common_meta(&mut t, run);
    t.meta("estimator", format!("{:?}", scan.estimator));
    for &temp in temperatures {
        match rates.thermalize_with(&langevin, &[temp], scan.estimator) {
            Ok(th) => {
                for r in th.rows {
                    t.push(vec![
                        num(r.kelvin),
                        r.process.to_string(),
                        num(r.rate),
                        num(r.rate_over_langevin),
                    ]);
                }
            }
            Err(e) if !strict => log::warn!("skipping T = {temp:e} K: {e}"),
            Err(e) => return Err(e),
        }
    }
    Ok(t)
}

fn write_tables(run: &Resolved, out: &Path, outcome: &ScanOutcome) -> Result<()> {
    xsec_table(run, outcome).write(&out.join(XSEC_FILE))?;
    let totals: Vec<(f64, PerProcess<f64>)> = outcome
        .points
        .iter()
        .filter(|p| !p.failed)
        .map(|p| (p.energy_k, p.total))
        .collect();
    if totals.len() < 2 {
        log::warn!("fewer than two complete energies; no rate tables written");
        return Ok(());
    }
    let rates = rate_table(run, &totals);
    energy_rates_table(run, &rates).write(&out.join(RATES_ENERGY_FILE))?;
    thermal_table(run, &rates, &run.config.scan.temperatures_k, false)?.write(&out.join(RATES_FILE))
}

fn write_failures(out: &Path, hash: &str, failures: &[Failure]) -> Result<()> {
    let mut t = Table::new(&["energy_K", "J_or_ell", "parity", "error"]);
    t.meta("hash", hash);
    for f in failures {
        t.push(vec![
            num(f.energy_k),
            f.key.big_j.to_string(),
            parity_label(f.key.parity).into(),
            f.message.replace(',', ";").replace('\n', " "),
        ]);
    }
    t.write(&out.join(FAILED_FILE))
}
