//! Run configuration (TOML) and its canonical hash.

use std::fs;
use std::path::{Path, PathBuf};

use ionscat::landau_zener::{Formula, LzCrossing};
use ionscat::observables::{
    AverageEstimator, Entrance, McqsSettings, ProcessLabel, ScatteringModel,
};
use ionscat::potentials::model::ThresholdParams;
use ionscat::potentials::{ModelParams, PotentialSurfaceSet};
use ionscat::propagator::PropagatorSettings;
use ionscat::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemSection {
    /// Overrides the model's reduced mass, atomic units.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduced_mass_au: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c4_au: Option<f64>,
    /// TOML file with ion_s_cm1, sd32_cm1 and fine_structure_cm1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PotentialsSection {
    /// Model TOML; the bundled model when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSection {
    pub model: ScatteringModel,
    pub entrance: Entrance,
    /// Reported processes; all processes open from the entrance when empty.
    pub processes: Vec<ProcessLabel>,
    pub e_min_k: f64,
    pub e_max_k: f64,
    pub points_per_decade: usize,
    /// Explicit collision energies in kelvin, replacing the logarithmic grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energies_k: Option<Vec<f64>>,
    /// Energies solved together in one propagation.
    pub chunk: usize,
    /// J (or ℓ for FCQS) beyond the capture estimate computed up front.
    pub j_margin: i32,
    pub j_cap: i32,
    pub tolerance: f64,
    pub parities: Vec<i32>,
    pub coriolis: bool,
    pub temperatures_k: Vec<f64>,
    pub estimator: AverageEstimator,
}

impl Default for ScanSection {
    fn default() -> Self {
        let mcqs = McqsSettings::default();
        Self {
            model: ScatteringModel::Mcqs,
            entrance: Entrance::D52,
            processes: Vec::new(),
            e_min_k: 1e-7,
            e_max_k: 1e-1,
            points_per_decade: 120,
            energies_k: None,
            chunk: 16,
            j_margin: mcqs.j_margin,
            j_cap: mcqs.j_cap,
            tolerance: mcqs.tolerance,
            parities: vec![1, -1],
            coriolis: mcqs.coriolis,
            temperatures_k: vec![30e-6],
            estimator: AverageEstimator::default(),
        }
    }
}

impl ScanSection {
    /// Collision energies in kelvin.
    pub fn grid(&self) -> Vec<f64> {
        if let Some(e) = &self.energies_k {
            return e.clone();
        }
        let decades = (self.e_max_k / self.e_min_k).log10();
        let n = (decades * self.points_per_decade as f64).ceil().max(1.0) as usize;
        (0..=n)
            .map(|i| self.e_min_k * 10f64.powf(decades * i as f64 / n as f64))
            .collect()
    }

    pub fn processes(&self) -> Vec<ProcessLabel> {
        let open = self.entrance.processes();
        if self.processes.is_empty() {
            open.to_vec()
        } else {
            self.processes.clone()
        }
    }

    pub fn parities(&self) -> Vec<i32> {
        match self.model {
            ScatteringModel::Fcqs => vec![1],
            ScatteringModel::Mcqs => {
                let mut p = self.parities.clone();
                p.sort_by(|a, b| b.cmp(a));
                p.dedup();
                p
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let grid = self.grid();
        if grid.is_empty() || grid.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::Config("scan energies must be positive".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("scan energies must increase strictly".into()));
        }
        if self.energies_k.is_none() && self.points_per_decade == 0 {
            return Err(Error::Config("points_per_decade must be positive".into()));
        }
        if self.chunk == 0 {
            return Err(Error::Config("chunk must be positive".into()));
        }
        if self.j_margin < 0 || self.j_cap < 0 {
            return Err(Error::Config(
                "j_margin and j_cap must not be negative".into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        if self.parities.is_empty() || self.parities.iter().any(|&p| p != 1 && p != -1) {
            return Err(Error::Config(
                "parities must be a non-empty subset of [1, -1]".into(),
            ));
        }
        if let Some(p) = self
            .processes
            .iter()
            .find(|p| !self.entrance.processes().contains(p))
        {
            return Err(Error::Config(format!(
                "process {p} has no exit channel from {}",
                self.entrance
            )));
        }
        if self.temperatures_k.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::Config("temperatures must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// Cross-section and rate tables.
    Csv,
    /// Full S matrices in the per-block archive records.
    Archive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputsSection {
    pub directory: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputsSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("ionscat-out"),
            formats: vec![OutputFormat::Csv, OutputFormat::Archive],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LzSection {
    /// Single crossing; the two-level X₁ default when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossing: Option<LzCrossing>,
    pub p_t: f64,
    pub p_b52: f64,
    pub p_b32: f64,
    pub formula: Formula,
}

impl Default for LzSection {
    fn default() -> Self {
        Self {
            crossing: None,
            p_t: 0.264,
            p_b52: 0.982,
            p_b32: 0.979,
            formula: Formula::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub workers: usize,
    pub system: SystemSection,
    pub potentials: PotentialsSection,
    pub scan: ScanSection,
    pub propagator: PropagatorSettings,
    pub outputs: OutputsSection,
    pub lz: LzSection,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            system: SystemSection::default(),
            potentials: PotentialsSection::default(),
            scan: ScanSection::default(),
            propagator: PropagatorSettings::default(),
            outputs: OutputsSection::default(),
            lz: LzSection::default(),
            base_dir: PathBuf::from("."),
        }
    }
}

/// Parts of the configuration that determine the numbers.
#[derive(Serialize)]
struct HashInput<'a> {
    scan: &'a ScanSection,
    propagator: &'a PropagatorSettings,
    lz: &'a LzSection,
    model: &'a ModelParams,
    tables: Vec<(String, String)>,
}

/// A configuration with its model resolved.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub config: RunConfig,
    pub model: ModelParams,
    pub hash: String,
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut config: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        config.base_dir = base_dir.to_path_buf();
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Self::from_toml(&text, &base)
    }

    fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.path(&self.outputs.directory)
    }

    pub fn wants(&self, format: OutputFormat) -> bool {
        self.outputs.formats.contains(&format)
    }

    /// Directory relative table paths of the model are resolved against.
    pub fn model_dir(&self) -> PathBuf {
        match &self.potentials.model {
            Some(p) => self
                .path(p)
                .parent()
                .unwrap_or(Path::new("."))
                .to_path_buf(),
            None => self.base_dir.clone(),
        }
    }

    /// Loads the model, applies the system overrides and computes the hash.
    pub fn resolve(self) -> Result<Resolved> {
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        self.scan.validate()?;
        self.propagator.validate()?;
        let mut model = match &self.potentials.model {
            Some(p) => {
                let path = self.path(p);
                let text = fs::read_to_string(&path).map_err(|e| {
                    Error::Config(format!("cannot read model {}: {e}", path.display()))
                })?;
                toml::from_str(&text).map_err(|e| {
                    Error::Config(format!("model {}: {}", path.display(), e.message()))
                })?
            }
            None => ModelParams::default(),
        };
        if let Some(mu) = self.system.reduced_mass_au {
            model.system.reduced_mass_au = mu;
        }
        if let Some(c4) = self.system.c4_au {
            model.system.c4_au = c4;
        }
        if let Some(p) = &self.system.thresholds {
            let path = self.path(p);
            let text = fs::read_to_string(&path).map_err(|e| {
                Error::Config(format!("cannot read thresholds {}: {e}", path.display()))
            })?;
            model.thresholds = toml::from_str::<ThresholdParams>(&text).map_err(|e| {
                Error::Config(format!("thresholds {}: {}", path.display(), e.message()))
            })?;
        }
        if !(model.system.reduced_mass_au > 0.0 && model.system.c4_au > 0.0) {
            return Err(Error::Config("reduced mass and C4 must be positive".into()));
        }
        let hash = self.hash(&model)?;
        Ok(Resolved {
            config: self,
            model,
            hash,
        })
    }

    fn hash(&self, model: &ModelParams) -> Result<String> {
        // tabulated curves enter through their file contents
        let dir = self.model_dir();
        let mut names: Vec<&String> = model
            .pec
            .values()
            .filter_map(|p| p.table.as_ref())
            .chain(model.soc.values().filter_map(|s| s.table.as_ref()))
            .collect();
        names.sort();
        names.dedup();
        let mut tables = Vec::new();
        for name in names {
            let bytes = fs::read(dir.join(name))
                .map_err(|e| Error::Config(format!("cannot read table {name}: {e}")))?;
            tables.push((name.clone(), hex::encode(Sha256::digest(&bytes))));
        }
        let canonical = toml::to_string(&HashInput {
            scan: &self.scan,
            propagator: &self.propagator,
            lz: &self.lz,
            model,
            tables,
        })
        .map_err(|e| Error::Config(e.to_string()))?;
        Ok(hex::encode(Sha256::digest(canonical.as_bytes())))
    }
}

impl Resolved {
    pub fn surface(&self) -> Result<PotentialSurfaceSet> {
        let (surface, _) = self.model.build_checked(Some(&self.config.model_dir()))?;
        Ok(surface)
    }

    pub fn mass(&self) -> f64 {
        self.model.system.reduced_mass_au
    }

    pub fn c4(&self) -> f64 {
        self.model.system.c4_au
    }

    /// The canonical form the hash is computed from, plus the run-only settings.
    pub fn resolved_toml(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            hash: &'a str,
            config: &'a RunConfig,
            model: &'a ModelParams,
        }
        toml::to_string(&Out {
            hash: &self.hash,
            config: &self.config,
            model: &self.model,
        })
        .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_and_hash() {
        let a = RunConfig::from_toml("", Path::new("."))
            .unwrap()
            .resolve()
            .unwrap();
        let b = RunConfig::from_toml(
            "workers = 3\n[outputs]\ndirectory = \"elsewhere\"",
            Path::new("."),
        )
        .unwrap()
        .resolve()
        .unwrap();
        assert_eq!(a.hash, b.hash);
        assert_eq!(a.hash.len(), 64);
        let c = RunConfig::from_toml("[scan]\ne_max_k = 0.01", Path::new("."))
            .unwrap()
            .resolve()
            .unwrap();
        assert_ne!(a.hash, c.hash);
    }

    #[test]
    fn invalid_values_are_rejected() {
        for text in [
            "workers = 0",
            "[scan]\ne_min_k = -1.0",
            "[scan]\nenergies_k = [1e-6, 1e-7]",
            "[scan]\nparities = [2]",
            "[scan]\nentrance = \"5D3/2\"\nprocesses = [\"FSQ\"]",
            "[propagator]\nstep = -0.1",
            "[scan]\nunknown = 1",
        ] {
            let r = RunConfig::from_toml(text, Path::new(".")).and_then(|c| c.resolve());
            assert!(matches!(r, Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn grid_spacing() {
        let s = ScanSection {
            e_min_k: 1e-6,
            e_max_k: 1e-2,
            points_per_decade: 5,
            ..ScanSection::default()
        };
        let g = s.grid();
        assert_eq!(g.len(), 21);
        assert!((g[20] / 1e-2 - 1.0).abs() < 1e-12);
        assert!((g[5] / 1e-5 - 1.0).abs() < 1e-12);
    }
}
