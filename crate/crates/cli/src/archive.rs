//! Per-block scattering records: `#key=value` header lines followed by the
//! S matrix as row-major "i j re im" lines.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ionscat::observables::{PerProcess, ProcessLabel};
use ionscat::propagator::SMatrixBlock;
use ionscat::{Error, Result};

pub const FORMAT: &str = "ionscat-block-1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockKey {
    pub energy_index: usize,
    /// J, or ℓ for FCQS blocks.
    pub big_j: i32,
    pub parity: i32,
}

impl BlockKey {
    pub fn file_name(&self) -> String {
        let p = if self.parity > 0 { 'p' } else { 'm' };
        format!("E{:05}_J{:03}{p}.blk", self.energy_index, self.big_j)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockRecord {
    pub key: BlockKey,
    pub hash: String,
    pub model: String,
    pub entrance: String,
    pub energy_k: f64,
    /// Collision energy, Hartree.
    pub energy_hartree: f64,
    pub labels: Vec<String>,
    pub open: Vec<usize>,
    pub r_match: f64,
    pub sigma: PerProcess<f64>,
    /// Row-major over the open channels; empty when S matrices are not archived.
    pub s: Vec<(f64, f64)>,
}

impl BlockRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        key: BlockKey,
        hash: &str,
        model: &str,
        entrance: &str,
        energy_k: f64,
        energy_hartree: f64,
        labels: &[String],
        block: &SMatrixBlock,
        sigma: PerProcess<f64>,
        keep_s: bool,
    ) -> Self {
        let n = block.open.len();
        let s = if keep_s {
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| (block.s[(i, j)].re, block.s[(i, j)].im))
                .collect()
        } else {
            Vec::new()
        };
        Self {
            key,
            hash: hash.to_string(),
            model: model.to_string(),
            entrance: entrance.to_string(),
            energy_k,
            energy_hartree,
            labels: labels.to_vec(),
            open: block.open.clone(),
            r_match: block.r_match,
            sigma,
            s,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(&format!("#{k}={v}\n"));
        };
        kv("format", FORMAT.into());
        kv("hash", self.hash.clone());
        kv("model", self.model.clone());
        kv("entrance", self.entrance.clone());
        kv("energy_index", self.key.energy_index.to_string());
        kv("energy_K", format!("{:.17e}", self.energy_k));
        kv("energy_hartree", format!("{:.17e}", self.energy_hartree));
        kv("J", self.key.big_j.to_string());
        kv("parity", format!("{:+}", self.key.parity));
        kv("labels", self.labels.join("|"));
        kv(
            "open",
            self.open
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        kv("r_match", format!("{:.17e}", self.r_match));
        for (p, v) in self.sigma.iter() {
            kv(&format!("sigma_{p}"), format!("{v:.17e}"));
        }
        let n = self.open.len();
        for (k, (re, im)) in self.s.iter().enumerate() {
            out.push_str(&format!("{} {} {re:.17e} {im:.17e}\n", k / n, k % n));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: String| Error::Archive(m);
        let mut header = std::collections::BTreeMap::new();
        let mut s = Vec::new();
        for line in text.lines() {
            if let Some(h) = line.strip_prefix('#') {
                let (k, v) = h
                    .split_once('=')
                    .ok_or_else(|| bad(format!("malformed header line '{line}'")))?;
                header.insert(k.to_string(), v.to_string());
            } else if !line.trim().is_empty() {
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 4 {
                    return Err(bad(format!("malformed data line '{line}'")));
                }
                let num = |x: &str| x.parse::<f64>().map_err(|e| bad(format!("{x}: {e}")));
                s.push((num(f[2])?, num(f[3])?));
            }
        }
        let get = |k: &str| {
            header
                .get(k)
                .cloned()
                .ok_or_else(|| bad(format!("missing header '{k}'")))
        };
        let float = |k: &str| -> Result<f64> {
            get(k)?
                .parse()
                .map_err(|e| bad(format!("header '{k}': {e}")))
        };
        let int = |k: &str| -> Result<i64> {
            get(k)?
                .trim_start_matches('+')
                .parse()
                .map_err(|e| bad(format!("header '{k}': {e}")))
        };
        if get("format")? != FORMAT {
            return Err(bad("unknown record format".into()));
        }
        let mut sigma = PerProcess::zero();
        for p in ProcessLabel::ALL {
            sigma[p] = float(&format!("sigma_{p}"))?;
        }
        let open: Vec<usize> = get("open")?
            .split(',')
            .filter(|x| !x.is_empty())
            .map(|x| x.parse().map_err(|e| bad(format!("open: {e}"))))
            .collect::<Result<_>>()?;
        if !s.is_empty() && s.len() != open.len() * open.len() {
            return Err(bad("S matrix size does not match the open channels".into()));
        }
        Ok(Self {
            key: BlockKey {
                energy_index: int("energy_index")? as usize,
                big_j: int("J")? as i32,
                parity: int("parity")? as i32,
            },
            hash: get("hash")?,
            model: get("model")?,
            entrance: get("entrance")?,
            energy_k: float("energy_K")?,
            energy_hartree: float("energy_hartree")?,
            labels: get("labels")?.split('|').map(String::from).collect(),
            open,
            r_match: float("r_match")?,
            sigma,
            s,
        })
    }
}

/// Writes `text` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Block records of one configuration hash.
pub struct Archive {
    pub dir: PathBuf,
    pub hash: String,
}

impl Archive {
    pub fn new(out: &Path, hash: &str) -> Self {
        Self {
            dir: out.join("archive").join(&hash[..16]),
            hash: hash.to_string(),
        }
    }

    pub fn create(&self) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        Ok(())
    }

    pub fn path(&self, key: &BlockKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    pub fn write(&self, record: &BlockRecord) -> Result<()> {
        write_atomic(&self.path(&record.key), &record.to_text())
    }

    /// The stored record, or `None` when absent or unreadable.
    pub fn read(&self, key: &BlockKey) -> Option<BlockRecord> {
        let path = self.path(key);
        let text = fs::read_to_string(&path).ok()?;
        match BlockRecord::parse(&text) {
            Ok(r) if r.hash == self.hash && r.key == *key => Some(r),
            Ok(_) => {
                log::warn!(
                    "{} belongs to another configuration; recomputing",
                    path.display()
                );
                None
            }
            Err(e) => {
                log::warn!("{}: {e}; recomputing", path.display());
                None
            }
        }
    }

    /// Every record in the directory, sorted by key.
    pub fn load_all(&self) -> Result<Vec<BlockRecord>> {
        let mut out = Vec::new();
        if !self.dir.exists() {
            return Ok(out);
        }
        for entry in fs::read_dir(&self.dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "blk") {
                let record = BlockRecord::parse(&fs::read_to_string(&path)?)?;
                if record.hash != self.hash {
                    return Err(Error::Archive(format!(
                        "{} was written by configuration {}",
                        path.display(),
                        record.hash
                    )));
                }
                out.push(record);
            }
        }
        out.sort_by_key(|r| r.key);
        Ok(out)
    }
}
