use nalgebra::DMatrix;

use super::pec::PecModel;
use super::soc::{SocModel, X1Coupling};
use crate::basis::{enumerate_case_a, Thresholds, N_STATES};
use crate::error::{Error, Result};

/// Body-frame electronic Hamiltonian of the 16 case (a) states as a function of R.
#[derive(Clone, Debug)]
pub struct PotentialSurfaceSet {
    pub pecs: Vec<PecModel>,
    pub socs: Vec<SocModel>,
    pub x1: X1Coupling,
    pub thresholds: Thresholds,
}

/// 0-based indices of the two ¹Σ⁺ states linked by the X₁ gaussian.
pub const X1_PAIR: (usize, usize) = (1, 2);

impl PotentialSurfaceSet {
    pub fn new(
        pecs: Vec<PecModel>,
        socs: Vec<SocModel>,
        x1: X1Coupling,
        thresholds: Thresholds,
    ) -> Result<Self> {
        if pecs.len() != N_STATES {
            return Err(Error::Config(format!(
                "expected {N_STATES} curves, got {}",
                pecs.len()
            )));
        }
        let states = enumerate_case_a();
        for soc in &socs {
            let (i, j) = soc.pair;
            if i >= N_STATES || j >= N_STATES {
                return Err(Error::Config(format!(
                    "coupling {}_{} is outside the 16 states",
                    i + 1,
                    j + 1
                )));
            }
            if states[i].omega_block() != states[j].omega_block() {
                return Err(Error::Config(format!(
                    "coupling {}_{} links different Ω blocks ({} and {})",
                    i + 1,
                    j + 1,
                    states[i].omega_block(),
                    states[j].omega_block()
                )));
            }
            if (i.min(j), i.max(j)) == X1_PAIR {
                return Err(Error::Config(
                    "element 2_3 is reserved for the X1 gaussian".into(),
                ));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for soc in &socs {
            let key = (soc.pair.0.min(soc.pair.1), soc.pair.0.max(soc.pair.1));
            if !seen.insert(key) {
                return Err(Error::Config(format!(
                    "coupling {}_{} defined twice",
                    key.0 + 1,
                    key.1 + 1
                )));
            }
        }
        Ok(Self {
            pecs,
            socs,
            x1,
            thresholds,
        })
    }

    /// Row-major 16×16 matrix at R, written into `out`.
    pub fn fill(&self, r: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), N_STATES * N_STATES);
        out.fill(0.0);
        for (i, pec) in self.pecs.iter().enumerate() {
            out[i * N_STATES + i] = pec.value(r);
        }
        for soc in &self.socs {
            let (i, j) = soc.pair;
            let v = soc.value(r);
            if i == j {
                out[i * N_STATES + i] += v;
            } else {
                out[i * N_STATES + j] = v;
                out[j * N_STATES + i] = v;
            }
        }
        let g = self.x1.value(r);
        let (a, b) = X1_PAIR;
        out[a * N_STATES + b] = g;
        out[b * N_STATES + a] = g;
    }

    pub fn matrix(&self, r: f64) -> DMatrix<f64> {
        let mut buf = vec![0.0; N_STATES * N_STATES];
        self.fill(r, &mut buf);
        DMatrix::from_row_slice(N_STATES, N_STATES, &buf)
    }

    pub fn soc(&self, i: usize, j: usize) -> Option<&SocModel> {
        self.socs
            .iter()
            .find(|s| (s.pair.0 == i && s.pair.1 == j) || (s.pair.0 == j && s.pair.1 == i))
    }

    /// Copy without the coupling between states i and j (0-based).
    pub fn without_soc(&self, i: usize, j: usize) -> Self {
        let mut out = self.clone();
        out.socs
            .retain(|s| !((s.pair.0 == i && s.pair.1 == j) || (s.pair.0 == j && s.pair.1 == i)));
        out
    }

    /// Copy with every spin-orbit coupling and the X₁ gaussian removed.
    pub fn bare(&self) -> Self {
        let mut out = self.clone();
        out.socs.clear();
        out.x1.w = 0.0;
        out
    }
}
