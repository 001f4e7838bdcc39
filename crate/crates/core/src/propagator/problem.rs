use nalgebra::{DMatrix, SymmetricEigen};

use crate::basis::{FrameTransform, N_STATES};
use crate::error::{Error, Result};
use crate::potentials::adiabats::{omega_block_indices, Rotation};
use crate::potentials::PotentialSurfaceSet;

/// Writes the potential matrix (Hartree, centrifugal term included) at R into
/// a row-major buffer.
pub type PotentialFn<'a> = Box<dyn Fn(f64, &mut [f64]) + Send + Sync + 'a>;

/// A set of coupled radial equations ψ'' = 2μ(V(R) − E) ψ together with the
/// asymptotic channel structure needed to extract K and S.
pub struct CoupledProblem<'a> {
    pub mass: f64,
    dim: usize,
    potential: PotentialFn<'a>,
    /// Columns are the asymptotic channels expressed in the propagation
    /// basis; `None` means the propagation basis is already asymptotic.
    rotation: Option<DMatrix<f64>>,
    /// Asymptotic channel thresholds, Hartree.
    pub thresholds: Vec<f64>,
    /// Partial wave of each asymptotic channel.
    pub ells: Vec<i32>,
    pub labels: Vec<String>,
}

impl<'a> CoupledProblem<'a> {
    pub fn new(
        mass: f64,
        thresholds: Vec<f64>,
        ells: Vec<i32>,
        potential: PotentialFn<'a>,
    ) -> Result<Self> {
        let dim = thresholds.len();
        if ells.len() != dim || dim == 0 {
            return Err(Error::Config(
                "thresholds and partial waves differ in length".into(),
            ));
        }
        if !(mass > 0.0) {
            return Err(Error::Config("reduced mass must be positive".into()));
        }
        let labels = (0..dim).map(|i| format!("ch{}", i + 1)).collect();
        Ok(Self {
            mass,
            dim,
            potential,
            rotation: None,
            thresholds,
            ells,
            labels,
        })
    }

    /// Asymptotic channels are the columns of `rotation` (orthogonal).
    pub fn with_rotation(mut self, rotation: DMatrix<f64>) -> Result<Self> {
        if rotation.nrows() != self.dim || rotation.ncols() != self.dim {
            return Err(Error::Config("rotation has the wrong shape".into()));
        }
        let err = (rotation.transpose() * &rotation - DMatrix::identity(self.dim, self.dim)).amax();
        if err > 1e-10 {
            return Err(Error::Config(format!(
                "rotation is not orthogonal ({err:.1e})"
            )));
        }
        self.rotation = Some(rotation);
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.dim);
        self.labels = labels;
        self
    }

    /// Case (e) channels of one (J, p) block.
    pub fn case_e(
        surface: &'a PotentialSurfaceSet,
        big_j: i32,
        parity: i32,
        mass: f64,
        rotation: Rotation,
    ) -> Result<Self> {
        let ft = FrameTransform::new(big_j, parity, &surface.thresholds);
        let thresholds = ft.channels.iter().map(|c| c.threshold).collect();
        let ells = ft.channels.iter().map(|c| c.ell).collect();
        let labels = ft
            .channels
            .iter()
            .map(|c| {
                format!(
                    "{} ja={} jb={} j={} l={}",
                    c.asymptote.label(),
                    c.ja,
                    c.jb,
                    c.j,
                    c.ell
                )
            })
            .collect();
        let n = ft.dim();
        let m = ft.states.len();
        let t: Vec<f64> = (0..n * m).map(|k| ft.matrix[(k / m, k % m)]).collect();
        let states = ft.states.clone();
        // rotational term in the channel basis
        let rot: Vec<f64> = {
            let cent = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                n,
                ft.channels.iter().map(|c| (c.ell * (c.ell + 1)) as f64),
            ));
            let m = match rotation {
                Rotation::Full => cent,
                Rotation::NoCoriolis => {
                    let in_a = ft.matrix.transpose() * &cent * &ft.matrix;
                    &ft.matrix * DMatrix::from_diagonal(&in_a.diagonal()) * ft.matrix.transpose()
                }
            };
            m.iter().copied().collect() // column-major, symmetric
        };
        let potential: PotentialFn<'a> = Box::new(move |r, out: &mut [f64]| {
            let mut bf = [0.0; N_STATES * N_STATES];
            surface.fill(r, &mut bf);
            // tmp = T · V_sub (n × m)
            let mut tmp = vec![0.0; n * m];
            for a in 0..n {
                for (b, &sb) in states.iter().enumerate() {
                    let mut acc = 0.0;
                    for (c, &sc) in states.iter().enumerate() {
                        acc += t[a * m + c] * bf[sc * N_STATES + sb];
                    }
                    tmp[a * m + b] = acc;
                }
            }
            let cf = 1.0 / (2.0 * mass * r * r);
            for a in 0..n {
                for b in a..n {
                    let mut acc = 0.0;
                    for c in 0..m {
                        acc += tmp[a * m + c] * t[b * m + c];
                    }
                    acc += rot[a * n + b] * cf;
                    out[a * n + b] = acc;
                    out[b * n + a] = acc;
                }
            }
        });
        Ok(Self::new(mass, thresholds, ells, potential)?.with_labels(labels))
    }

    /// Body-frame Ω = 0⁺ states with one common partial wave ℓ. Asymptotic
    /// channels are the eigenvectors of the potential at large R.
    pub fn omega_block(
        surface: &'a PotentialSurfaceSet,
        block: &str,
        ell: i32,
        mass: f64,
    ) -> Result<Self> {
        let idx = omega_block_indices(block);
        if idx.is_empty() {
            return Err(Error::Config(format!("unknown Ω block '{block}'")));
        }
        let n = idx.len();
        let far = surface.matrix(1e6);
        let sub = DMatrix::from_fn(n, n, |a, b| far[(idx[a], idx[b])]);
        let eig = SymmetricEigen::new(sub);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let thresholds: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let rotation = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        let labels = thresholds
            .iter()
            .map(|e| format!("{:.3} cm-1 l={ell}", crate::units::hartree_to_cm1(*e)))
            .collect();
        let cent = (ell * (ell + 1)) as f64 / (2.0 * mass);
        let potential: PotentialFn<'a> = Box::new(move |r, out: &mut [f64]| {
            let mut bf = [0.0; N_STATES * N_STATES];
            surface.fill(r, &mut bf);
            for a in 0..n {
                for b in 0..n {
                    out[a * n + b] = bf[idx[a] * N_STATES + idx[b]];
                }
                out[a * n + a] += cent / (r * r);
            }
        });
        Self::new(mass, thresholds, vec![ell; n], potential)?
            .with_labels(labels)
            .with_rotation(rotation)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Potential in the propagation basis, row-major.
    pub fn potential_into(&self, r: f64, out: &mut [f64]) {
        (self.potential)(r, out)
    }

    pub fn potential(&self, r: f64) -> DMatrix<f64> {
        let n = self.dim;
        let mut buf = vec![0.0; n * n];
        self.potential_into(r, &mut buf);
        DMatrix::from_row_slice(n, n, &buf)
    }

    /// Potential in the asymptotic channel basis.
    pub fn asymptotic_potential(&self, r: f64) -> DMatrix<f64> {
        let v = self.potential(r);
        match &self.rotation {
            Some(p) => p.transpose() * v * p,
            None => v,
        }
    }

    /// Rotates a propagation-basis matrix into the asymptotic basis.
    pub fn to_asymptotic(&self, m: DMatrix<f64>) -> DMatrix<f64> {
        match &self.rotation {
            Some(p) => p.transpose() * m * p,
            None => m,
        }
    }

    /// V_ii − threshold − centrifugal in the asymptotic basis.
    pub fn residual_diagonal(&self, r: f64) -> Vec<f64> {
        let v = self.asymptotic_potential(r);
        (0..self.dim)
            .map(|i| {
                let l = self.ells[i] as f64;
                v[(i, i)] - self.thresholds[i] - l * (l + 1.0) / (2.0 * self.mass * r * r)
            })
            .collect()
    }

    pub fn open_channels(&self, energy: f64) -> Vec<usize> {
        (0..self.dim)
            .filter(|&i| self.thresholds[i] < energy)
            .collect()
    }
}
