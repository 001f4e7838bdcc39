//! Log-derivative propagator for ψ'' = W ψ, W = 2μ(V − E), with a
//! piecewise-constant reference diagonalized sector by sector.

use nalgebra::{DMatrix, SymmetricEigen};

use super::linalg::{lu_factor, lu_solve_matrix, symmetrize};
use super::problem::CoupledProblem;
use crate::error::{Error, Result};

/// Uniform radial grid with an even number of intervals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub r_min: f64,
    pub step: f64,
    pub intervals: usize,
}

impl Grid {
    /// Covers [r_min, r_end] with intervals of `step`, extending r_end so
    /// the interval count is even.
    pub fn covering(r_min: f64, r_end: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(r_end > r_min) {
            return Err(Error::Config(format!(
                "bad radial grid: r_min {r_min}, r_end {r_end}, step {step}"
            )));
        }
        let half = ((r_end - r_min) / (2.0 * step) - 1e-9).ceil().max(1.0) as usize;
        Ok(Self {
            r_min,
            step,
            intervals: 2 * half,
        })
    }

    pub fn r_max(&self) -> f64 {
        self.r_min + self.intervals as f64 * self.step
    }
}

const HARD_WALL: f64 = 1e30;

struct Track {
    energy: f64,
    y: DMatrix<f64>,
    failed: Option<Error>,
}

/// Half-sector elements (y₁, y₁ − y₂) for a constant diagonal W = w over a
/// width h: κ coth κh and κ tanh(κh/2), or k cot kh and −k tan(kh/2) when
/// the channel is locally open.
fn reference_elements(w: f64, h: f64) -> (f64, f64) {
    if w == 0.0 {
        (1.0 / h, 0.0)
    } else if w > 0.0 {
        let kappa = w.sqrt();
        let t = kappa * h;
        (kappa / t.tanh(), kappa * (0.5 * t).tanh())
    } else {
        let k = (-w).sqrt();
        let t = k * h;
        (k / t.tan(), -k * (0.5 * t).tan())
    }
}

/// Y ← y₁ − y₂ (Y + y₁)⁻¹ y₂ for diagonal y₁ and y₂ = y₁ − d, evaluated as
/// Y + 2d − (Y + d)(Y + y₁)⁻¹(Y + d) so nothing of order 1/h cancels.
/// `direct` keeps the plain form, needed while Y still holds a hard wall.
#[allow(clippy::too_many_arguments)]
fn half_sector(
    y: &mut [f64],
    y1: &[f64],
    d: &[f64],
    n: usize,
    direct: bool,
    a: &mut [f64],
    x: &mut [f64],
    piv: &mut [usize],
) -> bool {
    a.copy_from_slice(y);
    for i in 0..n {
        a[i * n + i] += y1[i];
    }
    if !lu_factor(a, n, piv) {
        return false;
    }
    if direct {
        x.fill(0.0);
        for i in 0..n {
            x[i * n + i] = y1[i] - d[i];
        }
        lu_solve_matrix(a, n, piv, x);
        for i in 0..n {
            let y2 = y1[i] - d[i];
            for j in 0..n {
                y[i * n + j] = -y2 * x[i * n + j];
            }
            y[i * n + i] += y1[i];
        }
    } else {
        for i in 0..n {
            y[i * n + i] += d[i];
        }
        // y now holds Y + d, symmetric
        x.copy_from_slice(y);
        lu_solve_matrix(a, n, piv, x);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += y[i * n + k] * x[k * n + j];
                }
                a[i * n + j] = y[i * n + j] - s;
            }
        }
        y.copy_from_slice(a);
        for i in 0..n {
            y[i * n + i] += d[i];
        }
    }
    symmetrize(y, n);
    true
}

/// Energy-independent pieces of one sector: the reference basis, its
/// eigenvalues of V(b) and the residuals 2μ(TᵀVT − Λ) at both ends.
struct Sector {
    t: DMatrix<f64>,
    lambda: Vec<f64>,
    res_a: Vec<f64>,
    res_c: Vec<f64>,
    /// Midpoint residual with its (I − h²ΔW/6)⁻¹ correction, when the
    /// reference is not the eigenbasis.
    res_b: Option<Vec<f64>>,
}

fn residual(t: &DMatrix<f64>, v: &[f64], lambda: &[f64], two_mu: f64) -> Vec<f64> {
    let n = lambda.len();
    let v = DMatrix::from_row_slice(n, n, v);
    let mut r = t.transpose() * v * t;
    for i in 0..n {
        r[(i, i)] -= lambda[i];
    }
    let mut out: Vec<f64> = r
        .transpose()
        .as_slice()
        .iter()
        .map(|x| two_mu * x)
        .collect();
    symmetrize(&mut out, n);
    out
}

/// The first sector keeps the propagation basis so a hard-wall start stays
/// diagonal; later ones diagonalize V at their midpoint.
fn sector(
    va: &[f64],
    vb: &[f64],
    vc: &[f64],
    n: usize,
    h: f64,
    two_mu: f64,
    first: bool,
) -> Option<Sector> {
    let (t, lambda, res_b) = if first {
        let lambda: Vec<f64> = (0..n).map(|i| vb[i * n + i]).collect();
        let mut mid = vec![0.0; n * n];
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    mid[i * n + j] = two_mu * vb[i * n + j];
                    a[i * n + j] = -h * h / 6.0 * mid[i * n + j];
                }
            }
            a[i * n + i] = 1.0;
        }
        let mut piv = vec![0usize; n];
        if !lu_factor(&mut a, n, &mut piv) {
            return None;
        }
        lu_solve_matrix(&a, n, &piv, &mut mid);
        symmetrize(&mut mid, n);
        (DMatrix::identity(n, n), lambda, Some(mid))
    } else {
        let eig = SymmetricEigen::new(DMatrix::from_row_slice(n, n, vb));
        (eig.eigenvectors, eig.eigenvalues.as_slice().to_vec(), None)
    };
    Some(Sector {
        res_a: residual(&t, va, &lambda, two_mu),
        res_c: residual(&t, vc, &lambda, two_mu),
        t,
        lambda,
        res_b,
    })
}

/// Log-derivative matrices Y(r_max) in the propagation basis (row-major),
/// one per energy. All energies share the potential evaluations and the
/// sector bases.
///
/// Each sector [a, c] of width 2h takes W at its midpoint, diagonalized, as
/// a constant reference that is propagated exactly; the residual W − W_ref
/// enters as Simpson-weighted kicks at a and c. The error then follows the
/// variation of W across a sector instead of its size or its couplings.
pub fn propagate(problem: &CoupledProblem, energies: &[f64], grid: Grid) -> Vec<Result<Vec<f64>>> {
    let n = problem.dim();
    let h = grid.step;
    let two_mu = 2.0 * problem.mass;
    let mut tracks: Vec<Track> = energies
        .iter()
        .map(|&energy| Track {
            energy,
            y: DMatrix::zeros(n, n),
            failed: None,
        })
        .collect();
    let mut va = vec![0.0; n * n];
    let mut vb = vec![0.0; n * n];
    let mut vc = vec![0.0; n * n];
    let mut a = vec![0.0; n * n];
    let mut x = vec![0.0; n * n];
    let mut tmp = DMatrix::zeros(n, n);
    let mut piv = vec![0usize; n];
    let (mut y1, mut d) = (vec![0.0; n], vec![0.0; n]);

    problem.potential_into(grid.r_min, &mut va);
    for track in &mut tracks {
        // WKB start inside the classically forbidden region, or a hard wall
        // where the channel is locally open
        for i in 0..n {
            let wi = two_mu * (va[i * n + i] - track.energy);
            track.y[(i, i)] = if wi > 0.0 { wi.sqrt() } else { HARD_WALL };
        }
    }

    let mut basis = DMatrix::identity(n, n);
    for index in 0..grid.intervals / 2 {
        let ra = grid.r_min + (2 * index) as f64 * h;
        problem.potential_into(ra + h, &mut vb);
        problem.potential_into(ra + 2.0 * h, &mut vc);
        let Some(sec) = sector(&va, &vb, &vc, n, h, two_mu, index == 0) else {
            for t in tracks.iter_mut().filter(|t| t.failed.is_none()) {
                t.failed = Some(Error::Singular { r: ra + h });
            }
            break;
        };
        let overlap = (index > 0).then(|| basis.transpose() * &sec.t);
        for track in tracks.iter_mut().filter(|t| t.failed.is_none()) {
            let e = track.energy;
            for i in 0..n {
                (y1[i], d[i]) = reference_elements(two_mu * (sec.lambda[i] - e), h);
            }
            if let Some(o) = &overlap {
                tmp.gemm(1.0, &track.y, o, 0.0);
                track.y.gemm_tr(1.0, o, &tmp, 0.0);
            }
            let y = track.y.as_mut_slice();
            symmetrize(y, n);
            for (yk, rk) in y.iter_mut().zip(&sec.res_a) {
                *yk += h / 3.0 * rk;
            }
            if !half_sector(y, &y1, &d, n, index == 0, &mut a, &mut x, &mut piv) {
                track.failed = Some(Error::Singular { r: ra + h });
                continue;
            }
            if let Some(mid) = &sec.res_b {
                for (yk, mk) in y.iter_mut().zip(mid) {
                    *yk += 4.0 * h / 3.0 * mk;
                }
            }
            if !half_sector(y, &y1, &d, n, false, &mut a, &mut x, &mut piv) {
                track.failed = Some(Error::Singular { r: ra + 2.0 * h });
                continue;
            }
            for (yk, rk) in y.iter_mut().zip(&sec.res_c) {
                *yk += h / 3.0 * rk;
            }
            if index % 32 == 0 && y.iter().any(|v| !v.is_finite()) {
                track.failed = Some(Error::Singular { r: ra + 2.0 * h });
            }
        }
        basis = sec.t;
        std::mem::swap(&mut va, &mut vc);
    }
    tracks
        .into_iter()
        .map(|t| {
            if let Some(e) = t.failed {
                return Err(e);
            }
            let mut y = &basis * t.y * basis.transpose();
            symmetrize(y.as_mut_slice(), n);
            if y.iter().any(|x| !x.is_finite()) {
                return Err(Error::Singular { r: grid.r_max() });
            }
            Ok(y.as_slice().to_vec())
        })
        .collect()
}
