//! Adiabatic curves in Hund's case (c) (per Ω block) and case (e) (per J, p).

use nalgebra::{DMatrix, SymmetricEigen};

use super::surface::PotentialSurfaceSet;
use crate::basis::{enumerate_case_a, FrameTransform};

pub const OMEGA_BLOCKS: [&str; 5] = ["0+", "0-", "1", "2", "3"];

/// 0-based indices of the states in one Ω block.
pub fn omega_block_indices(block: &str) -> Vec<usize> {
    enumerate_case_a()
        .into_iter()
        .filter(|s| s.omega_block() == block)
        .map(|s| s.index - 1)
        .collect()
}

/// How the ℓ(ℓ+1)/2μR² term enters the case (e) Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rotation {
    /// Diagonal in the channel basis, which includes Coriolis mixing of Ω.
    Full,
    /// Only the diagonal of the rotational term in the case (a) basis is kept.
    NoCoriolis,
}

fn submatrix(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Potential plus rotation in the channel basis at R.
pub fn case_e_matrix(
    surface: &PotentialSurfaceSet,
    ft: &FrameTransform,
    mass: f64,
    r: f64,
    rotation: Rotation,
) -> DMatrix<f64> {
    let n = ft.dim();
    let centrifugal = DMatrix::from_fn(n, n, |a, b| {
        if a == b {
            let l = ft.channels[a].ell as f64;
            l * (l + 1.0) / (2.0 * mass * r * r)
        } else {
            0.0
        }
    });
    let v = ft.to_channels(&surface.matrix(r));
    match rotation {
        Rotation::Full => v + centrifugal,
        Rotation::NoCoriolis => {
            let in_a = ft.matrix.transpose() * &centrifugal * &ft.matrix;
            let diag = DMatrix::from_diagonal(&in_a.diagonal());
            v + &ft.matrix * diag * ft.matrix.transpose()
        }
    }
}

/// Sorted eigenvalues of each Ω block, one row per grid point.
pub fn adiabats_case_c(
    surface: &PotentialSurfaceSet,
    grid: &[f64],
) -> Vec<(&'static str, Vec<Vec<f64>>)> {
    OMEGA_BLOCKS
        .iter()
        .map(|&block| {
            let idx = omega_block_indices(block);
            let rows = grid
                .iter()
                .map(|&r| sorted_eigenvalues(submatrix(&surface.matrix(r), &idx)))
                .collect();
            (block, rows)
        })
        .collect()
}

/// Sorted eigenvalues of the case (e) Hamiltonian, one row per grid point.
pub fn adiabats_case_e(
    surface: &PotentialSurfaceSet,
    ft: &FrameTransform,
    mass: f64,
    grid: &[f64],
    rotation: Rotation,
) -> Vec<Vec<f64>> {
    grid.iter()
        .map(|&r| sorted_eigenvalues(case_e_matrix(surface, ft, mass, r, rotation)))
        .collect()
}

/// Reorders eigenpairs along the grid so each curve follows the eigenvector
/// with the largest overlap at the previous point.
pub fn tracked_adiabats(matrices: impl IntoIterator<Item = DMatrix<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut previous: Option<DMatrix<f64>> = None;
    for m in matrices {
        let eig = SymmetricEigen::new(m);
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();

        let (values, vectors) = match &previous {
            None => (values, vectors),
            Some(prev) => {
                let overlap = prev.transpose() * &vectors;
                let mut taken = vec![false; n];
                let mut assign = vec![0; n];
                // greedy assignment by decreasing overlap
                let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
                for a in 0..n {
                    for b in 0..n {
                        pairs.push((overlap[(a, b)].abs(), a, b));
                    }
                }
                pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
                let mut done = vec![false; n];
                for (_, a, b) in pairs {
                    if !done[a] && !taken[b] {
                        done[a] = true;
                        taken[b] = true;
                        assign[a] = b;
                    }
                }
                let v = assign.iter().map(|&b| values[b]).collect();
                let vec = DMatrix::from_fn(n, n, |r, c| vectors[(r, assign[c])]);
                (v, vec)
            }
        };
        out.push(values);
        previous = Some(vectors);
    }
    out
}

/// Smallest splitting between neighbouring eigenvalues of `h(R)` for
/// R in [lo, hi], counting only pairs whose energies lie in `window`.
/// A grid scan is refined by golden-section search around the best point.
pub fn minimum_gap(
    h: impl Fn(f64) -> DMatrix<f64>,
    lo: f64,
    hi: f64,
    window: (f64, f64),
) -> Option<(f64, f64)> {
    let gap_at = |r: f64, k: usize| -> f64 {
        let v = sorted_eigenvalues(h(r));
        v[k + 1] - v[k]
    };

    let n = 240;
    let mut best: Option<(f64, f64, usize)> = None;
    for i in 0..=n {
        let r = lo + (hi - lo) * i as f64 / n as f64;
        let v = sorted_eigenvalues(h(r));
        for k in 0..v.len().saturating_sub(1) {
            if v[k] < window.0 || v[k + 1] > window.1 {
                continue;
            }
            let g = v[k + 1] - v[k];
            if best.is_none_or(|b| g < b.1) {
                best = Some((r, g, k));
            }
        }
    }
    let (r0, _, k) = best?;

    let step = (hi - lo) / n as f64;
    let (mut a, mut b) = ((r0 - step).max(lo), (r0 + step).min(hi));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (gap_at(c, k), gap_at(d, k));
    for _ in 0..100 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = gap_at(c, k);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = gap_at(d, k);
        }
    }
    let r = 0.5 * (a + b);
    Some((r, gap_at(r, k)))
}
