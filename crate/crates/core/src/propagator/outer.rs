//! Outward log-derivative propagation through the long-range region, where
//! the channels no longer couple. A channel is frozen once its
//! phase-amplitude reference is accurate; beyond that point it is continued
//! as a free (W = 0) channel with linearly extended references, which keeps
//! the Wronskian exact and lets the step grow with the slow channels only.

use nalgebra::DMatrix;

use super::linalg::{lu_factor, lu_solve_matrix, symmetrize};
use super::matching::{OuterChannel, Reference};
use crate::error::{Error, Result};

/// Outer radius beyond which the scheme gives up.
const R_LIMIT: f64 = 1e8;

pub enum OuterLeg {
    /// Open channel and the index of its degenerate group.
    Open(OuterChannel, usize),
    /// Decaying solution with the given log-derivative at the start radius.
    Closed(f64),
}

pub struct OuterMatch {
    /// Log-derivative at `r_end` in the asymptotic basis.
    pub y: DMatrix<f64>,
    pub r_end: f64,
    /// References of the open legs at `r_end`, in leg order.
    pub references: Vec<Reference>,
    /// Log-derivatives of the closed legs at `r_end`.
    pub closed: Vec<(usize, f64)>,
}

enum State {
    Active,
    Frozen { at: f64, reference: Reference },
}

/// Long-range coupling −c4/R⁴ − c6/R⁶ between two open channels of the same
/// group.
#[derive(Clone, Copy, Debug)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub c4: f64,
    pub c6: f64,
}

/// `kh` bounds the step against the local wavenumber of unfrozen channels.
pub fn propagate_outer(
    y0: &DMatrix<f64>,
    r0: f64,
    legs: &[OuterLeg],
    couplings: &[Coupling],
    mass: f64,
    tolerance: f64,
    kh: f64,
) -> Result<OuterMatch> {
    let n = legs.len();
    let mut y: Vec<f64> = (0..n * n).map(|k| y0[(k / n, k % n)]).collect();
    let mut states: Vec<State> = legs
        .iter()
        .map(|leg| match leg {
            OuterLeg::Open(..) => State::Active,
            OuterLeg::Closed(d) => State::Frozen {
                at: r0,
                reference: Reference {
                    j: 0.0,
                    dj: 0.0,
                    n: 1.0,
                    dn: *d,
                },
            },
        })
        .collect();
    let groups: Vec<usize> = {
        let mut g: Vec<usize> = legs
            .iter()
            .filter_map(|l| match l {
                OuterLeg::Open(_, g) => Some(*g),
                _ => None,
            })
            .collect();
        g.sort_unstable();
        g.dedup();
        g
    };
    // freezes every group whose members are all semiclassical; mixing within
    // a group beyond that point acts as a unitary on its incoming and
    // outgoing waves and leaves group-summed probabilities unchanged
    let freeze = |states: &mut [State], r: f64| {
        for &g in &groups {
            let members: Vec<usize> = (0..legs.len())
                .filter(|&i| matches!((&legs[i], &states[i]), (OuterLeg::Open(_, h), State::Active) if *h == g))
                .collect();
            if members.is_empty() {
                continue;
            }
            let refs: Option<Vec<Reference>> = members
                .iter()
                .map(|&i| match &legs[i] {
                    OuterLeg::Open(ch, _) => ch.reference(r, tolerance),
                    _ => unreachable!(),
                })
                .collect();
            if let Some(refs) = refs {
                for (&i, reference) in members.iter().zip(refs) {
                    states[i] = State::Frozen { at: r, reference };
                }
            }
        }
    };
    freeze(&mut states, r0);

    // W restricted to channels still being propagated, row-major
    let w_at = |states: &[State], r: f64, out: &mut [f64]| {
        out.fill(0.0);
        for (i, (leg, st)) in legs.iter().zip(states).enumerate() {
            if let (OuterLeg::Open(ch, _), State::Active) = (leg, st) {
                out[i * n + i] = ch.w(r);
            }
        }
        for c in couplings {
            if matches!(states[c.i], State::Active) && matches!(states[c.j], State::Active) {
                let v = -2.0 * mass * (c.c4 / r.powi(4) + c.c6 / r.powi(6));
                out[c.i * n + c.j] = v;
                out[c.j * n + c.i] = v;
            }
        }
    };

    let mut r = r0;
    let mut panels = 0usize;
    let mut z = vec![0.0; n * n];
    let mut piv = vec![0usize; n];
    let mut w = vec![0.0; n * n];
    while states.iter().any(|s| matches!(s, State::Active)) {
        if r > R_LIMIT {
            return Err(Error::Convergence(format!(
                "outer region not resolved by R = {R_LIMIT:.0e}"
            )));
        }
        w_at(&states, r, &mut w);
        let wmax = (0..n).fold(0.0f64, |m, i| m.max(w[i * n + i].abs()));
        let h = (kh / wmax.sqrt()).min(0.01 * r);
        // one Simpson panel [r, r + 2h]
        for k in 0..n * n {
            y[k] += h / 3.0 * w[k];
        }
        for sub in 1..=2 {
            let rs = r + sub as f64 * h;
            for k in 0..n * n {
                z[k] = h * y[k];
            }
            for i in 0..n {
                z[i * n + i] += 1.0;
            }
            if !lu_factor(&mut z, n, &mut piv) {
                return Err(Error::Singular { r: rs });
            }
            lu_solve_matrix(&z, n, &piv, &mut y);
            w_at(&states, rs, &mut w);
            let c = if sub == 1 {
                // U = (I − h²W/6)⁻¹ W
                for k in 0..n * n {
                    z[k] = -h * h / 6.0 * w[k];
                }
                for i in 0..n {
                    z[i * n + i] += 1.0;
                }
                if !lu_factor(&mut z, n, &mut piv) {
                    return Err(Error::Singular { r: rs });
                }
                lu_solve_matrix(&z, n, &piv, &mut w);
                4.0 * h / 3.0
            } else {
                h / 3.0
            };
            for k in 0..n * n {
                y[k] += c * w[k];
            }
        }
        symmetrize(&mut y, n);
        r += 2.0 * h;
        panels += 1;
        freeze(&mut states, r);
    }
    log::debug!("outer region: {panels} panels from {r0} to {r:.1} a0");
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular { r });
    }

    let mut references = Vec::new();
    let mut closed = Vec::new();
    for (i, (leg, st)) in legs.iter().zip(&states).enumerate() {
        let State::Frozen { at, reference: f } = st else {
            unreachable!()
        };
        let d = r - at;
        match leg {
            OuterLeg::Open(..) => references.push(Reference {
                j: f.j + f.dj * d,
                dj: f.dj,
                n: f.n + f.dn * d,
                dn: f.dn,
            }),
            OuterLeg::Closed(_) => closed.push((i, f.dn / (f.n + f.dn * d))),
        }
    }
    Ok(OuterMatch {
        y: DMatrix::from_row_slice(n, n, &y),
        r_end: r,
        references,
        closed,
    })
}
