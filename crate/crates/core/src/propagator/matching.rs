//! Asymptotic matching: K from the log-derivative, S from K, and reference
//! solutions for the decoupled outer region.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::{Complex, DMatrix};

use super::riccati::{modified_decaying_log_derivative, riccati_bessel};
use crate::error::{Error, Result};

/// Values and derivatives at the matching radius of the regular (J) and
/// irregular (N) reference solution of one channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reference {
    pub j: f64,
    pub dj: f64,
    pub n: f64,
    pub dn: f64,
}

impl Reference {
    /// Free-particle references ĵ/√k and n̂/√k at radius r.
    pub fn free(ell: i32, k: f64, r: f64) -> Self {
        let (j, n, dj, dn) = riccati_bessel(ell, k * r);
        let s = k.sqrt();
        Self {
            j: j / s,
            dj: dj * s,
            n: n / s,
            dn: dn * s,
        }
    }
}

/// Local log-derivative of the decaying solution of a closed channel.
pub fn closed_log_derivative(ell: i32, kappa: f64, r: f64) -> f64 {
    kappa * modified_decaying_log_derivative(ell, kappa * r)
}

/// Open-open block of K from Y (asymptotic basis, n × n) given references for
/// the open channels and decaying log-derivatives for the closed ones.
/// Returns K before symmetrization.
pub fn k_from_log_derivative(
    y: &DMatrix<f64>,
    open: &[usize],
    references: &[Reference],
    closed_log_derivatives: &[(usize, f64)],
) -> Result<DMatrix<f64>> {
    let n = y.nrows();
    let no = open.len();
    let mut nvals = vec![1.0; n];
    let mut dnvals = vec![0.0; n];
    for (&i, rf) in open.iter().zip(references) {
        nvals[i] = rf.n;
        dnvals[i] = rf.dn;
    }
    for &(i, d) in closed_log_derivatives {
        dnvals[i] = d;
    }
    let a = DMatrix::from_fn(n, n, |r, c| {
        y[(r, c)] * nvals[c] - if r == c { dnvals[c] } else { 0.0 }
    });
    let b = DMatrix::from_fn(n, no, |r, c| {
        let o = open[c];
        y[(r, o)] * references[c].j - if r == o { references[c].dj } else { 0.0 }
    });
    let lu = a.lu();
    let full = lu
        .solve(&b)
        .ok_or_else(|| Error::MatchingCheck("matching matrix is singular".into()))?;
    Ok(DMatrix::from_fn(no, no, |r, c| full[(open[r], c)]))
}

/// max |K − Kᵀ| relative to max(1, max|K|).
pub fn asymmetry(k: &DMatrix<f64>) -> f64 {
    let scale = k.amax().max(1.0);
    (k - k.transpose()).amax() / scale
}

/// S = (I + iK)(I − iK)⁻¹.
pub fn k_to_s(k: &DMatrix<f64>) -> Result<DMatrix<Complex<f64>>> {
    let n = k.nrows();
    let ik = k.map(|x| Complex::new(0.0, x));
    let id = DMatrix::<Complex<f64>>::identity(n, n);
    let plus = &id + &ik;
    let minus = &id - &ik;
    // (I − iK) and (I + iK) commute, so S = (I − iK)⁻¹ (I + iK)
    minus
        .lu()
        .solve(&plus)
        .ok_or_else(|| Error::MatchingCheck("I − iK is singular".into()))
}

/// max |S†S − I|
pub fn unitarity_error(s: &DMatrix<Complex<f64>>) -> f64 {
    let n = s.nrows();
    let p = s.adjoint() * s - DMatrix::<Complex<f64>>::identity(n, n);
    p.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// One channel beyond the matching radius: kinetic energy k²/2μ, partial
/// wave ℓ and the tail −c4/r⁴ − c6/r⁶ (Hartree, Bohr).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OuterChannel {
    pub mass: f64,
    pub k: f64,
    pub ell: i32,
    pub c4: f64,
    pub c6: f64,
}

impl OuterChannel {
    /// w(r) = 2μ(V − E) with the exact centrifugal term.
    pub fn w(&self, r: f64) -> f64 {
        let l = self.ell as f64;
        l * (l + 1.0) / (r * r)
            - self.k * self.k
            - 2.0 * self.mass * (self.c4 / r.powi(4) + self.c6 / r.powi(6))
    }

    /// Free-particle modulus-phase data (φ, q, q′) with ĵ = M sin φ,
    /// n̂ = −M cos φ and q = φ′ = k/M².
    fn free_phase(&self, r: f64) -> (f64, f64, f64) {
        let k = self.k;
        let (j, n, dj, dn) = riccati_bessel(self.ell, k * r);
        let m2 = j * j + n * n;
        let q = k / m2;
        let dm2 = 2.0 * k * (j * dj + n * dn);
        (j.atan2(-n), q, -k * dm2 / (m2 * m2))
    }

    fn tail(&self, r: f64) -> f64 {
        self.c4 / r.powi(4) + self.c6 / r.powi(6)
    }

    /// Phase-amplitude solutions normalized to ĵ/√k and n̂/√k at infinity.
    /// The free motion is exact; only the tail is treated semiclassically.
    fn wkb_reference(&self, r: f64) -> Option<Reference> {
        let two_mu = 2.0 * self.mass;
        let quad = GaussLegendre::new(NonZeroUsize::new(48).unwrap());
        let mut ok = true;
        // ∫_r^∞ (q − q_free) dr' in the variable t = 1/r'
        let shift = quad.integrate(0.0, 1.0 / r, |t| {
            if t == 0.0 {
                return 0.0;
            }
            let (_, qf, _) = self.free_phase(1.0 / t);
            let extra = two_mu * (self.c4 * t.powi(4) + self.c6 * t.powi(6));
            let q2 = qf * qf + extra;
            if !(q2 > 0.0) {
                ok = false;
                return 0.0;
            }
            extra / (q2.sqrt() + qf) / (t * t)
        });
        if !ok {
            return None;
        }
        let (phi, qf, dqf) = self.free_phase(r);
        let q2 = qf * qf + two_mu * self.tail(r);
        if !(q2 > 0.0) {
            return None;
        }
        let q = q2.sqrt();
        let dtail = -4.0 * self.c4 / r.powi(5) - 6.0 * self.c6 / r.powi(7);
        let dq = (qf * dqf + self.mass * dtail) / q;
        let (s, c) = (phi - shift).sin_cos();
        let amp = q.powf(-0.5);
        let j = amp * s;
        let n = -amp * c;
        Some(Reference {
            j,
            dj: q.sqrt() * c - dq / (2.0 * q) * j,
            n,
            dn: q.sqrt() * s - dq / (2.0 * q) * n,
        })
    }

    /// Size of the leading correction to the phase-amplitude form at r, from
    /// the variation of the tail. Infinite where the channel is locally closed.
    /// The two terms are bounded separately since their signed sum can vanish
    /// at an isolated radius.
    pub fn wkb_error(&self, r: f64) -> f64 {
        let two_mu = 2.0 * self.mass;
        let (_, qf, _) = self.free_phase(r);
        let p = qf * qf + two_mu * self.tail(r);
        if !(p > 0.0) {
            return f64::INFINITY;
        }
        let dp = -two_mu * (4.0 * self.c4 / r.powi(5) + 6.0 * self.c6 / r.powi(7));
        let ddp = two_mu * (20.0 * self.c4 / r.powi(6) + 42.0 * self.c6 / r.powi(8));
        5.0 * dp * dp / (16.0 * p * p * p) + ddp.abs() / (4.0 * p * p)
    }

    /// Phase-amplitude references at r when they are accurate to `tolerance`.
    pub fn reference(&self, r: f64, tolerance: f64) -> Option<Reference> {
        if self.wkb_error(r) < tolerance {
            self.wkb_reference(r)
        } else {
            None
        }
    }
}
