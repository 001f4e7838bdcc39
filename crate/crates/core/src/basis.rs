//! Hund's case (a) body-frame states, Hund's case (e) channels and the frame
//! transformation between them.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::angular::{clebsch_gordan, wigner9j, HalfInt};
use crate::units::{cm1_to_hartree, hartree_to_cm1};

pub const N_STATES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Asymptote {
    /// Li(2s) + Ba⁺(6s)
    SS,
    /// Li⁺ + Ba(6s² ¹S)
    IonS,
    /// Li(2s) + Ba⁺(5d)
    SD,
}

impl Asymptote {
    pub fn label(self) -> &'static str {
        match self {
            Asymptote::SS => "S+S",
            Asymptote::IonS => "Ion+S",
            Asymptote::SD => "S+D",
        }
    }

    /// (L_a, S_a, L_b, S_b) with a = Li or Li⁺ and b = Ba⁺ or Ba.
    pub fn atomic_terms(self) -> [HalfInt; 4] {
        match self {
            Asymptote::SS => [HalfInt::ZERO, HalfInt::HALF, HalfInt::ZERO, HalfInt::HALF],
            Asymptote::IonS => [HalfInt::ZERO; 4],
            Asymptote::SD => [HalfInt::ZERO, HalfInt::HALF, HalfInt::int(2), HalfInt::HALF],
        }
    }

    /// Total orbital angular momentum L of the separated pair.
    pub fn orbital(self) -> HalfInt {
        let [la, _, lb, _] = self.atomic_terms();
        la + lb
    }
}

impl fmt::Display for Asymptote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Asymptote {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "S+S" => Ok(Asymptote::SS),
            "Ion+S" => Ok(Asymptote::IonS),
            "S+D" => Ok(Asymptote::SD),
            other => Err(format!("unknown asymptote '{other}'")),
        }
    }
}

/// Dissociation thresholds in Hartree, measured from S+S.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub ion_s: f64,
    pub sd32: f64,
    pub sd52: f64,
}

impl Thresholds {
    pub fn from_cm1(ion_s: f64, sd32: f64, fine_structure: f64) -> Self {
        Self {
            ion_s: cm1_to_hartree(ion_s),
            sd32: cm1_to_hartree(sd32),
            sd52: cm1_to_hartree(sd32 + fine_structure),
        }
    }

    pub fn fine_structure(&self) -> f64 {
        self.sd52 - self.sd32
    }

    /// Degeneracy-weighted centre of the 5d manifold, the energy the spin-free
    /// S+D curves dissociate to.
    pub fn sd_center(&self) -> f64 {
        (4.0 * self.sd32 + 6.0 * self.sd52) / 10.0
    }

    /// Spin-free dissociation energy of an asymptote.
    pub fn asymptote_energy(&self, asymptote: Asymptote) -> f64 {
        match asymptote {
            Asymptote::SS => 0.0,
            Asymptote::IonS => self.ion_s,
            Asymptote::SD => self.sd_center(),
        }
    }

    /// Fine-structure channels (j_a, j_b, threshold) of an asymptote.
    pub fn fine_structure_channels(&self, asymptote: Asymptote) -> Vec<(HalfInt, HalfInt, f64)> {
        let half = HalfInt::HALF;
        match asymptote {
            Asymptote::SS => vec![(half, half, 0.0)],
            Asymptote::IonS => vec![(HalfInt::ZERO, HalfInt::ZERO, self.ion_s)],
            Asymptote::SD => vec![
                (half, HalfInt::from_twice(3), self.sd32),
                (half, HalfInt::from_twice(5), self.sd52),
            ],
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.ion_s > 0.0 && self.ion_s < self.sd32 && self.sd32 < self.sd52) {
            return Err(format!(
                "thresholds must satisfy 0 < Ion+S < S+D(3/2) < S+D(5/2), got {:.3}, {:.3}, {:.3} cm-1",
                hartree_to_cm1(self.ion_s),
                hartree_to_cm1(self.sd32),
                hartree_to_cm1(self.sd52)
            ));
        }
        Ok(())
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Self::from_cm1(1452.204, 4873.852, 800.955)
    }
}

/// Reflection symmetry of an Ω = 0 state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reflection {
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HundAState {
    /// 1-based position in the 16×16 matrix.
    pub index: usize,
    pub asymptote: Asymptote,
    /// 2S + 1
    pub multiplicity: i32,
    /// |Λ|
    pub lambda: i32,
    /// |Ω|
    pub omega: i32,
    pub reflection: Option<Reflection>,
    pub term_label: &'static str,
    /// Signed Λ of the representative component with Ω ≥ 0.
    pub lambda_signed: i32,
    /// Twice the signed Σ of the representative component.
    pub sigma_twice: i32,
    /// Relative sign of the (−Λ, −Σ) component for the Ω = 0 Π states.
    pub eta: Option<i32>,
}

impl HundAState {
    pub fn spin(&self) -> HalfInt {
        HalfInt::from_twice(self.multiplicity - 1)
    }

    pub fn sigma(&self) -> HalfInt {
        HalfInt::from_twice(self.sigma_twice)
    }

    /// Body-frame components (amplitude, Λ, 2Σ) of the electronic state.
    pub fn components(&self) -> Vec<(f64, i32, i32)> {
        match self.eta {
            Some(eta) => {
                let a = std::f64::consts::FRAC_1_SQRT_2;
                vec![
                    (a, self.lambda_signed, self.sigma_twice),
                    (a * eta as f64, -self.lambda_signed, -self.sigma_twice),
                ]
            }
            None => vec![(1.0, self.lambda_signed, self.sigma_twice)],
        }
    }

    /// Ω block label used for grouping: "0+", "0-", "1", "2", "3".
    pub fn omega_block(&self) -> &'static str {
        match (self.omega, self.reflection) {
            (0, Some(Reflection::Plus)) => "0+",
            (0, _) => "0-",
            (1, _) => "1",
            (2, _) => "2",
            _ => "3",
        }
    }
}

macro_rules! state {
    ($idx:expr, $asym:ident, $mult:expr, $lam:expr, $om:expr, $refl:expr, $label:expr, $ls:expr, $st:expr, $eta:expr) => {
        HundAState {
            index: $idx,
            asymptote: Asymptote::$asym,
            multiplicity: $mult,
            lambda: $lam,
            omega: $om,
            reflection: $refl,
            term_label: $label,
            lambda_signed: $ls,
            sigma_twice: $st,
            eta: $eta,
        }
    };
}

/// The 16 body-frame states in matrix order.
pub fn enumerate_case_a() -> Vec<HundAState> {
    use Reflection::{Minus, Plus};
    vec![
        state!(1, SS, 1, 0, 0, Some(Plus), "1Sigma+_0+", 0, 0, None),
        state!(2, IonS, 1, 0, 0, Some(Plus), "1Sigma+_0+", 0, 0, None),
        state!(3, SD, 1, 0, 0, Some(Plus), "1Sigma+_0+", 0, 0, None),
        state!(4, SD, 3, 1, 0, Some(Plus), "3Pi_0+", 1, -2, Some(-1)),
        state!(5, SS, 3, 0, 0, Some(Minus), "3Sigma+_0-", 0, 0, None),
        state!(6, SD, 3, 0, 0, Some(Minus), "3Sigma+_0-", 0, 0, None),
        state!(7, SD, 3, 1, 0, Some(Minus), "3Pi_0-", 1, -2, Some(1)),
        state!(8, SS, 3, 0, 1, None, "3Sigma+_1", 0, 2, None),
        state!(9, SD, 3, 0, 1, None, "3Sigma+_1", 0, 2, None),
        state!(10, SD, 1, 1, 1, None, "1Pi_1", 1, 0, None),
        state!(11, SD, 3, 1, 1, None, "3Pi_1", 1, 0, None),
        state!(12, SD, 3, 2, 1, None, "3Delta_1", 2, -2, None),
        state!(13, SD, 3, 1, 2, None, "3Pi_2", 1, 2, None),
        state!(14, SD, 1, 2, 2, None, "1Delta_2", 2, 0, None),
        state!(15, SD, 3, 2, 2, None, "3Delta_2", 2, 0, None),
        state!(16, SD, 3, 2, 3, None, "3Delta_3", 2, 2, None),
    ]
}

/// Space-fixed channel |j_a j_b j ℓ J p⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct HundEChannel {
    pub asymptote: Asymptote,
    pub ja: HalfInt,
    pub jb: HalfInt,
    pub j: i32,
    pub ell: i32,
    pub big_j: i32,
    pub parity: i32,
    /// Hartree, relative to S+S.
    pub threshold: f64,
}

/// Channels of total angular momentum J and parity ±1, sorted by (threshold, j, ℓ).
pub fn enumerate_case_e(big_j: i32, parity: i32, thresholds: &Thresholds) -> Vec<HundEChannel> {
    assert!(big_j >= 0 && (parity == 1 || parity == -1));
    let mut channels = Vec::new();
    for asymptote in [Asymptote::SS, Asymptote::IonS, Asymptote::SD] {
        let [la, _, lb, _] = asymptote.atomic_terms();
        for (ja, jb, threshold) in thresholds.fine_structure_channels(asymptote) {
            let j_lo = (ja.twice() - jb.twice()).abs() / 2;
            let j_hi = (ja.twice() + jb.twice()) / 2;
            for j in j_lo..=j_hi {
                for ell in (big_j - j).abs()..=(big_j + j) {
                    let channel_parity = if (la.as_int() + lb.as_int() + ell) % 2 == 0 {
                        1
                    } else {
                        -1
                    };
                    if channel_parity != parity {
                        continue;
                    }
                    channels.push(HundEChannel {
                        asymptote,
                        ja,
                        jb,
                        j,
                        ell,
                        big_j,
                        parity,
                        threshold,
                    });
                }
            }
        }
    }
    channels.sort_by(|a, b| {
        a.threshold
            .total_cmp(&b.threshold)
            .then(a.j.cmp(&b.j))
            .then(a.ell.cmp(&b.ell))
    });
    channels
}

/// Indices (0-based) of the case (a) states that form symmetrized kets for (J, p).
pub fn symmetrized_case_a_basis(big_j: i32, parity: i32) -> Vec<usize> {
    let natural = if big_j % 2 == 0 { 1 } else { -1 };
    let zero_block = if parity == natural {
        Reflection::Plus
    } else {
        Reflection::Minus
    };
    enumerate_case_a()
        .into_iter()
        .filter(|s| {
            if s.omega == 0 {
                s.reflection == Some(zero_block)
            } else {
                s.omega <= big_j
            }
        })
        .map(|s| s.index - 1)
        .collect()
}

/// ⟨j_a j_b j ℓ J p | Λ S Σ J p⟩ for a symmetrized case (a) ket.
pub fn transform_element(channel: &HundEChannel, state: &HundAState) -> f64 {
    if channel.asymptote != state.asymptote {
        return 0.0;
    }
    let [la, sa, lb, sb] = state.asymptote.atomic_terms();
    let big_l = la + lb;
    let s = state.spin();
    let lam = HalfInt::int(state.lambda_signed);
    let sig = state.sigma();
    let om = lam + sig;
    let j = HalfInt::int(channel.j);
    let ell = HalfInt::int(channel.ell);
    let big_j = HalfInt::int(channel.big_j);
    let p = if channel.parity == 1 { 0 } else { 1 };

    let delta = state.lambda_signed == 0 && state.sigma_twice == 0;
    let norm = if delta {
        1.0
    } else {
        std::f64::consts::FRAC_1_SQRT_2
    };
    let reflection = if delta {
        1.0
    } else {
        let e = la.as_int() + lb.as_int() + channel.ell + p;
        1.0 + if e % 2 == 0 { 1.0 } else { -1.0 }
    };
    if reflection == 0.0 {
        return 0.0;
    }
    let phase_exp = channel.ell - om.as_int() - channel.big_j;
    let phase = if phase_exp.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let dims = (big_l.multiplicity()
        * s.multiplicity()
        * channel.ja.multiplicity()
        * channel.jb.multiplicity()) as f64;

    let rotation = clebsch_gordan(j, -om, big_j, om, ell, HalfInt::ZERO);
    let orbital = clebsch_gordan(la, HalfInt::ZERO, lb, lam, big_l, lam);
    let recoupling = wigner9j([la, sa, channel.ja, lb, sb, channel.jb, big_l, s, j]);
    let spin = clebsch_gordan(big_l, lam, s, sig, j, om);

    phase * norm * reflection * dims.sqrt() * rotation * orbital * recoupling * spin
}

/// Orthogonal transformation from symmetrized case (a) kets (columns) to
/// case (e) channels (rows) for one (J, p) block.
#[derive(Clone, Debug)]
pub struct FrameTransform {
    pub big_j: i32,
    pub parity: i32,
    pub channels: Vec<HundEChannel>,
    /// 0-based indices into the 16 case (a) states.
    pub states: Vec<usize>,
    pub matrix: DMatrix<f64>,
}

impl FrameTransform {
    pub fn new(big_j: i32, parity: i32, thresholds: &Thresholds) -> Self {
        let channels = enumerate_case_e(big_j, parity, thresholds);
        let states = symmetrized_case_a_basis(big_j, parity);
        let all = enumerate_case_a();
        let matrix = DMatrix::from_fn(channels.len(), states.len(), |r, c| {
            transform_element(&channels[r], &all[states[c]])
        });
        Self {
            big_j,
            parity,
            channels,
            states,
            matrix,
        }
    }

    pub fn dim(&self) -> usize {
        self.channels.len()
    }

    /// max |TᵀT − I|
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.matrix.ncols();
        let prod = self.matrix.transpose() * &self.matrix - DMatrix::identity(n, n);
        prod.amax()
    }

    /// Restricts a 16×16 body-frame matrix to this block and rotates it into
    /// the channel basis: T V Tᵀ.
    pub fn to_channels(&self, bf: &DMatrix<f64>) -> DMatrix<f64> {
        let sub = DMatrix::from_fn(self.states.len(), self.states.len(), |a, b| {
            bf[(self.states[a], self.states[b])]
        });
        &self.matrix * sub * self.matrix.transpose()
    }
}

fn jb_projector(jb: HalfInt, ml: i32, msb_twice: i32, ml_p: i32, msb_p_twice: i32) -> f64 {
    let l = HalfInt::int(2);
    let s = HalfInt::HALF;
    let m = HalfInt::from_twice(2 * ml + msb_twice);
    if 2 * ml + msb_twice != 2 * ml_p + msb_p_twice {
        return 0.0;
    }
    clebsch_gordan(
        l,
        HalfInt::int(ml),
        s,
        HalfInt::from_twice(msb_twice),
        jb,
        m,
    ) * clebsch_gordan(
        l,
        HalfInt::int(ml_p),
        s,
        HalfInt::from_twice(msb_p_twice),
        jb,
        m,
    )
}

/// Matrix element of Σ_jb (E_jb − E_center) P_jb between two body-frame
/// components |L=2 Λ; S Σ⟩ of the S+D asymptote, evaluated in the uncoupled
/// product basis of Li(2s) spin and Ba⁺(5d) orbital and spin.
fn fine_structure_component(
    thresholds: &Thresholds,
    (s1, lam1, sig1): (i32, i32, i32),
    (s2, lam2, sig2): (i32, i32, i32),
) -> f64 {
    let center = thresholds.sd_center();
    let levels = [
        (HalfInt::from_twice(3), thresholds.sd32 - center),
        (HalfInt::from_twice(5), thresholds.sd52 - center),
    ];
    let half = HalfInt::HALF;
    let mut total = 0.0;
    for msa in [-1, 1] {
        for msb in [-1, 1] {
            let c1 = clebsch_gordan(
                half,
                HalfInt::from_twice(msa),
                half,
                HalfInt::from_twice(msb),
                HalfInt::int(s1),
                HalfInt::from_twice(sig1),
            );
            if c1 == 0.0 {
                continue;
            }
            for msb_p in [-1, 1] {
                let c2 = clebsch_gordan(
                    half,
                    HalfInt::from_twice(msa),
                    half,
                    HalfInt::from_twice(msb_p),
                    HalfInt::int(s2),
                    HalfInt::from_twice(sig2),
                );
                if c2 == 0.0 {
                    continue;
                }
                for &(jb, shift) in &levels {
                    total += c1 * c2 * shift * jb_projector(jb, lam1, msb, lam2, msb_p);
                }
            }
        }
    }
    total
}

/// Atomic fine-structure operator of the S+D asymptote in the 16 case (a)
/// states (Hartree, measured from the 5d centre of gravity). States of other
/// asymptotes have zero rows and columns.
pub fn atomic_fine_structure_matrix(thresholds: &Thresholds) -> DMatrix<f64> {
    let states = enumerate_case_a();
    let mut m = DMatrix::zeros(N_STATES, N_STATES);
    for a in &states {
        for b in &states {
            if a.asymptote != Asymptote::SD
                || b.asymptote != Asymptote::SD
                || a.omega_block() != b.omega_block()
            {
                continue;
            }
            let s1 = (a.multiplicity - 1) / 2;
            let s2 = (b.multiplicity - 1) / 2;
            let mut v = 0.0;
            for (ca, la, sa) in a.components() {
                for (cb, lb, sb) in b.components() {
                    v += ca * cb * fine_structure_component(thresholds, (s1, la, sa), (s2, lb, sb));
                }
            }
            m[(a.index - 1, b.index - 1)] = v;
        }
    }
    m
}

/// Body-frame energy operator of the separated atoms: spin-free asymptote
/// energies on the diagonal plus the S+D fine structure.
pub fn asymptotic_bf_matrix(thresholds: &Thresholds) -> DMatrix<f64> {
    let mut m = atomic_fine_structure_matrix(thresholds);
    for s in enumerate_case_a() {
        m[(s.index - 1, s.index - 1)] += thresholds.asymptote_energy(s.asymptote);
    }
    m
}
