//! Channel groups and the process an entrance → exit transition belongs to.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::{Asymptote, HundEChannel, Thresholds};

/// Asymptotic channels sharing a fine-structure level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelGroup {
    SS,
    IonS,
    D32,
    D52,
}

impl ChannelGroup {
    pub fn of(channel: &HundEChannel) -> Self {
        match channel.asymptote {
            Asymptote::SS => ChannelGroup::SS,
            Asymptote::IonS => ChannelGroup::IonS,
            Asymptote::SD if channel.jb.twice() == 3 => ChannelGroup::D32,
            Asymptote::SD => ChannelGroup::D52,
        }
    }

    pub fn threshold(self, thresholds: &Thresholds) -> f64 {
        match self {
            ChannelGroup::SS => 0.0,
            ChannelGroup::IonS => thresholds.ion_s,
            ChannelGroup::D32 => thresholds.sd32,
            ChannelGroup::D52 => thresholds.sd52,
        }
    }

    /// Group whose threshold lies closest to `energy` (Hartree).
    pub fn nearest(energy: f64, thresholds: &Thresholds) -> Self {
        [
            ChannelGroup::SS,
            ChannelGroup::IonS,
            ChannelGroup::D32,
            ChannelGroup::D52,
        ]
        .into_iter()
        .min_by(|a, b| {
            (a.threshold(thresholds) - energy)
                .abs()
                .total_cmp(&(b.threshold(thresholds) - energy).abs())
        })
        .unwrap()
    }
}

/// Fine level the ion is prepared in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Entrance {
    #[serde(rename = "5D3/2")]
    D32,
    #[serde(rename = "5D5/2")]
    D52,
}

impl Entrance {
    pub fn group(self) -> ChannelGroup {
        match self {
            Entrance::D32 => ChannelGroup::D32,
            Entrance::D52 => ChannelGroup::D52,
        }
    }

    pub fn threshold(self, thresholds: &Thresholds) -> f64 {
        self.group().threshold(thresholds)
    }

    /// Processes with a possible exit channel from this level.
    pub fn processes(self) -> &'static [ProcessLabel] {
        match self {
            Entrance::D32 => &[ProcessLabel::EC, ProcessLabel::NRQ, ProcessLabel::NRCE],
            Entrance::D52 => &ProcessLabel::ALL,
        }
    }
}

impl fmt::Display for Entrance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Entrance::D32 => "5D3/2",
            Entrance::D52 => "5D5/2",
        })
    }
}

impl FromStr for Entrance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().trim_start_matches('5').trim_start_matches('D') {
            "3/2" | "32" => Ok(Entrance::D32),
            "5/2" | "52" => Ok(Entrance::D52),
            _ => Err(format!(
                "unknown entrance level '{s}' (expected 5D3/2 or 5D5/2)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProcessLabel {
    EC,
    FSQ,
    NRQ,
    NRCE,
}

impl ProcessLabel {
    pub const ALL: [ProcessLabel; 4] = [
        ProcessLabel::EC,
        ProcessLabel::FSQ,
        ProcessLabel::NRQ,
        ProcessLabel::NRCE,
    ];
    pub const INELASTIC: [ProcessLabel; 3] =
        [ProcessLabel::FSQ, ProcessLabel::NRQ, ProcessLabel::NRCE];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Process for a transition between channel groups. Excitation to a higher
    /// fine level has no label and gives `None`.
    pub fn classify(entrance: ChannelGroup, exit: ChannelGroup) -> Option<Self> {
        use ChannelGroup::*;
        match (entrance, exit) {
            (a, b) if a == b => Some(ProcessLabel::EC),
            (D52, D32) => Some(ProcessLabel::FSQ),
            (D32 | D52, SS) => Some(ProcessLabel::NRQ),
            (D32 | D52, IonS) => Some(ProcessLabel::NRCE),
            _ => None,
        }
    }
}

impl fmt::Display for ProcessLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProcessLabel::EC => "EC",
            ProcessLabel::FSQ => "FSQ",
            ProcessLabel::NRQ => "NRQ",
            ProcessLabel::NRCE => "NRCE",
        })
    }
}

impl FromStr for ProcessLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProcessLabel::ALL
            .into_iter()
            .find(|p| p.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown process '{s}'"))
    }
}

/// One value per process.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PerProcess<T>(pub [T; 4]);

impl<T: Copy> PerProcess<T> {
    pub fn splat(v: T) -> Self {
        Self([v; 4])
    }

    pub fn map<U>(self, f: impl Fn(T) -> U) -> PerProcess<U> {
        PerProcess(self.0.map(f))
    }

    pub fn iter(&self) -> impl Iterator<Item = (ProcessLabel, T)> + '_ {
        ProcessLabel::ALL
            .into_iter()
            .map(|p| (p, self.0[p.index()]))
    }
}

impl PerProcess<f64> {
    pub fn zero() -> Self {
        Self([0.0; 4])
    }

    pub fn add_scaled(&mut self, other: &Self, factor: f64) {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += factor * b;
        }
    }

    pub fn inelastic(&self) -> f64 {
        ProcessLabel::INELASTIC.iter().map(|&p| self[p]).sum()
    }
}

impl<T> Index<ProcessLabel> for PerProcess<T> {
    type Output = T;

    fn index(&self, p: ProcessLabel) -> &T {
        &self.0[p.index()]
    }
}

impl<T> IndexMut<ProcessLabel> for PerProcess<T> {
    fn index_mut(&mut self, p: ProcessLabel) -> &mut T {
        &mut self.0[p.index()]
    }
}
