//! Coupled-channel scattering engine for ultracold Li + Ba⁺ collisions.

pub mod angular;
pub mod basis;
pub mod error;
pub mod landau_zener;
pub mod observables;
pub mod potentials;
pub mod propagator;
pub mod units;

pub use error::{Error, Result};
