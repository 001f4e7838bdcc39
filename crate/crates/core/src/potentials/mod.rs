//! Model potential curves, spin-orbit couplings and the 16×16 body-frame
//! Hamiltonian built from them.

pub mod adiabats;
pub mod model;
pub mod pec;
pub mod soc;
pub mod spline;
pub mod surface;
pub mod table;

pub use model::{ModelParams, DEFAULT_MODEL_TOML};
pub use pec::{PecModel, PecParams};
pub use soc::{diabatize_swap, SocModel, SocShape, X1Coupling};
pub use surface::PotentialSurfaceSet;
