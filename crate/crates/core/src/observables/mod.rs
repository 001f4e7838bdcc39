//! Cross sections, rate coefficients and Langevin references built from
//! scattering matrices.

pub mod cross_section;
pub mod langevin;
pub mod process;
pub mod rates;
pub mod thermal;

pub use cross_section::{
    block_cross_sections, fcqs_cross_sections, j_max, mcqs_cross_sections, parity_cross_section,
    solve_case_e_block, solve_fcqs_block, sum_converged, total_cross_section, BlockResult,
    BlockSigma, FcqsPoint, McqsPoint, McqsSettings,
};
pub use langevin::{
    atom_density, d52_preparation_correction, survival_curve, t_eff, Corrected, Langevin,
};
pub use process::{ChannelGroup, Entrance, PerProcess, ProcessLabel};
pub use rates::{RateRow, RateTable, ScatteringModel};
pub use thermal::{langevin_average, thermal_rate, AverageEstimator, MonotoneCubic, RateCurve};
