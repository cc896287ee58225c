//! Time integration of the reduced v-system and the original u-system.

mod config;
mod diagnostics;
mod flux;
mod imex;
mod picard;

pub use config::{Scheme, SolverConfig};
pub use diagnostics::{
    blowup_monitor, critical_exponent, reduction_defect, slice_mixed_norm, smallness_lhs, smallness_value,
    tail_fraction, x_norm, yt_of_slices, BlowupThresholds, State, StepRecord,
};
pub use flux::{curl_defect, nonlinear_flux, symmetric_structure_residual};
pub use imex::{evolve_u, ImexRun};
pub use picard::{picard_solve, PicardDiagnostics, PicardRun};
