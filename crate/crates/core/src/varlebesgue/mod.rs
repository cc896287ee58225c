//! Variable-exponent Lebesgue norms: modulars, Luxemburg norms by bisection,
//! mixed and time-variable norms, and inequality checks.

mod exponent;
mod inequalities;
mod norm;

pub use exponent::{conjugate_exponent, Domain, ExponentField, Interval, Samples, Signal};
pub use inequalities::{
    check_log_holder, embedding_constant, verify_duality, verify_embedding, verify_holder, DualityOutcome,
    EmbeddingOutcome, LogHolder,
};
pub use norm::{
    classical_norm, luxemburg_norm, luxemburg_norm_traced, mixed_norm, modular, unit_time_norm, yt_norm,
    yt_norm_from_slice_norms, NormResult, DEFAULT_TOL,
};
