//! Pseudospectral laboratory for the fractional Keller-Segel system.

pub mod error;
mod fft;
pub mod grid;
pub mod kernels;
pub mod operators;
pub mod quadrature;
pub mod random;
pub mod solver;
pub mod spectral;
pub mod varlebesgue;

pub use error::{Error, Result};
pub use grid::{Field, Grid, SpectralField};
