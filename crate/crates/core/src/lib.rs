//! Quantum Lissajous states of the two-dimensional harmonic oscillator.
//!
//! The crate builds stationary states by projecting two-mode coherent states
//! onto degenerate subspaces of the oscillator with frequencies
//! `ω_x = q·ω₀`, `ω_y = p·ω₀`, evaluates their wavefunctions, probability
//! densities and current densities on rectangular grids, and detects phase
//! singularities. Classical Lissajous curves and time-dependent two-mode
//! coherent states are included as the classical and semi-classical
//! reference points.
//!
//! Units follow `m = ħ = 1` throughout.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, rasters,
//! parallel evaluation and the command-line front end live in the
//! `lissajous` companion crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod classical;
mod error;
pub mod fields;
pub mod semiclassical;
pub mod specialfn;
pub mod states;

pub use error::Error;
pub use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;
