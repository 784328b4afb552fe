//! File formats, rasters, parallel field evaluation and the command-line
//! front end over [`lissajous_core`].

pub mod cli;
pub mod error;
pub mod io;
pub mod manifest;
pub mod parallel;
pub mod phase;
pub mod raster;
pub mod verify;

pub use error::{Error, Result};
pub use lissajous_core as core;
