//! Design of one-dimensional potentials with a prescribed rational spectrum
//! by repeated first-order intertwining, and wave-packet revivals in them.

// NaN-rejecting `!(x > 0.0)` checks and index loops over banded storage are intended.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod banded;
pub mod config;
pub mod eigensolve;
pub mod error;
pub mod evolve;
pub mod grid;
pub mod intertwine;
pub mod multidim;
pub mod ode;
pub mod pipeline;
pub mod potential;
pub mod spectra;
pub mod wavefunction;

pub use error::{Error, Result};

/// Written into every metadata file.
pub const GENERATED_BY: &str = concat!("revival ", env!("CARGO_PKG_VERSION"));
