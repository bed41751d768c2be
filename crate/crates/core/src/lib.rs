//! Nonlinear spectral gaps of random regular graphs: graph primitives,
//! configuration-model sampling, spectra, long-range expansion, norms with
//! cotype, Poincaré ratios and a finite-instance certifier.

pub mod certifier;
pub mod constants;
pub mod eigen;
pub mod error;
pub mod expansion;
pub mod graph;
pub mod logscalar;
pub mod norms;
pub mod poincare;
pub mod random_graphs;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use logscalar::LogScalar;
