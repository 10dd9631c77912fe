//! Optimal memory schemes for accelerated average consensus.
//!
//! Agents run `x_i(k+1) = x_i(k) + u_i(k)` where the control mixes current
//! and past neighbour deviations (`ε_m` taps) with the agent's own past
//! states (`θ_m` taps). This crate builds the rate-optimal gain schemes,
//! certifies their convergence rate through the spectral radius of the
//! per-eigenvalue companion matrices, simulates the network dynamics and
//! brute-forces the parameter space as an independent check.

// `!(x > y)` is used on purpose so that NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod graph;
pub mod matrix;
pub mod optimizer;
pub mod reference;
pub mod scheme;
pub mod sim;
pub mod spectral;
pub mod stability;

pub use error::{Error, Result};
pub use graph::{Graph, Laplacian};
pub use scheme::{MemoryScheme, RatePrediction};
pub use spectral::SpectralSummary;
pub use stability::{CharPoly, RateReport};
