//! Seedable arrival-process laboratory for mobile-node populations.
//!
//! * [`distributions`]: Poisson, exponential, one- and two-parameter Pareto
//!   evaluators, plus the normal approximation to the Poisson law.
//! * [`samplers`]: ChaCha8-backed streams and inverse-transform samplers.
//! * [`arrivals`]: renewal arrival traces and window counts.
//! * [`occupancy`]: capacity-bounded loss-system simulation.
//! * [`stats`]: ECDF, KS distance, quantiles, crossovers.
//! * [`experiments`]: the parameter sweeps, tail comparison and validation suite.
//! * [`cli`]: the `arrival-lab` command-line front end.

// `!(x > 0.0)` style guards are how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arrivals;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod numeric;
pub mod occupancy;
pub mod samplers;
pub mod stats;
pub mod table;

pub use error::{Error, Result};
