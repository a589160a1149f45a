//! Seedable random variate generation.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`). A stream is keyed by
//! a 64-bit master seed, expanded to the 256-bit ChaCha key by
//! `SeedableRng::seed_from_u64`, plus a 64-bit ChaCha stream id. ChaCha is
//! counter based and its output is specified bit for bit, so a given
//! `(seed, stream_id)` produces the same variates on every platform, and
//! different stream ids never overlap.
//!
//! Uniforms are built from the top 52 bits of one `u64` as
//! `(k + 0.5) / 2^52`. Every lattice point is exactly representable, so they
//! lie strictly inside `(0, 1)`. All continuous
//! families are sampled by inverse transform from a single uniform.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distributions::{ExponentialParams, ParetoOneParams, ParetoTwoParams, PoissonParams};

/// Above this mean Poisson counts switch from the product-of-uniforms method
/// to sequential inversion.
pub const POISSON_PRODUCT_MAX_MEAN: f64 = 30.0;

/// One independent, reproducible stream of uniforms.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    /// Streams `0..count` under one master seed, one per replication.
    pub fn bulk(seed: u64, count: u64) -> Vec<Self> {
        (0..count).map(|id| Self::new(seed, id)).collect()
    }

    /// Reopens a stream at a previously recorded [`position`](Self::position).
    pub fn at_position(seed: u64, stream_id: u64, position: u128) -> Self {
        let mut s = Self::new(seed, stream_id);
        s.rng.set_word_pos(position);
        s
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of 32-bit words consumed so far.
    pub fn position(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        uniform_from_bits(self.rng.next_u64())
    }
}

fn uniform_from_bits(bits: u64) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 52) as f64;
    ((bits >> 12) as f64 + 0.5) * SCALE
}

/// Exponential quantile at upper-tail probability `u`: `-ln(u) / rate`.
pub fn exponential_from_uniform(u: f64, p: &ExponentialParams) -> f64 {
    -u.ln() / p.rate()
}

/// One-parameter Pareto quantile at upper-tail probability `u`:
/// `u^(-1/shape) - 1`.
pub fn pareto1_from_uniform(u: f64, p: &ParetoOneParams) -> f64 {
    (-u.ln() / p.shape()).exp_m1()
}

/// Lomax quantile at upper-tail probability `u`: `scale * (u^(-1/shape) - 1)`.
pub fn lomax_from_uniform(u: f64, p: &ParetoTwoParams) -> f64 {
    p.scale() * (-u.ln() / p.shape()).exp_m1()
}

pub fn sample_exponential(r: &mut RngStream, p: &ExponentialParams) -> f64 {
    exponential_from_uniform(r.uniform(), p)
}

pub fn sample_pareto1(r: &mut RngStream, p: &ParetoOneParams) -> f64 {
    pareto1_from_uniform(r.uniform(), p)
}

pub fn sample_lomax(r: &mut RngStream, p: &ParetoTwoParams) -> f64 {
    lomax_from_uniform(r.uniform(), p)
}

/// Exact Poisson count with mean `rate * duration`.
pub fn sample_poisson_count(r: &mut RngStream, p: &PoissonParams) -> u64 {
    let mean = p.mean();
    if mean <= POISSON_PRODUCT_MAX_MEAN {
        poisson_by_product(r, mean)
    } else {
        poisson_by_inversion(r, mean)
    }
}

fn poisson_by_product(r: &mut RngStream, mean: f64) -> u64 {
    let limit = (-mean).exp();
    let mut count = 0;
    let mut product = r.uniform();
    while product > limit {
        count += 1;
        product *= r.uniform();
    }
    count
}

fn poisson_by_inversion(r: &mut RngStream, mean: f64) -> u64 {
    let u = r.uniform();
    let ln_mean = mean.ln();
    let mut k = 0u64;
    let mut ln_term = -mean;
    let mut cumulative = ln_term.exp();
    while cumulative < u {
        k += 1;
        ln_term += ln_mean - (k as f64).ln();
        let term = ln_term.exp();
        // u can sit above the float-rounded total mass; stop once the
        // remaining terms can no longer move the sum
        if term == 0.0 && k as f64 > mean {
            break;
        }
        cumulative += term;
    }
    k
}
