//! Empirical checks and the comparative analytics: ECDF, one-sample KS
//! distance, nearest-rank quantiles, crossover location, and the
//! Poisson-to-normal approximation error.

use crate::distributions::{normal_approx_pmf, poisson_pmf, PoissonParams};
use crate::error::{Error, Result};

/// 1% critical value coefficient for the one-sample KS distance: reject when
/// `D > KS_CRITICAL_1PCT / sqrt(n)`.
pub const KS_CRITICAL_1PCT: f64 = 1.63;

/// Grid resolution used by [`crossover_point`] before bisection.
pub const CROSSOVER_GRID_STEPS: usize = 100_000;

/// Absolute tolerance of the bisection in [`crossover_point`].
pub const CROSSOVER_TOLERANCE: f64 = 1e-9;

pub fn ks_critical_1pct(n: usize) -> f64 {
    KS_CRITICAL_1PCT / (n as f64).sqrt()
}

/// Sorted, nonnegative sample with a free-form provenance label.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
    provenance: String,
}

impl EmpiricalSample {
    pub fn new(mut values: Vec<f64>, provenance: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(&bad) = values.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::Domain {
                what: "empirical sample (values must be nonnegative)",
                value: bad,
            });
        }
        values.sort_by(f64::total_cmp);
        Ok(Self {
            values,
            provenance: provenance.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Fraction of values `<= x`.
    pub fn empirical_cdf(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v <= x) as f64 / self.values.len() as f64
    }

    /// Nearest-rank quantile: the `ceil(q n)`-th smallest value.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidQuantile(q));
        }
        let n = self.values.len();
        let rank = (q * n as f64).ceil() as usize;
        Ok(self.values[rank.clamp(1, n) - 1])
    }

    /// `D = max_i max(i/n - F(x_i), F(x_i) - (i-1)/n)`.
    pub fn ks_statistic(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let n = self.values.len() as f64;
        self.values
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                let above = (i + 1) as f64 / n - f;
                let below = f - i as f64 / n;
                above.max(below)
            })
            .fold(0.0, f64::max)
    }
}

/// Smallest `x` in `[lo, hi]` with `f(x) >= g(x)`, or `None` when `f` stays
/// below `g` at every grid point. Requires `f(lo) <= g(lo)`; equality at the
/// start returns `lo`. The first sign change on a uniform grid of
/// [`CROSSOVER_GRID_STEPS`] cells is refined by bisection to
/// [`CROSSOVER_TOLERANCE`].
pub fn crossover_point(
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
) -> Result<Option<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let gap = |x: f64| f(x) - g(x);
    let start = gap(lo);
    if start > 0.0 {
        return Err(Error::Precondition(
            "f must not exceed g at the interval start",
        ));
    }
    if start == 0.0 {
        return Ok(Some(lo));
    }
    let step = (hi - lo) / CROSSOVER_GRID_STEPS as f64;
    let mut below = lo;
    for i in 1..=CROSSOVER_GRID_STEPS {
        let x = if i == CROSSOVER_GRID_STEPS {
            hi
        } else {
            lo + i as f64 * step
        };
        if gap(x) >= 0.0 {
            let mut above = x;
            while above - below > CROSSOVER_TOLERANCE {
                let mid = 0.5 * (below + above);
                if gap(mid) >= 0.0 {
                    above = mid;
                } else {
                    below = mid;
                }
            }
            return Ok(Some(above));
        }
        below = x;
    }
    Ok(None)
}

/// Number of times the predicate `f > g` changes value along `grid`.
pub fn count_crossings(f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, grid: &[f64]) -> usize {
    let mut state: Option<bool> = None;
    let mut changes = 0;
    for &x in grid {
        let above = f(x) > g(x);
        if let Some(prev) = state {
            if prev != above {
                changes += 1;
            }
        }
        state = Some(above);
    }
    changes
}

/// `max |poisson_pmf(n) - normal_approx_pmf(n)|` over
/// `n in [0, mean + 10 sqrt(mean)]`.
pub fn normal_approx_error(p: &PoissonParams) -> f64 {
    let mean = p.mean();
    let upper = (mean + 10.0 * mean.sqrt()).floor() as u64;
    (0..=upper)
        .map(|n| (poisson_pmf(n, p) - normal_approx_pmf(n, p)).abs())
        .fold(0.0, f64::max)
}
