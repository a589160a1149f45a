//! Analytic evaluators for the node-arrival distributions.
//!
//! Every family here is parameterised by a validated newtype, so the
//! evaluators only fail on arguments outside the support. Densities and
//! masses are evaluated in log space and survival functions come straight
//! from their closed forms rather than as `1 - cdf`.
//!
//! Two-parameter Pareto comes in two flavours:
//!
//! * [`lomax_cdf`], [`lomax_pdf`], [`lomax_survival`]: the self-consistent
//!   Pareto type II family with survival `(scale / (scale + x))^shape`. It
//!   reduces to the one-parameter form at `scale = 1` and is what the
//!   samplers and simulations use.
//! * [`pareto2_cdf_as_written`], [`pareto2_pdf_as_written`]: the
//!   two-parameter pair exactly as originally published. The density is not
//!   the derivative of the CDF; they are kept for comparison curves and the
//!   mismatch check in the validation suite.

use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{positive_finite, Error, Result};

/// Poisson counting law: `rate` arrivals per unit time observed for `duration`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonParams {
    rate: f64,
    duration: f64,
}

impl PoissonParams {
    pub fn new(rate: f64, duration: f64) -> Result<Self> {
        let rate = positive_finite("rate", rate)?;
        let duration = positive_finite("duration", duration)?;
        if !(rate * duration).is_finite() {
            return Err(Error::InvalidParameter {
                name: "rate*duration",
                value: rate * duration,
                reason: "Poisson mean must be finite",
            });
        }
        Ok(Self { rate, duration })
    }

    /// Unit-duration shorthand.
    pub fn with_rate(rate: f64) -> Result<Self> {
        Self::new(rate, 1.0)
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// The Poisson mean `rate * duration` (also its variance).
    pub fn mean(&self) -> f64 {
        self.rate * self.duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialParams {
    rate: f64,
}

impl ExponentialParams {
    pub fn new(rate: f64) -> Result<Self> {
        Ok(Self {
            rate: positive_finite("rate", rate)?,
        })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn mean(&self) -> f64 {
        1.0 / self.rate
    }
}

/// One-parameter Pareto with CDF `1 - (1 + x)^-shape` on `x >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoOneParams {
    shape: f64,
}

impl ParetoOneParams {
    pub fn new(shape: f64) -> Result<Self> {
        Ok(Self {
            shape: positive_finite("shape", shape)?,
        })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }
}

/// Two-parameter Pareto: `shape` is the tail index, `scale` the cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoTwoParams {
    shape: f64,
    scale: f64,
}

impl ParetoTwoParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        Ok(Self {
            shape: positive_finite("shape", shape)?,
            scale: positive_finite("scale", scale)?,
        })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Median of the Lomax law, `scale * (2^(1/shape) - 1)`.
    pub fn lomax_median(&self) -> f64 {
        self.scale * (std::f64::consts::LN_2 / self.shape).exp_m1()
    }
}

/// Tagged parameter set for every family the crate knows about.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistParams {
    Poisson(PoissonParams),
    Exponential(ExponentialParams),
    ParetoOne(ParetoOneParams),
    ParetoTwo(ParetoTwoParams),
}

fn nonnegative(what: &'static str, x: f64) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else {
        Err(Error::Domain { what, value: x })
    }
}

/// Natural log of the Poisson mass at `n`.
pub fn poisson_ln_pmf(n: u64, p: &PoissonParams) -> f64 {
    let mean = p.mean();
    let k = n as f64;
    if n == 0 {
        -mean
    } else {
        k * mean.ln() - mean - ln_gamma(k + 1.0)
    }
}

/// Probability of exactly `n` arrivals: `(rt)^n e^(-rt) / n!`.
pub fn poisson_pmf(n: u64, p: &PoissonParams) -> f64 {
    poisson_ln_pmf(n, p).exp().min(1.0)
}

/// Probability of at most `n` arrivals.
pub fn poisson_cdf(n: u64, p: &PoissonParams) -> f64 {
    let mean = p.mean();
    let mut total = 0.0;
    for k in 0..=n {
        let term = poisson_pmf(k, p);
        total += term;
        // past the mode the terms only shrink; once they underflow nothing
        // further can change the sum
        if term == 0.0 && k as f64 > mean {
            break;
        }
    }
    total.min(1.0)
}

pub fn exp_pdf(x: f64, p: &ExponentialParams) -> Result<f64> {
    let x = nonnegative("exponential", x)?;
    Ok(p.rate * (-p.rate * x).exp())
}

pub fn exp_cdf(x: f64, p: &ExponentialParams) -> Result<f64> {
    let x = nonnegative("exponential", x)?;
    Ok(-(-p.rate * x).exp_m1())
}

pub fn exp_survival(x: f64, p: &ExponentialParams) -> Result<f64> {
    let x = nonnegative("exponential", x)?;
    Ok((-p.rate * x).exp())
}

/// `1 - (1/(1+x))^shape`.
pub fn pareto1_cdf(x: f64, p: &ParetoOneParams) -> Result<f64> {
    let x = nonnegative("one-parameter Pareto", x)?;
    Ok(-(-p.shape * x.ln_1p()).exp_m1())
}

/// `shape / (1+x)^(shape+1)`.
pub fn pareto1_pdf(x: f64, p: &ParetoOneParams) -> Result<f64> {
    let x = nonnegative("one-parameter Pareto", x)?;
    Ok((p.shape.ln() - (p.shape + 1.0) * x.ln_1p()).exp())
}

/// `(1/(1+x))^shape`.
pub fn pareto1_survival(x: f64, p: &ParetoOneParams) -> Result<f64> {
    let x = nonnegative("one-parameter Pareto", x)?;
    Ok((-p.shape * x.ln_1p()).exp())
}

/// Two-parameter CDF as published: `1 - (1/(shape + x))^scale`.
///
/// Only a distribution function on `x >= 0` when `shape >= 1`, so smaller
/// shapes are rejected with [`Error::FidelityDomain`]. Note the exponent is
/// the scale parameter here, not the shape.
pub fn pareto2_cdf_as_written(x: f64, p: &ParetoTwoParams) -> Result<f64> {
    if p.shape < 1.0 {
        return Err(Error::FidelityDomain { shape: p.shape });
    }
    let x = nonnegative("as-written two-parameter Pareto", x)?;
    Ok(-(-p.scale * (p.shape + x).ln()).exp_m1())
}

/// Two-parameter density as published: `(shape/scale) * (scale/x)^shape`.
///
/// This is not the derivative of [`pareto2_cdf_as_written`].
pub fn pareto2_pdf_as_written(x: f64, p: &ParetoTwoParams) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            what: "as-written two-parameter Pareto density",
            value: x,
        });
    }
    Ok(p.shape / p.scale * (p.shape * (p.scale / x).ln()).exp())
}

/// `(scale / (scale + x))^shape`.
pub fn lomax_survival(x: f64, p: &ParetoTwoParams) -> Result<f64> {
    let x = nonnegative("Lomax", x)?;
    Ok((-p.shape * (x / p.scale).ln_1p()).exp())
}

pub fn lomax_cdf(x: f64, p: &ParetoTwoParams) -> Result<f64> {
    let x = nonnegative("Lomax", x)?;
    Ok(-(-p.shape * (x / p.scale).ln_1p()).exp_m1())
}

/// `(shape/scale) * (scale/(scale + x))^(shape+1)`.
pub fn lomax_pdf(x: f64, p: &ParetoTwoParams) -> Result<f64> {
    let x = nonnegative("Lomax", x)?;
    Ok((p.shape.ln() - p.scale.ln() - (p.shape + 1.0) * (x / p.scale).ln_1p()).exp())
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Continuity-corrected normal approximation to the Poisson mass at `n`:
/// the `N(mean, mean)` probability of `[n - 1/2, n + 1/2]`.
pub fn normal_approx_pmf(n: u64, p: &PoissonParams) -> f64 {
    let mean = p.mean();
    let sd = mean.sqrt();
    let k = n as f64;
    let hi = std_normal_cdf((k + 0.5 - mean) / sd);
    let lo = std_normal_cdf((k - 0.5 - mean) / sd);
    (hi - lo).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn poisson_pmf_examples() {
        let p = PoissonParams::new(0.5, 2.0).unwrap();
        assert!(close(poisson_pmf(0, &p), 0.367_879_441_171_442_3, 1e-15));
        let p = PoissonParams::new(1.0, 1.0).unwrap();
        assert!(close(poisson_pmf(2, &p), 0.183_939_720_585_721_2, 1e-15));
        let p = PoissonParams::with_rate(0.9).unwrap();
        let total: f64 = (0..=200).map(|n| poisson_pmf(n, &p)).sum();
        assert!(close(total, 1.0, 1e-12));
    }

    #[test]
    fn poisson_pmf_survives_large_means() {
        let p = PoissonParams::new(1.0e4, 1.0).unwrap();
        let at_mode = poisson_pmf(10_000, &p);
        // Stirling: 1/sqrt(2 pi mean)
        assert!(close(
            at_mode,
            1.0 / (2.0 * std::f64::consts::PI * 1.0e4).sqrt(),
            1e-6
        ));
        assert_eq!(poisson_pmf(0, &p), 0.0);
    }

    #[test]
    fn poisson_params_reject_bad_values() {
        assert!(PoissonParams::new(0.0, 1.0).is_err());
        assert!(PoissonParams::new(1.0, -1.0).is_err());
        assert!(PoissonParams::new(f64::NAN, 1.0).is_err());
        assert!(PoissonParams::new(1e300, 1e300).is_err());
    }

    #[test]
    fn poisson_cdf_examples() {
        let p = PoissonParams::with_rate(1.0).unwrap();
        assert!(close(poisson_cdf(0, &p), (-1.0f64).exp(), 1e-15));
        assert!(close(poisson_cdf(50, &p), 1.0, 1e-9));
        for n in 1..40 {
            let diff = poisson_cdf(n, &p) - poisson_cdf(n - 1, &p);
            assert!(close(diff, poisson_pmf(n, &p), 1e-15));
        }
    }

    #[test]
    fn exponential_examples() {
        let p = ExponentialParams::new(1.0).unwrap();
        assert!(close(
            exp_survival(std::f64::consts::LN_2, &p).unwrap(),
            0.5,
            1e-15
        ));
        assert_eq!(exp_cdf(0.0, &p).unwrap(), 0.0);
        let p = ExponentialParams::new(0.3).unwrap();
        assert_eq!(exp_pdf(0.0, &p).unwrap(), 0.3);
        assert!(matches!(exp_pdf(-1.0, &p), Err(Error::Domain { .. })));
    }

    #[test]
    fn pareto1_examples() {
        let half = ParetoOneParams::new(0.5).unwrap();
        let one = ParetoOneParams::new(1.0).unwrap();
        assert_eq!(pareto1_cdf(0.0, &half).unwrap(), 0.0);
        assert!(close(pareto1_cdf(1.0, &one).unwrap(), 0.5, 1e-15));
        assert!(close(pareto1_cdf(3.0, &half).unwrap(), 0.5, 1e-15));
        assert!(close(
            pareto1_pdf(0.0, &ParetoOneParams::new(0.4).unwrap()).unwrap(),
            0.4,
            1e-15
        ));
        assert!(close(pareto1_pdf(1.0, &one).unwrap(), 0.25, 1e-15));
        assert_eq!(pareto1_survival(0.0, &half).unwrap(), 1.0);
        assert!(close(pareto1_survival(3.0, &half).unwrap(), 0.5, 1e-15));
        assert!(pareto1_cdf(-0.1, &half).is_err());
        assert!(pareto1_pdf(-0.1, &half).is_err());
        assert!(pareto1_survival(-0.1, &half).is_err());
    }

    #[test]
    fn pareto1_deep_tail_survival() {
        let p = ParetoOneParams::new(0.3).unwrap();
        let s = pareto1_survival(1e6, &p).unwrap();
        let oracle = (-0.3 * (1.0f64 + 1e6).ln()).exp();
        assert!(s > 0.0 && s.is_finite());
        assert!(close(s, oracle, 1e-15 * oracle.max(1e-300)));
        // far beyond where 1 - cdf would have cancelled to zero
        let s = pareto1_survival(1e300, &ParetoOneParams::new(1.0).unwrap()).unwrap();
        assert!(s > 0.0);
    }

    #[test]
    fn pareto1_pdf_matches_finite_difference() {
        let p = ParetoOneParams::new(0.8).unwrap();
        let h = 1e-5;
        let fd =
            (pareto1_cdf(2.0 + h, &p).unwrap() - pareto1_cdf(2.0 - h, &p).unwrap()) / (2.0 * h);
        let pdf = pareto1_pdf(2.0, &p).unwrap();
        assert!(((fd - pdf) / pdf).abs() < 1e-6);
    }

    #[test]
    fn as_written_two_parameter_pair() {
        let p = ParetoTwoParams::new(1.0, 2.0).unwrap();
        assert_eq!(pareto2_cdf_as_written(0.0, &p).unwrap(), 0.0);
        let p = ParetoTwoParams::new(1.0, 1.0).unwrap();
        assert!(close(pareto2_cdf_as_written(1.0, &p).unwrap(), 0.5, 1e-15));
        let low = ParetoTwoParams::new(0.5, 1.0).unwrap();
        assert!(matches!(
            pareto2_cdf_as_written(1.0, &low),
            Err(Error::FidelityDomain { .. })
        ));

        let p = ParetoTwoParams::new(1.5, 0.9).unwrap();
        let mut prev = 0.0;
        for i in 0..=10_000 {
            let v = pareto2_cdf_as_written(i as f64 * 0.01, &p).unwrap();
            assert!(v >= prev);
            prev = v;
        }

        for alpha in [0.3, 1.0, 2.5] {
            let p = ParetoTwoParams::new(alpha, 3.0).unwrap();
            assert!(close(
                pareto2_pdf_as_written(3.0, &p).unwrap(),
                alpha / 3.0,
                1e-15
            ));
        }
        assert!(close(
            pareto2_pdf_as_written(2.0, &ParetoTwoParams::new(0.5, 1.0).unwrap()).unwrap(),
            0.353_553_390_593_273_8,
            1e-15
        ));
        assert!(pareto2_pdf_as_written(0.0, &p).is_err());
    }

    #[test]
    fn as_written_pdf_is_not_the_cdf_derivative() {
        let p = ParetoTwoParams::new(1.5, 1.0).unwrap();
        let h = 1e-5;
        let fd = (pareto2_cdf_as_written(2.0 + h, &p).unwrap()
            - pareto2_cdf_as_written(2.0 - h, &p).unwrap())
            / (2.0 * h);
        // analytic derivative of 1 - (1.5 + x)^-1 at 2 is 1/12.25
        assert!(close(fd, 1.0 / 12.25, 1e-9));
        let pdf = pareto2_pdf_as_written(2.0, &p).unwrap();
        assert!(((fd - pdf) / pdf).abs() > 0.5);
    }

    #[test]
    fn lomax_examples() {
        for x in [0.0, 0.1, 1.0, 7.5, 1e4] {
            for alpha in [0.3, 0.9, 2.0] {
                let lomax = ParetoTwoParams::new(alpha, 1.0).unwrap();
                let one = ParetoOneParams::new(alpha).unwrap();
                assert_eq!(lomax_cdf(x, &lomax).unwrap(), pareto1_cdf(x, &one).unwrap());
                assert!(close(
                    lomax_pdf(x, &lomax).unwrap(),
                    pareto1_pdf(x, &one).unwrap(),
                    1e-15
                ));
            }
        }
        for beta in [0.5, 1.0, 2.0, 10.0] {
            let p = ParetoTwoParams::new(1.0, beta).unwrap();
            assert!(close(lomax_survival(beta, &p).unwrap(), 0.5, 1e-15));
        }
        let p = ParetoTwoParams::new(0.5, 1.0).unwrap();
        assert!(close(p.lomax_median(), 3.0, 1e-14));
        assert!(lomax_pdf(-1.0, &p).is_err());
    }

    #[test]
    fn normal_approx_examples() {
        let big = PoissonParams::with_rate(100.0).unwrap();
        let pmf = poisson_pmf(100, &big);
        assert!(((normal_approx_pmf(100, &big) - pmf) / pmf).abs() < 0.02);

        let small = PoissonParams::with_rate(1.0).unwrap();
        let pmf = poisson_pmf(0, &small);
        assert!(((normal_approx_pmf(0, &small) - pmf) / pmf).abs() > 0.05);

        let total: f64 = (0..=1000).map(|n| normal_approx_pmf(n, &big)).sum();
        assert!(close(total, 1.0, 1e-3));
    }
}
