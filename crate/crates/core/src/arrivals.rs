//! Renewal arrival traces on a finite horizon.
//!
//! Arrival gaps are i.i.d. draws from a [`GapLaw`]; exponential gaps give the
//! Poisson counting process. Count windows are half-open `(t0, t1]`.

use std::fmt;

use crate::distributions::{ExponentialParams, ParetoOneParams, ParetoTwoParams};
use crate::error::{positive_finite, Error, Result};
use crate::samplers::{sample_exponential, sample_lomax, sample_pareto1, RngStream};
use crate::table::{format_number, parse_provenance};

/// Inter-arrival (or holding-time) distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapLaw {
    Exponential(ExponentialParams),
    ParetoOne(ParetoOneParams),
    Lomax(ParetoTwoParams),
}

impl GapLaw {
    pub fn exponential(rate: f64) -> Result<Self> {
        Ok(Self::Exponential(ExponentialParams::new(rate)?))
    }

    pub fn pareto1(shape: f64) -> Result<Self> {
        Ok(Self::ParetoOne(ParetoOneParams::new(shape)?))
    }

    pub fn lomax(shape: f64, scale: f64) -> Result<Self> {
        Ok(Self::Lomax(ParetoTwoParams::new(shape, scale)?))
    }

    pub fn sample(&self, r: &mut RngStream) -> f64 {
        match self {
            Self::Exponential(p) => sample_exponential(r, p),
            Self::ParetoOne(p) => sample_pareto1(r, p),
            Self::Lomax(p) => sample_lomax(r, p),
        }
    }
}

impl fmt::Display for GapLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exponential(p) => write!(f, "exponential(rate={})", p.rate()),
            Self::ParetoOne(p) => write!(f, "pareto1(shape={})", p.shape()),
            Self::Lomax(p) => write!(f, "lomax(shape={},scale={})", p.shape(), p.scale()),
        }
    }
}

/// Where a generated trace came from: enough to regenerate it exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSource {
    pub law: GapLaw,
    pub seed: u64,
    pub stream_id: u64,
    /// Stream word position before the first gap was drawn.
    pub position: u128,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalTrace {
    times: Vec<f64>,
    horizon: f64,
    source: Option<TraceSource>,
}

/// Draws i.i.d. gaps from `law` and keeps the partial sums that land in
/// `(0, horizon]`.
pub fn generate_trace(law: GapLaw, horizon: f64, r: &mut RngStream) -> Result<ArrivalTrace> {
    let horizon = positive_finite("horizon", horizon)?;
    let source = TraceSource {
        law,
        seed: r.seed(),
        stream_id: r.stream_id(),
        position: r.position(),
    };
    let mut times = Vec::new();
    let mut t = 0.0f64;
    loop {
        let mut next = t + law.sample(r);
        if next <= t {
            // a gap below the float spacing at t; keep the sequence strictly
            // increasing with the smallest possible step
            next = t.next_up();
        }
        if next > horizon {
            break;
        }
        times.push(next);
        t = next;
    }
    Ok(ArrivalTrace {
        times,
        horizon,
        source: Some(source),
    })
}

impl ArrivalTrace {
    /// A trace from explicit arrival instants, e.g. a hand-built fixture.
    pub fn from_times(times: Vec<f64>, horizon: f64) -> Result<Self> {
        let horizon = positive_finite("horizon", horizon)?;
        for w in times.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Config(format!(
                    "arrival times must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if let (Some(first), Some(last)) = (times.first(), times.last()) {
            if !(*first >= 0.0) || *last > horizon {
                return Err(Error::Config(format!(
                    "arrival times must lie in [0, {horizon}]"
                )));
            }
        }
        Ok(Self {
            times,
            horizon,
            source: None,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn source(&self) -> Option<&TraceSource> {
        self.source.as_ref()
    }

    /// Rebuilds the trace from its recorded source. `None` for fixtures.
    pub fn regenerate(&self) -> Option<Result<ArrivalTrace>> {
        let src = self.source?;
        let mut r = RngStream::at_position(src.seed, src.stream_id, src.position);
        Some(generate_trace(src.law, self.horizon, &mut r))
    }

    /// Arrivals in the half-open window `(t0, t1]`.
    pub fn count_in_window(&self, t0: f64, t1: f64) -> Result<usize> {
        if !(0.0 <= t0 && t0 < t1 && t1 <= self.horizon) {
            return Err(Error::InvalidWindow {
                t0,
                t1,
                horizon: self.horizon,
            });
        }
        let upto = |t: f64| self.times.partition_point(|&x| x <= t);
        Ok(upto(t1) - upto(t0))
    }

    /// Counts in consecutive windows `(k w, (k+1) w]` covering the horizon.
    pub fn window_counts(&self, width: f64) -> Result<Vec<usize>> {
        let width = positive_finite("width", width)?;
        let windows = (self.horizon / width).floor() as usize;
        (0..windows)
            .map(|k| self.count_in_window(k as f64 * width, (k + 1) as f64 * width))
            .collect()
    }

    /// `index,time` CSV with a provenance header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# horizon={}\n", format_number(self.horizon)));
        match &self.source {
            Some(src) => {
                out.push_str(&format!("# law={}\n", src.law));
                out.push_str(&format!("# seed={}\n", src.seed));
                out.push_str(&format!("# stream_id={}\n", src.stream_id));
                out.push_str(&format!("# position={}\n", src.position));
            }
            None => out.push_str("# law=fixture\n"),
        }
        out.push_str("index,time\n");
        for (i, t) in self.times.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i, format_number(*t)));
        }
        out
    }

    /// Parses the output of [`to_csv`](Self::to_csv), or any `index,time`
    /// file. The horizon comes from `horizon` when given, else the
    /// `# horizon=` header line.
    pub fn from_csv(text: &str, horizon: Option<f64>) -> Result<Self> {
        let header = parse_provenance(text);
        let horizon = match horizon {
            Some(h) => h,
            None => header
                .iter()
                .find(|(k, _)| k == "horizon")
                .and_then(|(_, v)| v.parse::<f64>().ok())
                .ok_or_else(|| Error::Config("trace file has no horizon; pass one".into()))?,
        };
        let mut rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        match rows.next() {
            Some("index,time") => {}
            other => {
                return Err(Error::Config(format!(
                    "expected `index,time` column row, found {other:?}"
                )))
            }
        }
        let mut times = Vec::new();
        for line in rows {
            let t = line
                .split_once(',')
                .and_then(|(_, t)| t.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Config(format!("bad trace row `{line}`")))?;
            times.push(t);
        }
        Self::from_times(times, horizon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_horizon_gives_empty_trace() {
        let mut r = RngStream::new(42, 0);
        let trace = generate_trace(GapLaw::exponential(0.3).unwrap(), 1e-9, &mut r).unwrap();
        assert!(trace.is_empty());
        assert_eq!(trace.count_in_window(0.0, 1e-9).unwrap(), 0);
    }

    #[test]
    fn nonpositive_horizon_is_rejected() {
        let mut r = RngStream::new(42, 0);
        let law = GapLaw::exponential(1.0).unwrap();
        assert!(generate_trace(law, 0.0, &mut r).is_err());
        assert!(generate_trace(law, -3.0, &mut r).is_err());
    }

    #[test]
    fn empty_trace_counts_zero_everywhere() {
        let trace = ArrivalTrace::from_times(vec![], 10.0).unwrap();
        assert_eq!(trace.count_in_window(0.0, 10.0).unwrap(), 0);
        assert_eq!(trace.count_in_window(2.0, 3.0).unwrap(), 0);
    }

    #[test]
    fn full_window_counts_everything() {
        let mut r = RngStream::new(3, 1);
        let trace = generate_trace(GapLaw::exponential(2.0).unwrap(), 50.0, &mut r).unwrap();
        assert_eq!(trace.count_in_window(0.0, 50.0).unwrap(), trace.len());
    }

    #[test]
    fn windows_are_half_open() {
        let trace = ArrivalTrace::from_times(vec![1.0, 2.0, 3.0], 4.0).unwrap();
        assert_eq!(trace.count_in_window(1.0, 2.0).unwrap(), 1);
        assert_eq!(trace.count_in_window(0.0, 1.0).unwrap(), 1);
        assert_eq!(trace.count_in_window(0.5, 0.9).unwrap(), 0);
    }

    #[test]
    fn bad_windows_are_rejected() {
        let trace = ArrivalTrace::from_times(vec![1.0], 4.0).unwrap();
        assert!(trace.count_in_window(2.0, 1.0).is_err());
        assert!(trace.count_in_window(1.0, 1.0).is_err());
        assert!(trace.count_in_window(-1.0, 1.0).is_err());
        assert!(trace.count_in_window(0.0, 4.5).is_err());
    }

    #[test]
    fn fixture_validation() {
        assert!(ArrivalTrace::from_times(vec![2.0, 1.0], 4.0).is_err());
        assert!(ArrivalTrace::from_times(vec![1.0, 1.0], 4.0).is_err());
        assert!(ArrivalTrace::from_times(vec![1.0, 5.0], 4.0).is_err());
    }

    #[test]
    fn regeneration_is_exact() {
        let mut r = RngStream::new(42, 9);
        // advance first so the recorded position matters
        for _ in 0..3 {
            r.uniform();
        }
        let trace = generate_trace(GapLaw::pareto1(0.8).unwrap(), 200.0, &mut r).unwrap();
        let again = trace.regenerate().unwrap().unwrap();
        assert_eq!(trace, again);
        assert!(ArrivalTrace::from_times(vec![1.0], 2.0)
            .unwrap()
            .regenerate()
            .is_none());
    }

    #[test]
    fn csv_round_trip() {
        let mut r = RngStream::new(42, 0);
        let trace = generate_trace(GapLaw::lomax(0.5, 2.0).unwrap(), 100.0, &mut r).unwrap();
        let text = trace.to_csv();
        assert!(text.contains("\nindex,time\n"));
        let back = ArrivalTrace::from_csv(&text, None).unwrap();
        assert_eq!(back.times(), trace.times());
        assert_eq!(back.horizon(), trace.horizon());
    }
}
