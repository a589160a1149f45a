//! Capacity-bounded location occupancy as a loss system.
//!
//! Each arrival is admitted iff the current count is below capacity; an
//! admitted node holds for an i.i.d. time and then departs. Blocked arrivals
//! are dropped. Departures scheduled at the same instant as an arrival are
//! processed first.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::num::NonZeroU32;

use crate::arrivals::{ArrivalTrace, GapLaw};
use crate::error::{Error, Result};
use crate::samplers::RngStream;
use crate::table::format_number;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capacity {
    Bounded(NonZeroU32),
    Unbounded,
}

impl Capacity {
    pub fn bounded(n: u32) -> Result<Self> {
        NonZeroU32::new(n)
            .map(Self::Bounded)
            .ok_or(Error::InvalidParameter {
                name: "capacity",
                value: 0.0,
                reason: "bounded capacity must be at least 1",
            })
    }

    fn admits(&self, count: u32) -> bool {
        match self {
            Self::Bounded(c) => count < c.get(),
            Self::Unbounded => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Holding {
    Law(GapLaw),
    /// Admitted nodes never leave.
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocationConfig {
    pub capacity: Capacity,
    pub holding: Holding,
}

impl LocationConfig {
    pub fn new(capacity: Capacity, holding: Holding) -> Self {
        Self { capacity, holding }
    }
}

/// Step function of the node count, plus admission totals.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancySeries {
    horizon: f64,
    breakpoints: Vec<f64>,
    counts: Vec<u32>,
    admitted: u64,
    blocked: u64,
    departures: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakStats {
    pub peak: u32,
    /// Earliest instant the peak is reached; 0 for an always-empty location.
    pub peak_time: f64,
    /// Time-weighted mean count over `[0, horizon]`.
    pub mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Departure(f64);

impl Eq for Departure {}

impl PartialOrd for Departure {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Departure {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Runs the loss system driven by `trace`, drawing holding times from
/// `holding_rng`. Departures after the horizon are still recorded, so with
/// finite holding the series always ends at zero.
pub fn simulate_occupancy(
    trace: &ArrivalTrace,
    loc: &LocationConfig,
    holding_rng: &mut RngStream,
) -> OccupancySeries {
    let mut pending: BinaryHeap<Reverse<Departure>> = BinaryHeap::new();
    let mut series = OccupancySeries {
        horizon: trace.horizon(),
        breakpoints: Vec::new(),
        counts: Vec::new(),
        admitted: 0,
        blocked: 0,
        departures: 0,
    };
    let mut count = 0u32;

    fn depart_until(
        limit: f64,
        count: &mut u32,
        series: &mut OccupancySeries,
        pending: &mut BinaryHeap<Reverse<Departure>>,
    ) {
        while let Some(&Reverse(Departure(t))) = pending.peek() {
            if t > limit {
                break;
            }
            pending.pop();
            *count -= 1;
            series.departures += 1;
            series.breakpoints.push(t);
            series.counts.push(*count);
        }
    }

    for &arrival in trace.times() {
        depart_until(arrival, &mut count, &mut series, &mut pending);
        if loc.capacity.admits(count) {
            count += 1;
            series.admitted += 1;
            series.breakpoints.push(arrival);
            series.counts.push(count);
            if let Holding::Law(law) = loc.holding {
                pending.push(Reverse(Departure(arrival + law.sample(holding_rng))));
            }
        } else {
            series.blocked += 1;
        }
        if let Capacity::Bounded(c) = loc.capacity {
            assert!(count <= c.get(), "occupancy {count} exceeded capacity {c}");
        }
    }
    depart_until(f64::INFINITY, &mut count, &mut series, &mut pending);
    series
}

impl OccupancySeries {
    /// Builds a series from explicit steps. Counts start at 0 at time 0 and
    /// must move by exactly one at each breakpoint.
    pub fn from_steps(horizon: f64, breakpoints: Vec<f64>, counts: Vec<u32>) -> Result<Self> {
        if !(horizon >= 0.0) || breakpoints.len() != counts.len() {
            return Err(Error::Config("malformed occupancy steps".into()));
        }
        let mut prev_t = 0.0;
        let mut prev_c = 0u32;
        let (mut up, mut down) = (0u64, 0u64);
        for (&t, &c) in breakpoints.iter().zip(&counts) {
            if t < prev_t {
                return Err(Error::Config("breakpoints must be ordered".into()));
            }
            match c as i64 - prev_c as i64 {
                1 => up += 1,
                -1 => down += 1,
                _ => return Err(Error::Config("counts must change by exactly one".into())),
            }
            prev_t = t;
            prev_c = c;
        }
        Ok(Self {
            horizon,
            breakpoints,
            counts,
            admitted: up,
            blocked: 0,
            departures: down,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn admitted(&self) -> u64 {
        self.admitted
    }

    pub fn blocked(&self) -> u64 {
        self.blocked
    }

    pub fn departures(&self) -> u64 {
        self.departures
    }

    pub fn arrivals(&self) -> u64 {
        self.admitted + self.blocked
    }

    /// Count in force at time `t` (right-continuous).
    pub fn count_at(&self, t: f64) -> u32 {
        let i = self.breakpoints.partition_point(|&b| b <= t);
        if i == 0 {
            0
        } else {
            self.counts[i - 1]
        }
    }

    /// Final count after every recorded event.
    pub fn final_count(&self) -> u32 {
        self.counts.last().copied().unwrap_or(0)
    }

    pub fn peak_stats(&self) -> Result<PeakStats> {
        if !(self.horizon > 0.0) {
            return Err(Error::EmptySeries);
        }
        let mut peak = 0;
        let mut peak_time = 0.0;
        for (&t, &c) in self.breakpoints.iter().zip(&self.counts) {
            if c > peak {
                peak = c;
                peak_time = t;
            }
        }

        let mut area = 0.0;
        let mut t_prev = 0.0;
        let mut c_prev = 0u32;
        for (&t, &c) in self.breakpoints.iter().zip(&self.counts) {
            if t >= self.horizon {
                break;
            }
            area += c_prev as f64 * (t - t_prev);
            t_prev = t;
            c_prev = c;
        }
        area += c_prev as f64 * (self.horizon - t_prev);

        Ok(PeakStats {
            peak,
            peak_time,
            mean: area / self.horizon,
        })
    }

    pub fn blocking_fraction(&self) -> Result<f64> {
        match self.arrivals() {
            0 => Err(Error::NoArrivals),
            n => Ok(self.blocked as f64 / n as f64),
        }
    }

    /// `time,count` breakpoints (starting from the implicit `0,0`) followed
    /// by a `# summary` line.
    pub fn to_csv(&self, provenance: &[(String, String)]) -> String {
        let mut out = String::new();
        for (k, v) in provenance {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&format!("# horizon={}\n", format_number(self.horizon)));
        out.push_str("time,count\n0,0\n");
        for (t, c) in self.breakpoints.iter().zip(&self.counts) {
            out.push_str(&format!("{},{}\n", format_number(*t), c));
        }
        let (peak, peak_time, mean) = match self.peak_stats() {
            Ok(s) => (
                s.peak.to_string(),
                format_number(s.peak_time),
                format_number(s.mean),
            ),
            Err(_) => ("nan".into(), "nan".into(), "nan".into()),
        };
        let blocking = self
            .blocking_fraction()
            .map(format_number)
            .unwrap_or_else(|_| "nan".into());
        out.push_str(&format!(
            "# summary peak={peak} peak_time={peak_time} mean={mean} blocking_fraction={blocking} admitted={} blocked={}\n",
            self.admitted, self.blocked
        ));
        out
    }
}
