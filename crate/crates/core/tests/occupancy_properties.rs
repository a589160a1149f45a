use arrival_lab::arrivals::{generate_trace, ArrivalTrace, GapLaw};
use arrival_lab::occupancy::*;
use arrival_lab::samplers::RngStream;
use proptest::prelude::*;

fn run(law: GapLaw, horizon: f64, loc: &LocationConfig, seed: u64, rep: u64) -> OccupancySeries {
    let mut arrivals = RngStream::new(seed, rep);
    let mut holding = RngStream::new(seed, rep + (1 << 32));
    let trace = generate_trace(law, horizon, &mut arrivals).unwrap();
    simulate_occupancy(&trace, loc, &mut holding)
}

fn exp_holding() -> Holding {
    Holding::Law(GapLaw::exponential(1.0).unwrap())
}

#[test]
fn infinite_server_mean_matches_offered_load() {
    let loc = LocationConfig::new(Capacity::Unbounded, exp_holding());
    let s = run(GapLaw::exponential(0.9).unwrap(), 1e4, &loc, 42, 0);
    let mean = s.peak_stats().unwrap().mean;
    // stationary mean = arrival rate * mean holding time
    assert!((mean - 0.9).abs() < 0.09, "{mean}");
    assert_eq!(s.final_count(), 0);
    assert_eq!(s.departures(), s.admitted());
}

fn blocking_rises_with_rate(capacity: u32, horizon: f64) -> usize {
    let rates = [0.3, 0.4, 0.5, 0.8, 0.9];
    let loc = LocationConfig::new(Capacity::bounded(capacity).unwrap(), exp_holding());
    (0..20u64)
        .filter(|&seed| {
            let b: Vec<f64> = rates
                .iter()
                .map(|&r| {
                    run(GapLaw::exponential(r).unwrap(), horizon, &loc, seed, 0)
                        .blocking_fraction()
                        .unwrap()
                })
                .collect();
            b.windows(2).all(|w| w[0] <= w[1])
        })
        .count()
}

#[test]
fn blocking_is_nondecreasing_in_rate() {
    // at capacity 20 nothing is ever blocked, so every seed is trivially monotone
    assert_eq!(blocking_rises_with_rate(20, 100.0), 20);
    let tight = blocking_rises_with_rate(1, 5_000.0);
    assert!(tight > 10, "{tight}/20");
}

#[test]
fn blocking_matches_erlang_loss_formula() {
    fn erlang_b(load: f64, servers: u32) -> f64 {
        // B(0) = 1, B(k) = load B(k-1) / (k + load B(k-1))
        (1..=servers).fold(1.0, |b, k| load * b / (k as f64 + load * b))
    }
    for (cap, rate) in [(1, 0.5), (2, 0.9), (3, 2.5)] {
        let loc = LocationConfig::new(Capacity::bounded(cap).unwrap(), exp_holding());
        let b = run(GapLaw::exponential(rate).unwrap(), 2e4, &loc, 42, 0)
            .blocking_fraction()
            .unwrap();
        let oracle = erlang_b(rate, cap);
        assert!(
            (b - oracle).abs() < 0.1 * oracle,
            "cap={cap} rate={rate}: {b} vs {oracle}"
        );
    }
}

#[test]
fn capacity_holds_across_many_randomized_runs() {
    let mut r = RngStream::new(7, 99);
    for i in 0..10_000u64 {
        let cap = 1 + (r.next_u64() % 5) as u32;
        let rate = 0.2 + 3.0 * r.uniform();
        let holding = if r.uniform() < 0.2 {
            Holding::Infinite
        } else {
            Holding::Law(GapLaw::lomax(0.5 + r.uniform(), 1.0).unwrap())
        };
        let loc = LocationConfig::new(Capacity::bounded(cap).unwrap(), holding);
        let s = run(GapLaw::exponential(rate).unwrap(), 20.0, &loc, 3, i);
        assert!(s.counts().iter().all(|&c| c <= cap));
        assert_eq!(s.admitted() + s.blocked(), s.arrivals());
        assert!(s.departures() <= s.admitted());
    }
}

#[test]
fn same_seed_same_series() {
    let loc = LocationConfig::new(Capacity::bounded(3).unwrap(), exp_holding());
    let a = run(GapLaw::pareto1(0.8).unwrap(), 500.0, &loc, 11, 4);
    let b = run(GapLaw::pareto1(0.8).unwrap(), 500.0, &loc, 11, 4);
    assert_eq!(a, b);
}

proptest! {
    #[test]
    fn flow_is_conserved(seed in any::<u64>(), cap in 1u32..6, rate in 0.1f64..5.0, infinite in any::<bool>()) {
        let holding = if infinite { Holding::Infinite } else { exp_holding() };
        let loc = LocationConfig::new(Capacity::bounded(cap).unwrap(), holding);
        let s = run(GapLaw::exponential(rate).unwrap(), 30.0, &loc, seed, 0);
        prop_assert_eq!(s.admitted() + s.blocked(), s.arrivals());
        prop_assert!(s.departures() <= s.admitted());
        prop_assert!(s.counts().iter().all(|&c| c <= cap));
        if infinite {
            prop_assert_eq!(s.departures(), 0);
        } else {
            prop_assert_eq!(s.final_count(), 0);
        }
    }

    #[test]
    fn steps_are_unit_and_time_ordered(seed in any::<u64>(), rate in 0.1f64..5.0) {
        let loc = LocationConfig::new(Capacity::Unbounded, exp_holding());
        let s = run(GapLaw::exponential(rate).unwrap(), 30.0, &loc, seed, 0);
        let mut prev_count = 0i64;
        let mut prev_t = 0.0;
        for (&t, &c) in s.breakpoints().iter().zip(s.counts()) {
            prop_assert!(t >= prev_t);
            prop_assert_eq!((c as i64 - prev_count).abs(), 1);
            prev_count = c as i64;
            prev_t = t;
        }
        let stats = s.peak_stats().unwrap();
        prop_assert!(stats.mean <= stats.peak as f64 + 1e-12);
        prop_assert_eq!(s.count_at(stats.peak_time), stats.peak);
    }

    #[test]
    fn larger_capacity_never_blocks_more(times in proptest::collection::vec(0.0f64..50.0, 0..60), cap in 1u32..5) {
        let mut times = times;
        times.sort_by(f64::total_cmp);
        times.dedup();
        let trace = ArrivalTrace::from_times(times, 50.0).unwrap();
        // infinite holding makes admission a pure prefix: min(arrivals, capacity)
        let small = simulate_occupancy(&trace, &LocationConfig::new(Capacity::bounded(cap).unwrap(), Holding::Infinite), &mut RngStream::new(0, 0));
        let large = simulate_occupancy(&trace, &LocationConfig::new(Capacity::bounded(cap + 1).unwrap(), Holding::Infinite), &mut RngStream::new(0, 0));
        prop_assert!(large.blocked() <= small.blocked());
        prop_assert_eq!(small.admitted(), (trace.len() as u64).min(cap as u64));
    }
}
