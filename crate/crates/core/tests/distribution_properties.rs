use arrival_lab::distributions::*;
use arrival_lab::stats::crossover_point;
use proptest::prelude::*;

fn check_cdf_family(cdf: impl Fn(f64) -> f64, survival: impl Fn(f64) -> f64, x_max: f64) {
    let c0 = cdf(0.0);
    assert!((0.0..=1.0).contains(&c0));
    let mut prev = c0;
    for i in 0..10_000 {
        let x = x_max * i as f64 / 9_999.0;
        let c = cdf(x);
        assert!(c >= prev, "cdf decreased at {x}");
        assert!(survival(x) > 0.0, "survival vanished at {x}");
        prev = c;
    }
}

#[test]
fn every_family_has_a_monotone_cdf_and_positive_survival() {
    let exp = ExponentialParams::new(1.0).unwrap();
    check_cdf_family(
        |x| exp_cdf(x, &exp).unwrap(),
        |x| exp_survival(x, &exp).unwrap(),
        100.0,
    );
    for alpha in [0.3, 0.4, 0.5, 0.8, 0.9, 2.0] {
        let one = ParetoOneParams::new(alpha).unwrap();
        check_cdf_family(
            |x| pareto1_cdf(x, &one).unwrap(),
            |x| pareto1_survival(x, &one).unwrap(),
            1e4,
        );
        for beta in [0.5, 1.0, 2.0] {
            let two = ParetoTwoParams::new(alpha, beta).unwrap();
            check_cdf_family(
                |x| lomax_cdf(x, &two).unwrap(),
                |x| lomax_survival(x, &two).unwrap(),
                1e4,
            );
        }
    }
}

#[test]
fn heavy_tail_dominates_beyond_the_crossover() {
    let exp = ExponentialParams::new(1.0).unwrap();
    for alpha in [0.3, 0.4, 0.5, 0.8, 0.9] {
        let one = ParetoOneParams::new(alpha).unwrap();
        let ps = |x: f64| pareto1_survival(x, &one).unwrap();
        let es = |x: f64| exp_survival(x, &exp).unwrap();
        let x_star = crossover_point(ps, es, 0.0, 1e3)
            .unwrap()
            .expect("crossover exists");
        assert!(x_star <= 1e3);
        for i in 1..=10_000 {
            let x = x_star + (1e3 - x_star) * i as f64 / 10_000.0;
            assert!(ps(x) > es(x), "alpha={alpha} x={x}");
        }
    }
}

#[test]
fn normal_error_is_smaller_at_large_mean() {
    use arrival_lab::stats::normal_approx_error;
    let e1 = normal_approx_error(&PoissonParams::with_rate(1.0).unwrap());
    let e100 = normal_approx_error(&PoissonParams::with_rate(100.0).unwrap());
    assert!(e100 < e1);
}

proptest! {
    #[test]
    fn survival_complements_cdf(x in 0.0f64..50.0, alpha in 0.05f64..5.0, beta in 0.1f64..10.0, rate in 0.05f64..5.0) {
        let exp = ExponentialParams::new(rate).unwrap();
        let one = ParetoOneParams::new(alpha).unwrap();
        let two = ParetoTwoParams::new(alpha, beta).unwrap();
        prop_assert!((exp_survival(x, &exp).unwrap() - (1.0 - exp_cdf(x, &exp).unwrap())).abs() < 1e-12);
        prop_assert!((pareto1_survival(x, &one).unwrap() - (1.0 - pareto1_cdf(x, &one).unwrap())).abs() < 1e-12);
        prop_assert!((lomax_survival(x, &two).unwrap() - (1.0 - lomax_cdf(x, &two).unwrap())).abs() < 1e-12);
    }

    #[test]
    fn densities_match_cdf_slopes(x in 0.01f64..30.0, alpha in 0.1f64..3.0, beta in 0.2f64..5.0) {
        let h = 1e-5;
        let rel = |fd: f64, exact: f64| ((fd - exact) / exact).abs();
        let one = ParetoOneParams::new(alpha).unwrap();
        let two = ParetoTwoParams::new(alpha, beta).unwrap();
        let p1 = pareto1_pdf(x, &one).unwrap();
        let p2 = lomax_pdf(x, &two).unwrap();
        // differencing a cdf near 1 loses ~eps/h absolute; below this density
        // that exceeds the tolerance, so only the survival slope is checked
        if p1 > 1e-3 {
            let fd = (pareto1_cdf(x + h, &one).unwrap() - pareto1_cdf(x - h, &one).unwrap()) / (2.0 * h);
            prop_assert!(rel(fd, p1) < 1e-6);
        }
        if p2 > 1e-3 {
            let fd = (lomax_cdf(x + h, &two).unwrap() - lomax_cdf(x - h, &two).unwrap()) / (2.0 * h);
            prop_assert!(rel(fd, p2) < 1e-6);
        }
        let fd = (pareto1_survival(x - h, &one).unwrap() - pareto1_survival(x + h, &one).unwrap()) / (2.0 * h);
        prop_assert!(rel(fd, p1) < 1e-6);
        let fd = (lomax_survival(x - h, &two).unwrap() - lomax_survival(x + h, &two).unwrap()) / (2.0 * h);
        prop_assert!(rel(fd, p2) < 1e-6);
    }

    #[test]
    fn as_written_pair_fails_the_slope_check(x in 0.5f64..20.0, alpha in 1.0f64..3.0, beta in 0.5f64..3.0) {
        let h = 1e-5;
        let p = ParetoTwoParams::new(alpha, beta).unwrap();
        let fd = (pareto2_cdf_as_written(x + h, &p).unwrap() - pareto2_cdf_as_written(x - h, &p).unwrap()) / (2.0 * h);
        // derivative of 1 - (shape + x)^-scale
        let slope = beta * (alpha + x).powf(-beta - 1.0);
        prop_assert!(((fd - slope) / slope).abs() < 1e-5);
        let pdf = pareto2_pdf_as_written(x, &p).unwrap();
        prop_assume!(((slope - pdf) / pdf).abs() > 1e-3);
        prop_assert!(((fd - pdf) / pdf).abs() > 1e-6);
    }

    #[test]
    fn poisson_mass_sums_to_one(mean in 0.01f64..200.0) {
        let p = PoissonParams::with_rate(mean).unwrap();
        let upper = (mean + 20.0 * mean.sqrt() + 20.0) as u64;
        let total: f64 = (0..=upper).map(|n| poisson_pmf(n, &p)).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }
}
