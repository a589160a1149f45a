//! Small numerical helpers shared by the validation checks.

/// Central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`, with recursion capped at `max_depth`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Total mass of a density on `[0, inf)` with a power-law tail of index
/// `tail_index`, integrated after the substitution `x = scale * (e^s - 1)`.
/// Under it a tail `~x^-(tail_index + 1)` becomes `~e^(-tail_index s)`, so
/// truncating at `s_max = -ln(tol) / tail_index` drops at most ~`tol` mass.
pub fn integrate_power_tail(
    pdf: impl Fn(f64) -> f64,
    scale: f64,
    tail_index: f64,
    tol: f64,
) -> f64 {
    let s_max = -tol.ln() / tail_index + 10.0;
    let g = |s: f64| {
        let x = scale * s.exp_m1();
        pdf(x) * scale * s.exp()
    };
    // split so the recursion sees the smooth bulk and the decaying tail separately
    let pieces = 64;
    let width = s_max / pieces as f64;
    (0..pieces)
        .map(|i| {
            let a = i as f64 * width;
            adaptive_simpson(&g, a, a + width, tol / pieces as f64, 40)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_polynomials_and_exp() {
        let cubic = |x: f64| x * x * x - 2.0 * x;
        assert!((adaptive_simpson(&cubic, 0.0, 2.0, 1e-12, 30) - 0.0).abs() < 1e-12);
        let e = |x: f64| x.exp();
        let v = adaptive_simpson(&e, 0.0, 1.0, 1e-12, 30);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn power_tail_integral_of_known_density() {
        // x^-2 tail on [0, inf): 1/(1+x)^2 integrates to exactly 1
        let v = integrate_power_tail(|x| (1.0 + x).powi(-2), 1.0, 1.0, 1e-11);
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn central_difference_of_square() {
        let d = central_difference(|x| x * x, 3.0, 1e-4);
        assert!((d - 6.0).abs() < 1e-8);
    }
}
