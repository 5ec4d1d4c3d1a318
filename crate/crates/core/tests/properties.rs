use covert_cusum::adversary::{self, DriftSchedule};
use covert_cusum::analytics::{self, add, at2fa, g_deriv, g_of_x, n_exact, solve_threshold};
use covert_cusum::lambert::{self, lambert_w0, lambert_wm1, solve_u, BRANCH_POINT};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

proptest! {
    #[test]
    fn w0_defining_identity(z in BRANCH_POINT..1e6f64) {
        let w = lambert_w0(z).unwrap();
        prop_assert!(w >= -1.0);
        if z != 0.0 {
            prop_assert!(rel(w * w.exp(), z) <= 1e-12, "z={z} w={w}");
        }
    }

    #[test]
    fn wm1_defining_identity(z in BRANCH_POINT..-1e-300f64) {
        let w = lambert_wm1(z).unwrap();
        prop_assert!(w <= -1.0);
        prop_assert!(rel(w * w.exp(), z) <= 1e-12, "z={z} w={w}");
    }

    #[test]
    fn branches_ordered(z in (BRANCH_POINT + 1e-9)..-1e-9f64) {
        let w0 = lambert_w0(z).unwrap();
        let wm1 = lambert_wm1(z).unwrap();
        prop_assert!(w0 > -1.0 && wm1 < -1.0);
    }

    #[test]
    fn solve_u_monotone_and_accurate(y in 1.0..1e8f64, dy in 0.0..10.0f64) {
        let u = solve_u(y).unwrap();
        prop_assert!(u >= 1.0);
        prop_assert!((u - u.ln() - y).abs() <= 1e-12 * y.max(1.0));
        prop_assert!(solve_u(y + dy).unwrap() >= u);
    }

    #[test]
    fn threshold_round_trip(log_gamma in -6.0..14.0f64, log_mu in -7.0..1.0f64) {
        let (gamma, mu) = (10f64.powf(log_gamma), 10f64.powf(log_mu));
        let d = solve_threshold(gamma, mu).unwrap();
        prop_assert!(d.h > 0.0);
        prop_assert!(rel(at2fa(mu, d.h).unwrap(), gamma) <= 1e-10);
        prop_assert!(d.add > 0.0 && d.add < d.at2fa);
        prop_assert_eq!(d.x, 0.5 * gamma * mu * mu);
        prop_assert!(rel(n_exact(gamma, mu).unwrap(), d.add) <= 1e-12);
    }

    #[test]
    fn delay_below_false_alarm_time(h in 1e-8..700.0f64, mu in 1e-3..10.0f64) {
        prop_assert!(add(mu, h).unwrap() < at2fa(mu, h).unwrap());
    }

    #[test]
    fn g_increasing_and_below_identity(x in 1e-10..1e6f64, dx in 1e-6..1.0f64) {
        let g = g_of_x(x).unwrap();
        prop_assert!(g > 0.0 && g < x);
        prop_assert!(g_of_x(x * (1.0 + dx)).unwrap() > g);
        let d = g_deriv(x).unwrap();
        prop_assert!(d > 0.0 && d < 1.0);
        prop_assert!(g_deriv(x * (1.0 + dx)).unwrap() < d);
    }

    #[test]
    fn half_exponent_identity(log_gamma in 0.0..15.0f64) {
        let gamma = 10f64.powf(log_gamma);
        let s = DriftSchedule::power_law(1.0, 0.5).unwrap();
        let mu = s.mu_at(gamma).unwrap();
        let ratio = n_exact(gamma, mu).unwrap() / gamma;
        prop_assert!((ratio - 2.0 * g_of_x(0.5).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn wm1_matches_log_domain_solver() {
    let mut y = 1.0f64;
    while y <= 700.0 {
        let w = lambert_wm1(-(-y).exp()).unwrap();
        let u = solve_u(y).unwrap();
        assert!((w + u).abs() <= 1e-10, "y={y}: {w} vs {u}");
        y += 0.25;
    }
}

#[test]
fn wm1_tail_ratio_monotone() {
    let ratios: Vec<f64> = [-1e-8, -1e-12, -1e-16]
        .iter()
        .map(|&z: &f64| lambert_wm1(z).unwrap() / ((-z).ln() - (-(-z).ln()).ln()))
        .collect();
    assert!(ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs()));
    assert!((ratios[2] - 1.0).abs() < 0.05);
}

#[test]
fn g_stable_form_matches_literal() {
    // Literal e^{1+x+W} - W - x - 2 with W = -solve_u(1 + x).
    let literal = |x: f64| {
        let u = solve_u(1.0 + x).unwrap();
        (1.0 + x - u).exp() + u - x - 2.0
    };
    assert_eq!(g_of_x(0.0).unwrap(), 0.0);
    assert_eq!(literal(0.0), 0.0);
    let mut x = 1e-3;
    while x <= 700.0 {
        assert!(rel(g_of_x(x).unwrap(), literal(x)) <= 1e-10, "x={x}");
        x *= 1.3;
    }
}

#[test]
fn g_deriv_matches_finite_differences() {
    for x in [1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 10.0, 50.0, 100.0] {
        let step = 1e-6f64.min(x * 1e-3);
        let fd = (g_of_x(x + step).unwrap() - g_of_x(x - step).unwrap()) / (2.0 * step);
        assert!(rel(fd, g_deriv(x).unwrap()) <= 1e-6, "x={x}");
    }
}

#[test]
fn theta_map_is_continuous_at_zero() {
    let f = |theta: f64| 2.0 / theta * g_of_x(0.5 * theta).unwrap();
    let mut prev = f64::INFINITY;
    for theta in [1e-2, 1e-4, 1e-6, 1e-8, 1e-10] {
        let gap = (f(theta) - 1.0).abs();
        assert!(gap <= theta.sqrt(), "theta={theta}: {gap}");
        assert!(gap < prev);
        prev = gap;
    }
}

#[test]
fn theta_map_matches_log_growth() {
    // (2/theta) G(theta/2) ~ (2/theta) log(theta) for large theta.
    let ratio = |theta: f64| 2.0 / theta * g_of_x(0.5 * theta).unwrap() * theta / (2.0 * theta.ln());
    let (r3, r6) = (ratio(1e3), ratio(1e6));
    assert!((r6 - 1.0).abs() < 0.15);
    assert!((r6 - 1.0).abs() < (r3 - 1.0).abs());
}

#[test]
fn constant_drift_delay_is_logarithmic() {
    let s = DriftSchedule::constant(1.0).unwrap();
    let regime = s.classify();
    for gamma in [1e6, 1e9, 1e12] {
        let exact = n_exact(gamma, 1.0).unwrap();
        let asym = analytics::asymptotic_n(gamma, regime, 1.0).unwrap();
        assert!((exact / asym - 1.0).abs() < 0.2);
        assert!((exact / (2.0 * gamma.ln()) - 1.0).abs() < 0.2);
    }
}

#[test]
fn zero_regime_gap_at_largest_budget() {
    let s = DriftSchedule::power_law(1.0, 0.75).unwrap();
    let m = adversary::gap_metric(1e5, &s).unwrap();
    assert!((m - 3.79).abs() <= 0.02, "{m}");
}

#[test]
fn threshold_converges_to_regime_limits() {
    let finite = DriftSchedule::power_law(1.0, 0.5).unwrap();
    let zero = DriftSchedule::power_law(1.0, 0.9).unwrap();
    let inf = DriftSchedule::power_law(1.0, 0.25).unwrap();
    let h = |s: &DriftSchedule, g: f64| solve_threshold(g, s.mu_at(g).unwrap()).unwrap().h;
    let lim = analytics::threshold_limit(finite.classify());
    assert!((h(&finite, 1e10) - lim).abs() < 1e-12);
    assert!(h(&zero, 1e12) < h(&zero, 1e6));
    assert!(h(&zero, 1e12) < 1e-4);
    assert!(h(&inf, 1e12) > h(&inf, 1e6));
    assert_eq!(analytics::threshold_limit(inf.classify()), f64::INFINITY);
}

#[test]
fn exp_excess_inverse() {
    for x in [1e-300, 1e-40, 1e-8, 0.3, 1.0, 1.5, 1e3, 1e300] {
        let h = lambert::excess_root(x).unwrap();
        assert!(rel(lambert::exp_excess(h), x) < 1e-13 * h.max(1.0), "x={x}");
    }
}
