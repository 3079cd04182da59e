//! Potentials compared with direct quadrature of p_t(0,0) and with direct
//! level sums that bypass the series certificates.

use hrw_core::kernel::build_tables;
use hrw_core::potential::{degree_classify, g_t_zeta, green_power, incomplete_powers, return_tail_solve};
use hrw_core::special::gamma;
use hrw_core::{Decoration, Sequence, Tables, WalkSpec};

fn tables(spec: &WalkSpec) -> Tables {
    build_tables(spec, 1e-14).unwrap()
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = f(0.5 * (a + m));
    let rm = f(0.5 * (m + b));
    let left = (m - a) / 6.0 * (fa + 4.0 * lm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * rm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, lm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, rm, fb, right, tol / 2.0, depth - 1)
}

// adaptive Simpson on dyadic panels [0, 1/64], [1/64, 1/32], ...
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mut edges = vec![a];
    let mut x = if a > 0.0 { a } else { 1.0 / 64.0 };
    while x < b {
        if x > a {
            edges.push(x);
        }
        x *= 2.0;
    }
    edges.push(b);
    edges
        .windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            simpson(&f, lo, hi, fa, fm, fb, whole, 1e-14, 40)
        })
        .sum()
}

#[test]
fn first_incomplete_potential_matches_quadrature() {
    for spec in [WalkSpec::geometric(2, 1.0), WalkSpec::j_beta(2, 1.0, 0.5), WalkSpec::geometric(4, 2.0)] {
        let t = tables(&spec);
        let horizon = 1e3;
        let quad = integrate(|s| t.pt(s, 0).value, 0.0, horizon);
        let modes = g_t_zeta(&t, 1.0, horizon).unwrap().value;
        assert!(((modes - quad) / quad).abs() < 1e-8, "{spec:?}: {modes} vs {quad}");
    }
}

#[test]
fn second_incomplete_power_matches_quadrature() {
    // G_t^2(0,0) = ∫_0^(2t) p_v(0,0) min(v, 2t - v) dv
    let t = tables(&WalkSpec::geometric(2, 1.0));
    let horizon = 100.0;
    let quad = integrate(|v| t.pt(v, 0).value * v, 0.0, horizon)
        + integrate(|v| t.pt(v, 0).value * (2.0 * horizon - v), horizon, 2.0 * horizon);
    let modes = incomplete_powers(&t, 2, horizon).unwrap().value;
    assert!(((modes - quad) / quad).abs() < 1e-7, "{modes} vs {quad}");
}

#[test]
fn fractional_incomplete_potential_matches_quadrature() {
    let t = tables(&WalkSpec::geometric(3, 1.5));
    for zeta in [0.5, 2.0, 2.5] {
        let horizon = 50.0f64;
        let quad = if zeta < 1.0 {
            // substitute s = u^2 to remove the endpoint singularity
            integrate(|u| 2.0 * u.powf(2.0 * zeta - 1.0) * t.pt(u * u, 0).value, 0.0, horizon.sqrt())
        } else {
            integrate(|s| s.powf(zeta - 1.0) * t.pt(s, 0).value, 0.0, horizon)
        } / gamma(zeta);
        let modes = g_t_zeta(&t, zeta, horizon).unwrap().value;
        assert!(((modes - quad) / quad).abs() < 1e-8, "zeta={zeta}: {modes} vs {quad}");
    }
}

#[test]
fn incomplete_potential_sandwich() {
    // per level, (1 - e^-1) min(t, 1/h) <= (1 - e^-ht)/h <= min(t, 1/h)
    for spec in [WalkSpec::geometric(2, 1.0), WalkSpec::j_beta(4, 2.0, 0.3)] {
        let tb = tables(&spec);
        let n = spec.order as f64;
        for time in [0.3f64, 10.0, 1e4, 1e7] {
            let upper: f64 = (1..400).map(|j| (n - 1.0) * n.powi(-(j as i32)) * time.min(1.0 / tb.h(j))).sum();
            let g = g_t_zeta(&tb, 1.0, time).unwrap().value;
            assert!(g <= upper * (1.0 + 1e-12) && g >= (1.0 - (-1.0f64).exp()) * upper, "t={time}");
        }
    }
}

#[test]
fn critical_binary_walk_grows_logarithmically() {
    // h_j = (3/2) 2^-(j-1), so each doubling of t adds (N-1) N^-j / h_j = 1/3 asymptotically
    let t = tables(&WalkSpec::geometric(2, 1.0));
    for time in [1e6, 1e9] {
        let step = g_t_zeta(&t, 1.0, 2.0 * time).unwrap().value - g_t_zeta(&t, 1.0, time).unwrap().value;
        assert!((step - 1.0 / 3.0).abs() < 1e-5, "step {step}");
    }
}

#[test]
fn green_power_matches_direct_level_sum() {
    for (spec, zeta) in [
        (WalkSpec::geometric(4, 2.0), 1.5),
        (WalkSpec::geometric(3, 2.0), 1.0),
        (WalkSpec::mu_c(8, 1.0, Sequence::Geometric { eta: 2.0 }), 1.0),
    ] {
        let t = tables(&spec);
        let n = spec.order as f64;
        let direct: f64 = (1..3000).map(|j| (n - 1.0) * (-(j as f64) * n.ln() - zeta * t.ln_h(j)).exp()).sum();
        let v = green_power(&t, zeta).unwrap();
        assert!(v.is_finite(), "{spec:?}");
        assert!(((v.value - direct) / direct).abs() < 1e-10, "{spec:?}: {} vs {direct}", v.value);
    }
}

#[test]
fn green_power_diverges_at_and_above_recurrence() {
    let t = tables(&WalkSpec::geometric(2, 1.0));
    assert!(green_power(&t, 1.0).unwrap().divergent);
    let w = tables(&WalkSpec::geometric(4, 2.0));
    // degree 1: G^2 is the boundary case and diverges
    assert!(green_power(&w, 2.0).unwrap().divergent);
    assert!(green_power(&w, 1.9).unwrap().is_finite());
}

#[test]
fn degree_interval_for_alternating_ratios() {
    let spec = WalkSpec::mu_d(4, 2.0, Sequence::Alternating { low: 1.0, high: 1.5 });
    let r = degree_classify::<f64>(&spec).unwrap();
    assert_eq!(r.decoration, Decoration::Undetermined);
    let (lo, hi) = (r.lower.unwrap(), r.upper.unwrap());
    assert!(lo <= r.gamma && r.gamma <= hi);
}

#[test]
fn return_tail_is_a_survival_function() {
    let t = tables(&WalkSpec::geometric(3, 1.0));
    let tail = return_tail_solve(&t, 20.0, 2000).unwrap();
    assert_eq!(tail.rho[0], 1.0);
    assert!(tail.rho.windows(2).all(|w| w[1] <= w[0]));
    assert!(tail.rho.iter().all(|&r| (0.0..=1.0).contains(&r)));
    assert!(tail.residual < 1e-6);
}
