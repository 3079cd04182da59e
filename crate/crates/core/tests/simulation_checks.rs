//! Simulation against exact values, with 4-sigma tolerances on ~1e5 samples.

use hrw_core::distance_chain::DistanceChain;
use hrw_core::group::sphere_size;
use hrw_core::kernel::build_tables;
use hrw_core::montecarlo::{
    ball_occupation, distance_paths, estimate_last_exit, estimate_return_time, simulate, EmpiricalStats, Scheme,
    SimConfig,
};
use hrw_core::potential::last_exit_integral;
use hrw_core::{Sequence, Tables, WalkSpec};

fn tables(spec: &WalkSpec) -> Tables {
    build_tables(spec, 1e-14).unwrap()
}

fn assert_frequency(hits: usize, total: usize, p: f64, what: &str) {
    let freq = hits as f64 / total as f64;
    let sd = (p * (1.0 - p) / total as f64).sqrt();
    assert!((freq - p).abs() <= 4.0 * sd + 1e-12, "{what}: frequency {freq} vs exact {p} (sd {sd})");
}

#[test]
fn discrete_return_probability() {
    for (seed, spec) in [(1u64, WalkSpec::explicit(3, vec![0.5, 0.3, 0.2])), (2, WalkSpec::geometric(2, 1.0))] {
        let t = tables(&spec);
        let n = 4;
        let runs = simulate(&t, &SimConfig::new(seed, 100_000, n as f64, Scheme::Discrete)).unwrap();
        let at_origin = runs.iter().filter(|r| r.final_distance == 0).count();
        assert_frequency(at_origin, runs.len(), t.pn(n, 0).value, "P[X_4 = 0]");
        let inside = runs.iter().filter(|r| r.final_distance <= 2).count();
        let ball: f64 = (0..=2)
            .map(|j| t.pn(n, j).value * if j == 0 { 1.0 } else { sphere_size(spec.order, j).unwrap() as f64 })
            .sum();
        assert_frequency(inside, runs.len(), ball, "P[|X_4| <= 2]");
    }
}

#[test]
fn continuous_return_probability() {
    let t = tables(&WalkSpec::geometric(2, 1.0));
    let runs = simulate(&t, &SimConfig::new(3, 100_000, 5.0, Scheme::Continuous)).unwrap();
    let at_origin = runs.iter().filter(|r| r.final_distance == 0).count();
    assert_frequency(at_origin, runs.len(), t.pt(5.0, 0).value, "p_5(0,0)");
    let inside = runs.iter().filter(|r| r.final_distance <= 3).count();
    assert_frequency(inside, runs.len(), t.pt_ball(5.0, 3).value, "P_5(0, B_3)");
}

#[test]
fn distance_chain_two_step_law() {
    let t = tables(&WalkSpec::geometric(3, 1.5));
    let chain = DistanceChain::new(t.clone());
    let paths = distance_paths(&t, 4, 100_000, 2).unwrap();
    for j in 0..6 {
        let exact: f64 = (0..60).map(|k| chain.p(0, k) * chain.p(k, j)).sum();
        let hits = paths.iter().filter(|p| p[2] == j).count();
        assert_frequency(hits, paths.len(), exact, "P[Z_2 = j]");
    }
    for j in 1..6 {
        let hits = paths.iter().filter(|p| p[1] == j).count();
        assert_frequency(hits, paths.len(), chain.p(0, j), "P[Z_1 = j]");
    }
}

#[test]
fn expected_ball_occupation_matches_last_exit_integral() {
    // at exponent 1 the last-exit integral is the expected total time in B_R
    let t = tables(&WalkSpec::mu_c(8, 1.0, Sequence::Geometric { eta: 4.0 }));
    for radius in [0usize, 1] {
        let samples = ball_occupation(&t, &SimConfig::new(5 + radius as u64, 20_000, 2_000.0, Scheme::Continuous), radius).unwrap();
        let stats = EmpiricalStats::from_samples(&samples).unwrap();
        let exact = last_exit_integral(&t, 1.0, radius).unwrap().series.value;
        let se = (stats.variance / stats.count as f64).sqrt();
        assert!((stats.mean - exact).abs() <= 4.0 * se + 1e-3 * exact, "R={radius}: {} vs {exact}", stats.mean);
    }
}

#[test]
fn last_exit_estimates_are_bounded_by_horizon() {
    let t = tables(&WalkSpec::geometric(4, 2.0));
    let cfg = SimConfig::new(8, 2000, 500.0, Scheme::Continuous);
    let report = estimate_last_exit(&t, &cfg, 1).unwrap();
    assert!(report.samples.iter().all(|&l| (0.0..=500.0).contains(&l)));
    assert!(report.late_fraction < 0.2);
    let m = report.moment(0.5);
    assert!(m.mean > 0.0 && m.half_width_99 >= 0.0);
}

#[test]
fn return_time_survival_is_monotone() {
    let t = tables(&WalkSpec::geometric(2, 1.0));
    let report = estimate_return_time(&t, &SimConfig::new(10, 5000, 50.0, Scheme::Continuous)).unwrap();
    let s: Vec<f64> = [0.5, 1.0, 5.0, 20.0, 49.0].iter().map(|&x| report.survival(x)).collect();
    assert!(s.windows(2).all(|w| w[1] <= w[0]));
    assert!((report.survival(49.0) - report.censored_fraction).abs() < 0.05);
    assert!(estimate_return_time(&t, &SimConfig::new(10, 50, 5.0, Scheme::Discrete)).is_err());
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let t = tables(&WalkSpec::geometric(3, 1.0));
    let cfg = SimConfig::new(77, 3000, 40.0, Scheme::Continuous);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| simulate(&t, &cfg).unwrap())
    };
    assert_eq!(run(1), run(3));
}
