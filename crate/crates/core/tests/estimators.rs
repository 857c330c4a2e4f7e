use circle_rds::circle::dist;
use circle_rds::estimators::{
    contraction_in_mean, holder_exponent, ks_threshold_95, lyapunov_exponent, moment_integral, repulsor_decay,
    repulsor_pullback, stationarity_residual, stationary_measure_birkhoff, stationary_measure_push, wilson_interval,
};
use circle_rds::experiments::presets::{drifted_pair, rotation_pair, standard_pair, AXIS_SHIFT, LAMBDA};
use circle_rds::experiments::{repulsor_agreement, ExperimentConfig};
use circle_rds::walk::trial_stream;
use circle_rds::{CircleMap, CirclePoint, EmpiricalMeasure, MoebiusMap, StepMeasure};
use proptest::prelude::*;

fn samples() -> impl Strategy<Value = Vec<CirclePoint>> {
    proptest::collection::vec((0.0f64..1.0).prop_map(CirclePoint::new), 1..300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cdf_is_a_distribution_function(points in samples(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let nu = EmpiricalMeasure::new(&points).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(nu.cdf(lo) <= nu.cdf(hi));
        prop_assert!((0.0..=1.0).contains(&nu.cdf(lo)));
        prop_assert!((nu.cdf(1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_is_a_pseudometric(p in samples(), q in samples(), r in samples()) {
        let (p, q, r) = (
            EmpiricalMeasure::new(&p).unwrap(),
            EmpiricalMeasure::new(&q).unwrap(),
            EmpiricalMeasure::new(&r).unwrap(),
        );
        prop_assert!(p.ks_distance(&p) < 1e-12);
        prop_assert!((p.ks_distance(&q) - q.ks_distance(&p)).abs() < 1e-12);
        prop_assert!(p.ks_distance(&r) <= p.ks_distance(&q) + q.ks_distance(&r) + 1e-12);
    }

    #[test]
    fn ball_mass_is_dominated_by_the_max(points in samples(), c in 0.0f64..1.0, r in 1e-4f64..0.49) {
        let nu = EmpiricalMeasure::new(&points).unwrap();
        let center = CirclePoint::new(c);
        let brute = points.iter().filter(|&&p| dist(p, center) <= r).count() as f64 / points.len() as f64;
        prop_assert!((nu.ball_mass(center, r) - brute).abs() < 1e-12);
        prop_assert!(nu.ball_mass(center, r) <= nu.max_ball_mass(r) + 1e-12);
        prop_assert!(nu.max_ball_mass(r) <= nu.max_ball_mass(r * 1.5) + 1e-12);
    }

    #[test]
    fn wilson_interval_brackets_the_rate(trials in 1usize..5000, frac in 0.0f64..=1.0) {
        let s = (frac * trials as f64).floor() as usize;
        let (lo, hi) = wilson_interval(s, trials);
        let p = s as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
    }
}

#[test]
fn wilson_oracle() {
    // p = 1/2, z = 1.96: centre 1/2, half-width z·sqrt(1/4n + z²/4n²)/(1 + z²/n)
    let z: f64 = 1.959963984540054;
    let n = 100.0;
    let half = z * (0.25 / n + z * z / (4.0 * n * n)).sqrt() / (1.0 + z * z / n);
    let (lo, hi) = wilson_interval(50, 100);
    assert!((lo - (0.5 - half)).abs() < 1e-6 && (hi - (0.5 + half)).abs() < 1e-6);
    // p = 0: the interval is [0, z²/(n + z²)]
    let (lo, hi) = wilson_interval(0, 100);
    assert_eq!(lo, 0.0);
    assert!((hi - z * z / (n + z * z)).abs() < 1e-12);
    assert_eq!(wilson_interval(100, 100).1, 1.0);
}

#[test]
fn push_sample_is_nearly_stationary() {
    let (mu, _) = standard_pair();
    let nu = stationary_measure_push(&mu, CirclePoint::new(0.3), 200, 20_000, 5).unwrap();
    let residual = stationarity_residual(&mu, &nu, 6);
    let threshold = ks_threshold_95(nu.len(), nu.len());
    assert!(residual < 3.0 * threshold, "residual {residual} threshold {threshold}");
}

#[test]
fn push_and_birkhoff_estimate_the_same_measure() {
    let (mu, _) = standard_pair();
    let push = stationary_measure_push(&mu, CirclePoint::new(0.3), 200, 20_000, 5).unwrap();
    let orbit = stationary_measure_birkhoff(&mu, CirclePoint::new(0.3), 200_000, 9).unwrap();
    assert!(push.ks_distance(&orbit) < 0.03);
}

fn pullback_sample(mu: &StepMeasure) -> EmpiricalMeasure {
    let points: Vec<CirclePoint> = (0..1000)
        .map(|t| repulsor_pullback(mu, 13, trial_stream(0, t), 60, CirclePoint::new(0.3)))
        .collect();
    EmpiricalMeasure::new(&points).unwrap()
}

#[test]
fn pullback_repulsor_is_atomless() {
    let (symmetric, _) = drifted_pair(LAMBDA, AXIS_SHIFT, 0.25);
    assert!(symmetric.is_symmetric());
    assert!(pullback_sample(&symmetric).max_ball_mass(1e-4) < 0.05);

    // the drifted pair concentrates its repulsor near the repelling axes:
    // no atom, but a small exponent, so only the decay is checked
    let (mu, _) = standard_pair();
    let nu = pullback_sample(&mu);
    let masses: Vec<f64> = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6].iter().map(|&r| nu.max_ball_mass(r)).collect();
    assert!(masses.windows(2).all(|w| w[1] < w[0]), "{masses:?}");
    assert!(masses[4] < 0.1);
}

#[test]
fn repulsor_estimators_agree() {
    let (m1, m2) = standard_pair();
    let mut cfg = ExperimentConfig::new(m1, m2);
    cfg.trials = 500;
    let a = repulsor_agreement(&cfg, 60).unwrap();
    assert!(a.found > 0);
    assert!(a.agree as f64 >= 0.95 * a.found as f64);
}

#[test]
fn repulsor_decay_fits_a_negative_slope() {
    let (mu, _) = standard_pair();
    let n: Vec<usize> = (2..=16).step_by(2).collect();
    let fit = repulsor_decay(&mu, &n, 500, CirclePoint::new(0.3), 21).unwrap();
    assert!(fit.slope < 0.0 && fit.r_squared > 0.8, "{fit:?}");
}

#[test]
fn contraction_is_monotone_up_to_noise() {
    let (mu, _) = standard_pair();
    let n: Vec<usize> = (1..=10).collect();
    let fit = contraction_in_mean(&mu, &n, 500, 16, 1.0, 4).unwrap();
    for i in 1..n.len() {
        let slack = 2.0 * (fit.y_stderr[i] + fit.y_stderr[i - 1]);
        assert!(fit.y_values[i] <= fit.y_values[i - 1] + slack, "n = {}", n[i]);
    }
    assert!(fit.slope < -0.05 && fit.r_squared > 0.9);
}

#[test]
fn rotations_do_not_contract() {
    let (mu, _) = rotation_pair();
    let n: Vec<usize> = (1..=10).collect();
    let fit = contraction_in_mean(&mu, &n, 200, 16, 1.0, 4).unwrap();
    assert!(fit.slope.abs() < 1e-3);
}

#[test]
fn holder_exponents() {
    let (mu, _) = standard_pair();
    let nu = stationary_measure_push(&mu, CirclePoint::new(0.3), 200, 20_000, 2).unwrap();
    let radii = [0.1, 0.05, 0.02, 0.01, 0.005, 0.002];
    let h = holder_exponent(&nu, &radii).unwrap();
    assert!(h.alpha > 0.05 && !h.atomic);

    let (rot, _) = rotation_pair();
    let lebesgue = stationary_measure_birkhoff(&rot, CirclePoint::new(0.3), 100_000, 2).unwrap();
    let h = holder_exponent(&lebesgue, &radii).unwrap();
    assert!((0.9..=1.1).contains(&h.alpha), "alpha {}", h.alpha);

    let small = EmpiricalMeasure::new(&[CirclePoint::ZERO; 500]).unwrap();
    assert!(holder_exponent(&small, &radii).is_err());
}

#[test]
fn moment_and_lyapunov() {
    let g = CircleMap::Moebius(MoebiusMap::diagonal(2.0).unwrap());
    let mu = StepMeasure::symmetric_uniform(vec![g]).unwrap();
    assert!((moment_integral(&mu, 1.0).unwrap() - 4.0).abs() < 1e-12);
    assert!((moment_integral(&mu, 0.0).unwrap() - 1.0).abs() < 1e-12);
    assert!(moment_integral(&mu, -1.0).is_err());

    let (rot, _) = rotation_pair();
    let l = lyapunov_exponent(&rot, CirclePoint::new(0.1), 10_000, 1).unwrap();
    assert!(l.value.abs() < 1e-12);
    let (mu, _) = standard_pair();
    let l = lyapunov_exponent(&mu, CirclePoint::new(0.1), 100_000, 1).unwrap();
    assert!(l.value < -0.5 && l.stderr < 0.1, "{l:?}");
}
