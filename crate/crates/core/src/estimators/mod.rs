//! Monte-Carlo estimators: stationary measure, repulsor, contraction rates,
//! Hölder regularity, Lyapunov exponent and the moment integral.

mod empirical;
mod fit;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::circle::{dist, Arc, CirclePoint};
use crate::maps::MapError;
use crate::par::{map_trials, sum_trials};
use crate::walk::{letter_rng, trial_stream, Realization, StepMeasure};

pub use empirical::{ks_threshold_95, EmpiricalMeasure};
pub use fit::{linear_fit, wilson_interval, DecayFit, LinearFit};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("empty sample")]
    EmptySample,
    #[error("fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("fit needs positive finite values, got {0}")]
    NonPositive(f64),
    #[error("{0}")]
    BadParameter(String),
    #[error("radius {radius} is below the sample resolution {resolution}")]
    BelowResolution { radius: f64, resolution: f64 },
    #[error("atom {index}: {source}")]
    Atom { index: usize, source: MapError },
}

/// Point estimate with its Monte-Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// One row of the estimator CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorRow {
    pub estimator: String,
    pub n: usize,
    pub value: f64,
    pub stderr: f64,
    pub trials: usize,
    pub seed: u64,
}

/// `f^n(x)` along one letter stream, evaluated letter by letter.
pub fn push_point(mu: &StepMeasure, seed: u64, stream_id: u64, n: usize, x: CirclePoint) -> CirclePoint {
    let mut rng = letter_rng(seed, stream_id);
    let mut p = x;
    for _ in 0..=n {
        p = mu.atom(mu.draw(&mut rng)).eval(p);
    }
    p
}

/// `{f^n_{ω_t}(x0)}` over independent trials.
pub fn stationary_measure_push(
    mu: &StepMeasure,
    x0: CirclePoint,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<EmpiricalMeasure, EstimatorError> {
    if n == 0 || trials == 0 {
        return Err(EstimatorError::BadParameter("n and trials must be positive".into()));
    }
    let points = map_trials(trials, |t| push_point(mu, seed, trial_stream(0, t as u64), n, x0));
    EmpiricalMeasure::new(&points)
}

/// The orbit `{f^n(x0) : 0 <= n < N}` of one realization.
pub fn stationary_measure_birkhoff(
    mu: &StepMeasure,
    x0: CirclePoint,
    big_n: usize,
    seed: u64,
) -> Result<EmpiricalMeasure, EstimatorError> {
    if big_n == 0 {
        return Err(EstimatorError::BadParameter("N must be positive".into()));
    }
    let mut rng = letter_rng(seed, 0);
    let mut p = x0;
    let mut orbit = Vec::with_capacity(big_n);
    for _ in 0..big_n {
        p = mu.atom(mu.draw(&mut rng)).eval(p);
        orbit.push(p);
    }
    EmpiricalMeasure::new(&orbit)
}

/// KS distance between a sample and its one-step convolution by `mu` (each
/// sample pushed by one fresh letter).
pub fn stationarity_residual(mu: &StepMeasure, nu: &EmpiricalMeasure, seed: u64) -> f64 {
    let mut rng = letter_rng(seed, u64::MAX);
    let pushed: Vec<CirclePoint> = nu
        .samples()
        .iter()
        .map(|&x| mu.atom(mu.draw(&mut rng)).eval(CirclePoint::new(x)))
        .collect();
    let pushed = EmpiricalMeasure::new(&pushed).expect("nonempty");
    nu.ks_distance(&pushed)
}

/// `(f^n)^{-1}(x0)`: the pullback estimate of the repulsor.
pub fn repulsor_pullback(
    mu: &StepMeasure,
    seed: u64,
    stream_id: u64,
    n: usize,
    x0: CirclePoint,
) -> CirclePoint {
    Realization::sample(mu, seed, stream_id, n).pull(n, x0)
}

/// The unique gap of the `K`-grid whose image under `f^n` has length at
/// least `1/2`, or `None` when zero or several gaps qualify.
pub fn repulsor_interval(
    mu: &StepMeasure,
    seed: u64,
    stream_id: u64,
    n: usize,
    k: usize,
) -> Result<Option<Arc>, EstimatorError> {
    let f = Realization::sample(mu, seed, stream_id, n).right(n);
    repulsor_interval_of(&f, k)
}

/// As [`repulsor_interval`] for a given map.
pub fn repulsor_interval_of(f: &crate::maps::CircleMap, k: usize) -> Result<Option<Arc>, EstimatorError> {
    if k < 3 {
        return Err(EstimatorError::BadParameter(format!("grid size {k} < 3")));
    }
    let step = 1.0 / k as f64;
    let mut found = None;
    for j in 0..k {
        let gap = Arc::with_length(CirclePoint::new(j as f64 * step), step);
        if f.image_arc(&gap).length() >= 0.5 {
            if found.is_some() {
                return Ok(None);
            }
            found = Some(gap);
        }
    }
    Ok(found)
}

/// Random pairs added to the grid pairs in [`contraction_in_mean`].
pub const RANDOM_PAIRS: usize = 100;

/// For each `n`, the max over test pairs `(x, y)` of the trial mean of
/// `d(f^n x, f^n y)^s`, fitted against `n`. The pairs are all pairs from
/// the grid `{(i + 1/2)/pair_grid}` plus [`RANDOM_PAIRS`] random pairs, so the
/// max is a lower bound for the sup over all pairs.
pub fn contraction_in_mean(
    mu: &StepMeasure,
    n_values: &[usize],
    trials: usize,
    pair_grid: usize,
    s: f64,
    seed: u64,
) -> Result<DecayFit, EstimatorError> {
    if pair_grid < 2 {
        return Err(EstimatorError::BadParameter("pair grid must have at least 2 points".into()));
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(EstimatorError::BadParameter(format!("exponent s = {s} not in (0, 1]")));
    }
    check_increasing(n_values)?;
    if n_values.len() < 3 {
        return Err(EstimatorError::TooFewPoints(n_values.len()));
    }
    let mut points: Vec<CirclePoint> = (0..pair_grid)
        .map(|i| CirclePoint::new((i as f64 + 0.5) / pair_grid as f64))
        .collect();
    let mut pairs = Vec::new();
    for i in 0..pair_grid {
        for j in i + 1..pair_grid {
            pairs.push((i, j));
        }
    }
    let mut rng = letter_rng(seed, u64::MAX - 1);
    for _ in 0..RANDOM_PAIRS {
        let a = points.len();
        points.push(CirclePoint::new(rng.random::<f64>()));
        points.push(CirclePoint::new(rng.random::<f64>()));
        pairs.push((a, a + 1));
    }
    let width = pairs.len() * n_values.len();
    let n_max = *n_values.last().expect("nonempty");
    let moments = sum_trials(trials, width, |t, out| {
        let mut rng = letter_rng(seed, trial_stream(0, t as u64));
        let mut cur = points.clone();
        let mut next_n = 0;
        for step in 0..=n_max {
            let f = mu.atom(mu.draw(&mut rng));
            for p in cur.iter_mut() {
                *p = f.eval(*p);
            }
            if step == n_values[next_n] {
                let row = &mut out[next_n * pairs.len()..(next_n + 1) * pairs.len()];
                for (slot, &(i, j)) in row.iter_mut().zip(&pairs) {
                    *slot = dist(cur[i], cur[j]).powf(s);
                }
                next_n += 1;
            }
        }
    });
    let mut y = Vec::with_capacity(n_values.len());
    let mut se = Vec::with_capacity(n_values.len());
    for k in 0..n_values.len() {
        let base = k * pairs.len();
        let (best, idx) = (0..pairs.len())
            .map(|p| (moments.mean(base + p), base + p))
            .fold((f64::NEG_INFINITY, 0), |acc, v| if v.0 > acc.0 { v } else { acc });
        y.push(best);
        se.push(moments.stderr(idx));
    }
    DecayFit::fit_with_stderr(n_values, &y, &se)
}

/// Trial mean of `d((f^n)^{-1}(x), σ̂)` for each `n`, with `σ̂ = (f^{2n})^{-1}(x)`,
/// fitted against `n`.
pub fn repulsor_decay(
    mu: &StepMeasure,
    n_values: &[usize],
    trials: usize,
    x: CirclePoint,
    seed: u64,
) -> Result<DecayFit, EstimatorError> {
    check_increasing(n_values)?;
    let n_max = *n_values.last().ok_or(EstimatorError::TooFewPoints(0))?;
    let moments = sum_trials(trials, n_values.len(), |t, out| {
        let r = Realization::sample(mu, seed, trial_stream(0, t as u64), 2 * n_max);
        for (slot, &n) in out.iter_mut().zip(n_values) {
            *slot = dist(r.pull(n, x), r.pull(2 * n, x));
        }
    });
    let y: Vec<f64> = (0..n_values.len()).map(|i| moments.mean(i)).collect();
    let se: Vec<f64> = (0..n_values.len()).map(|i| moments.stderr(i)).collect();
    DecayFit::fit_with_stderr(n_values, &y, &se)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderEstimate {
    pub alpha: f64,
    pub c: f64,
    pub r_squared: f64,
    pub radii: Vec<f64>,
    pub masses: Vec<f64>,
    /// Largest ball at the smallest radius carries at least half the mass.
    pub atomic: bool,
}

/// Fit `log m(r)` against `log r`, where `m(r)` is the sup over centers of
/// the empirical mass of `B(x, r)`.
pub fn holder_exponent(nu: &EmpiricalMeasure, radii: &[f64]) -> Result<HolderEstimate, EstimatorError> {
    if nu.len() < 1000 {
        return Err(EstimatorError::BadParameter(format!(
            "need at least 1000 samples, got {}",
            nu.len()
        )));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) || radii.iter().any(|&r| !(r > 0.0 && r < 0.5)) {
        return Err(EstimatorError::BadParameter(
            "radii must be strictly decreasing within (0, 1/2)".into(),
        ));
    }
    let resolution = 10.0 / nu.len() as f64;
    if let Some(&r) = radii.iter().find(|&&r| r < resolution) {
        return Err(EstimatorError::BelowResolution { radius: r, resolution });
    }
    let masses: Vec<f64> = radii.iter().map(|&r| nu.max_ball_mass(r)).collect();
    let lx: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ly: Vec<f64> = masses.iter().map(|m| m.ln()).collect();
    let f = linear_fit(&lx, &ly)?;
    Ok(HolderEstimate {
        alpha: f.slope,
        c: f.intercept.exp(),
        r_squared: f.r_squared,
        radii: radii.to_vec(),
        atomic: *masses.last().expect("nonempty") >= 0.5,
        masses,
    })
}

/// `Σ w · max(Lip g, Lip g^{-1})^δ`.
pub fn moment_integral(mu: &StepMeasure, delta: f64) -> Result<f64, EstimatorError> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(EstimatorError::BadParameter(format!("delta = {delta} must be >= 0")));
    }
    let mut total = 0.0;
    for (index, (g, w)) in mu.atoms().zip(mu.weights()).enumerate() {
        let lip = |m: &crate::maps::CircleMap| {
            m.lipschitz()
                .map(|b| b.value)
                .map_err(|source| EstimatorError::Atom { index, source })
        };
        let l = lip(g)?.max(lip(mu.inverse_atom(index))?);
        total += w * l.powf(delta);
    }
    Ok(total)
}

/// Birkhoff average of `log f'_{ω_k}(x_k)` along one realization, with a
/// batch-means standard error.
pub fn lyapunov_exponent(
    mu: &StepMeasure,
    x0: CirclePoint,
    big_n: usize,
    seed: u64,
) -> Result<Estimate, EstimatorError> {
    if big_n == 0 {
        return Err(EstimatorError::BadParameter("N must be positive".into()));
    }
    for (index, g) in mu.atoms().enumerate() {
        g.derivative(CirclePoint::new(0.123))
            .map_err(|source| EstimatorError::Atom { index, source })?;
    }
    const BATCHES: usize = 20;
    let mut rng = letter_rng(seed, 0);
    let mut x = x0;
    let mut batch_sums = [0.0; BATCHES];
    let mut batch_counts = vec![0usize; BATCHES];
    let mut total = 0.0;
    for k in 0..big_n {
        let g = mu.atom(mu.draw(&mut rng));
        let l = g
            .derivative(x)
            .map_err(|source| EstimatorError::Atom { index: 0, source })?
            .ln();
        total += l;
        let b = k * BATCHES / big_n;
        batch_sums[b] += l;
        batch_counts[b] += 1;
        x = g.eval(x);
    }
    let value = total / big_n as f64;
    let means: Vec<f64> = batch_sums
        .iter()
        .zip(&batch_counts)
        .filter(|(_, &c)| c > 0)
        .map(|(s, &c)| s / c as f64)
        .collect();
    let stderr = if means.len() > 1 {
        let m = means.iter().sum::<f64>() / means.len() as f64;
        let var = means.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (means.len() - 1) as f64;
        (var / means.len() as f64).sqrt()
    } else {
        0.0
    };
    Ok(Estimate {
        value,
        stderr,
        trials: 1,
    })
}

fn check_increasing(n_values: &[usize]) -> Result<(), EstimatorError> {
    if n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EstimatorError::BadParameter("n values must be strictly increasing".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{CircleMap, MoebiusMap};

    fn diag(l: f64) -> CircleMap {
        CircleMap::Moebius(MoebiusMap::diagonal(l).unwrap())
    }

    fn p(x: f64) -> CirclePoint {
        CirclePoint::new(x)
    }

    #[test]
    fn push_point_mass_hits_attractor() {
        let mu = StepMeasure::point_mass(diag(2.0));
        let nu = stationary_measure_push(&mu, p(0.25), 50, 20, 1).unwrap();
        assert!(nu.samples().iter().all(|&x| dist(p(x), p(0.0)) < 1e-6));
    }

    #[test]
    fn birkhoff_point_mass() {
        let mu = StepMeasure::point_mass(diag(2.0));
        let nu = stationary_measure_birkhoff(&mu, p(0.25), 10_000, 1).unwrap();
        let near = nu.ball_mass(p(0.0), 1e-3);
        assert!(near >= 0.99);
    }

    #[test]
    fn birkhoff_irrational_rotation_equidistributes() {
        let alpha = 0.618_033_988_7;
        let mu = StepMeasure::point_mass(CircleMap::rotation(alpha));
        let nu = stationary_measure_birkhoff(&mu, p(0.0), 10_000, 1).unwrap();
        // orbit computed directly
        let direct: Vec<CirclePoint> = (1..=10_000).map(|k| p(k as f64 * alpha)).collect();
        let direct = EmpiricalMeasure::new(&direct).unwrap();
        assert!(nu.ks_distance(&direct) < 1e-3);
        assert!(nu.ks_uniform() < 0.02);
    }

    #[test]
    fn rotation_pair_push_mixes_on_its_coset() {
        // after n + 1 = 1001 letters the walk sits at x0 + 0.3 k with k odd,
        // i.e. on five equally likely points x0 + 0.1 + 0.2 j
        let mu = StepMeasure::uniform(vec![CircleMap::rotation(0.3), CircleMap::rotation(0.7)]).unwrap();
        let nu = stationary_measure_push(&mu, p(0.05), 1000, 10_000, 3).unwrap();
        for j in 0..5 {
            let mass = nu.ball_mass(p(0.15 + 0.2 * j as f64), 1e-9);
            assert!((mass - 0.2).abs() < 0.02, "atom {j}: {mass}");
        }
        // five atoms of mass 0.2, the first at 0.15: KS distance 0.15
        assert!((nu.ks_uniform() - 0.15).abs() < 0.03);
    }

    #[test]
    fn pullback_of_point_mass_finds_repeller() {
        let mu = StepMeasure::point_mass(diag(2.0));
        let s = repulsor_pullback(&mu, 1, 0, 60, p(0.25));
        assert!(dist(s, p(0.5)) < 1e-9);
    }

    #[test]
    fn repulsor_interval_examples() {
        let mu = StepMeasure::point_mass(diag(10.0));
        // 0.5 is a grid point here; the gap found must end or start at it
        let arc = repulsor_interval(&mu, 1, 0, 5, 64).unwrap().unwrap();
        assert!(arc.closure_contains_point(p(0.5)));
        let arc = repulsor_interval(&mu, 1, 0, 5, 63).unwrap().unwrap();
        assert!(arc.contains_point(p(0.5)));
        let id = StepMeasure::point_mass(CircleMap::identity());
        assert_eq!(repulsor_interval(&id, 1, 0, 5, 64).unwrap(), None);
        assert!(repulsor_interval(&id, 1, 0, 5, 2).is_err());
    }

    #[test]
    fn contraction_of_rotations_is_flat() {
        let mu = StepMeasure::uniform(vec![CircleMap::rotation(0.3), CircleMap::rotation(0.1)]).unwrap();
        let fit = contraction_in_mean(&mu, &[1, 5, 10, 20], 50, 8, 1.0, 4).unwrap();
        assert!(fit.slope.abs() < 1e-3);
    }

    #[test]
    fn contraction_of_point_mass() {
        let mu = StepMeasure::point_mass(diag(2.0));
        let fit = contraction_in_mean(&mu, &[10, 12, 14, 16, 18, 20], 2, 32, 1.0, 4).unwrap();
        assert!(fit.slope <= -(4f64.ln()) + 0.1, "{}", fit.slope);
    }

    #[test]
    fn holder_examples() {
        let radii = [0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001];
        let uniform: Vec<CirclePoint> = (0..100_000).map(|i| p((i as f64 + 0.5) / 100_000.0)).collect();
        let h = holder_exponent(&EmpiricalMeasure::new(&uniform).unwrap(), &radii).unwrap();
        assert!((h.alpha - 1.0).abs() < 0.01);
        assert!(!h.atomic);
        let atom = vec![p(0.3); 2000];
        let h = holder_exponent(&EmpiricalMeasure::new(&atom).unwrap(), &radii[..4]).unwrap();
        assert!(h.alpha.abs() < 1e-12);
        assert!(h.atomic);
        let small = EmpiricalMeasure::new(&uniform[..1000]).unwrap();
        assert!(matches!(
            holder_exponent(&small, &radii),
            Err(EstimatorError::BelowResolution { .. })
        ));
    }

    #[test]
    fn moment_examples() {
        let id = StepMeasure::point_mass(CircleMap::identity());
        assert!((moment_integral(&id, 0.7).unwrap() - 1.0).abs() < 1e-12);
        let mu = StepMeasure::uniform(vec![diag(2.0), diag(0.5)]).unwrap();
        assert!((moment_integral(&mu, 1.0).unwrap() - 4.0).abs() < 1e-9);
        assert!((moment_integral(&mu, 0.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lyapunov_examples() {
        let rots = StepMeasure::uniform(vec![CircleMap::rotation(0.3), CircleMap::rotation(0.1)]).unwrap();
        assert!(lyapunov_exponent(&rots, p(0.2), 1000, 1).unwrap().value.abs() < 1e-12);
        let g = StepMeasure::point_mass(diag(2.0));
        let l = lyapunov_exponent(&g, p(0.3), 100_000, 1).unwrap();
        assert!((l.value + 4f64.ln()).abs() < 1e-3);
        let pl = CircleMap::PiecewiseLinear(
            crate::maps::PiecewiseLinearMap::new(&[0.0, 0.75], &[0.0, 0.25]).unwrap(),
        );
        assert!(lyapunov_exponent(&StepMeasure::point_mass(pl), p(0.1), 10, 1).is_err());
    }
}
