//! Experiment drivers: ping-pong rates for pairs of independent walks,
//! density of ping-pong times, inclusion and self-distance rates, the
//! independence gap and the lifted repelling-set test.
//!
//! Every trial uses its own letter streams (`trial_stream(role, t)`) and
//! per-n results are reduced in trial order, so reports are reproducible for
//! any number of worker threads.

pub mod presets;

use serde::Serialize;
use thiserror::Error;

use crate::circle::{dist, neighborhood, Arc, CirclePoint};
use crate::estimators::{wilson_interval, DecayFit, EstimatorError};
use crate::maps::{CircleMap, LiftedMap, MapError};
use crate::par::{map_trials, sum_trials};
use crate::pingpong::{check_certificate, inclusion_margin, transverse_test, walk_candidate_arcs, PingPongCertificate};
use crate::walk::{trial_stream, Realization, StepMeasure};

/// Smallest arc radius used for `ε^n` balls.
pub const RADIUS_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("measure is not flagged proximal")]
    NotProximal,
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub measure_1: StepMeasure,
    pub measure_2: StepMeasure,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub eps: Vec<f64>,
    /// Grid size for the interval repulsor estimate.
    pub k: usize,
    pub seed: u64,
    pub x0: CirclePoint,
    pub y0: CirclePoint,
    /// Fixed radius for the density experiment.
    pub radius: f64,
    /// Horizon `N` for the density experiment.
    pub horizon: usize,
    /// Lift branch per atom of `measure_1`.
    pub branches: Vec<u32>,
}

impl ExperimentConfig {
    pub fn new(measure_1: StepMeasure, measure_2: StepMeasure) -> Self {
        ExperimentConfig {
            measure_1,
            measure_2,
            n_values: (1..=12).map(|k| 5 * k).collect(),
            trials: 1000,
            eps: vec![0.95],
            k: 512,
            seed: 0,
            x0: CirclePoint::ZERO,
            y0: CirclePoint::ZERO,
            radius: 0.02,
            horizon: 10_000,
            branches: Vec::new(),
        }
    }

    /// Diagnostics for out-of-range fields; empty when valid.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.n_values.is_empty() {
            out.push("n_values is empty".to_string());
        }
        if self.n_values.windows(2).any(|w| w[1] <= w[0]) {
            out.push("n_values must be strictly increasing".to_string());
        }
        if self.trials == 0 {
            out.push("trials must be at least 1".to_string());
        }
        for (i, e) in self.eps.iter().enumerate() {
            if !(*e > 0.0 && *e < 1.0) {
                out.push(format!("eps[{i}] = {e} is not in (0, 1)"));
            }
        }
        if self.k < 3 {
            out.push(format!("K = {} must be at least 3", self.k));
        }
        if !(self.radius > 0.0 && self.radius < 0.25) {
            out.push(format!("radius = {} is not in (0, 1/4)", self.radius));
        }
        out
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        let d = self.diagnostics();
        if d.is_empty() {
            Ok(())
        } else {
            Err(ExperimentError::Config(d.join("; ")))
        }
    }

    fn eps0(&self) -> f64 {
        self.eps.first().copied().unwrap_or(0.95)
    }

    /// Largest `n`; the grid must be nonempty.
    pub fn n_max(&self) -> usize {
        *self.n_values.last().expect("validated")
    }
}

/// Success counts at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub n: usize,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

impl RateRow {
    pub fn new(n: usize, successes: usize, trials: usize) -> Self {
        let (lo, hi) = wilson_interval(successes, trials);
        RateRow {
            n,
            trials,
            successes,
            rate: successes as f64 / trials as f64,
            wilson_lo: lo,
            wilson_hi: hi,
        }
    }

    pub fn interval_width(&self) -> f64 {
        self.wilson_hi - self.wilson_lo
    }
}

/// Which quantity the report's decay fit describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fitted {
    /// `1 - rate`, over the rows with rate below one.
    FailureRate,
    /// `rate`, over the rows with positive rate.
    Rate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub eps: Option<f64>,
    pub rows: Vec<RateRow>,
    pub fitted: Fitted,
    /// `None` when fewer than three rows qualify.
    pub fit: Option<DecayFit>,
}

impl RateReport {
    fn build(eps: Option<f64>, rows: Vec<RateRow>, fitted: Fitted) -> Self {
        let (n, y): (Vec<usize>, Vec<f64>) = rows
            .iter()
            .filter(|r| eps.is_none_or(|e| e.powi(r.n as i32) >= RADIUS_FLOOR))
            .filter_map(|r| {
                let y = match fitted {
                    Fitted::FailureRate => 1.0 - r.rate,
                    Fitted::Rate => r.rate,
                };
                (y > 0.0).then_some((r.n, y))
            })
            .unzip();
        let fit = DecayFit::fit(&n, &y).ok();
        RateReport {
            eps,
            rows,
            fitted,
            fit,
        }
    }

    pub fn row(&self, n: usize) -> Option<&RateRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

/// One trial at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub n: usize,
    pub trial: usize,
    pub success: bool,
    /// Experiment-specific slack: smallest certificate margin, inclusion
    /// slack, or distance.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifiedTrial {
    pub n: usize,
    pub trial: usize,
    pub certificate: PingPongCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremAResult {
    pub report: RateReport,
    pub outcomes: Vec<TrialOutcome>,
    /// Certificates of all successful trials.
    pub certificates: Vec<CertifiedTrial>,
}

/// The pair `(f^n_ω, f^n_{ω′})` used by trial `trial` of the ping-pong
/// experiments.
pub fn trial_pair(cfg: &ExperimentConfig, trial: usize, n: usize) -> (CircleMap, CircleMap) {
    let r1 = Realization::sample(&cfg.measure_1, cfg.seed, trial_stream(0, trial as u64), n);
    let r2 = Realization::sample(&cfg.measure_2, cfg.seed, trial_stream(1, trial as u64), n);
    (r1.right(n), r2.right(n))
}

struct PairAtN {
    success: bool,
    certificate: Option<PingPongCertificate>,
    value: f64,
}

fn ping_pong_at(
    r1: &Realization,
    r2: &Realization,
    n: usize,
    radius: f64,
    x0: CirclePoint,
    y0: CirclePoint,
) -> PairAtN {
    let f = r1.right(n);
    let g = r2.right(n);
    let s1 = r1.pull(2 * n, x0);
    let s2 = r2.pull(2 * n, y0);
    let (Ok((u_f, v_f)), Ok((u_g, v_g))) = (
        walk_candidate_arcs(&f, s1, x0, radius),
        walk_candidate_arcs(&g, s2, y0, radius),
    ) else {
        return PairAtN {
            success: false,
            certificate: None,
            value: f64::NEG_INFINITY,
        };
    };
    let witness = transverse_test([v_f, v_g, u_f, u_g], n, radius);
    let cert = check_certificate(&f, &g, u_f, v_f, u_g, v_g);
    PairAtN {
        success: witness.transverse && cert.verified,
        value: cert.margins.min(),
        certificate: Some(cert),
    }
}

/// Ping-pong rate of `(f^n_ω, f^n_{ω′})` on balls of radius
/// `max(ε^n, RADIUS_FLOOR)` around the attractor images `f^n(x0)` and the
/// repulsor estimates `(f^{2n})^{-1}(x0)`. A success needs the four balls to
/// be pairwise disjoint and the certificate to verify.
pub fn theorem_a_experiment(cfg: &ExperimentConfig) -> Result<TheoremAResult, ExperimentError> {
    cfg.validate()?;
    let eps = cfg.eps0();
    let n_max = cfg.n_max();
    let per_trial = map_trials(cfg.trials, |t| {
        let r1 = Realization::sample(&cfg.measure_1, cfg.seed, trial_stream(0, t as u64), 2 * n_max);
        let r2 = Realization::sample(&cfg.measure_2, cfg.seed, trial_stream(1, t as u64), 2 * n_max);
        cfg.n_values
            .iter()
            .map(|&n| {
                let radius = eps.powi(n as i32).max(RADIUS_FLOOR);
                ping_pong_at(&r1, &r2, n, radius, cfg.x0, cfg.y0)
            })
            .collect::<Vec<_>>()
    });
    let mut outcomes = Vec::with_capacity(cfg.trials * cfg.n_values.len());
    let mut certificates = Vec::new();
    let mut rows = Vec::with_capacity(cfg.n_values.len());
    for (i, &n) in cfg.n_values.iter().enumerate() {
        let mut successes = 0;
        for (t, results) in per_trial.iter().enumerate() {
            let r = &results[i];
            if r.success {
                successes += 1;
                certificates.push(CertifiedTrial {
                    n,
                    trial: t,
                    certificate: r.certificate.expect("success has a certificate"),
                });
            }
            outcomes.push(TrialOutcome {
                n,
                trial: t,
                success: r.success,
                value: r.value,
            });
        }
        rows.push(RateRow::new(n, successes, cfg.trials));
    }
    Ok(TheoremAResult {
        report: RateReport::build(Some(eps), rows, Fitted::FailureRate),
        outcomes,
        certificates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub horizon: usize,
    pub radius: f64,
    pub successes: usize,
    pub density: f64,
    /// Ping-pong verdict for `n = 1..=horizon`.
    pub hits: Vec<bool>,
}

/// Fraction of `n ∈ [1, N]` at which one realization pair is a certified
/// ping-pong pair on balls of the fixed configured radius.
pub fn theorem_b_density(cfg: &ExperimentConfig) -> Result<DensityReport, ExperimentError> {
    cfg.validate()?;
    let big_n = cfg.horizon;
    if big_n == 0 {
        return Err(ExperimentError::Config("horizon must be positive".into()));
    }
    let r1 = Realization::sample(&cfg.measure_1, cfg.seed, trial_stream(0, 0), 2 * big_n);
    let r2 = Realization::sample(&cfg.measure_2, cfg.seed, trial_stream(1, 0), 2 * big_n);
    let hits = map_trials(big_n, |i| {
        ping_pong_at(&r1, &r2, i + 1, cfg.radius, cfg.x0, cfg.y0).success
    });
    let successes = hits.iter().filter(|&&h| h).count();
    Ok(DensityReport {
        horizon: big_n,
        radius: cfg.radius,
        successes,
        density: successes as f64 / big_n as f64,
        hits,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateResult {
    pub report: RateReport,
    pub outcomes: Vec<TrialOutcome>,
}

fn rate_experiment<F>(cfg: &ExperimentConfig, eps: Option<f64>, fitted: Fitted, event: F) -> RateResult
where
    F: Fn(&Realization, usize) -> (bool, f64) + Sync + Send,
{
    let n_max = cfg.n_max();
    let per_trial = map_trials(cfg.trials, |t| {
        let r = Realization::sample(&cfg.measure_1, cfg.seed, trial_stream(0, t as u64), 2 * n_max);
        cfg.n_values.iter().map(|&n| event(&r, n)).collect::<Vec<_>>()
    });
    let mut outcomes = Vec::with_capacity(cfg.trials * cfg.n_values.len());
    let mut rows = Vec::new();
    for (i, &n) in cfg.n_values.iter().enumerate() {
        let mut successes = 0;
        for (t, results) in per_trial.iter().enumerate() {
            let (success, value) = results[i];
            successes += success as usize;
            outcomes.push(TrialOutcome {
                n,
                trial: t,
                success,
                value,
            });
        }
        rows.push(RateRow::new(n, successes, cfg.trials));
    }
    RateResult {
        report: RateReport::build(eps, rows, fitted),
        outcomes,
    }
}

/// Rate of `f^n(S^1 - B(σ̂, ε^n)) ⊆ B(f^n(x0), ε^n)` with `σ̂` the pullback
/// at `2n`. Radii of `1/4` or more are rejected candidates and count as
/// failures.
pub fn inclusion_rate_experiment(cfg: &ExperimentConfig) -> Result<RateResult, ExperimentError> {
    cfg.validate()?;
    let eps = cfg.eps0();
    Ok(rate_experiment(cfg, Some(eps), Fitted::FailureRate, |r, n| {
        let radius = eps.powi(n as i32).max(RADIUS_FLOOR);
        let f = r.right(n);
        let sigma = r.pull(2 * n, cfg.x0);
        match walk_candidate_arcs(&f, sigma, cfg.x0, radius) {
            Ok((u, v)) => {
                let m = inclusion_margin(&f, &u, &v);
                (m > 0.0, m)
            }
            Err(_) => (false, f64::NEG_INFINITY),
        }
    }))
}

/// Rate of `d(f^n(x0), σ̂) <= t^n` with `σ̂` the pullback at `2n`.
pub fn self_distance_experiment(cfg: &ExperimentConfig, t: f64) -> Result<RateResult, ExperimentError> {
    cfg.validate()?;
    if !(t > 0.0 && t < 1.0) {
        return Err(ExperimentError::Config(format!("t = {t} is not in (0, 1)")));
    }
    Ok(rate_experiment(cfg, None, Fitted::Rate, |r, n| {
        let d = dist(r.push(n, cfg.x0), r.pull(2 * n, cfg.x0));
        (d <= t.powi(n as i32), d)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependenceGap {
    pub n_values: Vec<usize>,
    pub gaps: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Fit over the `n` with a positive gap; `None` with fewer than three.
    pub fit: Option<DecayFit>,
}

/// `Δ_n = |E ψ(f^n_ω(x0), σ̂(ω)) - E ψ(σ̂(ω), T̂(ω″))|` with the Gaussian
/// proximity kernel `ψ(x, y) = exp(-(d(x, y)/bandwidth)^2)`, `σ̂` the
/// pullback at `2n` and `T̂` the left walk at `2n` of an independent stream.
pub fn independence_gap_experiment(cfg: &ExperimentConfig, bandwidth: f64) -> Result<IndependenceGap, ExperimentError> {
    cfg.validate()?;
    if !cfg.measure_1.asserted_proximal() {
        return Err(ExperimentError::NotProximal);
    }
    if !(bandwidth > 0.0) {
        return Err(ExperimentError::Config("bandwidth must be positive".into()));
    }
    let psi = |x: CirclePoint, y: CirclePoint| {
        let u = dist(x, y) / bandwidth;
        (-u * u).exp()
    };
    let n_max = cfg.n_max();
    let width = cfg.n_values.len();
    let moments = sum_trials(cfg.trials, width, |t, out| {
        let r = Realization::sample(&cfg.measure_1, cfg.seed, trial_stream(0, t as u64), 2 * n_max);
        let other = Realization::sample(&cfg.measure_1, cfg.seed, trial_stream(2, t as u64), 2 * n_max);
        for (slot, &n) in out.iter_mut().zip(&cfg.n_values) {
            let sigma = r.pull(2 * n, cfg.x0);
            let left = other.left(2 * n).eval(cfg.x0);
            *slot = psi(r.push(n, cfg.x0), sigma) - psi(sigma, left);
        }
    });
    let gaps: Vec<f64> = (0..width).map(|i| moments.mean(i).abs()).collect();
    let stderr: Vec<f64> = (0..width).map(|i| moments.stderr(i)).collect();
    let (n, y): (Vec<usize>, Vec<f64>) = cfg
        .n_values
        .iter()
        .zip(&gaps)
        .filter(|(_, g)| **g > 0.0)
        .map(|(n, g)| (*n, *g))
        .unzip();
    Ok(IndependenceGap {
        n_values: cfg.n_values.clone(),
        gaps,
        stderr,
        fit: DecayFit::fit(&n, &y).ok(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftReport {
    pub degree: u32,
    pub n: usize,
    pub trials: usize,
    /// Trials with Hausdorff distance at most [`LIFT_TOLERANCE`].
    pub close: usize,
    pub pass_rate: f64,
    pub passed: bool,
    pub hausdorff: Vec<f64>,
    /// Repelling-set estimate of the first trial, sorted.
    pub first_set: Vec<f64>,
}

pub const LIFT_TOLERANCE: f64 = 1e-3;
pub const LIFT_PASS_RATE: f64 = 0.9;

/// The measure whose atoms are the degree-`d` lifts of `mu`'s atoms, with
/// the same weights (and hence the same letter streams).
pub fn lifted_measure(mu: &StepMeasure, degree: u32, branches: &[u32]) -> Result<StepMeasure, ExperimentError> {
    if degree < 2 {
        return Err(ExperimentError::Map(MapError::InvalidDegree(degree)));
    }
    let atoms = mu
        .atoms()
        .enumerate()
        .map(|(i, g)| {
            let b = branches.get(i).copied().unwrap_or(0);
            let name = mu.names()[i].clone();
            Ok((name, CircleMap::Lift(LiftedMap::new(g.clone(), degree, b)?), mu.weights()[i]))
        })
        .collect::<Result<Vec<_>, MapError>>()?;
    Ok(StepMeasure::new(atoms)
        .map_err(|e| ExperimentError::Config(e.to_string()))?
        .with_assertions(mu.asserted_nondegenerate(), false))
}

/// Pull the `d` points `(x0 + k)/d` back through the lifted walk and compare
/// them with the fiber `{(σ̂ + k)/d}` of the base repulsor estimate.
pub fn lifted_repelling_set_test(cfg: &ExperimentConfig, degree: u32) -> Result<LiftReport, ExperimentError> {
    cfg.validate()?;
    let lifted = lifted_measure(&cfg.measure_1, degree, &cfg.branches)?;
    let n = cfg.n_max();
    let d = degree as f64;
    let sets = map_trials(cfg.trials, |t| {
        let stream = trial_stream(0, t as u64);
        let base = Realization::sample(&cfg.measure_1, cfg.seed, stream, n);
        let up = Realization::sample(&lifted, cfg.seed, stream, n);
        debug_assert_eq!(base.letters(), up.letters());
        let sigma = base.pull(n, cfg.x0).value();
        let fiber: Vec<CirclePoint> = (0..degree)
            .map(|k| CirclePoint::new((sigma + k as f64) / d))
            .collect();
        let found: Vec<CirclePoint> = (0..degree)
            .map(|k| up.pull(n, CirclePoint::new((cfg.x0.value() + k as f64) / d)))
            .collect();
        (hausdorff(&found, &fiber), found)
    });
    let hausdorff_values: Vec<f64> = sets.iter().map(|s| s.0).collect();
    let close = hausdorff_values.iter().filter(|&&h| h <= LIFT_TOLERANCE).count();
    let pass_rate = close as f64 / cfg.trials as f64;
    let mut first_set: Vec<f64> = sets[0].1.iter().map(|p| p.value()).collect();
    first_set.sort_by(f64::total_cmp);
    Ok(LiftReport {
        degree,
        n,
        trials: cfg.trials,
        close,
        pass_rate,
        passed: pass_rate >= LIFT_PASS_RATE,
        hausdorff: hausdorff_values,
        first_set,
    })
}

/// Hausdorff distance between finite subsets of the circle.
pub fn hausdorff(a: &[CirclePoint], b: &[CirclePoint]) -> f64 {
    let one_way = |x: &[CirclePoint], y: &[CirclePoint]| {
        x.iter()
            .map(|&p| y.iter().map(|&q| dist(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Agreement between the pullback and interval repulsor estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepulsorAgreement {
    pub trials: usize,
    /// Trials where the interval estimate was found.
    pub found: usize,
    /// Found trials where the two estimates are within the tolerance.
    pub agree: usize,
    pub tolerance: f64,
}

/// Compare `(f^n)^{-1}(x0)` with the midpoint of the `K`-grid repulsor
/// interval, within `1/K + 5e-3`.
pub fn repulsor_agreement(cfg: &ExperimentConfig, n: usize) -> Result<RepulsorAgreement, ExperimentError> {
    cfg.validate()?;
    let tolerance = 1.0 / cfg.k as f64 + 5e-3;
    let per_trial = map_trials(cfg.trials, |t| {
        let r = Realization::sample(&cfg.measure_1, cfg.seed, trial_stream(0, t as u64), n);
        let arc: Option<Arc> = crate::estimators::repulsor_interval_of(&r.right(n), cfg.k).ok().flatten();
        arc.map(|a| dist(a.midpoint(), r.pull(n, cfg.x0)) <= tolerance)
    });
    Ok(RepulsorAgreement {
        trials: cfg.trials,
        found: per_trial.iter().filter(|a| a.is_some()).count(),
        agree: per_trial.iter().filter(|a| **a == Some(true)).count(),
        tolerance,
    })
}

/// The ball pair `(B(σ̂, r), B(f^n(x0), r))` of a realization, for plotting.
pub fn candidate_balls(r: &Realization, n: usize, x0: CirclePoint, radius: f64) -> Option<(Arc, Arc)> {
    let sigma = r.pull(2 * n, x0);
    Some((neighborhood(sigma, radius).ok()?, neighborhood(r.push(n, x0), radius).ok()?))
}
