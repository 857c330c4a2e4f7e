use serde::Serialize;

use super::EstimatorError;
use crate::circle::{reduce, CirclePoint};

/// Empirical probability measure on the circle, kept as sorted coordinates
/// in `[0, 1)` with optional weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalMeasure {
    samples: Vec<f64>,
    /// Cumulative weights: `cum[i]` is the mass of `samples[..i]`.
    cum: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(points: &[CirclePoint]) -> Result<Self, EstimatorError> {
        let w = vec![1.0; points.len()];
        Self::weighted(points, &w)
    }

    pub fn weighted(points: &[CirclePoint], weights: &[f64]) -> Result<Self, EstimatorError> {
        if points.is_empty() {
            return Err(EstimatorError::EmptySample);
        }
        if points.len() != weights.len() || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0))
        {
            return Err(EstimatorError::BadParameter("invalid sample weights".into()));
        }
        let mut pairs: Vec<(f64, f64)> = points
            .iter()
            .map(|p| p.value())
            .zip(weights.iter().copied())
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        if total <= 0.0 {
            return Err(EstimatorError::BadParameter("weights sum to zero".into()));
        }
        let mut cum = Vec::with_capacity(pairs.len() + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for (_, w) in &pairs {
            acc += w / total;
            cum.push(acc);
        }
        Ok(EmpiricalMeasure {
            samples: pairs.into_iter().map(|p| p.0).collect(),
            cum,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sorted sample coordinates.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Mass of `[0, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let i = self.samples.partition_point(|&s| s <= x);
        self.cum[i]
    }

    /// Mass of samples with coordinate in `[a, b]`, `0 <= a <= b < 1`.
    fn mass_between(&self, a: f64, b: f64) -> f64 {
        let i = self.samples.partition_point(|&s| s < a);
        let j = self.samples.partition_point(|&s| s <= b);
        self.cum[j] - self.cum[i]
    }

    /// Mass of the closed ball `B(center, r)`.
    pub fn ball_mass(&self, center: CirclePoint, r: f64) -> f64 {
        if r >= 0.5 {
            return 1.0;
        }
        let a = reduce(center.value() - r);
        let b = reduce(center.value() + r);
        if a <= b {
            self.mass_between(a, b)
        } else {
            self.mass_between(a, 1.0) + self.mass_between(0.0, b)
        }
    }

    /// `sup_x` of the mass of the closed ball `B(x, r)`, attained by a ball
    /// whose left end sits on a sample.
    pub fn max_ball_mass(&self, r: f64) -> f64 {
        if r >= 0.5 {
            return 1.0;
        }
        let n = self.samples.len();
        let width = 2.0 * r;
        let mut best: f64 = 0.0;
        let mut j = 0;
        // sliding window over the doubled sample sequence
        for i in 0..n {
            if j < i {
                j = i;
            }
            while j + 1 < i + n && self.lifted(j + 1) - self.samples[i] <= width {
                j += 1;
            }
            let mass = self.lifted_cum(j + 1) - self.cum[i];
            best = best.max(mass);
        }
        best
    }

    fn lifted(&self, k: usize) -> f64 {
        let n = self.samples.len();
        if k < n {
            self.samples[k]
        } else {
            self.samples[k - n] + 1.0
        }
    }

    fn lifted_cum(&self, k: usize) -> f64 {
        let n = self.samples.len();
        if k <= n {
            self.cum[k]
        } else {
            1.0 + self.cum[k - n]
        }
    }

    /// Kolmogorov-Smirnov distance between the two CDFs on `[0, 1)`.
    pub fn ks_distance(&self, other: &EmpiricalMeasure) -> f64 {
        let mut best: f64 = 0.0;
        for &x in self.samples.iter().chain(&other.samples) {
            best = best.max((self.cdf(x) - other.cdf(x)).abs());
            // left limits
            let l1 = self.cum[self.samples.partition_point(|&s| s < x)];
            let l2 = other.cum[other.samples.partition_point(|&s| s < x)];
            best = best.max((l1 - l2).abs());
        }
        best
    }

    /// Kolmogorov-Smirnov distance to Lebesgue measure.
    pub fn ks_uniform(&self) -> f64 {
        let mut best: f64 = 0.0;
        for (i, &x) in self.samples.iter().enumerate() {
            best = best.max((self.cum[i + 1] - x).abs()).max((x - self.cum[i]).abs());
        }
        best
    }
}

/// Two-sample KS critical value at the 5% level (asymptotic).
pub fn ks_threshold_95(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    1.358 * ((n + m) / (n * m)).sqrt()
}
