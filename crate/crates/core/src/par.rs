//! Deterministic fan-out over trials.
//!
//! Trials are grouped into fixed-size chunks; chunk results are combined in
//! chunk order, so reductions do not depend on the thread count.

use rayon::prelude::*;

const CHUNK: usize = 32;

/// `f(0), f(1), ...` computed in parallel, returned in trial order.
pub fn map_trials<T, F>(trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

/// Per-slot sums and sums of squares of `width` values produced by each trial.
/// `f(trial, out)` writes the trial's values into `out`.
pub fn sum_trials<F>(trials: usize, width: usize, f: F) -> Moments
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    let chunks = trials.div_ceil(CHUNK);
    let partial: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut m = Moments::zeros(width);
            let mut buf = vec![0.0; width];
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                f(t, &mut buf);
                m.add(&buf);
            }
            m
        })
        .collect();
    let mut total = Moments::zeros(width);
    for m in &partial {
        total.merge(m);
    }
    total
}

#[derive(Debug, Clone)]
pub struct Moments {
    pub count: usize,
    pub sum: Vec<f64>,
    pub sum_sq: Vec<f64>,
}

impl Moments {
    fn zeros(width: usize) -> Self {
        Moments {
            count: 0,
            sum: vec![0.0; width],
            sum_sq: vec![0.0; width],
        }
    }

    fn add(&mut self, values: &[f64]) {
        self.count += 1;
        for ((s, q), v) in self.sum.iter_mut().zip(&mut self.sum_sq).zip(values) {
            *s += v;
            *q += v * v;
        }
    }

    fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += b;
        }
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.sum[i] / self.count as f64
    }

    /// Standard error of the mean of slot `i`.
    pub fn stderr(&self, i: usize) -> f64 {
        let n = self.count as f64;
        if self.count < 2 {
            return 0.0;
        }
        let mean = self.sum[i] / n;
        let var = ((self.sum_sq[i] - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}
