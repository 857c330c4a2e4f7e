use serde::Serialize;

use super::EstimatorError;

/// Ordinary least squares `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit, EstimatorError> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(EstimatorError::TooFewPoints(x.len().min(y.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(EstimatorError::BadParameter(
            "fit needs at least two distinct abscissae".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - (slope * a + intercept);
            e * e
        })
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Least-squares fit of `ln y` against `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub n_values: Vec<usize>,
    pub y_values: Vec<f64>,
    /// Monte-Carlo standard error of each `y`, when known.
    pub y_stderr: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl DecayFit {
    pub fn fit(n_values: &[usize], y_values: &[f64]) -> Result<Self, EstimatorError> {
        Self::fit_with_stderr(n_values, y_values, &vec![f64::NAN; y_values.len()])
    }

    pub fn fit_with_stderr(
        n_values: &[usize],
        y_values: &[f64],
        y_stderr: &[f64],
    ) -> Result<Self, EstimatorError> {
        if let Some(&bad) = y_values.iter().find(|y| !(y.is_finite() && **y > 0.0)) {
            return Err(EstimatorError::NonPositive(bad));
        }
        let x: Vec<f64> = n_values.iter().map(|&n| n as f64).collect();
        let ly: Vec<f64> = y_values.iter().map(|y| y.ln()).collect();
        let f = linear_fit(&x, &ly)?;
        Ok(DecayFit {
            n_values: n_values.to_vec(),
            y_values: y_values.to_vec(),
            y_stderr: y_stderr.to_vec(),
            slope: f.slope,
            intercept: f.intercept,
            r_squared: f.r_squared,
        })
    }
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // the bounds at p = 0 and p = 1 are exact; rounding would leave them off by an ulp
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}
