use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{LipschitzBound, MapError};
use crate::circle::{Arc, CirclePoint};

const RESCALE_ABOVE: f64 = 1e150;
const RESCALE_BELOW: f64 = 1e-150;
/// Products whose relative determinant `det / max_entry^2` falls below this are
/// treated as projective data only; the determinant is then tracked in
/// `log_scale` instead of being recomputed from the entries.
const WELL_CONDITIONED: f64 = 1e-8;

/// Projective action of an `SL(2, R)` matrix on `S^1 = RP^1`, with `x`
/// parametrizing the line through `(cos πx, sin πx)`.
///
/// The unimodular matrix is `m * exp(log_scale)`. For short products
/// `log_scale` is zero and `m` itself has determinant one; long walks keep
/// `m` bounded by moving its scale into `log_scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap {
    m: [[f64; 2]; 2],
    log_scale: f64,
}

impl MoebiusMap {
    /// Normalizes to determinant one. Rejects singular and orientation
    /// reversing matrices.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, MapError> {
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(MapError::NonFinite);
        }
        let det = a * d - b * c;
        let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
        if scale == 0.0 || det.abs() <= 1e-20 * scale * scale {
            return Err(MapError::SingularMatrix);
        }
        if det < 0.0 {
            return Err(MapError::OrientationReversing);
        }
        let k = det.sqrt();
        Ok(MoebiusMap {
            m: [[a / k, b / k], [c / k, d / k]],
            log_scale: 0.0,
        })
    }

    pub fn from_row_major(entries: [f64; 4]) -> Result<Self, MapError> {
        Self::new(entries[0], entries[1], entries[2], entries[3])
    }

    pub fn identity() -> Self {
        MoebiusMap {
            m: [[1.0, 0.0], [0.0, 1.0]],
            log_scale: 0.0,
        }
    }

    /// `diag(lambda, 1/lambda)`: attracting fixed point 0 and repelling fixed
    /// point 1/2 when `lambda > 1`.
    pub fn diagonal(lambda: f64) -> Result<Self, MapError> {
        Self::new(lambda, 0.0, 0.0, 1.0 / lambda)
    }

    /// Rotation of the circle by `t`.
    pub fn rotation(t: f64) -> Self {
        let (s, c) = (PI * t).sin_cos();
        MoebiusMap {
            m: [[c, -s], [s, c]],
            log_scale: 0.0,
        }
    }

    /// `R_t ∘ self ∘ R_{-t}`.
    pub fn conjugate_by_rotation(&self, t: f64) -> Self {
        Self::rotation(t)
            .compose(self)
            .compose(&Self::rotation(-t))
    }

    /// Current matrix representative (projectively equal to the map).
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        self.m
    }

    pub fn row_major(&self) -> [f64; 4] {
        [self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]]
    }

    /// Natural log of the scale factor folded out of the representative.
    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// Determinant of the stored representative, computed from the entries.
    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// `self ∘ inner`, i.e. the matrix product `self * inner`.
    pub fn compose(&self, inner: &MoebiusMap) -> MoebiusMap {
        let a = &self.m;
        let b = &inner.m;
        let m = [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ];
        MoebiusMap {
            m,
            log_scale: self.log_scale + inner.log_scale,
        }
        .renormalized()
    }

    fn renormalized(mut self) -> Self {
        let s = self.max_entry();
        let det = self.det();
        if det > 0.0 && det >= WELL_CONDITIONED * s * s {
            // the true determinant is one; reset the representative to it
            let k = det.sqrt();
            for row in self.m.iter_mut() {
                for v in row.iter_mut() {
                    *v /= k;
                }
            }
            self.log_scale = 0.0;
        } else if s > RESCALE_ABOVE || s < RESCALE_BELOW {
            for row in self.m.iter_mut() {
                for v in row.iter_mut() {
                    *v /= s;
                }
            }
            self.log_scale += s.ln();
        }
        self
    }

    fn max_entry(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Inverse via the adjugate; exact for unimodular matrices.
    pub fn inverse(&self) -> MoebiusMap {
        let [[a, b], [c, d]] = self.m;
        MoebiusMap {
            m: [[d, -b], [-c, a]],
            log_scale: self.log_scale,
        }
    }

    fn apply(&self, x: f64) -> (f64, f64) {
        let (s, c) = (PI * x).sin_cos();
        (
            self.m[0][0] * c + self.m[0][1] * s,
            self.m[1][0] * c + self.m[1][1] * s,
        )
    }

    pub fn eval(&self, x: CirclePoint) -> CirclePoint {
        let (u, v) = self.apply(x.value());
        CirclePoint::new(v.atan2(u) / PI)
    }

    /// Derivative `1/|M v|^2` of the circle map, `v = (cos πx, sin πx)`.
    pub fn derivative(&self, x: CirclePoint) -> f64 {
        let (u, v) = self.apply(x.value());
        let norm2 = u * u + v * v;
        if self.log_scale == 0.0 {
            1.0 / norm2
        } else {
            (-2.0 * self.log_scale - norm2.ln()).exp()
        }
    }

    /// Natural log of the operator norm of the unimodular matrix.
    pub fn log_norm(&self) -> f64 {
        self.largest_singular_value().ln() + self.log_scale
    }

    fn largest_singular_value(&self) -> f64 {
        let f2: f64 = self.m.iter().flatten().map(|v| v * v).sum();
        let det = if self.log_scale == 0.0 {
            self.det()
        } else {
            (-2.0 * self.log_scale).exp()
        };
        let disc = (f2 * f2 - 4.0 * det * det).max(0.0).sqrt();
        ((f2 + disc) / 2.0).sqrt()
    }

    /// Sup of the derivative: the squared largest singular value.
    pub fn lipschitz(&self) -> Result<LipschitzBound, MapError> {
        let value = (2.0 * self.log_norm()).exp();
        if !value.is_finite() {
            return Err(MapError::NoLipschitzData);
        }
        Ok(LipschitzBound { value, exact: true })
    }

    /// Image of an arc. The image length comes from the angle between the
    /// endpoint images, with the sign fixed by the determinant, so it stays
    /// correct even when the image is far below the coordinate resolution.
    pub fn image_arc(&self, arc: &Arc) -> Arc {
        if arc.is_full() {
            return Arc::full();
        }
        let s = arc.start().value();
        let (u0, v0) = self.apply(s);
        let start = CirclePoint::new(v0.atan2(u0) / PI);
        if arc.is_empty() {
            return Arc::with_length(start, 0.0);
        }
        let len = arc.length();
        let (u1, v1) = self.apply(s + len);
        let det = if self.log_scale == 0.0 {
            1.0
        } else {
            (-2.0 * self.log_scale).exp()
        };
        let cross = det * (PI * len).sin();
        let dot = u0 * u1 + v0 * v1;
        let theta = cross.atan2(dot);
        Arc::with_length(start, theta / PI)
    }

    /// Fixed points in (attracting, repelling) order, for hyperbolic maps.
    pub fn hyperbolic_fixed_points(&self) -> Option<(CirclePoint, CirclePoint)> {
        let [[a, b], [c, d]] = self.m;
        let tr = a + d;
        let det = self.det();
        let disc = tr * tr - 4.0 * det;
        if disc <= 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        let big = if tr >= 0.0 { (tr + sq) / 2.0 } else { (tr - sq) / 2.0 };
        let small = det / big;
        let eigvec = |l: f64| -> CirclePoint {
            // null vector of M - l, read off the better-conditioned row
            let (x, y) = if (a - l).hypot(b) >= c.hypot(d - l) {
                (b, l - a)
            } else {
                (l - d, c)
            };
            CirclePoint::new(y.atan2(x) / PI)
        };
        Some((eigvec(big), eigvec(small)))
    }
}
