use super::{CircleMap, LipschitzBound, MapError};
use crate::circle::{Arc, CirclePoint};

/// Lift of a circle map through the `d`-fold cover `π_d(x) = d·x mod 1`:
///
/// `x ↦ (G(d·x) + branch) / d mod 1`
///
/// where `G` is the degree-one lift of `base` normalized by `G(0) ∈ [0, 1)`.
/// It commutes with rotation by `1/d` and satisfies `π_d ∘ lift = base ∘ π_d`.
#[derive(Debug, Clone)]
pub struct LiftedMap {
    base: Box<CircleMap>,
    degree: u32,
    branch: u32,
    base_at_zero: f64,
}

impl LiftedMap {
    pub fn new(base: CircleMap, degree: u32, branch: u32) -> Result<Self, MapError> {
        if degree < 2 {
            return Err(MapError::InvalidDegree(degree));
        }
        if branch >= degree {
            return Err(MapError::InvalidBranch { branch, degree });
        }
        let base_at_zero = base.eval(CirclePoint::ZERO).value();
        Ok(LiftedMap {
            base: Box::new(base),
            degree,
            branch,
            base_at_zero,
        })
    }

    pub fn base(&self) -> &CircleMap {
        &self.base
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn branch(&self) -> u32 {
        self.branch
    }

    /// Degree-one lift `G: R -> R` of the base map with `G(0) ∈ [0, 1)`.
    pub fn base_lift(&self, t: f64) -> f64 {
        canonical_lift(&self.base, self.base_at_zero, t)
    }

    pub fn eval(&self, x: CirclePoint) -> CirclePoint {
        let d = self.degree as f64;
        CirclePoint::new((self.base_lift(d * x.value()) + self.branch as f64) / d)
    }

    pub fn inverse(&self) -> LiftedMap {
        let base_inv = self.base.inverse();
        let inv_at_zero = base_inv.eval(CirclePoint::ZERO).value();
        // G^{-1} = H + k where H is the normalized lift of the inverse
        let t0 = canonical_lift(&base_inv, inv_at_zero, 0.0);
        let k = -self.base_lift(t0).round() as i64;
        let d = self.degree as i64;
        let branch = (k - self.branch as i64).rem_euclid(d) as u32;
        LiftedMap {
            base: Box::new(base_inv),
            degree: self.degree,
            branch,
            base_at_zero: inv_at_zero,
        }
    }

    pub fn derivative(&self, x: CirclePoint) -> Result<f64, MapError> {
        self.base
            .derivative(CirclePoint::new(self.degree as f64 * x.value()))
    }

    pub fn lipschitz(&self) -> Result<LipschitzBound, MapError> {
        self.base.lipschitz()
    }

    pub fn image_arc(&self, arc: &Arc) -> Arc {
        if arc.is_full() {
            return Arc::full();
        }
        let d = self.degree as f64;
        let start = self.eval(arc.start());
        let total = d * arc.length();
        let whole = total.floor();
        let rest = total - whole;
        let base_piece = Arc::with_length(CirclePoint::new(d * arc.start().value()), rest);
        let rest_len = if rest > 0.0 {
            self.base.image_arc(&base_piece).length()
        } else {
            0.0
        };
        Arc::with_length(start, (whole + rest_len) / d)
    }
}

fn canonical_lift(base: &CircleMap, at_zero: f64, t: f64) -> f64 {
    let n = t.floor();
    let u = t - n;
    let mut offset = (base.eval(CirclePoint::new(u)).value() - at_zero).rem_euclid(1.0);
    // rounding right next to the seam can land on the wrong sheet
    if u < 1e-6 && offset > 1.0 - 1e-10 {
        offset -= 1.0;
    } else if u > 1.0 - 1e-6 && offset < 1e-10 {
        offset += 1.0;
    }
    n + at_zero + offset
}
