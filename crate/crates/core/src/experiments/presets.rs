//! Ready-made step measures.

use crate::maps::{CircleMap, MoebiusMap};
use crate::walk::StepMeasure;

/// Expansion factor of the hyperbolic generators.
pub const LAMBDA: f64 = 3.0;
/// Angle between the two axes inside each measure.
pub const AXIS_SHIFT: f64 = 0.05;
/// Weight of each forward generator; the inverses share the rest.
pub const FORWARD_WEIGHT: f64 = 0.49;

fn hyperbolic(lambda: f64, shift: f64) -> CircleMap {
    CircleMap::Moebius(
        MoebiusMap::diagonal(lambda)
            .expect("nonzero")
            .conjugate_by_rotation(shift),
    )
}

fn drifted(base: f64, lambda: f64, shift: f64, forward: f64) -> StepMeasure {
    let g = hyperbolic(lambda, base);
    let h = hyperbolic(lambda, base + shift);
    let back = 0.5 - forward;
    StepMeasure::new(vec![
        ("g".into(), g.clone(), forward),
        ("h".into(), h.clone(), forward),
        ("g^-1".into(), g.inverse(), back),
        ("h^-1".into(), h.inverse(), back),
    ])
    .expect("valid weights")
    .with_assertions(true, true)
}

/// Two proximal Möbius measures with transverse axes.
///
/// `μ₁` charges `g = diag(3, 1/3)` and `h = R_s g R_s^{-1}` (`s = 0.05`)
/// with weight 0.49 each and their inverses with 0.01 each, so its walks
/// attract towards `[0, 0.05]` and repel from `[0.5, 0.55]`. `μ₂` is `μ₁`
/// conjugated by the quarter turn.
pub fn standard_pair() -> (StepMeasure, StepMeasure) {
    drifted_pair(LAMBDA, AXIS_SHIFT, FORWARD_WEIGHT)
}

/// The family of [`standard_pair`]: expansion `lambda`, axis shift `shift`
/// and weight `forward` on each of `g`, `h` (`0.5 - forward` on each
/// inverse).
pub fn drifted_pair(lambda: f64, shift: f64, forward: f64) -> (StepMeasure, StepMeasure) {
    (
        drifted(0.0, lambda, shift, forward),
        drifted(0.25, lambda, shift, forward),
    )
}

/// `μ₁` uniform on `{g, g^{-1}}`, `g = diag(3, 1/3)`, and `μ₂` uniform on
/// `{h, h^{-1}}` with `h = R_{0.1} R_{1/4} g R_{1/4}^{-1}`. Each measure lives
/// on a cyclic group, so neither is proximal.
pub fn cyclic_pair() -> (StepMeasure, StepMeasure) {
    let g = hyperbolic(LAMBDA, 0.0);
    let h = CircleMap::rotation(0.1).compose(&hyperbolic(LAMBDA, 0.25));
    (
        StepMeasure::symmetric_uniform(vec![g]).expect("valid"),
        StepMeasure::symmetric_uniform(vec![h]).expect("valid"),
    )
}

/// Rotations only: an isometric control.
pub fn rotation_pair() -> (StepMeasure, StepMeasure) {
    let a = 2f64.sqrt() / 10.0;
    let b = 3f64.sqrt() / 10.0;
    (
        StepMeasure::symmetric_uniform(vec![CircleMap::rotation(a), CircleMap::rotation(b)]).expect("valid"),
        StepMeasure::symmetric_uniform(vec![CircleMap::rotation(b), CircleMap::rotation(0.5 * a)])
            .expect("valid"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{dist, CirclePoint};

    #[test]
    fn axes() {
        let (m1, m2) = standard_pair();
        let fp = |m: &CircleMap| m.as_moebius().unwrap().hyperbolic_fixed_points().unwrap();
        let (a, r) = fp(m1.atom(1));
        assert!(dist(a, CirclePoint::new(0.05)) < 1e-12);
        assert!(dist(r, CirclePoint::new(0.55)) < 1e-12);
        let (a, r) = fp(m2.atom(0));
        assert!(dist(a, CirclePoint::new(0.25)) < 1e-12);
        assert!(dist(r, CirclePoint::new(0.75)) < 1e-12);
        assert!((m1.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(m1.warnings().is_empty());
    }

    #[test]
    fn cyclic_pair_is_symmetric() {
        let (m1, m2) = cyclic_pair();
        assert!(m1.is_symmetric() && m2.is_symmetric());
        assert!(m1.warnings()[0].contains("commute"));
    }
}
