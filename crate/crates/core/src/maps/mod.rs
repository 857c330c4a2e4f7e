//! Orientation-preserving circle maps: Möbius, piecewise-linear, lifts
//! through `d`-fold covers, and words in those.

mod lift;
mod moebius;
mod pl;
mod record;
mod word;

use serde::Serialize;
use thiserror::Error;

use crate::circle::{Arc, CirclePoint};

pub use lift::LiftedMap;
pub use moebius::MoebiusMap;
pub use pl::PiecewiseLinearMap;
pub use record::{MapRecord, Real};
pub use word::{GeneratorSystem, Letter, MapWord, Spelling};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix has negative determinant (orientation reversing)")]
    OrientationReversing,
    #[error("non-finite map data")]
    NonFinite,
    #[error("invalid piecewise-linear data: {0}")]
    InvalidPiecewiseLinear(String),
    #[error("lift degree must be at least 2, got {0}")]
    InvalidDegree(u32),
    #[error("lift branch {branch} out of range for degree {degree}")]
    InvalidBranch { branch: u32, degree: u32 },
    #[error("map is not differentiable")]
    NotDifferentiable,
    #[error("map has no finite Lipschitz data")]
    NoLipschitzData,
}

/// A Lipschitz constant, or an upper bound on one when `exact` is false.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzBound {
    pub value: f64,
    pub exact: bool,
}

/// An orientation-preserving homeomorphism of `R/Z`.
#[derive(Debug, Clone)]
pub enum CircleMap {
    Moebius(MoebiusMap),
    PiecewiseLinear(PiecewiseLinearMap),
    Lift(LiftedMap),
    Word(MapWord),
}

impl CircleMap {
    pub fn identity() -> Self {
        CircleMap::Moebius(MoebiusMap::identity())
    }

    pub fn rotation(t: f64) -> Self {
        CircleMap::Moebius(MoebiusMap::rotation(t))
    }

    pub fn lift(base: CircleMap, degree: u32, branch: u32) -> Result<Self, MapError> {
        Ok(CircleMap::Lift(LiftedMap::new(base, degree, branch)?))
    }

    pub fn as_moebius(&self) -> Option<&MoebiusMap> {
        match self {
            CircleMap::Moebius(m) => Some(m),
            _ => None,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            CircleMap::Moebius(_) => "moebius",
            CircleMap::PiecewiseLinear(_) => "piecewise_linear",
            CircleMap::Lift(_) => "lift",
            CircleMap::Word(_) => "word",
        }
    }

    pub fn eval(&self, x: CirclePoint) -> CirclePoint {
        match self {
            CircleMap::Moebius(m) => m.eval(x),
            CircleMap::PiecewiseLinear(m) => m.eval(x),
            CircleMap::Lift(m) => m.eval(x),
            CircleMap::Word(m) => m.eval(x),
        }
    }

    pub fn inverse(&self) -> CircleMap {
        match self {
            CircleMap::Moebius(m) => CircleMap::Moebius(m.inverse()),
            CircleMap::PiecewiseLinear(m) => CircleMap::PiecewiseLinear(m.inverse()),
            CircleMap::Lift(m) => CircleMap::Lift(m.inverse()),
            CircleMap::Word(m) => CircleMap::Word(m.inverse()),
        }
    }

    /// Derivative at `x`. Piecewise-linear maps are only accepted when they
    /// are rotations.
    pub fn derivative(&self, x: CirclePoint) -> Result<f64, MapError> {
        match self {
            CircleMap::Moebius(m) => Ok(m.derivative(x)),
            CircleMap::PiecewiseLinear(m) if m.is_rotation() => Ok(m.slopes()[0]),
            CircleMap::PiecewiseLinear(_) => Err(MapError::NotDifferentiable),
            CircleMap::Lift(m) => m.derivative(x),
            CircleMap::Word(m) => m.derivative(x),
        }
    }

    pub fn lipschitz(&self) -> Result<LipschitzBound, MapError> {
        match self {
            CircleMap::Moebius(m) => m.lipschitz(),
            CircleMap::PiecewiseLinear(m) => Ok(m.lipschitz()),
            CircleMap::Lift(m) => m.lipschitz(),
            CircleMap::Word(m) => m.lipschitz(),
        }
    }

    /// Image of an arc under the map. Orientation-preserving homeomorphisms
    /// send arcs to arcs, so the image is determined by the endpoint images
    /// and the image length.
    pub fn image_arc(&self, arc: &Arc) -> Arc {
        match self {
            CircleMap::Moebius(m) => m.image_arc(arc),
            CircleMap::PiecewiseLinear(m) => m.image_arc(arc),
            CircleMap::Lift(m) => m.image_arc(arc),
            CircleMap::Word(m) => m.image_arc(arc),
        }
    }

    /// `self ∘ inner`. Möbius pairs multiply out; anything else becomes a word.
    pub fn compose(&self, inner: &CircleMap) -> CircleMap {
        use std::sync::Arc as Shared;
        if let (CircleMap::Moebius(a), CircleMap::Moebius(b)) = (self, inner) {
            return CircleMap::Moebius(a.compose(b));
        }
        let mut factors: Vec<Shared<CircleMap>> = Vec::new();
        for m in [inner, self] {
            match m {
                CircleMap::Word(w) => factors.extend(w.applied_factors().iter().cloned()),
                other => factors.push(Shared::new(other.clone())),
            }
        }
        CircleMap::Word(MapWord::from_applied(factors))
    }
}

impl From<MoebiusMap> for CircleMap {
    fn from(m: MoebiusMap) -> Self {
        CircleMap::Moebius(m)
    }
}

impl From<PiecewiseLinearMap> for CircleMap {
    fn from(m: PiecewiseLinearMap) -> Self {
        CircleMap::PiecewiseLinear(m)
    }
}

/// `map_image_arc`.
pub fn image_arc(map: &CircleMap, arc: &Arc) -> Arc {
    map.image_arc(arc)
}

/// `lipschitz_constant`.
pub fn lipschitz_constant(map: &CircleMap) -> Result<LipschitzBound, MapError> {
    map.lipschitz()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{dist, neighborhood};

    fn p(x: f64) -> CirclePoint {
        CirclePoint::new(x)
    }

    #[test]
    fn inverse_examples() {
        let g = CircleMap::Moebius(MoebiusMap::diagonal(2.0).unwrap());
        let expected = MoebiusMap::diagonal(0.5).unwrap();
        let gi = g.inverse();
        for i in 0..20 {
            let x = p(i as f64 / 20.0 + 0.01);
            assert!(dist(gi.eval(x), expected.eval(x)) < 1e-12);
        }
        let r = CircleMap::rotation(0.3).inverse();
        assert!(dist(r.eval(p(0.0)), p(0.7)) < 1e-12);
    }

    #[test]
    fn image_arc_examples() {
        let a = Arc::from_endpoints(0.1, 0.2);
        let id = CircleMap::identity();
        let ia = id.image_arc(&a);
        assert!(ia.start().approx_eq(a.start()) && (ia.length() - a.length()).abs() < 1e-12);

        let r = CircleMap::rotation(0.25).image_arc(&a);
        assert!(r.start().approx_eq(p(0.35)) && r.end().approx_eq(p(0.45)));

        let g = CircleMap::Moebius(MoebiusMap::diagonal(10.0).unwrap());
        let c = neighborhood(p(0.5), 0.05).unwrap().complement();
        let img = g.image_arc(&c);
        // endpoint oracle: images of 0.55 and 0.45
        let lo = (0.1 * (std::f64::consts::PI * 0.55).sin())
            .atan2(10.0 * (std::f64::consts::PI * 0.55).cos())
            / std::f64::consts::PI;
        assert!(dist(img.start(), p(lo)) < 1e-12);
        assert!((img.start().value() - 0.9799).abs() < 1e-4);
        assert!((img.end().value() - 0.0201).abs() < 1e-4);
    }

    #[test]
    fn compose_flattens_words() {
        let pl = CircleMap::PiecewiseLinear(PiecewiseLinearMap::new(&[0.0, 0.5], &[0.0, 0.3]).unwrap());
        let r = CircleMap::rotation(0.1);
        let w = r.compose(&pl).compose(&pl);
        match &w {
            CircleMap::Word(word) => assert_eq!(word.len(), 3),
            _ => panic!("expected word"),
        }
        let x = p(0.77);
        assert!(dist(w.eval(x), r.eval(pl.eval(pl.eval(x)))) < 1e-15);
    }

    #[test]
    fn pl_is_not_differentiable() {
        let pl = CircleMap::PiecewiseLinear(PiecewiseLinearMap::new(&[0.0, 0.5], &[0.0, 0.3]).unwrap());
        assert_eq!(pl.derivative(p(0.1)), Err(MapError::NotDifferentiable));
        let rot = CircleMap::PiecewiseLinear(PiecewiseLinearMap::new(&[0.0], &[0.3]).unwrap());
        assert_eq!(rot.derivative(p(0.1)), Ok(1.0));
    }

    #[test]
    fn word_lipschitz_is_flagged_bound() {
        let g = CircleMap::PiecewiseLinear(PiecewiseLinearMap::new(&[0.0, 0.75], &[0.0, 0.25]).unwrap());
        let w = g.compose(&g.inverse());
        let b = w.lipschitz().unwrap();
        assert!(!b.exact);
        assert!((b.value - 9.0).abs() < 1e-9);
    }
}
