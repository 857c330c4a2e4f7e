//! Points and arcs of the metric circle `R/Z`.
//!
//! Coordinates live in `[0, 1)`. The distance is the quotient metric, so the
//! circle has diameter `1/2`. Arcs are stored as a start point plus a
//! counterclockwise length in `[0, 1]`; length `1` is the whole circle and
//! length `0` is the empty open arc (or a single point when read as a closed
//! arc).

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Inputs within this distance of `1` reduce to `0`.
pub const REDUCTION_TOL: f64 = 1e-12;
/// Two points are considered equal below this distance.
pub const POINT_EQ_TOL: f64 = 1e-9;
/// Slack used by the exact cyclic-order comparisons on arcs.
pub const ARC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircleError {
    #[error("neighborhood radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("grid size must be at least 1")]
    EmptyGrid,
    #[error("coordinate is not finite: {0}")]
    NonFinite(f64),
}

/// Reduce a real number to `[0, 1)`.
#[inline]
pub fn reduce(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 - REDUCTION_TOL {
        0.0
    } else {
        r
    }
}

/// A point of `S^1 = R/Z`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub const ZERO: CirclePoint = CirclePoint(0.0);
    pub const HALF: CirclePoint = CirclePoint(0.5);

    pub fn new(x: f64) -> Self {
        CirclePoint(reduce(x))
    }

    pub fn try_new(x: f64) -> Result<Self, CircleError> {
        if x.is_finite() {
            Ok(Self::new(x))
        } else {
            Err(CircleError::NonFinite(x))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Rotate by `t` (counterclockwise).
    #[inline]
    pub fn shifted(self, t: f64) -> Self {
        CirclePoint::new(self.0 + t)
    }

    /// Counterclockwise offset from `self` to `other`, in `[0, 1)`.
    #[inline]
    pub fn offset_to(self, other: CirclePoint) -> f64 {
        (other.0 - self.0).rem_euclid(1.0)
    }

    pub fn approx_eq(self, other: CirclePoint) -> bool {
        dist(self, other) < POINT_EQ_TOL
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<f64> for CirclePoint {
    fn from(x: f64) -> Self {
        CirclePoint::new(x)
    }
}

/// Quotient distance on `R/Z`, in `[0, 1/2]`.
#[inline]
pub fn dist(a: CirclePoint, b: CirclePoint) -> f64 {
    let d = (a.0 - b.0).abs().rem_euclid(1.0);
    d.min(1.0 - d)
}

/// True iff `a, b, c` are met in this order going counterclockwise from `a`,
/// all three distinct.
pub fn positively_ordered(a: CirclePoint, b: CirclePoint, c: CirclePoint) -> bool {
    let ab = a.offset_to(b);
    let ac = a.offset_to(c);
    ab > 0.0 && ac > 0.0 && ab < ac
}

/// Counterclockwise arc `(start, start + length)`.
///
/// Read as an open set unless a caller says otherwise. The complement of an
/// open arc is the closed arc `[end, start]`, which this type also represents
/// (with the same start/length pair).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    start: CirclePoint,
    length: f64,
}

impl Arc {
    /// Arc from `start` counterclockwise to `end`. Coincident endpoints give
    /// the empty arc.
    pub fn new(start: CirclePoint, end: CirclePoint) -> Self {
        let length = start.offset_to(end);
        if length < ARC_TOL || length > 1.0 - ARC_TOL {
            Arc { start, length: 0.0 }
        } else {
            Arc { start, length }
        }
    }

    pub fn from_endpoints(start: f64, end: f64) -> Self {
        Arc::new(CirclePoint::new(start), CirclePoint::new(end))
    }

    /// Arc of the given length; lengths are clamped to `[0, 1]`.
    pub fn with_length(start: CirclePoint, length: f64) -> Self {
        Arc {
            start,
            length: length.clamp(0.0, 1.0),
        }
    }

    pub fn full() -> Self {
        Arc {
            start: CirclePoint::ZERO,
            length: 1.0,
        }
    }

    pub fn empty() -> Self {
        Arc {
            start: CirclePoint::ZERO,
            length: 0.0,
        }
    }

    pub fn start(&self) -> CirclePoint {
        self.start
    }

    pub fn end(&self) -> CirclePoint {
        self.start.shifted(self.length)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_full(&self) -> bool {
        self.length >= 1.0
    }

    pub fn is_empty(&self) -> bool {
        self.length <= 0.0
    }

    pub fn is_proper(&self) -> bool {
        !self.is_full() && !self.is_empty()
    }

    /// `min(length, 1/2)`: the metric diameter of the arc.
    pub fn diameter(&self) -> f64 {
        self.length.min(0.5)
    }

    pub fn midpoint(&self) -> CirclePoint {
        self.start.shifted(self.length / 2.0)
    }

    /// The complementary arc `[end, start]`.
    pub fn complement(&self) -> Arc {
        Arc {
            start: self.end(),
            length: 1.0 - self.length,
        }
    }

    /// Rotate the arc by `t`.
    pub fn shifted(&self, t: f64) -> Arc {
        Arc {
            start: self.start.shifted(t),
            length: self.length,
        }
    }

    /// Open-arc membership.
    pub fn contains_point(&self, p: CirclePoint) -> bool {
        if self.is_full() {
            return true;
        }
        let a = self.start.offset_to(p);
        a > 0.0 && a < self.length
    }

    /// Closed-arc membership.
    pub fn closure_contains_point(&self, p: CirclePoint) -> bool {
        if self.is_full() {
            return true;
        }
        let a = self.start.offset_to(p);
        a <= self.length || dist(p, self.start) == 0.0
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_full() {
            write!(f, "S^1")
        } else if self.is_empty() {
            write!(f, "{{}}")
        } else {
            write!(f, "({}, {})", self.start, self.end())
        }
    }
}

/// Signed slack of the inclusion `inner ⊆ outer`, both read as closed
/// endpoint intervals. Positive means `inner` sits strictly inside `outer`
/// with that much room on its tighter side; negative means it protrudes.
///
/// Lengths of zero are read as single points. Full arcs are handled by the
/// callers.
pub fn inclusion_slack(outer: &Arc, inner: &Arc) -> f64 {
    let mut a = outer.start.offset_to(inner.start);
    if a > 1.0 - ARC_TOL {
        a -= 1.0;
    }
    if a <= outer.length {
        a.min(outer.length - (a + inner.length))
    } else {
        -(a - outer.length).min(1.0 - a)
    }
}

/// True iff every point of the open arc `inner` lies in the open arc `outer`.
/// Decided by comparing endpoints in cyclic order.
pub fn arc_contains_arc(outer: &Arc, inner: &Arc) -> bool {
    if inner.is_empty() || outer.is_full() {
        return true;
    }
    if inner.is_full() || outer.is_empty() {
        return false;
    }
    inclusion_slack(outer, inner) >= -ARC_TOL
}

/// Gap between two open arcs: the smaller of the two cyclic gaps separating
/// them. Zero for touching arcs, negative when they overlap.
pub fn arc_gap(a: &Arc, b: &Arc) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    if a.is_full() || b.is_full() {
        return -1.0;
    }
    let g = inclusion_slack(&a.complement(), b);
    if g.abs() < ARC_TOL {
        0.0
    } else {
        g
    }
}

pub fn arcs_disjoint(a: &Arc, b: &Arc) -> bool {
    arc_gap(a, b) >= 0.0
}

/// True iff no two of the open arcs share a point. Touching endpoints are
/// allowed.
pub fn arcs_pairwise_disjoint(arcs: &[Arc]) -> bool {
    min_pairwise_gap(arcs) >= 0.0
}

/// Smallest gap over all pairs; `+inf` for fewer than two arcs.
pub fn min_pairwise_gap(arcs: &[Arc]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in arcs.iter().enumerate() {
        for b in &arcs[i + 1..] {
            best = best.min(arc_gap(a, b));
        }
    }
    best
}

/// All points within `eps` of `center`, as an arc. Radii of `1/2` or more
/// give the whole circle.
pub fn neighborhood(center: CirclePoint, eps: f64) -> Result<Arc, CircleError> {
    if !(eps > 0.0) {
        return Err(CircleError::NonPositiveRadius(eps));
    }
    if eps >= 0.5 {
        return Ok(Arc::full());
    }
    Ok(Arc {
        start: center.shifted(-eps),
        length: 2.0 * eps,
    })
}

/// `{k/K : 0 <= k < K}`.
pub fn uniform_grid(k: usize) -> Result<Vec<CirclePoint>, CircleError> {
    if k == 0 {
        return Err(CircleError::EmptyGrid);
    }
    Ok((0..k).map(|i| CirclePoint::new(i as f64 / k as f64)).collect())
}
