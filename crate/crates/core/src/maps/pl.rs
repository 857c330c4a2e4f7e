use super::{LipschitzBound, MapError};
use crate::circle::{reduce, Arc, CirclePoint};

/// Orientation-preserving piecewise-linear homeomorphism of the circle,
/// interpolating `breakpoints[i] -> images[i]` linearly between consecutive
/// breakpoints (cyclically).
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearMap {
    xs: Vec<f64>,
    // unwrapped images: ys[0] in [0, 1), strictly increasing, ys[last] < ys[0] + 1
    ys: Vec<f64>,
}

impl PiecewiseLinearMap {
    pub fn new(breakpoints: &[f64], images: &[f64]) -> Result<Self, MapError> {
        if breakpoints.is_empty() || breakpoints.len() != images.len() {
            return Err(MapError::InvalidPiecewiseLinear(
                "breakpoints and images must be nonempty and of equal length".into(),
            ));
        }
        if breakpoints
            .iter()
            .chain(images.iter())
            .any(|v| !v.is_finite())
        {
            return Err(MapError::NonFinite);
        }
        if breakpoints.iter().any(|&x| !(0.0..1.0).contains(&x)) {
            return Err(MapError::InvalidPiecewiseLinear(
                "breakpoints must lie in [0, 1)".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(MapError::InvalidPiecewiseLinear(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        let k = images.len();
        let mut ys = Vec::with_capacity(k);
        ys.push(reduce(images[0]));
        let mut winding = 0.0;
        for i in 0..k {
            let step = (images[(i + 1) % k] - images[i]).rem_euclid(1.0);
            if k > 1 && step <= 0.0 {
                return Err(MapError::InvalidPiecewiseLinear(
                    "images must be distinct".into(),
                ));
            }
            winding += if k == 1 { 1.0 } else { step };
            if i + 1 < k {
                let prev = ys[i];
                ys.push(prev + step);
            }
        }
        if (winding - 1.0).abs() > 1e-9 {
            return Err(MapError::InvalidPiecewiseLinear(
                "images must be strictly increasing in cyclic order".into(),
            ));
        }
        Ok(PiecewiseLinearMap {
            xs: breakpoints.to_vec(),
            ys,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.xs
    }

    pub fn images(&self) -> Vec<f64> {
        self.ys.iter().map(|&y| reduce(y)).collect()
    }

    fn node(&self, i: usize) -> (f64, f64) {
        let k = self.xs.len();
        (
            self.xs[i % k] + (i / k) as f64,
            self.ys[i % k] + (i / k) as f64,
        )
    }

    /// Index `i` such that `u` lies in `[x_i, x_{i+1})` for `u` in
    /// `[x_0, x_0 + 1)`.
    fn segment(&self, u: f64) -> usize {
        match self.xs.binary_search_by(|x| x.partial_cmp(&u).unwrap()) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    /// The degree-one lift `R -> R` with `lift(x_0) = y_0`.
    pub fn lift(&self, t: f64) -> f64 {
        let x0 = self.xs[0];
        let shift = (t - x0).div_euclid(1.0);
        let mut u = t - shift;
        if u >= x0 + 1.0 {
            u = x0;
        }
        let (i, u) = if u >= 1.0 {
            // in [1, x0 + 1): last segment, continued past 1
            (self.xs.len() - 1, u)
        } else {
            (self.segment(u), u)
        };
        let (xa, ya) = self.node(i);
        let (xb, yb) = self.node(i + 1);
        ya + (u - xa) * (yb - ya) / (xb - xa) + shift
    }

    pub fn eval(&self, x: CirclePoint) -> CirclePoint {
        CirclePoint::new(self.lift(x.value()))
    }

    pub fn slopes(&self) -> Vec<f64> {
        (0..self.xs.len())
            .map(|i| {
                let (xa, ya) = self.node(i);
                let (xb, yb) = self.node(i + 1);
                (yb - ya) / (xb - xa)
            })
            .collect()
    }

    /// Right derivative at `x`.
    pub fn slope_at(&self, x: CirclePoint) -> f64 {
        let x0 = self.xs[0];
        let mut u = x.value();
        if u < x0 {
            u += 1.0;
        }
        let i = if u >= 1.0 {
            self.xs.len() - 1
        } else {
            self.segment(u)
        };
        self.slopes()[i]
    }

    pub fn lipschitz(&self) -> LipschitzBound {
        LipschitzBound {
            value: self.slopes().into_iter().fold(0.0, f64::max),
            exact: true,
        }
    }

    pub fn inverse(&self) -> PiecewiseLinearMap {
        let mut pairs: Vec<(f64, f64)> = self
            .ys
            .iter()
            .zip(&self.xs)
            .map(|(&y, &x)| (reduce(y), x))
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let bps: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let imgs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        PiecewiseLinearMap::new(&bps, &imgs).expect("inverse of a valid PL homeomorphism")
    }

    /// Image arc, with the length taken from the lift so it is exact.
    pub fn image_arc(&self, arc: &Arc) -> Arc {
        if arc.is_full() {
            return Arc::full();
        }
        let s = arc.start().value();
        let a = self.lift(s);
        let b = self.lift(s + arc.length());
        Arc::with_length(CirclePoint::new(a), b - a)
    }

    /// True when every slope is equal, i.e. the map is a rotation.
    pub fn is_rotation(&self) -> bool {
        let s = self.slopes();
        s.iter().all(|v| (v - s[0]).abs() < 1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::dist;

    fn p(x: f64) -> CirclePoint {
        CirclePoint::new(x)
    }

    fn two_slope() -> PiecewiseLinearMap {
        // [0, 0.75) slope 1/3 onto [0, 0.25); [0.75, 1) slope 3 onto [0.25, 1)
        PiecewiseLinearMap::new(&[0.0, 0.75], &[0.0, 0.25]).unwrap()
    }

    #[test]
    fn slopes_and_lipschitz() {
        let f = two_slope();
        let s = f.slopes();
        assert!((s[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((s[1] - 3.0).abs() < 1e-12);
        assert!((f.lipschitz().value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eval_and_inverse() {
        let f = two_slope();
        assert!(dist(f.eval(p(0.375)), p(0.125)) < 1e-15);
        assert!(dist(f.eval(p(0.875)), p(0.625)) < 1e-15);
        let g = f.inverse();
        for i in 0..100 {
            let x = p(i as f64 / 100.0 + 0.003);
            assert!(dist(g.eval(f.eval(x)), x) < 1e-12);
        }
    }

    #[test]
    fn rotation_as_pl() {
        let r = PiecewiseLinearMap::new(&[0.0], &[0.3]).unwrap();
        assert!(r.is_rotation());
        assert!(dist(r.eval(p(0.8)), p(0.1)) < 1e-15);
        let inv = r.inverse();
        assert!(dist(inv.eval(p(0.0)), p(0.7)) < 1e-15);
    }

    #[test]
    fn offset_breakpoints() {
        let f = PiecewiseLinearMap::new(&[0.2, 0.5, 0.9], &[0.7, 0.95, 0.3]).unwrap();
        assert!(dist(f.eval(p(0.2)), p(0.7)) < 1e-15);
        assert!(dist(f.eval(p(0.9)), p(0.3)) < 1e-15);
        // midpoint of the wrapping segment [0.9, 1.2] -> [0.3, 0.7]
        assert!(dist(f.eval(p(0.05)), p(0.5)) < 1e-12);
    }

    #[test]
    fn rejects_invalid() {
        assert!(PiecewiseLinearMap::new(&[0.0, 0.5], &[0.5, 0.0]).is_ok());
        assert!(PiecewiseLinearMap::new(&[0.5, 0.2], &[0.0, 0.1]).is_err());
        // images in decreasing cyclic order wind more than once
        assert!(PiecewiseLinearMap::new(&[0.0, 0.3, 0.6], &[0.0, 0.6, 0.3]).is_err());
        assert!(PiecewiseLinearMap::new(&[0.0, 0.3], &[0.2, 0.2]).is_err());
        assert!(PiecewiseLinearMap::new(&[], &[]).is_err());
    }

    #[test]
    fn image_arc_exact_length() {
        let f = two_slope();
        let img = f.image_arc(&Arc::from_endpoints(0.7, 0.8));
        // 0.05 at slope 1/3 plus 0.05 at slope 3
        assert!((img.length() - (0.05 / 3.0 + 0.15)).abs() < 1e-12);
    }
}
