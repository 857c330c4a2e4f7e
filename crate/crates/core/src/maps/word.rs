use std::fmt;
use std::sync::Arc as Shared;

use super::{CircleMap, LipschitzBound, MapError};
use crate::circle::{Arc, CirclePoint};

/// A composition of circle maps, evaluated lazily factor by factor.
///
/// Factors are stored in application order: `factors[0]` acts first.
#[derive(Debug, Clone)]
pub struct MapWord {
    factors: Vec<Shared<CircleMap>>,
}

impl MapWord {
    /// Word `maps[0] ∘ maps[1] ∘ ... ∘ maps[k-1]` (rightmost acts first).
    pub fn compose_all(maps: Vec<CircleMap>) -> Self {
        let mut factors: Vec<Shared<CircleMap>> = maps.into_iter().map(Shared::new).collect();
        factors.reverse();
        MapWord { factors }
    }

    /// Word from factors already in application order.
    pub fn from_applied(factors: Vec<Shared<CircleMap>>) -> Self {
        MapWord { factors }
    }

    pub fn applied_factors(&self) -> &[Shared<CircleMap>] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn eval(&self, x: CirclePoint) -> CirclePoint {
        self.factors.iter().fold(x, |acc, f| f.eval(acc))
    }

    /// `(a ∘ b)^{-1} = b^{-1} ∘ a^{-1}`.
    pub fn inverse(&self) -> MapWord {
        MapWord {
            factors: self
                .factors
                .iter()
                .rev()
                .map(|f| Shared::new(f.inverse()))
                .collect(),
        }
    }

    /// Chain rule along the orbit of `x`.
    pub fn derivative(&self, x: CirclePoint) -> Result<f64, MapError> {
        let mut point = x;
        let mut log_der = 0.0;
        for f in &self.factors {
            log_der += f.derivative(point)?.ln();
            point = f.eval(point);
        }
        Ok(log_der.exp())
    }

    /// Product of the factors' constants: an upper bound in general.
    pub fn lipschitz(&self) -> Result<LipschitzBound, MapError> {
        let mut value = 1.0;
        let mut exact = self.factors.len() <= 1;
        for f in &self.factors {
            let b = f.lipschitz()?;
            value *= b.value;
            exact &= b.exact;
        }
        if !value.is_finite() {
            return Err(MapError::NoLipschitzData);
        }
        Ok(LipschitzBound { value, exact })
    }

    pub fn image_arc(&self, arc: &Arc) -> Arc {
        self.factors.iter().fold(*arc, |acc, f| f.image_arc(&acc))
    }
}

/// One letter over a generator system: generator index and sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inverted(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }
}

/// Named maps with precomputed inverses, used to spell words.
#[derive(Debug, Clone)]
pub struct GeneratorSystem {
    names: Vec<String>,
    maps: Vec<CircleMap>,
    inverses: Vec<CircleMap>,
}

impl GeneratorSystem {
    pub fn new(named: Vec<(String, CircleMap)>) -> Self {
        let (names, maps): (Vec<_>, Vec<_>) = named.into_iter().unzip();
        let inverses = maps.iter().map(CircleMap::inverse).collect();
        GeneratorSystem {
            names,
            maps,
            inverses,
        }
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn map(&self, letter: Letter) -> &CircleMap {
        if letter.inverse {
            &self.inverses[letter.generator]
        } else {
            &self.maps[letter.generator]
        }
    }

    /// `letters[0] ∘ letters[1] ∘ ...`. All-Möbius systems collapse to one
    /// matrix.
    pub fn word(&self, letters: &[Letter]) -> CircleMap {
        letters
            .iter()
            .rev()
            .fold(CircleMap::identity(), |acc, &l| self.map(l).compose(&acc))
    }

    /// Evaluate a word pointwise, rightmost letter first.
    pub fn eval_word(&self, letters: &[Letter], x: CirclePoint) -> CirclePoint {
        letters.iter().rev().fold(x, |acc, &l| self.map(l).eval(acc))
    }

    pub fn spell(&self, letters: &[Letter]) -> Spelling<'_> {
        Spelling {
            system: self,
            letters: letters.to_vec(),
        }
    }
}

pub struct Spelling<'a> {
    system: &'a GeneratorSystem,
    letters: Vec<Letter>,
}

impl fmt::Display for Spelling<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", self.system.names[l.generator])?;
            if l.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}
