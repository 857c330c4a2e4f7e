//! Seeded realizations of random walks driven by a finitely supported step
//! measure.
//!
//! Letters `ω_0, ω_1, ...` are drawn i.i.d. from the step measure using a
//! ChaCha8 stream keyed by `(seed, stream_id)`, so any realization is a pure
//! function of those two numbers. The right walk after `n` is
//! `f^n = f_{ω_n} ∘ ... ∘ f_{ω_0}` (`n + 1` letters), the left walk is
//! `f_{ω_0} ∘ ... ∘ f_{ω_n}`, and the inverse walk is `(f^n)^{-1}`.

use std::sync::Arc as Shared;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circle::CirclePoint;
use crate::maps::{CircleMap, MapError, MapRecord, MapWord, MoebiusMap, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("step measure has no atoms")]
    Empty,
    #[error("atom {index} has non-positive or non-finite weight {weight}")]
    BadWeight { index: usize, weight: f64 },
    #[error("atom {index}: {source}")]
    Map { index: usize, source: MapError },
}

/// Finite-support probability measure on circle maps.
#[derive(Debug, Clone)]
pub struct StepMeasure {
    atoms: Vec<Shared<CircleMap>>,
    inverses: Vec<Shared<CircleMap>>,
    names: Vec<String>,
    weights: Vec<f64>,
    index: WeightedIndex<f64>,
    moebius: Option<Vec<MoebiusMap>>,
    asserted_nondegenerate: bool,
    asserted_proximal: bool,
}

impl StepMeasure {
    /// Weights must be positive; they are rescaled to sum to one.
    pub fn new(atoms: Vec<(String, CircleMap, f64)>) -> Result<Self, MeasureError> {
        if atoms.is_empty() {
            return Err(MeasureError::Empty);
        }
        for (index, (_, _, w)) in atoms.iter().enumerate() {
            if !(w.is_finite() && *w > 0.0) {
                return Err(MeasureError::BadWeight { index, weight: *w });
            }
        }
        let total: f64 = atoms.iter().map(|a| a.2).sum();
        let mut names = Vec::with_capacity(atoms.len());
        let mut maps = Vec::with_capacity(atoms.len());
        let mut weights = Vec::with_capacity(atoms.len());
        for (name, map, w) in atoms {
            names.push(name);
            maps.push(Shared::new(map));
            weights.push(w / total);
        }
        let index = WeightedIndex::new(&weights).map_err(|_| MeasureError::BadWeight {
            index: 0,
            weight: f64::NAN,
        })?;
        let inverses = maps.iter().map(|m| Shared::new(m.inverse())).collect();
        let moebius = maps
            .iter()
            .map(|m| m.as_moebius().copied())
            .collect::<Option<Vec<_>>>();
        Ok(StepMeasure {
            atoms: maps,
            inverses,
            names,
            weights,
            index,
            moebius,
            asserted_nondegenerate: false,
            asserted_proximal: false,
        })
    }

    pub fn point_mass(map: CircleMap) -> Self {
        Self::new(vec![("g".into(), map, 1.0)]).expect("point mass is valid")
    }

    pub fn uniform(maps: Vec<CircleMap>) -> Result<Self, MeasureError> {
        Self::new(
            maps.into_iter()
                .enumerate()
                .map(|(i, m)| (format!("g{i}"), m, 1.0))
                .collect(),
        )
    }

    /// Uniform on `{g, g^{-1}}` for each given `g`.
    pub fn symmetric_uniform(maps: Vec<CircleMap>) -> Result<Self, MeasureError> {
        let mut all = Vec::with_capacity(2 * maps.len());
        for m in maps {
            let inv = m.inverse();
            all.push(m);
            all.push(inv);
        }
        Self::uniform(all)
    }

    pub fn with_assertions(mut self, nondegenerate: bool, proximal: bool) -> Self {
        self.asserted_nondegenerate = nondegenerate;
        self.asserted_proximal = proximal;
        self
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom(&self, i: usize) -> &CircleMap {
        &self.atoms[i]
    }

    pub fn inverse_atom(&self, i: usize) -> &CircleMap {
        &self.inverses[i]
    }

    pub fn atoms(&self) -> impl Iterator<Item = &CircleMap> {
        self.atoms.iter().map(|a| a.as_ref())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Atoms as matrices, when every atom is Möbius.
    pub fn moebius_atoms(&self) -> Option<&[MoebiusMap]> {
        self.moebius.as_deref()
    }

    pub fn asserted_nondegenerate(&self) -> bool {
        self.asserted_nondegenerate
    }

    pub fn asserted_proximal(&self) -> bool {
        self.asserted_proximal
    }

    /// Every atom's inverse is also an atom with the same weight (checked on
    /// a probe grid).
    pub fn is_symmetric(&self) -> bool {
        let probes: Vec<CirclePoint> = (0..64)
            .map(|i| CirclePoint::new((i as f64 + 0.37) / 64.0))
            .collect();
        self.inverses.iter().zip(&self.weights).all(|(inv, &w)| {
            self.atoms.iter().zip(&self.weights).any(|(b, &v)| {
                (v - w).abs() < 1e-12
                    && probes
                        .iter()
                        .all(|&x| crate::circle::dist(inv.eval(x), b.eval(x)) < 1e-9)
            })
        })
    }

    /// Heuristic warnings about nondegeneracy, which cannot be decided.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.atoms.len() == 1 {
            out.push("support is a single atom: the walk is deterministic".to_string());
        } else if self.atoms_commute() {
            out.push("all atoms commute on a 1000-point probe".to_string());
        }
        out
    }

    fn atoms_commute(&self) -> bool {
        let probes: Vec<CirclePoint> = (0..1000)
            .map(|i| CirclePoint::new((i as f64 + 0.5) / 1000.0))
            .collect();
        for (i, a) in self.atoms.iter().enumerate() {
            for b in &self.atoms[i + 1..] {
                let noncommuting = probes.iter().any(|&x| {
                    crate::circle::dist(a.eval(b.eval(x)), b.eval(a.eval(x))) > 1e-9
                });
                if noncommuting {
                    return false;
                }
            }
        }
        true
    }

    /// The reflected measure `μ̄(g) = μ(g^{-1})`.
    pub fn reflected(&self) -> StepMeasure {
        let atoms = self
            .inverses
            .iter()
            .zip(&self.names)
            .zip(&self.weights)
            .map(|((a, n), &w)| (format!("{n}^-1"), a.as_ref().clone(), w))
            .collect();
        StepMeasure::new(atoms)
            .expect("reflection of a valid measure")
            .with_assertions(self.asserted_nondegenerate, self.asserted_proximal)
    }

    /// Draw one letter from a stream.
    pub fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        if self.atoms.len() == 1 {
            // keep the stream position independent of the support size
            let _ = self.index.sample(rng);
            return 0;
        }
        self.index.sample(rng)
    }
}

/// Configuration record for a step measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    pub atoms: Vec<AtomRecord>,
    #[serde(default)]
    pub asserted_nondegenerate: bool,
    #[serde(default)]
    pub asserted_proximal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomRecord {
    #[serde(default)]
    pub name: Option<String>,
    pub map: MapRecord,
    pub weight: Real,
}

impl MeasureRecord {
    pub fn build(&self) -> Result<StepMeasure, MeasureError> {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for (index, a) in self.atoms.iter().enumerate() {
            let map = a
                .map
                .build()
                .map_err(|source| MeasureError::Map { index, source })?;
            let name = a.name.clone().unwrap_or_else(|| format!("g{index}"));
            atoms.push((name, map, a.weight.0));
        }
        Ok(StepMeasure::new(atoms)?
            .with_assertions(self.asserted_nondegenerate, self.asserted_proximal))
    }
}

/// The letter stream for `(seed, stream_id)`.
pub fn letter_rng(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Stream id of trial `trial` for walk number `role` (0 for `ω`, 1 for
/// `ω′`, and so on). Roles occupy disjoint id ranges.
pub fn trial_stream(role: u64, trial: u64) -> u64 {
    (role << 40) | trial
}

/// First `n` letters of the stream.
pub fn sample_letters(mu: &StepMeasure, seed: u64, stream_id: u64, n: usize) -> Vec<usize> {
    let mut rng = letter_rng(seed, stream_id);
    (0..n).map(|_| mu.draw(&mut rng)).collect()
}

#[derive(Debug, Clone)]
enum Composed {
    Matrix(MoebiusMap),
    Word(Vec<Shared<CircleMap>>),
}

/// Incremental right walk: each step post-composes one fresh letter.
#[derive(Debug, Clone)]
pub struct WalkState<'a> {
    measure: &'a StepMeasure,
    rng: ChaCha8Rng,
    seed: u64,
    stream_id: u64,
    steps: usize,
    composed: Composed,
    letter_log: Option<Vec<usize>>,
}

impl<'a> WalkState<'a> {
    pub fn new(measure: &'a StepMeasure, seed: u64, stream_id: u64) -> Self {
        let composed = if measure.moebius.is_some() {
            Composed::Matrix(MoebiusMap::identity())
        } else {
            Composed::Word(Vec::new())
        };
        WalkState {
            measure,
            rng: letter_rng(seed, stream_id),
            seed,
            stream_id,
            steps: 0,
            composed,
            letter_log: None,
        }
    }

    pub fn with_letter_log(mut self) -> Self {
        self.letter_log = Some(Vec::new());
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of letters applied so far.
    pub fn step_count(&self) -> usize {
        self.steps
    }

    pub fn letter_log(&self) -> Option<&[usize]> {
        self.letter_log.as_deref()
    }

    /// Draw one letter and post-compose it; returns the letter.
    pub fn step(&mut self) -> usize {
        let letter = self.measure.draw(&mut self.rng);
        match &mut self.composed {
            Composed::Matrix(m) => {
                let atoms = self.measure.moebius.as_ref().expect("matrix walk");
                *m = atoms[letter].compose(m);
            }
            Composed::Word(w) => w.push(self.measure.atoms[letter].clone()),
        }
        if let Some(log) = &mut self.letter_log {
            log.push(letter);
        }
        self.steps += 1;
        letter
    }

    pub fn advance(&mut self, k: usize) {
        for _ in 0..k {
            self.step();
        }
    }

    /// Composition of all letters applied so far.
    pub fn composed(&self) -> CircleMap {
        match &self.composed {
            Composed::Matrix(m) => CircleMap::Moebius(*m),
            Composed::Word(w) => CircleMap::Word(MapWord::from_applied(w.clone())),
        }
    }
}

/// A realization `ω_0, ..., ω_horizon` kept in full, with cached prefix
/// products for Möbius walks.
#[derive(Debug, Clone)]
pub struct Realization<'a> {
    measure: &'a StepMeasure,
    letters: Vec<usize>,
    prefixes: Option<Vec<MoebiusMap>>,
}

impl<'a> Realization<'a> {
    /// Letters `ω_0..=ω_horizon`.
    pub fn sample(measure: &'a StepMeasure, seed: u64, stream_id: u64, horizon: usize) -> Self {
        let letters = sample_letters(measure, seed, stream_id, horizon + 1);
        Self::from_letters(measure, letters)
    }

    pub fn from_letters(measure: &'a StepMeasure, letters: Vec<usize>) -> Self {
        let prefixes = measure.moebius.as_ref().map(|atoms| {
            let mut acc = MoebiusMap::identity();
            letters
                .iter()
                .map(|&l| {
                    acc = atoms[l].compose(&acc);
                    acc
                })
                .collect()
        });
        Realization {
            measure,
            letters,
            prefixes,
        }
    }

    pub fn measure(&self) -> &StepMeasure {
        self.measure
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    /// Largest `n` for which `f^n` is available.
    pub fn horizon(&self) -> usize {
        self.letters.len() - 1
    }

    /// `f^n`, as a matrix when the measure is Möbius.
    pub fn right_moebius(&self, n: usize) -> Option<&MoebiusMap> {
        self.prefixes.as_ref().map(|p| &p[n])
    }

    /// `f^n = f_{ω_n} ∘ ... ∘ f_{ω_0}`.
    pub fn right(&self, n: usize) -> CircleMap {
        match &self.prefixes {
            Some(p) => CircleMap::Moebius(p[n]),
            None => CircleMap::Word(MapWord::from_applied(
                self.letters[..=n]
                    .iter()
                    .map(|&l| self.measure.atoms[l].clone())
                    .collect(),
            )),
        }
    }

    /// `f_{ω_0} ∘ ... ∘ f_{ω_n}`.
    pub fn left(&self, n: usize) -> CircleMap {
        match &self.measure.moebius {
            Some(atoms) => {
                let mut acc = MoebiusMap::identity();
                for &l in &self.letters[..=n] {
                    acc = acc.compose(&atoms[l]);
                }
                CircleMap::Moebius(acc)
            }
            None => CircleMap::Word(MapWord::from_applied(
                self.letters[..=n]
                    .iter()
                    .rev()
                    .map(|&l| self.measure.atoms[l].clone())
                    .collect(),
            )),
        }
    }

    /// `(f^n)^{-1} = f_{ω_0}^{-1} ∘ ... ∘ f_{ω_n}^{-1}`.
    pub fn inverse(&self, n: usize) -> CircleMap {
        self.right(n).inverse()
    }

    /// `f^n(x)`.
    pub fn push(&self, n: usize, x: CirclePoint) -> CirclePoint {
        match &self.prefixes {
            Some(p) => p[n].eval(x),
            None => self.letters[..=n]
                .iter()
                .fold(x, |acc, &l| self.measure.atoms[l].eval(acc)),
        }
    }

    /// `(f^n)^{-1}(x)`.
    pub fn pull(&self, n: usize, x: CirclePoint) -> CirclePoint {
        match &self.prefixes {
            Some(p) => p[n].inverse().eval(x),
            None => self.letters[..=n]
                .iter()
                .rev()
                .fold(x, |acc, &l| self.measure.inverses[l].eval(acc)),
        }
    }
}

pub fn right_walk(mu: &StepMeasure, seed: u64, stream_id: u64, n: usize) -> CircleMap {
    Realization::sample(mu, seed, stream_id, n).right(n)
}

pub fn left_walk(mu: &StepMeasure, seed: u64, stream_id: u64, n: usize) -> CircleMap {
    Realization::sample(mu, seed, stream_id, n).left(n)
}

pub fn inverse_walk(mu: &StepMeasure, seed: u64, stream_id: u64, n: usize) -> CircleMap {
    Realization::sample(mu, seed, stream_id, n).inverse(n)
}
