//! Run configuration: a JSON document with `measures`, `experiment` and
//! `output` sections.

use std::path::Path;

use circle_rds::maps::MapRecord;
use circle_rds::walk::MeasureRecord;
use circle_rds::{Arc, CircleMap, CirclePoint, Real, StepMeasure};
use circle_rds::experiments::ExperimentConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub measures: Measures,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Measures {
    pub measure_1: MeasureRecord,
    /// Defaults to `measure_1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure_2: Option<MeasureRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub seed: u64,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub eps: Vec<Real>,
    /// Grid size of the interval repulsor estimate.
    pub k: usize,
    pub x0: Real,
    pub y0: Real,
    /// Fixed radius of the density experiment.
    pub radius: Real,
    /// Horizon of the density experiment.
    pub horizon: usize,
    pub degree: u32,
    /// Lift branch per atom of `measure_1`; empty means all zero.
    pub branches: Vec<u32>,
    pub delta: Real,
    pub t: Real,
    pub bandwidth: Real,
    /// Sample count for stationary, holder and lyapunov.
    pub samples: usize,
    /// `push` or `birkhoff`.
    pub estimator: String,
    /// Walk length of the push estimator.
    pub push_n: usize,
    pub radii: Vec<Real>,
    pub pair_grid: usize,
    pub s: Real,
    pub contraction_n: Vec<usize>,
    pub decay_n: Vec<usize>,
    pub relator: RelatorSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairSection>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            seed: 0,
            n_values: (1..=12).map(|k| 5 * k).collect(),
            trials: 1000,
            eps: vec![Real(0.95)],
            k: 512,
            x0: Real(0.0),
            y0: Real(0.0),
            radius: Real(0.02),
            horizon: 10_000,
            degree: 2,
            branches: Vec::new(),
            delta: Real(1.0),
            t: Real(0.9),
            bandwidth: Real(0.05),
            samples: 100_000,
            estimator: "push".into(),
            push_n: 200,
            radii: [0.1, 0.05, 0.02, 0.01, 0.005, 0.002].map(Real).to_vec(),
            pair_grid: 32,
            s: Real(1.0),
            contraction_n: (1..=10).collect(),
            decay_n: (1..=8).map(|k| 2 * k).collect(),
            relator: RelatorSection::default(),
            pair: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelatorSection {
    pub max_len: usize,
    pub probes: usize,
    pub tol: Real,
}

impl Default for RelatorSection {
    fn default() -> Self {
        RelatorSection {
            max_len: 8,
            probes: 64,
            tol: Real(1e-6),
        }
    }
}

/// An explicit pair `(f, g)` for `relator` and `pingpong-check`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSection {
    pub f: MapRecord,
    pub g: MapRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arcs: Option<ArcsSection>,
}

/// Arcs as `[start, end]`, counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcsSection {
    pub u_f: [Real; 2],
    pub v_f: [Real; 2],
    pub u_g: [Real; 2],
    pub v_g: [Real; 2],
}

impl ArcsSection {
    pub fn arcs(&self) -> [Arc; 4] {
        [self.u_f, self.v_f, self.u_g, self.v_g].map(|[a, b]| Arc::from_endpoints(a.get(), b.get()))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

/// Read and parse a config file. Errors are single diagnostics carrying the
/// offending field path.
pub fn load(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<RunConfig, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            format!("config: {}", e.inner())
        } else {
            format!("{path}: {}", e.inner())
        }
    })
}

impl RunConfig {
    /// Canonical JSON: sorted keys, no whitespace.
    pub fn canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        serde_json::to_string(&value).expect("value serializes")
    }

    pub fn sha256(&self) -> String {
        format!("{:x}", Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn measure_2_record(&self) -> &MeasureRecord {
        self.measures.measure_2.as_ref().unwrap_or(&self.measures.measure_1)
    }

    /// Keep the `n` values up to `n_max`; the default grid is regenerated up
    /// to `n_max`.
    pub fn limit_n(&mut self, n_max: usize) {
        let e = &mut self.experiment;
        if e.n_values == ExperimentSection::default().n_values {
            e.n_values = (1..=n_max / 5).map(|k| 5 * k).collect();
        } else {
            e.n_values.retain(|&n| n <= n_max);
        }
    }
}

/// The pieces of a validated configuration.
#[derive(Debug, Clone)]
pub struct Built {
    pub experiment: ExperimentConfig,
    pub pair: Option<(CircleMap, CircleMap, Option<[Arc; 4]>)>,
}

fn measure_diagnostics(name: &str, record: &MeasureRecord, out: &mut Vec<String>) -> Option<StepMeasure> {
    let before = out.len();
    if record.atoms.is_empty() {
        out.push(format!("{name}: no atoms"));
        return None;
    }
    for (i, a) in record.atoms.iter().enumerate() {
        if !(a.weight.get() > 0.0 && a.weight.get().is_finite()) {
            out.push(format!("{name}.atoms[{i}]: weight {} must be positive", a.weight));
        }
    }
    let total: f64 = record.atoms.iter().map(|a| a.weight.get()).sum();
    if out.len() == before && (total - 1.0).abs() > 1e-9 {
        out.push(format!("{name}: weights sum to {total}, expected 1"));
    }
    for (i, a) in record.atoms.iter().enumerate() {
        if let Err(e) = a.map.build() {
            out.push(format!("{name}.atoms[{i}]: {e}"));
        }
    }
    if out.len() > before {
        return None;
    }
    record.build().map_err(|e| out.push(format!("{name}: {e}"))).ok()
}

fn check(out: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok {
        out.push(msg());
    }
}

/// All diagnostics for a parsed configuration; `Ok` only when there are
/// none.
pub fn validate(cfg: &RunConfig) -> Result<Built, Vec<String>> {
    let mut out = Vec::new();
    let m1 = measure_diagnostics("measure_1", &cfg.measures.measure_1, &mut out);
    let m2 = match &cfg.measures.measure_2 {
        Some(r) => measure_diagnostics("measure_2", r, &mut out),
        None => m1.clone(),
    };
    let e = &cfg.experiment;
    let unit = |r: Real| (0.0..1.0).contains(&r.get());
    check(&mut out, unit(e.x0), || format!("experiment.x0 = {} is not in [0, 1)", e.x0));
    check(&mut out, unit(e.y0), || format!("experiment.y0 = {} is not in [0, 1)", e.y0));
    check(&mut out, e.t.get() > 0.0 && e.t.get() < 1.0, || {
        format!("experiment.t = {} is not in (0, 1)", e.t)
    });
    check(&mut out, e.delta.get() >= 0.0 && e.delta.get().is_finite(), || {
        format!("experiment.delta = {} must be >= 0", e.delta)
    });
    check(&mut out, e.bandwidth.get() > 0.0, || {
        format!("experiment.bandwidth = {} must be positive", e.bandwidth)
    });
    check(&mut out, e.degree >= 2, || format!("experiment.degree = {} must be at least 2", e.degree));
    check(&mut out, e.branches.iter().all(|&b| b < e.degree), || {
        format!("experiment.branches must lie in [0, {})", e.degree)
    });
    check(&mut out, e.samples > 0, || "experiment.samples must be positive".into());
    check(&mut out, e.push_n > 0, || "experiment.push_n must be positive".into());
    check(&mut out, matches!(e.estimator.as_str(), "push" | "birkhoff"), || {
        format!("experiment.estimator = {:?}: expected \"push\" or \"birkhoff\"", e.estimator)
    });
    check(&mut out, e.s.get() > 0.0 && e.s.get() <= 1.0, || format!("experiment.s = {} is not in (0, 1]", e.s));
    for (name, v) in [("contraction_n", &e.contraction_n), ("decay_n", &e.decay_n)] {
        check(&mut out, v.windows(2).all(|w| w[0] < w[1]), || {
            format!("experiment.{name} must be strictly increasing")
        });
    }
    check(
        &mut out,
        e.radii.windows(2).all(|w| w[0].get() > w[1].get()) && e.radii.iter().all(|r| r.get() > 0.0 && r.get() < 0.5),
        || "experiment.radii must be strictly decreasing within (0, 1/2)".into(),
    );

    let pair = e.pair.as_ref().and_then(|p| {
        let f = p.f.build().map_err(|err| out.push(format!("experiment.pair.f: {err}"))).ok();
        let g = p.g.build().map_err(|err| out.push(format!("experiment.pair.g: {err}"))).ok();
        Some((f?, g?, p.arcs.as_ref().map(ArcsSection::arcs)))
    });

    // the remaining checks only read plain fields, so a placeholder stands in
    // for a measure that failed to build
    let placeholder = || StepMeasure::point_mass(CircleMap::identity());
    let mut experiment = ExperimentConfig::new(m1.clone().unwrap_or_else(placeholder), m2.clone().unwrap_or_else(placeholder));
    experiment.n_values = e.n_values.clone();
    experiment.trials = e.trials;
    experiment.eps = e.eps.iter().map(|r| r.get()).collect();
    experiment.k = e.k;
    experiment.seed = e.seed;
    experiment.x0 = CirclePoint::new(e.x0.get());
    experiment.y0 = CirclePoint::new(e.y0.get());
    experiment.radius = e.radius.get();
    experiment.horizon = e.horizon;
    experiment.branches = e.branches.clone();
    for d in experiment.diagnostics() {
        out.push(format!("experiment: {d}"));
    }
    if out.is_empty() {
        Ok(Built { experiment, pair })
    } else {
        Err(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const STANDARD: &str = include_str!("../../../configs/standard_pair.json");

    #[test]
    fn standard_config_is_valid() {
        let cfg = parse(STANDARD).unwrap();
        assert!(validate(&cfg).is_ok());
    }

    #[test]
    fn standard_config_matches_the_preset() {
        let built = validate(&parse(STANDARD).unwrap()).unwrap();
        let (m1, m2) = circle_rds::experiments::presets::standard_pair();
        for (a, b) in [(&built.experiment.measure_1, &m1), (&built.experiment.measure_2, &m2)] {
            // the preset computes 0.5 - 0.49, which is 0.01 only to within an ulp or two
            for (p, q) in a.weights().iter().zip(b.weights()) {
                assert!((p - q).abs() < 1e-15);
            }
            assert_eq!(a.names(), b.names());
            for (x, y) in a.moebius_atoms().unwrap().iter().zip(b.moebius_atoms().unwrap()) {
                for (p, q) in x.row_major().iter().zip(y.row_major()) {
                    assert!((p - q).abs() < 1e-12);
                }
            }
            assert!(a.asserted_proximal());
        }
    }

    #[test]
    fn weights_off_by_a_tenth() {
        let text = r#"{"measures": {"measure_1": {"atoms": [
            {"map": {"type": "rotation", "angle": "0.1"}, "weight": "0.5"},
            {"map": {"type": "rotation", "angle": "0.2"}, "weight": "0.4"}]}}}"#;
        let d = validate(&parse(text).unwrap()).unwrap_err();
        assert_eq!(d.len(), 1);
        assert!(d[0].starts_with("measure_1:") && d[0].contains("0.9"), "{d:?}");
    }

    #[test]
    fn singular_atom() {
        let text = r#"{"measures": {"measure_1": {"atoms": [
            {"map": {"type": "rotation", "angle": "0.1"}, "weight": "0.5"},
            {"map": {"type": "moebius", "matrix": ["1", "2", "2", "4"]}, "weight": "0.5"}]}}}"#;
        let d = validate(&parse(text).unwrap()).unwrap_err();
        assert_eq!(d.len(), 1);
        assert!(d[0].starts_with("measure_1.atoms[1]:"), "{d:?}");
    }

    #[test]
    fn schema_errors_name_the_field() {
        let text = r#"{"measures": {"measure_1": {"atoms": []}}, "experiment": {"trails": 3}}"#;
        let e = parse(text).unwrap_err();
        assert!(e.contains("experiment") && e.contains("trails"), "{e}");
        let text = r#"{"measures": {"measure_1": {"atoms": []}}, "experiment": {"eps": ["x"]}}"#;
        assert!(parse(text).unwrap_err().starts_with("experiment.eps[0]"));
    }

    #[test]
    fn range_checks() {
        let mut cfg = parse(STANDARD).unwrap();
        cfg.experiment.eps = vec![Real(1.5)];
        cfg.experiment.n_values = vec![10, 5];
        let d = validate(&cfg).unwrap_err();
        assert_eq!(d.len(), 2, "{d:?}");
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = parse(STANDARD).unwrap();
        let b = parse(&serde_json::to_string_pretty(&a).unwrap()).unwrap();
        assert_eq!(a.sha256(), b.sha256());
        let mut c = a.clone();
        c.experiment.seed += 1;
        assert_ne!(a.sha256(), c.sha256());
    }

    #[test]
    fn n_limits() {
        let mut cfg = parse(STANDARD).unwrap();
        cfg.limit_n(20);
        assert_eq!(cfg.experiment.n_values, vec![5, 10, 15, 20]);
        cfg.experiment.n_values = vec![3, 7, 30];
        cfg.limit_n(10);
        assert_eq!(cfg.experiment.n_values, vec![3, 7]);
    }
}
