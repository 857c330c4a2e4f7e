use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CircleMap, LiftedMap, MapError, MoebiusMap, PiecewiseLinearMap};

/// A real number read from configuration, written either as a JSON number or
/// as a decimal string.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Real(pub f64);

impl Real {
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<f64> for Real {
    fn from(v: f64) -> Self {
        Real(v)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}", self.0))
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Real(v)),
            Raw::Str(s) => s
                .trim()
                .parse::<f64>()
                .map(Real)
                .map_err(|_| serde::de::Error::custom(format!("not a decimal number: {s:?}"))),
        }
    }
}

/// Configuration record for a circle map.
///
/// ```json
/// {"type": "moebius", "matrix": ["3", "0", "0", "0.3333333333333333"]}
/// {"type": "pl", "breakpoints": [0, 0.75], "images": [0, 0.25]}
/// {"type": "lift", "base": {"type": "rotation", "angle": 0.1}, "degree": 2, "branch": 0}
/// {"type": "compose", "maps": [{"type": "rotation", "angle": 0.1}, {"type": "inverse", "map": ...}]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MapRecord {
    /// Row-major 2x2 matrix, normalized to determinant one.
    Moebius { matrix: [Real; 4] },
    Rotation { angle: Real },
    #[serde(alias = "piecewise_linear")]
    Pl {
        breakpoints: Vec<Real>,
        images: Vec<Real>,
    },
    Lift {
        base: Box<MapRecord>,
        degree: u32,
        #[serde(default)]
        branch: u32,
    },
    /// `R_t ∘ map ∘ R_{-t}`.
    Conjugate { map: Box<MapRecord>, rotation: Real },
    Inverse { map: Box<MapRecord> },
    /// `maps[0] ∘ maps[1] ∘ ...`; the last map is applied first.
    Compose { maps: Vec<MapRecord> },
}

impl MapRecord {
    pub fn build(&self) -> Result<CircleMap, MapError> {
        Ok(match self {
            MapRecord::Moebius { matrix } => CircleMap::Moebius(MoebiusMap::from_row_major([
                matrix[0].0,
                matrix[1].0,
                matrix[2].0,
                matrix[3].0,
            ])?),
            MapRecord::Rotation { angle } => {
                if !angle.0.is_finite() {
                    return Err(MapError::NonFinite);
                }
                CircleMap::rotation(angle.0)
            }
            MapRecord::Pl {
                breakpoints,
                images,
            } => {
                let b: Vec<f64> = breakpoints.iter().map(|r| r.0).collect();
                let i: Vec<f64> = images.iter().map(|r| r.0).collect();
                CircleMap::PiecewiseLinear(PiecewiseLinearMap::new(&b, &i)?)
            }
            MapRecord::Lift {
                base,
                degree,
                branch,
            } => CircleMap::Lift(LiftedMap::new(base.build()?, *degree, *branch)?),
            MapRecord::Conjugate { map, rotation } => {
                let inner = map.build()?;
                let t = rotation.0;
                match inner {
                    CircleMap::Moebius(m) => CircleMap::Moebius(m.conjugate_by_rotation(t)),
                    other => CircleMap::rotation(t)
                        .compose(&other)
                        .compose(&CircleMap::rotation(-t)),
                }
            }
            MapRecord::Inverse { map } => map.build()?.inverse(),
            MapRecord::Compose { maps } => {
                let mut acc = CircleMap::identity();
                for m in maps {
                    acc = acc.compose(&m.build()?);
                }
                acc
            }
        })
    }

    pub fn moebius(entries: [f64; 4]) -> Self {
        MapRecord::Moebius {
            matrix: entries.map(Real),
        }
    }
}
