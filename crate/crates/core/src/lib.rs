//! Random dynamical systems on the circle: seeded random walks of circle
//! homeomorphisms, contraction and stationary-measure estimators, ping-pong
//! certificates, and the experiments built on them.

pub mod circle;
pub mod estimators;
pub mod experiments;
pub mod maps;
mod par;
pub mod pingpong;
pub mod walk;

pub use circle::{Arc, CircleError, CirclePoint};
pub use estimators::{DecayFit, EmpiricalMeasure, Estimate, EstimatorError};
pub use maps::{CircleMap, LipschitzBound, MapError, MapRecord, MoebiusMap, Real};
pub use walk::{MeasureRecord, Realization, StepMeasure, WalkState};
