//! Split-step Fourier parabolic-equation propagation over sea and terrain.
//!
//! The engine marches the reduced field `u = e^{-ikx}·ψ` in range with a
//! symmetric split step: half refraction screen, spectral free-space step,
//! half screen, terrain mask, absorber. Reference solvers in [`oracles`]
//! check it independently.

pub mod config;
pub mod error;
pub mod field;
pub mod grid;
pub mod oracles;
pub mod pefm;
pub mod postprocess;
pub mod propagator;
pub mod refractivity;
pub mod run;
pub mod scenario;
pub mod source;
pub mod terrain;
pub mod transform;
pub mod validation;

pub use config::{parse_config, ScenarioConfig};
pub use error::{PeError, Result};
pub use field::{FieldSpectrum, ReducedField};
pub use grid::{build_grid, GridSpec, SimulationGrid};
pub use postprocess::{CoverageMap, Quantity};
pub use propagator::{march, march_two_way, AngleMode, BoundarySpec, PropagationResult};
pub use refractivity::{RefractivityField, RefractivityProfile};
pub use run::run_scenario;
pub use scenario::Scenario;
pub use source::{AntennaSpec, Polarization};
pub use terrain::TerrainProfile;
