//! The split-step engine.

mod absorber;
mod boundary;
mod dmft;
mod march;
mod spectral;

pub use absorber::{apply_absorber, AbsorberWindow};
pub use boundary::{complex_permittivity, BoundaryKind, BoundarySpec, EPSILON_0};
pub use dmft::DmftStepper;
pub(crate) use march::{check_finite, terrain_mask_in_place};
pub use march::{march, march_two_way, terrain_mask, PropagationResult, SolverKind, SpawnRecord, StepDiagnostics};
pub use spectral::{
    dmft_step, propagation_symbol, real_symbol, refraction_step, spectral_step, AngleMode, SpectralStepper,
};
