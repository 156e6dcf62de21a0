//! The range/height lattice shared by every solver.

use std::f64::consts::PI;

use crate::error::{PeError, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Vacuum wavenumber for a frequency in Hz.
pub fn wavenumber(frequency_hz: f64) -> f64 {
    2.0 * PI * frequency_hz / SPEED_OF_LIGHT
}

/// Vacuum wavelength for a frequency in Hz.
pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

/// Inputs needed to lay out a [`SimulationGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub frequency_hz: f64,
    pub max_range_m: f64,
    pub range_step_m: f64,
    /// Total transformed height, absorber included.
    pub max_height_m: f64,
    pub num_height_points: usize,
    pub max_angle_deg: f64,
}

/// Uniform range/height lattice with its vertical spectral axis.
///
/// Index 0 of every column is the ground. The top sample sits one step
/// below `max_height`, which is the implicit zero of the sine basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationGrid {
    pub frequency_hz: f64,
    pub wavenumber: f64,
    pub max_range: f64,
    pub range_step: f64,
    pub num_range_steps: usize,
    pub max_height: f64,
    pub num_height_points: usize,
    pub height_step: f64,
    pub max_angle_deg: f64,
}

impl SimulationGrid {
    pub fn wavelength(&self) -> f64 {
        wavelength(self.frequency_hz)
    }

    pub fn angular_frequency(&self) -> f64 {
        2.0 * PI * self.frequency_hz
    }

    /// Height of sample `j`.
    pub fn height(&self, j: usize) -> f64 {
        j as f64 * self.height_step
    }

    /// Range of step `i`.
    pub fn range(&self, i: usize) -> f64 {
        i as f64 * self.range_step
    }

    /// Sine-basis wavenumber of mode `j` (`j = 1..N-1`).
    pub fn sine_wavenumber(&self, j: usize) -> f64 {
        PI * j as f64 / self.max_height
    }

    /// Cosine-basis wavenumber of mode `j` (`j = 0..N-1`). The cosine basis
    /// spans the stored samples only, so its period is `(N-1)·Δz`.
    pub fn cosine_wavenumber(&self, j: usize) -> f64 {
        PI * j as f64 / ((self.num_height_points - 1) as f64 * self.height_step)
    }

    /// Largest vertical step that resolves every angle up to `max_angle_deg`.
    pub fn max_height_step(frequency_hz: f64, max_angle_deg: f64) -> f64 {
        wavelength(frequency_hz) / (2.0 * max_angle_deg.to_radians().sin())
    }
}

pub fn build_grid(spec: &GridSpec) -> Result<SimulationGrid> {
    let GridSpec { frequency_hz, max_range_m, range_step_m, max_height_m, num_height_points: n, max_angle_deg } = *spec;

    for (name, v) in [
        ("frequency", frequency_hz),
        ("max range", max_range_m),
        ("range step", range_step_m),
        ("max height", max_height_m),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(PeError::Grid(format!("{name} must be positive, got {v}")));
        }
    }
    if !n.is_power_of_two() {
        return Err(PeError::Grid(format!("nz must be a power of two, got {n}")));
    }
    if n < 16 {
        return Err(PeError::Grid(format!("nz must be at least 16, got {n}")));
    }
    if !(max_angle_deg > 0.0 && max_angle_deg < 90.0) {
        return Err(PeError::Grid(format!("maximum angle must lie in (0, 90) degrees, got {max_angle_deg}")));
    }

    let steps_f = max_range_m / range_step_m;
    let num_range_steps = steps_f.round() as usize;
    if num_range_steps == 0 || (steps_f - num_range_steps as f64).abs() > 1e-9 * steps_f.max(1.0) {
        return Err(PeError::Grid(format!(
            "max range {max_range_m} m is not an integer multiple of range step {range_step_m} m"
        )));
    }

    let height_step = max_height_m / n as f64;
    let bound = SimulationGrid::max_height_step(frequency_hz, max_angle_deg);
    if height_step > bound {
        return Err(PeError::Grid(format!(
            "height step {height_step} m exceeds the anti-aliasing bound {bound:.6} m \
             for {max_angle_deg} degrees; the vertical grid is under-resolved"
        )));
    }

    let grid = SimulationGrid {
        frequency_hz,
        wavenumber: wavenumber(frequency_hz),
        // Re-derive so that Δx·steps reproduces the extent exactly.
        max_range: range_step_m * num_range_steps as f64,
        range_step: range_step_m,
        num_range_steps,
        max_height: max_height_m,
        num_height_points: n,
        height_step,
        max_angle_deg,
    };
    let p_top = grid.sine_wavenumber(n - 1);
    let needed = grid.wavenumber * max_angle_deg.to_radians().sin();
    if p_top < needed {
        return Err(PeError::Grid(format!(
            "spectral axis tops out at {p_top:.4} rad/m, below k·sin(θmax) = {needed:.4} rad/m"
        )));
    }
    Ok(grid)
}
