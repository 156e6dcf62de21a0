//! Everything a march needs, assembled and checked.

use crate::error::{PeError, Result};
use crate::field::ReducedField;
use crate::grid::SimulationGrid;
use crate::propagator::{terrain_mask_in_place, AbsorberWindow, AngleMode, BoundarySpec};
use crate::refractivity::RefractivityField;
use crate::source::{imaged_gaussian_field, AntennaSpec};
use crate::terrain::{ground_index, height_at, TerrainProfile};

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub grid: SimulationGrid,
    pub antenna: AntennaSpec,
    pub refractivity: RefractivityField,
    pub terrain: Option<TerrainProfile>,
    pub boundary: BoundarySpec,
    /// `None` disables the absorbing layer.
    pub absorber: Option<AbsorberWindow>,
    pub angle_mode: AngleMode,
    /// Record every `output_every`-th range step (step 0 is always kept).
    pub output_every: usize,
    /// Facet reflections per backward field in two-way runs. Only 1 is
    /// supported.
    pub bounce_order: usize,
}

impl Scenario {
    /// Vacuum over a perfect conductor, default absorber, narrow angle.
    pub fn new(grid: SimulationGrid, antenna: AntennaSpec) -> Self {
        let boundary = BoundarySpec::pec(antenna.polarization);
        Self {
            grid,
            antenna,
            refractivity: RefractivityField::vacuum(),
            terrain: None,
            boundary,
            absorber: Some(AbsorberWindow::default()),
            angle_mode: AngleMode::Narrow,
            output_every: 1,
            bounce_order: 1,
        }
    }

    pub fn absorber_fraction(&self) -> f64 {
        self.absorber.map_or(0.0, |a| a.start_fraction)
    }

    /// First height index of the absorbing layer (N when there is none).
    pub fn absorber_start_index(&self) -> usize {
        self.absorber
            .map_or(self.grid.num_height_points, |a| a.start_index(&self.grid).min(self.grid.num_height_points))
    }

    /// Beam waist of the source on this grid.
    pub fn waist(&self) -> f64 {
        self.antenna.waist(self.grid.wavenumber)
    }

    pub fn validate(&self) -> Result<()> {
        if self.output_every == 0 {
            return Err(PeError::ConfigValue("output_every must be at least 1".into()));
        }
        if self.bounce_order != 1 {
            return Err(PeError::Unsupported(format!(
                "bounce order {} (only single facet reflections are implemented)",
                self.bounce_order
            )));
        }
        self.antenna.validate(&self.grid, self.absorber_fraction())?;
        if let Some(t) = &self.terrain {
            let top = self.grid.max_height * (1.0 - self.absorber_fraction());
            if t.max_height() >= top {
                return Err(PeError::Terrain(format!(
                    "terrain peak {} m reaches the absorber starting at {top} m",
                    t.max_height()
                )));
            }
            if let Some(s) = t.median_spacing() {
                if s < self.grid.range_step {
                    log::warn!(
                        "median terrain spacing {s} m is finer than the range step {} m; \
                         the staircase under-resolves the profile",
                        self.grid.range_step
                    );
                }
            }
        }
        Ok(())
    }

    /// Staircase ground index at range step `i`.
    pub fn ground_index_at(&self, i: usize) -> Result<usize> {
        let h = height_at(self.terrain.as_ref(), self.grid.range(i));
        ground_index(h, &self.grid, Some(self.absorber_start_index()))
    }

    /// Imaged Gaussian source at range 0, masked by any terrain there.
    pub fn initial_field(&self) -> Result<ReducedField> {
        let mut u = imaged_gaussian_field(&self.grid, &self.antenna, self.absorber_fraction(), self.boundary.image())?;
        terrain_mask_in_place(&mut u.samples, self.ground_index_at(0)?);
        Ok(u)
    }

    /// Range steps kept in the output.
    pub fn recorded_steps(&self) -> Vec<usize> {
        (0..=self.grid.num_range_steps).step_by(self.output_every.max(1)).collect()
    }
}
