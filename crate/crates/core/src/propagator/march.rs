//! Range marching: one-way and single-bounce two-way.

use std::borrow::Cow;

use num_complex::Complex64;

use super::spectral::{refraction_step, SpectralStepper};
use crate::error::{PeError, Result};
use crate::field::{l2_norm, ReducedField};
use crate::grid::SimulationGrid;
use crate::scenario::Scenario;

/// State after one range step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    pub range: f64,
    /// L2 norm of the forward field after masking and absorption.
    pub norm: f64,
    pub ground_index: usize,
}

/// A backward field launched where the ground rises.
#[derive(Clone, Debug, PartialEq)]
pub struct SpawnRecord {
    pub step: usize,
    pub range: f64,
    /// Rows `lower..upper` of the new facet.
    pub lower: usize,
    pub upper: usize,
    /// Forward field that hit the facet, rows `lower..upper`.
    pub incident: Vec<Complex64>,
    /// Backward field norm after its first step.
    pub first_step_norm: f64,
}

impl SpawnRecord {
    pub fn clip_energy(&self) -> f64 {
        self.incident.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Which solver produced a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    SplitStep,
    CrankNicolson,
}

/// Recorded columns of a march and its diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct PropagationResult {
    pub grid: SimulationGrid,
    pub solver: SolverKind,
    /// Range step index of each recorded column.
    pub steps: Vec<usize>,
    /// Total field `u₊ + u₋` per recorded column.
    pub columns: Vec<Vec<Complex64>>,
    /// Ground index per recorded column.
    pub ground_indices: Vec<usize>,
    /// One entry per range step, step 0 included.
    pub diagnostics: Vec<StepDiagnostics>,
    /// Backward contribution per recorded column (two-way runs only).
    pub backward: Option<Vec<Vec<Complex64>>>,
    pub spawns: Vec<SpawnRecord>,
}

impl PropagationResult {
    pub fn ranges(&self) -> Vec<f64> {
        self.steps.iter().map(|&i| self.grid.range(i)).collect()
    }

    pub fn is_two_way(&self) -> bool {
        self.backward.is_some()
    }

    /// `|u|` per recorded column.
    pub fn magnitudes(&self) -> Vec<Vec<f64>> {
        self.columns.iter().map(|c| c.iter().map(|s| s.norm()).collect()).collect()
    }

    /// Forward-only field of recorded column `i`.
    pub fn forward_column(&self, i: usize) -> Vec<Complex64> {
        match &self.backward {
            Some(b) => self.columns[i].iter().zip(&b[i]).map(|(t, r)| t - r).collect(),
            None => self.columns[i].clone(),
        }
    }

    /// Smallest and largest per-step norm.
    pub fn norm_bounds(&self) -> (f64, f64) {
        self.diagnostics.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d.norm), hi.max(d.norm)))
    }
}

/// Zeroes rows below `j_ground` and returns what was removed.
pub fn terrain_mask(field: &ReducedField, j_ground: usize) -> (ReducedField, Vec<Complex64>) {
    let mut out = field.clone();
    let clip = terrain_mask_in_place(&mut out.samples, j_ground);
    (out, clip)
}

pub(crate) fn terrain_mask_in_place(u: &mut [Complex64], j_ground: usize) -> Vec<Complex64> {
    let j = j_ground.min(u.len());
    let clip = u[..j].to_vec();
    u[..j].fill(Complex64::new(0.0, 0.0));
    clip
}

pub(crate) fn check_finite(u: &[Complex64], step: usize, grid: &SimulationGrid) -> Result<()> {
    if u.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(PeError::NonFinite { step, range_m: grid.range(step) })
    }
}

/// Per-scenario step machinery shared by the forward and backward sweeps.
struct Engine<'a> {
    scenario: &'a Scenario,
    stepper: SpectralStepper,
    weights: Option<Vec<f64>>,
    fixed_column: Option<Vec<f64>>,
    grounds: Vec<usize>,
}

impl<'a> Engine<'a> {
    fn new(scenario: &'a Scenario) -> Result<Self> {
        scenario.validate()?;
        let grid = &scenario.grid;
        let stepper = SpectralStepper::for_boundary(grid, grid.range_step, scenario.angle_mode, &scenario.boundary)?;
        let fixed_column = if scenario.refractivity.is_range_independent() {
            Some(scenario.refractivity.sample_column(grid, 0.0)?)
        } else {
            None
        };
        let grounds = (0..=grid.num_range_steps).map(|i| scenario.ground_index_at(i)).collect::<Result<Vec<_>>>()?;
        Ok(Self { scenario, stepper, weights: scenario.absorber.map(|a| a.weights(grid)), fixed_column, grounds })
    }

    fn column(&self, step: usize) -> Result<Cow<'_, [f64]>> {
        match &self.fixed_column {
            Some(c) => Ok(Cow::Borrowed(c)),
            None => Ok(Cow::Owned(
                self.scenario.refractivity.sample_column(&self.scenario.grid, self.scenario.grid.range(step))?,
            )),
        }
    }

    /// Half screen at `from`, free-space step, half screen at `to`.
    fn advance(&self, u: &mut [Complex64], from: usize, to: usize) -> Result<()> {
        let grid = &self.scenario.grid;
        let half = 0.5 * grid.range_step;
        refraction_step(u, &self.column(from)?, half, grid.wavenumber);
        self.stepper.step(u);
        refraction_step(u, &self.column(to)?, half, grid.wavenumber);
        Ok(())
    }

    fn absorb(&self, u: &mut [Complex64]) {
        if let Some(w) = &self.weights {
            for (s, w) in u.iter_mut().zip(w) {
                *s *= w;
            }
        }
    }
}

/// One-way split-step march.
pub fn march(scenario: &Scenario) -> Result<PropagationResult> {
    run(scenario, false)
}

/// Forward march plus single-bounce backward fields from terrain facets.
pub fn march_two_way(scenario: &Scenario) -> Result<PropagationResult> {
    run(scenario, true)
}

fn run(scenario: &Scenario, two_way: bool) -> Result<PropagationResult> {
    let engine = Engine::new(scenario)?;
    let grid = &scenario.grid;
    let stride = scenario.output_every;

    let mut u = scenario.initial_field()?.samples;
    check_finite(&u, 0, grid)?;

    let mut steps = vec![0];
    let mut columns = vec![u.clone()];
    let mut diagnostics =
        vec![StepDiagnostics { step: 0, range: 0.0, norm: l2_norm(&u), ground_index: engine.grounds[0] }];
    let mut spawns = Vec::new();

    for i in 1..=grid.num_range_steps {
        engine.advance(&mut u, i - 1, i)?;
        let (below, ground) = (engine.grounds[i - 1], engine.grounds[i]);
        let clip = terrain_mask_in_place(&mut u, ground);
        if two_way && ground > below {
            spawns.push(SpawnRecord {
                step: i,
                range: grid.range(i),
                lower: below,
                upper: ground,
                incident: clip[below..ground].to_vec(),
                first_step_norm: 0.0,
            });
        }
        engine.absorb(&mut u);
        check_finite(&u, i, grid)?;
        diagnostics.push(StepDiagnostics { step: i, range: grid.range(i), norm: l2_norm(&u), ground_index: ground });
        if i % stride == 0 {
            steps.push(i);
            columns.push(u.clone());
        }
    }

    let backward = if two_way { Some(backward_sweep(&engine, &steps, &mut columns, &mut spawns)?) } else { None };

    let ground_indices = steps.iter().map(|&i| engine.grounds[i]).collect();
    Ok(PropagationResult {
        grid: grid.clone(),
        solver: SolverKind::SplitStep,
        steps,
        columns,
        ground_indices,
        diagnostics,
        backward,
        spawns,
    })
}

/// Marches all backward fields toward the source in one linear sweep.
///
/// A facet at `x_w` reflects `ψ₋ = -ψ₊`; in reduced form the backward
/// field at `x` is `u₋ = e^{2ik(x_w - x)}·v`, where `v` starts at
/// `-incident` and advances with the forward envelope step per unit of
/// backward distance. The sweep carries `Σ e^{2ik·x_w}·v` and applies
/// `e^{-2ik·x}` when adding into a column. The facet column itself keeps
/// the masked (zero) total.
fn backward_sweep(
    engine: &Engine<'_>,
    steps: &[usize],
    columns: &mut [Vec<Complex64>],
    spawns: &mut [SpawnRecord],
) -> Result<Vec<Vec<Complex64>>> {
    let grid = &engine.scenario.grid;
    let n = grid.num_height_points;
    let k = grid.wavenumber;
    let mut backward = vec![vec![Complex64::new(0.0, 0.0); n]; steps.len()];
    let Some(last) = spawns.last().map(|s| s.step) else {
        return Ok(backward);
    };

    let mut carried = vec![Complex64::new(0.0, 0.0); n];
    let mut active = false;
    let mut next_spawn = spawns.len();
    let mut pending_first_step: Vec<usize> = Vec::new();

    for i in (0..=last).rev() {
        if active {
            engine.advance(&mut carried, i + 1, i)?;
            terrain_mask_in_place(&mut carried, engine.grounds[i]);
            engine.absorb(&mut carried);
            check_finite(&carried, i, grid)?;
            for s in pending_first_step.drain(..) {
                spawns[s].first_step_norm = l2_norm(&carried);
            }
            if let Ok(r) = steps.binary_search(&i) {
                let phase = Complex64::from_polar(1.0, -2.0 * k * grid.range(i));
                for ((t, b), c) in columns[r].iter_mut().zip(backward[r].iter_mut()).zip(&carried) {
                    let v = c * phase;
                    *b = v;
                    *t += v;
                }
            }
        }
        while next_spawn > 0 && spawns[next_spawn - 1].step == i {
            next_spawn -= 1;
            let s = &spawns[next_spawn];
            let phase = Complex64::from_polar(1.0, 2.0 * k * s.range);
            for (row, inc) in (s.lower..s.upper).zip(&s.incident) {
                carried[row] -= inc * phase;
            }
            pending_first_step.push(next_spawn);
            active = true;
        }
    }
    Ok(backward)
}
