//! Running a configured scenario end to end.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{ScenarioConfig, Solver};
use crate::error::Result;
use crate::oracles::cn_fd_march;
use crate::pefm;
use crate::postprocess::{magnitude_map, path_loss, propagation_factor, CoverageMap, Quantity};
use crate::propagator::{march, march_two_way, PropagationResult};
use crate::scenario::Scenario;

/// What a run produced.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub map_path: PathBuf,
    pub manifest_path: PathBuf,
    pub n_range: usize,
    pub n_height: usize,
    pub norm_min: f64,
    pub norm_max: f64,
    pub seconds: f64,
}

/// Runs the configured solver on an assembled scenario.
pub fn solve(config: &ScenarioConfig, scenario: &Scenario) -> Result<PropagationResult> {
    match (config.solver, config.two_way) {
        (Solver::CrankNicolson, _) => cn_fd_march(scenario),
        (Solver::SplitStep, true) => march_two_way(scenario),
        (Solver::SplitStep, false) => march(scenario),
    }
}

/// Raster of the configured output quantity.
pub fn coverage(config: &ScenarioConfig, scenario: &Scenario, result: &PropagationResult) -> Result<CoverageMap> {
    match config.quantity {
        Quantity::PropagationFactor => propagation_factor(result, scenario),
        Quantity::PathLoss => path_loss(&propagation_factor(result, scenario)?, config.frequency_hz),
        Quantity::Magnitude => Ok(magnitude_map(result)),
    }
}

/// Manifest written next to a field map.
pub fn manifest_path(map_path: &Path) -> PathBuf {
    let mut s = map_path.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

/// Solves `config` and writes the field map plus its manifest. Both files
/// are written atomically; on error nothing is left at `out`.
pub fn run_scenario(config: &ScenarioConfig, base_dir: &Path, out: &Path) -> Result<RunSummary> {
    let start = Instant::now();
    let scenario = config.to_scenario(base_dir)?;
    let result = solve(config, &scenario)?;
    let map = coverage(config, &scenario, &result)?;
    let seconds = start.elapsed().as_secs_f64();
    let (norm_min, norm_max) = result.norm_bounds();

    let g = &scenario.grid;
    let mut m = String::new();
    let _ = writeln!(m, "# configuration");
    m.push_str(&config.serialize());
    let _ = writeln!(m, "\n# derived grid");
    let _ = writeln!(m, "wavenumber_rad_per_m = {}", g.wavenumber);
    let _ = writeln!(m, "wavelength_m = {}", g.wavelength());
    let _ = writeln!(m, "height_step_m = {}", g.height_step);
    let _ = writeln!(m, "num_range_steps = {}", g.num_range_steps);
    let _ = writeln!(m, "beam_waist_m = {}", scenario.waist());
    let _ = writeln!(m, "\n# run");
    let _ = writeln!(m, "recorded_columns = {}", result.columns.len());
    let _ = writeln!(m, "backward_fields = {}", result.spawns.len());
    let _ = writeln!(m, "step_norm_min = {norm_min}");
    let _ = writeln!(m, "step_norm_max = {norm_max}");
    let _ = writeln!(m, "wall_clock_s = {seconds:.3}");

    pefm::write_file(out, &map)?;
    let manifest = manifest_path(out);
    pefm::write_atomic(&manifest, m.as_bytes())?;
    Ok(RunSummary {
        map_path: out.to_path_buf(),
        manifest_path: manifest,
        n_range: map.n_range,
        n_height: map.n_height,
        norm_min,
        norm_max,
        seconds,
    })
}
