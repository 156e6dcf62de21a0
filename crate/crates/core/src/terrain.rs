//! Path elevation profiles and their staircase rasterization.

use crate::error::{PeError, Result};
use crate::grid::SimulationGrid;

/// Piecewise-linear ground elevation along the path.
#[derive(Clone, Debug, PartialEq)]
pub struct TerrainProfile {
    samples: Vec<(f64, f64)>,
}

impl TerrainProfile {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(PeError::Terrain("empty elevation profile".into()));
        }
        for &(x, h) in &samples {
            if !(x.is_finite() && h.is_finite()) {
                return Err(PeError::Terrain(format!("non-finite sample ({x}, {h})")));
            }
            if h < 0.0 {
                return Err(PeError::Terrain(format!("negative height {h} m at x = {x} m")));
            }
        }
        for w in samples.windows(2) {
            if w[1].0 == w[0].0 {
                return Err(PeError::Terrain(format!("duplicate range {} m", w[0].0)));
            }
            if w[1].0 < w[0].0 {
                return Err(PeError::Terrain(format!("ranges must increase: {} m then {} m", w[0].0, w[1].0)));
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn max_height(&self) -> f64 {
        self.samples.iter().map(|s| s.1).fold(0.0, f64::max)
    }

    /// Median spacing between consecutive samples, if there are at least two.
    pub fn median_spacing(&self) -> Option<f64> {
        let mut gaps: Vec<f64> = self.samples.windows(2).map(|w| w[1].0 - w[0].0).collect();
        if gaps.is_empty() {
            return None;
        }
        gaps.sort_by(f64::total_cmp);
        Some(gaps[gaps.len() / 2])
    }
}

/// Parses two-column `x_m h_m` text, `#` starting a comment.
pub fn ingest_elevation(text: &str) -> Result<TerrainProfile> {
    let mut samples = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 2 {
            return Err(PeError::Terrain(format!(
                "line {}: expected two columns `x h`, found {}",
                idx + 1,
                cols.len()
            )));
        }
        let mut vals = [0.0; 2];
        for (v, s) in vals.iter_mut().zip(&cols) {
            *v = s.parse().map_err(|_| PeError::Terrain(format!("line {}: `{s}` is not a number", idx + 1)))?;
        }
        samples.push((vals[0], vals[1]));
    }
    TerrainProfile::new(samples)
}

/// Ground height at `x`; flat sea when there is no profile.
pub fn height_at(profile: Option<&TerrainProfile>, x: f64) -> f64 {
    let Some(p) = profile else { return 0.0 };
    let s = &p.samples;
    if x <= s[0].0 {
        return s[0].1;
    }
    let last = s[s.len() - 1];
    if x >= last.0 {
        return last.1;
    }
    let i = s.partition_point(|&(xs, _)| xs <= x);
    let (x1, h1) = s[i - 1];
    let (x2, h2) = s[i];
    h1 + (h2 - h1) * (x - x1) / (x2 - x1)
}

/// Relative slack that keeps exact multiples of Δz from rounding up.
const CEIL_SLACK: f64 = 1e-9;

/// First height index above ground at range `x`.
///
/// Uses the ceiling so that no field sample ever sits inside terrain.
pub fn staircase_index(profile: Option<&TerrainProfile>, grid: &SimulationGrid, x: f64) -> Result<usize> {
    ground_index(height_at(profile, x), grid, None)
}

/// Staircase index for a ground height, checked against the absorber start
/// when `absorber_start` is given (as a height index).
pub fn ground_index(h: f64, grid: &SimulationGrid, absorber_start: Option<usize>) -> Result<usize> {
    let ratio = h / grid.height_step;
    let j = (ratio - CEIL_SLACK * ratio.abs().max(1.0)).ceil().max(0.0) as usize;
    let limit = absorber_start.unwrap_or(grid.num_height_points);
    if j > limit {
        return Err(PeError::Terrain(format!("terrain height {h} m reaches the absorber region")));
    }
    Ok(j)
}
