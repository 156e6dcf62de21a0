//! Propagation factor and path loss rasters.

use crate::error::{PeError, Result};
use crate::oracles::on_axis_amplitude;
use crate::propagator::PropagationResult;
use crate::scenario::Scenario;

/// Display floor for dB values.
pub const DB_FLOOR: f64 = -200.0;
/// Marks samples inside terrain.
pub const TERRAIN_SENTINEL: f64 = -999.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// Field relative to the same antenna in free space, dB.
    PropagationFactor,
    /// Free-space loss minus propagation factor, dB.
    PathLoss,
    /// `|u|`, linear.
    Magnitude,
}

impl Quantity {
    pub fn code(self) -> u32 {
        match self {
            Quantity::PropagationFactor => 0,
            Quantity::PathLoss => 1,
            Quantity::Magnitude => 2,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        match code {
            0 => Some(Quantity::PropagationFactor),
            1 => Some(Quantity::PathLoss),
            2 => Some(Quantity::Magnitude),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Quantity::PropagationFactor => "propagation_factor",
            Quantity::PathLoss => "path_loss",
            Quantity::Magnitude => "magnitude",
        }
    }
}

/// Regular raster, one column per recorded range, ground first.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageMap {
    pub quantity: Quantity,
    pub x0: f64,
    pub dx: f64,
    pub z0: f64,
    pub dz: f64,
    pub n_range: usize,
    pub n_height: usize,
    /// Column-major: `values[i * n_height + j]`.
    pub values: Vec<f64>,
}

impl CoverageMap {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_height + j]
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_height..(i + 1) * self.n_height]
    }

    pub fn range(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn height(&self, j: usize) -> f64 {
        self.z0 + j as f64 * self.dz
    }
}

fn to_db(ratio: f64) -> f64 {
    if ratio > 0.0 {
        (20.0 * ratio.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

fn raster(result: &PropagationResult, quantity: Quantity, f: impl Fn(usize, f64) -> f64) -> CoverageMap {
    let n = result.grid.num_height_points;
    let mut values = Vec::with_capacity(n * result.columns.len());
    for (i, col) in result.columns.iter().enumerate() {
        let ground = result.ground_indices[i];
        values.extend(col.iter().enumerate().map(|(j, u)| if j < ground { TERRAIN_SENTINEL } else { f(i, u.norm()) }));
    }
    let stride = match result.steps.as_slice() {
        [a, b, ..] => b - a,
        _ => 1,
    };
    CoverageMap {
        quantity,
        x0: result.grid.range(result.steps.first().copied().unwrap_or(0)),
        dx: stride as f64 * result.grid.range_step,
        z0: 0.0,
        dz: result.grid.height_step,
        n_range: result.columns.len(),
        n_height: n,
        values,
    }
}

/// `20·log₁₀(|u| / A_fs(x))`, with `A_fs` the on-axis free-space amplitude
/// of the scenario's source.
pub fn propagation_factor(result: &PropagationResult, scenario: &Scenario) -> Result<CoverageMap> {
    let (k, w0) = (scenario.grid.wavenumber, scenario.waist());
    let reference: Vec<f64> = result.ranges().iter().map(|&x| on_axis_amplitude(x, w0, k)).collect();
    if reference.iter().any(|a| a.is_nan() || *a <= 0.0) {
        return Err(PeError::Source("free-space reference amplitude vanished".into()));
    }
    Ok(raster(result, Quantity::PropagationFactor, |i, m| to_db(m / reference[i])))
}

/// `|u|` raster.
pub fn magnitude_map(result: &PropagationResult) -> CoverageMap {
    raster(result, Quantity::Magnitude, |_, m| m)
}

/// Friis free-space loss `20·log₁₀(4πx/λ)`, dB.
pub fn free_space_loss(x: f64, frequency_hz: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * x / crate::grid::wavelength(frequency_hz)).log10()
}

/// Free-space loss minus propagation factor. The `x = 0` column is dropped.
pub fn path_loss(pf: &CoverageMap, frequency_hz: f64) -> Result<CoverageMap> {
    if pf.quantity != Quantity::PropagationFactor {
        return Err(PeError::Unsupported(format!(
            "path loss needs a propagation factor map, got {}",
            pf.quantity.name()
        )));
    }
    let skip = usize::from(pf.x0 <= 0.0);
    let mut values = Vec::with_capacity(pf.values.len());
    for i in skip..pf.n_range {
        let fsl = free_space_loss(pf.range(i), frequency_hz);
        values.extend(pf.column(i).iter().map(|&v| if v == TERRAIN_SENTINEL { v } else { fsl - v }));
    }
    Ok(CoverageMap { quantity: Quantity::PathLoss, x0: pf.range(skip), n_range: pf.n_range - skip, values, ..*pf })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pf_map(values: Vec<f64>, n_range: usize) -> CoverageMap {
        CoverageMap {
            quantity: Quantity::PropagationFactor,
            x0: 0.0,
            dx: 5000.0,
            z0: 0.0,
            dz: 1.0,
            n_range,
            n_height: values.len() / n_range,
            values,
        }
    }

    #[test]
    fn free_space_reference_at_ten_km() {
        // 20·log₁₀(4π·10⁴ / 0.0999308) computed independently
        assert!((free_space_loss(1e4, 3e9) - 121.99020831627662).abs() < 1e-9);
        let doubled = free_space_loss(2e4, 3e9) - free_space_loss(1e4, 3e9);
        assert!((doubled - 20.0 * 2f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn path_loss_drops_range_zero_and_subtracts_pf() {
        let pf = pf_map(vec![0.0, 0.0, 0.0, 6.02, -10.0, TERRAIN_SENTINEL], 3);
        let pl = path_loss(&pf, 3e9).unwrap();
        assert_eq!(pl.n_range, 2);
        assert_eq!(pl.x0, 5000.0);
        let fsl = free_space_loss(5000.0, 3e9);
        assert_eq!(pl.value(0, 0), fsl);
        assert!((pl.value(0, 1) - (fsl - 6.02)).abs() < 1e-12);
        assert_eq!(pl.value(1, 1), TERRAIN_SENTINEL);
        assert!(pl.value(1, 0) > pl.value(0, 0));
    }

    #[test]
    fn path_loss_rejects_other_quantities() {
        let mut m = pf_map(vec![1.0; 4], 2);
        m.quantity = Quantity::Magnitude;
        assert!(path_loss(&m, 1e9).is_err());
    }

    #[test]
    fn db_floor() {
        assert_eq!(to_db(0.0), DB_FLOOR);
        assert_eq!(to_db(1e-30), DB_FLOOR);
        assert!((to_db(2.0) - 6.020599913279624).abs() < 1e-12);
    }

    #[test]
    fn quantity_codes_round_trip() {
        for q in [Quantity::PropagationFactor, Quantity::PathLoss, Quantity::Magnitude] {
            assert_eq!(Quantity::from_code(q.code()), Some(q));
        }
        assert_eq!(Quantity::from_code(7), None);
    }
}
