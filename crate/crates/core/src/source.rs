//! Gaussian-beam initial fields.

use num_complex::Complex64;

use crate::error::{PeError, Result};
use crate::field::ReducedField;
use crate::grid::SimulationGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarization {
    Horizontal,
    Vertical,
}

/// How the initial field is folded against the ground.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageKind {
    /// Odd extension, `u(0) = 0`.
    Dirichlet,
    /// Even extension.
    Neumann,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AntennaSpec {
    pub height: f64,
    /// Half-power full beamwidth, degrees.
    pub beamwidth_deg: f64,
    /// Elevation tilt, degrees, positive up.
    pub elevation_deg: f64,
    pub polarization: Polarization,
}

impl AntennaSpec {
    /// 1/e half-width of the aperture field for wavenumber `k`.
    pub fn waist(&self, k: f64) -> f64 {
        (2.0 * std::f64::consts::LN_2).sqrt() / (k * (0.5 * self.beamwidth_deg).to_radians().sin())
    }

    pub fn validate(&self, grid: &SimulationGrid, absorber_fraction: f64) -> Result<()> {
        let top = grid.max_height * (1.0 - absorber_fraction);
        if !(self.height > 0.0 && self.height < top) {
            return Err(PeError::Source(format!(
                "antenna height {} m must lie inside (0, {top}) m below the absorber",
                self.height
            )));
        }
        if !(self.beamwidth_deg > 0.0 && self.beamwidth_deg < 45.0) {
            return Err(PeError::Source(format!("beamwidth {} deg must lie in (0, 45)", self.beamwidth_deg)));
        }
        if self.elevation_deg.is_nan() || self.elevation_deg.abs() > grid.max_angle_deg {
            return Err(PeError::Source(format!(
                "elevation {} deg exceeds the grid's maximum angle {} deg",
                self.elevation_deg, grid.max_angle_deg
            )));
        }
        Ok(())
    }
}

/// Relative amplitude at which the beam is considered to touch the absorber.
const ABSORBER_TOUCH_LEVEL: f64 = 1e-3;

/// Un-imaged Gaussian aperture field at range 0, unit peak.
pub fn gaussian_initial_field(
    grid: &SimulationGrid,
    antenna: &AntennaSpec,
    absorber_fraction: f64,
) -> Result<ReducedField> {
    antenna.validate(grid, absorber_fraction)?;
    let k = grid.wavenumber;
    let w0 = antenna.waist(k);
    let z_abs = grid.max_height * (1.0 - absorber_fraction);
    let gap = (z_abs - antenna.height) / w0;
    if (-gap * gap).exp() > ABSORBER_TOUCH_LEVEL {
        return Err(PeError::Source(format!(
            "beam (waist {w0:.3} m) at {} m reaches into the absorber starting at {z_abs} m",
            antenna.height
        )));
    }
    if w0 < grid.height_step {
        log::warn!("beam waist {w0:.4} m is below the height step {} m", grid.height_step);
    }
    let tilt = k * antenna.elevation_deg.to_radians().sin();
    let samples = (0..grid.num_height_points)
        .map(|j| {
            let dz = grid.height(j) - antenna.height;
            Complex64::from_polar((-(dz * dz) / (w0 * w0)).exp(), tilt * dz)
        })
        .collect();
    Ok(ReducedField::new(0.0, samples))
}

/// Folds the ground image into an aperture field: `u(z) ∓ a(-z)`.
///
/// The field is only sampled for `z ≥ 0`, so the aperture values below the
/// ground come from `aperture`, the closed form that generated `field`.
pub fn apply_ground_image<F>(field: &ReducedField, grid: &SimulationGrid, kind: ImageKind, aperture: F) -> ReducedField
where
    F: Fn(f64) -> Complex64,
{
    let sign = match kind {
        ImageKind::Dirichlet => -1.0,
        ImageKind::Neumann => 1.0,
    };
    let mut out = field.clone();
    for (j, s) in out.samples.iter_mut().enumerate() {
        *s += aperture(-grid.height(j)) * sign;
    }
    if kind == ImageKind::Dirichlet {
        out.samples[0] = Complex64::new(0.0, 0.0);
    }
    out
}

/// Aperture field of `antenna` at an arbitrary height, matching
/// [`gaussian_initial_field`].
pub fn gaussian_aperture(antenna: &AntennaSpec, k: f64) -> impl Fn(f64) -> Complex64 {
    let w0 = antenna.waist(k);
    let tilt = k * antenna.elevation_deg.to_radians().sin();
    let zs = antenna.height;
    move |z: f64| {
        let dz = z - zs;
        Complex64::from_polar((-(dz * dz) / (w0 * w0)).exp(), tilt * dz)
    }
}

/// Imaged Gaussian initial field for the given ground treatment.
pub fn imaged_gaussian_field(
    grid: &SimulationGrid,
    antenna: &AntennaSpec,
    absorber_fraction: f64,
    image: Option<ImageKind>,
) -> Result<ReducedField> {
    let direct = gaussian_initial_field(grid, antenna, absorber_fraction)?;
    Ok(match image {
        Some(kind) => apply_ground_image(&direct, grid, kind, gaussian_aperture(antenna, grid.wavenumber)),
        None => direct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, GridSpec};

    fn grid() -> SimulationGrid {
        build_grid(&GridSpec {
            frequency_hz: 3e9,
            max_range_m: 1000.0,
            range_step_m: 10.0,
            max_height_m: 256.0,
            num_height_points: 2048,
            max_angle_deg: 15.0,
        })
        .unwrap()
    }

    fn antenna(h: f64, elev: f64) -> AntennaSpec {
        AntennaSpec { height: h, beamwidth_deg: 3.0, elevation_deg: elev, polarization: Polarization::Horizontal }
    }

    #[test]
    fn untilted_beam_is_real_and_peaks_at_source() {
        let g = grid();
        let u = gaussian_initial_field(&g, &antenna(100.0, 0.0), 0.25).unwrap();
        let (jmax, _) = u.samples.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap();
        assert_eq!(g.height(jmax), 100.0);
        assert!(u.samples.iter().all(|c| c.im == 0.0));
        assert_eq!(u.samples[jmax].re, 1.0);
    }

    #[test]
    fn amplitude_at_one_waist_is_one_over_e() {
        let g = grid();
        let a = antenna(100.0, 0.0);
        let w0 = a.waist(g.wavenumber);
        let u = gaussian_initial_field(&g, &a, 0.25).unwrap();
        // linear interpolation between samples bracketing z_s + w0
        let z = 100.0 + w0;
        let t = z / g.height_step;
        let j = t.floor() as usize;
        let f = t - j as f64;
        let amp = u.samples[j].norm() * (1.0 - f) + u.samples[j + 1].norm() * f;
        // linear interpolation error is at most Δz²/8·max|g''| ≤ Δz²/(4w₀²)
        let bound = g.height_step.powi(2) / (4.0 * w0 * w0);
        assert!((amp - (-1.0f64).exp()).abs() <= bound, "{amp} vs bound {bound}");
    }

    #[test]
    fn tilt_is_a_linear_phase() {
        let g = grid();
        let a = antenna(100.0, 2.0);
        let u = gaussian_initial_field(&g, &a, 0.25).unwrap();
        let j0 = (100.0 / g.height_step) as usize;
        let dphi = (u.samples[j0 + 1] / u.samples[j0]).arg();
        let expect = g.wavenumber * 2f64.to_radians().sin() * g.height_step;
        assert!((dphi - expect).abs() < 1e-12);
    }

    #[test]
    fn invalid_antennas() {
        let g = grid();
        assert!(gaussian_initial_field(&g, &antenna(0.0, 0.0), 0.25).is_err());
        assert!(gaussian_initial_field(&g, &antenna(200.0, 0.0), 0.25).is_err());
        assert!(gaussian_initial_field(&g, &antenna(100.0, 20.0), 0.25).is_err());
        let mut wide = antenna(100.0, 0.0);
        wide.beamwidth_deg = 50.0;
        assert!(gaussian_initial_field(&g, &wide, 0.25).is_err());
        // foot of the beam inside the absorber (starts at 192 m)
        let near_top = antenna(191.5, 0.0);
        let err = gaussian_initial_field(&g, &near_top, 0.25).unwrap_err();
        assert!(err.to_string().contains("absorber"));
    }

    #[test]
    fn dirichlet_image_zeroes_ground_sample() {
        let g = grid();
        let a = antenna(1.0, 0.0);
        let u = imaged_gaussian_field(&g, &a, 0.25, Some(ImageKind::Dirichlet)).unwrap();
        assert_eq!(u.samples[0], Complex64::new(0.0, 0.0));
        assert!(u.norm() > 0.0 && u.is_finite());
    }

    #[test]
    fn distant_image_barely_changes_field() {
        let g = grid();
        let a = antenna(3.0, 0.0);
        let w0 = a.waist(g.wavenumber);
        let raw = gaussian_initial_field(&g, &a, 0.25).unwrap();
        let img = apply_ground_image(&raw, &g, ImageKind::Dirichlet, gaussian_aperture(&a, g.wavenumber));
        let bound = (-(3.0 / w0).powi(2)).exp();
        let dev = raw.samples.iter().zip(&img.samples).skip(1).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(dev < bound, "{dev} vs {bound}");
    }

    #[test]
    fn neumann_image_doubles_grounded_source() {
        let g = grid();
        let a = antenna(g.height_step, 0.0);
        let raw = gaussian_initial_field(&g, &a, 0.25).unwrap();
        let img = imaged_gaussian_field(&g, &a, 0.25, Some(ImageKind::Neumann)).unwrap();
        // at z = 0 the direct and image terms coincide
        assert!((img.samples[0].norm() - 2.0 * raw.samples[0].norm()).abs() < 1e-12);
        assert!(img.samples[1].norm() > raw.samples[1].norm());
    }
}
