use num_complex::Complex64;

use crate::error::{PeError, Result};

/// Closed-form paraxial Gaussian beam in free space, unit peak at `x = 0`.
///
/// `u = (1 + 2ix/(k·w₀²))^{-1/2} · exp(-(z - z_s)²/(w₀² + 2ix/k))`
pub fn freespace_gaussian(x: f64, z: f64, zs: f64, w0: f64, k: f64) -> Complex64 {
    let q = Complex64::new(1.0, 2.0 * x / (k * w0 * w0));
    let d = z - zs;
    let width = Complex64::new(w0 * w0, 2.0 * x / k);
    (-(d * d) / width).exp() / q.sqrt()
}

/// Gaussian plus its odd ground image: the exact narrow-angle field over a
/// perfectly conducting ground for horizontal polarization.
pub fn imaged_freespace_gaussian(x: f64, z: f64, zs: f64, w0: f64, k: f64) -> Complex64 {
    freespace_gaussian(x, z, zs, w0, k) - freespace_gaussian(x, z, -zs, w0, k)
}

/// `|u|` on the beam axis: `(1 + (2x/(k·w₀²))²)^{-1/4}`.
pub fn on_axis_amplitude(x: f64, w0: f64, k: f64) -> f64 {
    let r = 2.0 * x / (k * w0 * w0);
    (1.0 + r * r).powf(-0.25)
}

/// 1/e half-width of the beam at range `x`.
pub fn beam_half_width(x: f64, w0: f64, k: f64) -> f64 {
    let r = 2.0 * x / (k * w0 * w0);
    w0 * (1.0 + r * r).sqrt()
}

/// Direct and ground-reflected rays between two heights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoRayGeometry {
    pub source_height: f64,
    pub receiver_height: f64,
    pub range: f64,
    pub wavenumber: f64,
}

/// Linear propagation factor `2·|sin(k·z_s·z/x)|` over a perfect conductor
/// (reflection coefficient -1).
pub fn two_ray_factor(geom: &TwoRayGeometry) -> Result<f64> {
    if geom.range.is_nan() || geom.range <= 0.0 {
        return Err(PeError::Unsupported(format!("two-ray range must be positive, got {}", geom.range)));
    }
    if geom.source_height < 0.0 || geom.receiver_height < 0.0 {
        return Err(PeError::Unsupported("two-ray heights must be non-negative".into()));
    }
    let phase = geom.wavenumber * geom.source_height * geom.receiver_height / geom.range;
    Ok(2.0 * phase.sin().abs())
}
