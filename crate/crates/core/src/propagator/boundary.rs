use num_complex::Complex64;

use crate::error::{PeError, Result};
use crate::source::{ImageKind, Polarization};

/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
    Impedance,
}

/// Lower boundary of the column.
///
/// For impedance surfaces the grazing Leontovich condition
/// `∂u/∂z + α·u = 0` holds at `z = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySpec {
    pub kind: BoundaryKind,
    /// Relative complex permittivity, when the surface was described by one.
    pub permittivity: Option<Complex64>,
    /// Impedance coefficient α, 1/m. Zero for Dirichlet/Neumann.
    pub alpha: Complex64,
}

/// `ε_r + i·σ/(ω·ε₀)` for an `exp(-iωt)` time dependence.
pub fn complex_permittivity(epsilon_r: f64, sigma: f64, angular_frequency: f64) -> Complex64 {
    Complex64::new(epsilon_r, sigma / (angular_frequency * EPSILON_0))
}

impl BoundarySpec {
    pub fn dirichlet() -> Self {
        Self { kind: BoundaryKind::Dirichlet, permittivity: None, alpha: Complex64::new(0.0, 0.0) }
    }

    pub fn neumann() -> Self {
        Self { kind: BoundaryKind::Neumann, permittivity: None, alpha: Complex64::new(0.0, 0.0) }
    }

    /// Perfect conductor: horizontal polarization sees `u = 0`, vertical
    /// sees `∂u/∂z = 0`.
    pub fn pec(polarization: Polarization) -> Self {
        match polarization {
            Polarization::Horizontal => Self::dirichlet(),
            Polarization::Vertical => Self::neumann(),
        }
    }

    /// Lossy surface of relative permittivity `eps_c` at wavenumber `k`.
    pub fn impedance(eps_c: Complex64, polarization: Polarization, k: f64) -> Result<Self> {
        if !(eps_c.re.is_finite() && eps_c.im.is_finite()) {
            return Err(PeError::Boundary(format!("non-finite permittivity {eps_c}")));
        }
        if eps_c.im < 0.0 {
            return Err(PeError::Boundary(format!(
                "permittivity {eps_c} describes an active surface (negative imaginary part)"
            )));
        }
        let root = (eps_c - 1.0).sqrt();
        let ik = Complex64::new(0.0, k);
        let alpha = match polarization {
            Polarization::Horizontal => ik * root,
            Polarization::Vertical => ik * root / eps_c,
        };
        let mut spec = Self::impedance_from_alpha(alpha)?;
        spec.permittivity = Some(eps_c);
        Ok(spec)
    }

    /// Impedance surface given directly by α.
    ///
    /// Passive surfaces satisfy `Im α ≥ 0`: the vertical power flux at the
    /// ground, proportional to `Im(u*·∂u/∂z) = -Im α·|u|²`, then points into
    /// the surface.
    pub fn impedance_from_alpha(alpha: Complex64) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(PeError::Boundary(format!("non-finite impedance coefficient {alpha}")));
        }
        if alpha.im < 0.0 {
            return Err(PeError::Boundary(format!(
                "impedance coefficient {alpha} lies in the active half-plane (Im α < 0)"
            )));
        }
        Ok(Self { kind: BoundaryKind::Impedance, permittivity: None, alpha })
    }

    /// Ground image used when folding the initial field.
    pub fn image(&self) -> Option<ImageKind> {
        match self.kind {
            BoundaryKind::Dirichlet => Some(ImageKind::Dirichlet),
            BoundaryKind::Neumann => Some(ImageKind::Neumann),
            BoundaryKind::Impedance => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sea_water_coefficients() {
        let k = crate::grid::wavenumber(3e9);
        let omega = 2.0 * std::f64::consts::PI * 3e9;
        let eps = complex_permittivity(70.0, 5.0, omega);
        // σ/(ωε₀) = 5 / (1.88496e10 · 8.85419e-12) = 29.958
        assert!((eps.im - 29.958).abs() < 1e-3);
        let h = BoundarySpec::impedance(eps, Polarization::Horizontal, k).unwrap();
        let v = BoundarySpec::impedance(eps, Polarization::Vertical, k).unwrap();
        assert!(h.alpha.im > 0.0 && v.alpha.im > 0.0);
        // horizontal: no decaying surface mode; vertical: a weakly bound one
        assert!(h.alpha.re < 0.0);
        assert!(v.alpha.re > 0.0);
        assert!((h.alpha - Complex64::new(0.0, k) * (eps - 1.0).sqrt()).norm() < 1e-9);
    }

    #[test]
    fn active_surfaces_rejected() {
        let k = 10.0;
        assert!(BoundarySpec::impedance(Complex64::new(10.0, -1.0), Polarization::Horizontal, k).is_err());
        assert!(BoundarySpec::impedance_from_alpha(Complex64::new(1.0, -0.1)).is_err());
        assert!(BoundarySpec::impedance_from_alpha(Complex64::new(f64::NAN, 0.0)).is_err());
        assert!(BoundarySpec::impedance_from_alpha(Complex64::new(-3.0, 2.0)).is_ok());
    }

    #[test]
    fn pec_mapping() {
        assert_eq!(BoundarySpec::pec(Polarization::Horizontal).kind, BoundaryKind::Dirichlet);
        assert_eq!(BoundarySpec::pec(Polarization::Vertical).kind, BoundaryKind::Neumann);
        assert_eq!(BoundarySpec::dirichlet().image(), Some(ImageKind::Dirichlet));
    }
}
