//! Refraction phase screens and free-space spectral steps.

use num_complex::Complex64;

use super::boundary::{BoundaryKind, BoundarySpec};
use super::dmft::DmftStepper;
use crate::error::{PeError, Result};
use crate::field::ReducedField;
use crate::grid::SimulationGrid;
use crate::transform::Transformer;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngleMode {
    /// Quadratic (paraxial) expansion of the square-root operator.
    Narrow,
    /// Full square-root symbol.
    Wide,
}

/// `sqrt` on the branch with non-negative imaginary part, so evanescent
/// components decay in the marching direction.
pub(crate) fn passive_sqrt(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// Multiplier advancing a mode of vertical wavenumber `p` by `dx`.
///
/// `p_sq` is `p²`; it may be complex (impedance surface modes).
pub fn propagation_symbol(p_sq: Complex64, k: f64, dx: f64, mode: AngleMode) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    match mode {
        AngleMode::Narrow => (-i * p_sq * (dx / (2.0 * k))).exp(),
        AngleMode::Wide => {
            let kz = passive_sqrt(Complex64::new(k * k, 0.0) - p_sq);
            (i * dx * (kz - k)).exp()
        }
    }
}

/// Real-`p` version of [`propagation_symbol`].
///
/// For the wide mode `p > k` gives `exp(-Δx·√(p²-k²))·exp(-ikΔx)`.
pub fn real_symbol(p: f64, k: f64, dx: f64, mode: AngleMode) -> Complex64 {
    match mode {
        AngleMode::Narrow => Complex64::from_polar(1.0, -p * p * dx / (2.0 * k)),
        AngleMode::Wide if p <= k => Complex64::from_polar(1.0, dx * ((k * k - p * p).sqrt() - k)),
        AngleMode::Wide => Complex64::from_polar((-dx * (p * p - k * k).sqrt()).exp(), -k * dx),
    }
}

/// Multiplies by `exp(i·k·Δx·M·1e-6)`, the phase screen of `k²(m² - 1)` with
/// `m² - 1 ≈ 2M·1e-6`.
pub fn refraction_step(field: &mut [Complex64], m_column: &[f64], dx: f64, k: f64) {
    debug_assert_eq!(field.len(), m_column.len());
    let scale = k * dx * 1e-6;
    for (u, m) in field.iter_mut().zip(m_column) {
        *u *= Complex64::from_polar(1.0, scale * m);
    }
}

/// Precomputed free-space step for one grid, range step and boundary.
#[derive(Clone, Debug)]
pub struct SpectralStepper {
    inner: StepperKind,
}

#[derive(Clone, Debug)]
enum StepperKind {
    Sine { transformer: Transformer, multipliers: Vec<Complex64> },
    Cosine { transformer: Transformer, multipliers: Vec<Complex64> },
    Impedance(Box<DmftStepper>),
}

impl SpectralStepper {
    /// Stepper for Dirichlet or Neumann boundaries. A negative `dx` steps
    /// backwards (conjugate symbol for propagating modes).
    pub fn new(grid: &SimulationGrid, dx: f64, mode: AngleMode, boundary: &BoundarySpec) -> Result<Self> {
        let n = grid.num_height_points;
        let k = grid.wavenumber;
        let inner = match boundary.kind {
            BoundaryKind::Dirichlet => StepperKind::Sine {
                transformer: Transformer::new(n),
                multipliers: (0..n)
                    .map(|j| {
                        if j == 0 {
                            Complex64::new(0.0, 0.0)
                        } else {
                            real_symbol(grid.sine_wavenumber(j), k, dx, mode)
                        }
                    })
                    .collect(),
            },
            BoundaryKind::Neumann => StepperKind::Cosine {
                transformer: Transformer::new(n),
                multipliers: (0..n).map(|j| real_symbol(grid.cosine_wavenumber(j), k, dx, mode)).collect(),
            },
            BoundaryKind::Impedance => {
                return Err(PeError::Boundary("impedance boundaries step through the mixed transform".into()))
            }
        };
        Ok(Self { inner })
    }

    /// Stepper for any boundary kind, using the mixed transform for
    /// impedance surfaces.
    pub fn for_boundary(grid: &SimulationGrid, dx: f64, mode: AngleMode, boundary: &BoundarySpec) -> Result<Self> {
        match boundary.kind {
            BoundaryKind::Impedance => {
                Ok(Self { inner: StepperKind::Impedance(Box::new(DmftStepper::new(grid, boundary.alpha, dx, mode)?)) })
            }
            _ => Self::new(grid, dx, mode, boundary),
        }
    }

    pub fn step(&self, u: &mut [Complex64]) {
        match &self.inner {
            StepperKind::Sine { transformer, multipliers } => {
                let mut scratch = Vec::new();
                transformer.dst_in_place(u, &mut scratch);
                for (c, m) in u.iter_mut().zip(multipliers) {
                    *c *= m;
                }
                transformer.dst_in_place(u, &mut scratch);
            }
            StepperKind::Cosine { transformer, multipliers } => {
                let mut scratch = Vec::new();
                transformer.cosine_forward_in_place(u, &mut scratch);
                for (c, m) in u.iter_mut().zip(multipliers) {
                    *c *= m;
                }
                transformer.cosine_inverse_in_place(u, &mut scratch);
            }
            StepperKind::Impedance(d) => d.step(u),
        }
    }
}

/// One free-space step of a Dirichlet or Neumann field.
pub fn spectral_step(
    field: &ReducedField,
    grid: &SimulationGrid,
    dx: f64,
    mode: AngleMode,
    boundary: &BoundarySpec,
) -> Result<ReducedField> {
    if field.len() != grid.num_height_points {
        return Err(PeError::LengthMismatch { expected: grid.num_height_points, actual: field.len() });
    }
    let stepper = SpectralStepper::new(grid, dx, mode, boundary)?;
    let mut out = field.clone();
    stepper.step(&mut out.samples);
    out.range += dx;
    Ok(out)
}

/// One free-space step over an impedance surface.
pub fn dmft_step(
    field: &ReducedField,
    grid: &SimulationGrid,
    boundary: &BoundarySpec,
    dx: f64,
    mode: AngleMode,
) -> Result<ReducedField> {
    if boundary.kind != BoundaryKind::Impedance {
        return Err(PeError::Boundary("mixed-transform step needs an impedance boundary".into()));
    }
    if field.len() != grid.num_height_points {
        return Err(PeError::LengthMismatch { expected: grid.num_height_points, actual: field.len() });
    }
    let stepper = DmftStepper::new(grid, boundary.alpha, dx, mode)?;
    let mut out = field.clone();
    stepper.step(&mut out.samples);
    out.range += dx;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{l2_norm, relative_l2};
    use crate::grid::{build_grid, GridSpec};
    use proptest::prelude::*;

    fn grid() -> SimulationGrid {
        build_grid(&GridSpec {
            frequency_hz: 3e8,
            max_range_m: 1000.0,
            range_step_m: 10.0,
            max_height_m: 256.0,
            num_height_points: 256,
            max_angle_deg: 10.0,
        })
        .unwrap()
    }

    fn beam(g: &SimulationGrid) -> ReducedField {
        let s = (0..g.num_height_points)
            .map(|j| {
                let d = (g.height(j) - 100.0) / 8.0;
                Complex64::from_polar((-d * d).exp(), 0.3 * d)
            })
            .collect();
        ReducedField::new(0.0, s)
    }

    fn mode(g: &SimulationGrid, m: usize) -> Vec<Complex64> {
        let p = g.sine_wavenumber(m);
        (0..g.num_height_points).map(|j| Complex64::new((p * g.height(j)).sin(), 0.0)).collect()
    }

    #[test]
    fn zero_step_is_identity() {
        let g = grid();
        let u = beam(&g);
        for b in [BoundarySpec::dirichlet(), BoundarySpec::neumann()] {
            for m in [AngleMode::Narrow, AngleMode::Wide] {
                let mut v = u.clone();
                if b.kind == BoundaryKind::Dirichlet {
                    v.samples[0] = Complex64::new(0.0, 0.0);
                }
                let out = spectral_step(&v, &g, 0.0, m, &b).unwrap();
                assert!(relative_l2(&out.samples, &v.samples) < 1e-13);
            }
        }
    }

    #[test]
    fn narrow_step_preserves_norm() {
        let g = grid();
        let mut u = beam(&g);
        u.samples[0] = Complex64::new(0.0, 0.0);
        let out = spectral_step(&u, &g, 10.0, AngleMode::Narrow, &BoundarySpec::dirichlet()).unwrap();
        assert!((out.norm() / u.norm() - 1.0).abs() < 1e-12);
        // the cosine pair is unitary in the trapezoid-weighted norm
        let u = beam(&g);
        let out = spectral_step(&u, &g, 10.0, AngleMode::Narrow, &BoundarySpec::neumann()).unwrap();
        let w = crate::transform::cosine_norm;
        assert!((w(&out.samples) / w(&u.samples) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn narrow_and_wide_single_modes_within_expansion_bound() {
        let g = grid();
        let k = g.wavenumber;
        let dx = g.range_step;
        for m in [1usize, 5, 16] {
            let p = g.sine_wavenumber(m);
            assert!(p <= 0.1 * k);
            let u = ReducedField::new(0.0, mode(&g, m));
            let n = spectral_step(&u, &g, dx, AngleMode::Narrow, &BoundarySpec::dirichlet()).unwrap();
            let w = spectral_step(&u, &g, dx, AngleMode::Wide, &BoundarySpec::dirichlet()).unwrap();
            let bound = 10.0 * (p / k).powi(4) * k * dx / 8.0;
            let d = relative_l2(&n.samples, &w.samples);
            assert!(d <= bound, "mode {m}: {d} > {bound}");
        }
    }

    #[test]
    fn wide_step_is_reciprocal_for_propagating_modes() {
        let g = grid();
        let k = g.wavenumber;
        let mut u = beam(&g);
        u.samples[0] = Complex64::new(0.0, 0.0);
        assert!(g.sine_wavenumber(g.num_height_points - 1) < k);
        let b = BoundarySpec::dirichlet();
        let fwd = spectral_step(&u, &g, 25.0, AngleMode::Wide, &b).unwrap();
        let back = spectral_step(&fwd, &g, -25.0, AngleMode::Wide, &b).unwrap();
        assert!(relative_l2(&back.samples, &u.samples) < 1e-10);
    }

    #[test]
    fn evanescent_modes_decay() {
        let k = 1.0;
        let s = real_symbol(2.0, k, 3.0, AngleMode::Wide);
        assert!((s.norm() - (-3.0 * 3f64.sqrt()).exp()).abs() < 1e-15);
        assert!((s.arg() + 3.0).abs() < 1e-12);
        let c = propagation_symbol(Complex64::new(4.0, 0.0), k, 3.0, AngleMode::Wide);
        assert!((c - s).norm() < 1e-12);
    }

    #[test]
    fn impedance_rejected_by_plain_step() {
        let g = grid();
        let b = BoundarySpec::impedance_from_alpha(Complex64::new(0.0, 1.0)).unwrap();
        assert!(spectral_step(&beam(&g), &g, 10.0, AngleMode::Narrow, &b).is_err());
        assert!(dmft_step(&beam(&g), &g, &BoundarySpec::dirichlet(), 10.0, AngleMode::Narrow).is_err());
    }

    #[test]
    fn refraction_screen_examples() {
        let g = grid();
        let u = beam(&g).samples;
        let mut v = u.clone();
        refraction_step(&mut v, &vec![0.0; u.len()], 10.0, g.wavenumber);
        assert_eq!(v, u);
        let mut v = u.clone();
        refraction_step(&mut v, &vec![330.0; u.len()], 10.0, g.wavenumber);
        let phase = g.wavenumber * 10.0 * 330.0 * 1e-6;
        for (a, b) in v.iter().zip(&u) {
            assert!((a - b * Complex64::from_polar(1.0, phase)).norm() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn screen_keeps_moduli(ms in proptest::collection::vec(-500.0f64..500.0, 64), dx in 0.0f64..100.0) {
            let u: Vec<Complex64> = (0..64).map(|j| Complex64::new(j as f64 * 0.1, 1.0 - j as f64 * 0.01)).collect();
            let mut v = u.clone();
            refraction_step(&mut v, &ms, dx, 6.0);
            for (a, b) in v.iter().zip(&u) {
                prop_assert!((a.norm() - b.norm()).abs() < 1e-12);
            }
            prop_assert!((l2_norm(&v) - l2_norm(&u)).abs() < 1e-12);
        }
    }
}
