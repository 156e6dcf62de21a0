//! Mixed-transform step for impedance surfaces.
//!
//! The field is mapped to `w = ∂u/∂z + α·u`, discretized on the half grid
//! `z_{j+1/2}`:
//!
//! ```text
//! w_{j+1/2} = [(u_{j+1} - u_j) + a·(u_{j+1} + u_j)] / Δz,   a = α·Δz/2
//! ```
//!
//! `w` vanishes at the ground, so it is advanced with the odd half-sample
//! (DST-II) symbol. The only discrete field `w` cannot see is the surface
//! mode `ρ^j`, `ρ = (1 - a)/(1 + a)`. When `|ρ| < 1` the mode decays upward
//! and is carried separately: its coefficient comes from a trapezoid
//! projection and advances with the symbol at `p² = -(ln ρ / Δz)²`. When
//! `|ρ| ≥ 1` the mode is not admissible and `u` is rebuilt from `w` alone by
//! downward recursion from a zero top sample.
//!
//! At `α = 0` the scheme coincides with the cosine-basis step; as `|α|`
//! grows it tends to the sine-basis step. Both limits hold up to the
//! position of the upper wall, which here sits at `(N-1)·Δz` rather than
//! `N·Δz`; fields kept off the top by the absorber never see it.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::boundary::BoundarySpec;
use super::spectral::{propagation_symbol, real_symbol, AngleMode, SpectralStepper};
use crate::error::{PeError, Result};
use crate::grid::SimulationGrid;

#[derive(Clone)]
pub struct DmftStepper {
    n: usize,
    dz: f64,
    a: Complex64,
    rho: Complex64,
    kind: Recovery,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Symbol on the doubled half-grid, already divided by `2M`.
    multipliers: Vec<Complex64>,
}

#[derive(Clone, Debug)]
enum Recovery {
    /// `α = 0` exactly.
    Neumann(Box<SpectralStepper>),
    /// Surface mode carried with multiplier `mode_multiplier`.
    WithMode { powers: Vec<Complex64>, self_projection: Complex64, mode_multiplier: Complex64 },
    /// Downward recursion, no mode.
    Backward,
}

impl std::fmt::Debug for DmftStepper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DmftStepper")
            .field("n", &self.n)
            .field("a", &self.a)
            .field("rho", &self.rho)
            .field("kind", &self.kind)
            .finish()
    }
}

impl DmftStepper {
    pub fn new(grid: &SimulationGrid, alpha: Complex64, dx: f64, mode: AngleMode) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite()) || alpha.im < 0.0 {
            return Err(PeError::Boundary(format!("impedance coefficient {alpha} is not a passive surface")));
        }
        let n = grid.num_height_points;
        let m = n - 1;
        let dz = grid.height_step;
        let k = grid.wavenumber;
        let a = alpha * (0.5 * dz);
        if (a + 1.0).norm() < 1e-12 {
            return Err(PeError::Boundary(format!(
                "impedance coefficient {alpha} is singular on this grid (α·Δz = -2)"
            )));
        }
        let rho = (Complex64::new(1.0, 0.0) - a) / (Complex64::new(1.0, 0.0) + a);

        let kind = if alpha == Complex64::new(0.0, 0.0) {
            Recovery::Neumann(Box::new(SpectralStepper::new(grid, dx, mode, &BoundarySpec::neumann())?))
        } else if rho.norm() < 1.0 {
            let mut powers = Vec::with_capacity(n);
            let mut p = Complex64::new(1.0, 0.0);
            for _ in 0..n {
                powers.push(p);
                p *= rho;
            }
            let self_projection = trapezoid_projection(&powers, &powers);
            if self_projection.norm() < 1e-10 {
                log::warn!("surface-mode projection is ill-conditioned ({self_projection})");
            }
            let decay = -rho.ln() / dz;
            let mut mode_multiplier = propagation_symbol(-(decay * decay), k, dx, mode);
            if mode_multiplier.norm() > 1.0 {
                mode_multiplier /= mode_multiplier.norm();
            }
            Recovery::WithMode { powers, self_projection, mode_multiplier }
        } else {
            Recovery::Backward
        };

        let mut planner = FftPlanner::new();
        let len = 2 * m;
        let span = m as f64 * dz;
        let multipliers = (0..len)
            .map(|i| {
                let idx = i.min(len - i);
                let p = std::f64::consts::PI * idx as f64 / span;
                real_symbol(p, k, dx, mode) / len as f64
            })
            .collect();
        Ok(Self {
            n,
            dz,
            a,
            rho,
            kind,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            multipliers,
        })
    }

    /// Root `ρ` of the discrete surface mode.
    pub fn mode_root(&self) -> Complex64 {
        self.rho
    }

    /// True when the decaying surface mode is carried explicitly.
    pub fn carries_mode(&self) -> bool {
        matches!(self.kind, Recovery::WithMode { .. })
    }

    pub fn step(&self, u: &mut [Complex64]) {
        debug_assert_eq!(u.len(), self.n);
        if let Recovery::Neumann(s) = &self.kind {
            s.step(u);
            return;
        }
        let n = self.n;
        let m = n - 1;
        let one = Complex64::new(1.0, 0.0);
        let (ap, am) = (one + self.a, one - self.a);

        let coefficient = match &self.kind {
            Recovery::WithMode { powers, self_projection, .. } => {
                Some(trapezoid_projection(powers, u) / self_projection)
            }
            _ => None,
        };

        // w on the half grid, then its odd extension about both ends
        let mut ext = vec![Complex64::new(0.0, 0.0); 2 * m];
        for i in 0..m {
            let w = (u[i + 1] * ap - u[i] * am) / self.dz;
            ext[i] = w;
            ext[2 * m - 1 - i] = -w;
        }
        self.forward.process(&mut ext);
        for (c, s) in ext.iter_mut().zip(&self.multipliers) {
            *c *= s;
        }
        self.inverse.process(&mut ext);

        match &self.kind {
            Recovery::WithMode { powers, self_projection, mode_multiplier } => {
                u[0] = Complex64::new(0.0, 0.0);
                let inv = one / ap;
                for i in 0..m {
                    u[i + 1] = self.rho * u[i] + ext[i] * (self.dz * inv);
                }
                let beta = coefficient.unwrap_or_default() * mode_multiplier
                    - trapezoid_projection(powers, u) / self_projection;
                for (x, p) in u.iter_mut().zip(powers) {
                    *x += beta * p;
                }
            }
            Recovery::Backward => {
                u[m] = Complex64::new(0.0, 0.0);
                let inv = one / am;
                for i in (0..m).rev() {
                    u[i] = (u[i + 1] * ap - ext[i] * self.dz) * inv;
                }
            }
            Recovery::Neumann(_) => unreachable!(),
        }
    }
}

/// `Σ'' g_j·v_j` with half weights on the end samples.
fn trapezoid_projection(g: &[Complex64], v: &[Complex64]) -> Complex64 {
    let n = g.len();
    let mut s: Complex64 = g.iter().zip(v).map(|(a, b)| a * b).sum();
    s -= 0.5 * (g[0] * v[0] + g[n - 1] * v[n - 1]);
    s
}
