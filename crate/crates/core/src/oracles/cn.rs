//! Crank–Nicolson finite-difference march of the narrow-angle equation
//! `2ik·u_x + u_zz + 2k²·M·1e-6·u = 0`.
//!
//! The ground condition enters through a ghost row: `u_0 = 0` (Dirichlet),
//! `u_{-1} = u_1` (Neumann) or `u_{-1} = u_1 + 2αΔz·u_0` (impedance). The
//! top sample `u_N` is zero.

use num_complex::Complex64;

use crate::error::{PeError, Result};
use crate::field::l2_norm;
use crate::propagator::{
    check_finite, terrain_mask_in_place, AngleMode, BoundaryKind, PropagationResult, SolverKind, StepDiagnostics,
};
use crate::scenario::Scenario;

/// Tridiagonal operator `L` with `u_x = L·u`.
struct Operator {
    lower: Vec<Complex64>,
    diag: Vec<Complex64>,
    upper: Vec<Complex64>,
    dirichlet: bool,
}

impl Operator {
    fn new(scenario: &Scenario, m_column: &[f64]) -> Self {
        let grid = &scenario.grid;
        let n = grid.num_height_points;
        let k = grid.wavenumber;
        let dz = grid.height_step;
        let c = Complex64::new(0.0, 1.0 / (2.0 * k * dz * dz));
        let mut lower = vec![c; n];
        let mut upper = vec![c; n];
        let mut diag: Vec<Complex64> = m_column.iter().map(|m| -2.0 * c + Complex64::new(0.0, k * m * 1e-6)).collect();
        lower[0] = Complex64::new(0.0, 0.0);
        upper[n - 1] = Complex64::new(0.0, 0.0);
        let b = &scenario.boundary;
        match b.kind {
            BoundaryKind::Dirichlet => {}
            BoundaryKind::Neumann => upper[0] = 2.0 * c,
            BoundaryKind::Impedance => {
                upper[0] = 2.0 * c;
                diag[0] += c * (2.0 * b.alpha * dz);
            }
        }
        Self { lower, diag, upper, dirichlet: b.kind == BoundaryKind::Dirichlet }
    }

    /// `(I + s·L)·u`.
    fn apply(&self, u: &[Complex64], s: f64) -> Vec<Complex64> {
        let n = u.len();
        (0..n)
            .map(|j| {
                let mut v = u[j] + s * self.diag[j] * u[j];
                if j > 0 {
                    v += s * self.lower[j] * u[j - 1];
                }
                if j + 1 < n {
                    v += s * self.upper[j] * u[j + 1];
                }
                v
            })
            .collect()
    }

    /// Solves `(I - s·L)·x = rhs` by the Thomas algorithm.
    fn solve(&self, rhs: &mut [Complex64], s: f64) {
        let n = rhs.len();
        let one = Complex64::new(1.0, 0.0);
        let mut sup = vec![Complex64::new(0.0, 0.0); n];
        let (start, mut prev_sup) = if self.dirichlet {
            rhs[0] = Complex64::new(0.0, 0.0);
            (1, Complex64::new(0.0, 0.0))
        } else {
            let b0 = one - s * self.diag[0];
            sup[0] = -s * self.upper[0] / b0;
            rhs[0] /= b0;
            (1, sup[0])
        };
        for j in start..n {
            let a = -s * self.lower[j];
            let b = one - s * self.diag[j] - a * prev_sup;
            sup[j] = if j + 1 < n { -s * self.upper[j] / b } else { Complex64::new(0.0, 0.0) };
            rhs[j] = (rhs[j] - a * rhs[j - 1]) / b;
            prev_sup = sup[j];
        }
        for j in (0..n - 1).rev() {
            rhs[j] -= sup[j] * rhs[j + 1];
        }
        if self.dirichlet {
            rhs[0] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Crank–Nicolson reference march with the same source, mask and absorber
/// as [`crate::propagator::march`]. Narrow angle only.
pub fn cn_fd_march(scenario: &Scenario) -> Result<PropagationResult> {
    if scenario.angle_mode != AngleMode::Narrow {
        return Err(PeError::Unsupported("the finite-difference oracle is narrow-angle only".into()));
    }
    scenario.validate()?;
    let grid = &scenario.grid;
    let half = 0.5 * grid.range_step;
    let weights = scenario.absorber.map(|a| a.weights(grid));
    let fixed = scenario.refractivity.is_range_independent();
    let column = |i: usize| scenario.refractivity.sample_column(grid, grid.range(i));

    let mut u = scenario.initial_field()?.samples;
    let ground0 = scenario.ground_index_at(0)?;
    let mut steps = vec![0];
    let mut columns = vec![u.clone()];
    let mut ground_indices = vec![ground0];
    let mut diagnostics = vec![StepDiagnostics { step: 0, range: 0.0, norm: l2_norm(&u), ground_index: ground0 }];

    let mut op_prev = Operator::new(scenario, &column(0)?);
    for i in 1..=grid.num_range_steps {
        let op_next = if fixed { None } else { Some(Operator::new(scenario, &column(i)?)) };
        let mut rhs = op_prev.apply(&u, half);
        if op_prev.dirichlet {
            rhs[0] = Complex64::new(0.0, 0.0);
        }
        op_next.as_ref().unwrap_or(&op_prev).solve(&mut rhs, half);
        u = rhs;
        let ground = scenario.ground_index_at(i)?;
        terrain_mask_in_place(&mut u, ground);
        if let Some(w) = &weights {
            for (s, w) in u.iter_mut().zip(w) {
                *s *= w;
            }
        }
        check_finite(&u, i, grid)?;
        diagnostics.push(StepDiagnostics { step: i, range: grid.range(i), norm: l2_norm(&u), ground_index: ground });
        if i % scenario.output_every == 0 {
            steps.push(i);
            columns.push(u.clone());
            ground_indices.push(ground);
        }
        if let Some(op) = op_next {
            op_prev = op;
        }
    }

    Ok(PropagationResult {
        grid: grid.clone(),
        solver: SolverKind::CrankNicolson,
        steps,
        columns,
        ground_indices,
        diagnostics,
        backward: None,
        spawns: Vec::new(),
    })
}
