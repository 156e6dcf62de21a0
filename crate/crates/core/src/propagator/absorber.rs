use crate::field::ReducedField;
use crate::grid::SimulationGrid;

/// Hanning half-window over the top `start_fraction` of the column.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbsorberWindow {
    pub start_fraction: f64,
}

impl Default for AbsorberWindow {
    fn default() -> Self {
        Self { start_fraction: 0.25 }
    }
}

impl AbsorberWindow {
    pub fn new(start_fraction: f64) -> Option<Self> {
        (start_fraction > 0.0 && start_fraction < 1.0).then_some(Self { start_fraction })
    }

    /// Height where the taper begins.
    pub fn start_height(&self, max_height: f64) -> f64 {
        (1.0 - self.start_fraction) * max_height
    }

    /// First height index inside the taper.
    pub fn start_index(&self, grid: &SimulationGrid) -> usize {
        (self.start_height(grid.max_height) / grid.height_step).ceil() as usize
    }

    pub fn weight(&self, z: f64, max_height: f64) -> f64 {
        let za = self.start_height(max_height);
        if z <= za {
            1.0
        } else if z >= max_height {
            0.0
        } else {
            0.5 * (1.0 + (std::f64::consts::PI * (z - za) / (max_height - za)).cos())
        }
    }

    pub fn weights(&self, grid: &SimulationGrid) -> Vec<f64> {
        (0..grid.num_height_points).map(|j| self.weight(grid.height(j), grid.max_height)).collect()
    }
}

pub fn apply_absorber(field: &ReducedField, window: &AbsorberWindow, grid: &SimulationGrid) -> ReducedField {
    let mut out = field.clone();
    for (s, w) in out.samples.iter_mut().zip(window.weights(grid)) {
        *s *= w;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, GridSpec};
    use num_complex::Complex64;

    fn grid() -> SimulationGrid {
        build_grid(&GridSpec {
            frequency_hz: 1e8,
            max_range_m: 100.0,
            range_step_m: 10.0,
            max_height_m: 256.0,
            num_height_points: 256,
            max_angle_deg: 15.0,
        })
        .unwrap()
    }

    #[test]
    fn window_shape() {
        let w = AbsorberWindow::default();
        let h = 256.0;
        assert_eq!(w.weight(w.start_height(h), h), 1.0);
        assert_eq!(w.weight(h, h), 0.0);
        let mut last = 1.0;
        for i in 0..=640 {
            let z = 192.0 + i as f64 * 0.1;
            let v = w.weight(z, h);
            assert!(v <= last + 1e-15);
            last = v;
        }
        // continuity at the start
        assert!((w.weight(192.0 + 1e-9, h) - 1.0).abs() < 1e-12);
        assert!(AbsorberWindow::new(0.0).is_none());
        assert!(AbsorberWindow::new(1.0).is_none());
    }

    #[test]
    fn absorber_only_touches_top() {
        let g = grid();
        let w = AbsorberWindow::default();
        let mut u = ReducedField::zeros(0.0, g.num_height_points);
        for j in 10..150 {
            u.samples[j] = Complex64::new(j as f64, 1.0);
        }
        assert_eq!(apply_absorber(&u, &w, &g), u);

        let ones = ReducedField::new(0.0, vec![Complex64::new(1.0, 1.0); g.num_height_points]);
        let out = apply_absorber(&ones, &w, &g);
        assert!(out.norm() <= ones.norm());
        // the last sample sits one step below H, so it is small but not zero
        assert!(out.samples[255].norm() < 1e-3);
        assert_eq!(w.weight(g.max_height, g.max_height), 0.0);
    }
}
