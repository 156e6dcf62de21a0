//! Modified-refractivity profiles `M(z)` and range-dependent fields `M(x, z)`.
//!
//! Earth curvature is folded into `M`, so every solver works on a flat earth.

use crate::error::{PeError, Result};
use crate::grid::SimulationGrid;

/// Conventional surface modified refractivity, M-units.
pub const DEFAULT_M0: f64 = 330.0;
/// Conventional standard-atmosphere gradient, M-units/m.
pub const DEFAULT_GRADIENT: f64 = 0.118;
/// Aerodynamic roughness length of the sea surface used by the duct profile, m.
pub const ROUGHNESS_LENGTH: f64 = 1.5e-4;
/// Neutral-stability gradient of the evaporation-duct profile, M-units/m.
const DUCT_GRADIENT: f64 = 0.125;

#[derive(Clone, Debug, PartialEq)]
pub enum RefractivityProfile {
    /// `M(z) = m0 + gradient·z`.
    Standard { m0: f64, gradient: f64 },
    /// Log-linear evaporation duct of height `duct_height`.
    EvaporationDuct { m0: f64, duct_height: f64 },
    /// Piecewise-linear `(z, M)` table, extrapolated with the last gradient
    /// above the top and held constant below the first height.
    Tabulated { table: Vec<(f64, f64)> },
}

pub fn standard_profile(m0: f64, gradient: f64) -> Result<RefractivityProfile> {
    if !(m0.is_finite() && gradient.is_finite()) {
        return Err(PeError::Refractivity(format!(
            "standard profile needs finite M0 and gradient, got {m0}, {gradient}"
        )));
    }
    Ok(RefractivityProfile::Standard { m0, gradient })
}

pub fn evaporation_duct_profile(m0: f64, duct_height: f64) -> Result<RefractivityProfile> {
    if !(duct_height.is_finite() && duct_height > 0.0) {
        return Err(PeError::Refractivity(format!("duct height must be positive, got {duct_height}")));
    }
    if !m0.is_finite() {
        return Err(PeError::Refractivity(format!("M0 must be finite, got {m0}")));
    }
    Ok(RefractivityProfile::EvaporationDuct { m0, duct_height })
}

pub fn tabulated_profile(table: Vec<(f64, f64)>) -> Result<RefractivityProfile> {
    if table.is_empty() {
        return Err(PeError::Refractivity("empty refractivity table".into()));
    }
    for &(z, m) in &table {
        if !(z.is_finite() && m.is_finite()) {
            return Err(PeError::Refractivity(format!("non-finite table entry ({z}, {m})")));
        }
    }
    for w in table.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(PeError::Refractivity(format!(
                "table heights must increase strictly: {} then {}",
                w[0].0, w[1].0
            )));
        }
    }
    Ok(RefractivityProfile::Tabulated { table })
}

/// Parses `z_m  M_units` pairs, one per line, `#` starting a comment.
pub fn parse_profile_table(text: &str) -> Result<RefractivityProfile> {
    let mut table = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split_whitespace();
        let (Some(z), Some(m), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(PeError::Refractivity(format!("line {}: expected two columns `z M`", idx + 1)));
        };
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|_| PeError::Refractivity(format!("line {}: `{s}` is not a number", idx + 1)))
        };
        table.push((parse(z)?, parse(m)?));
    }
    tabulated_profile(table)
}

impl RefractivityProfile {
    /// Modified refractivity at height `z`, M-units.
    pub fn evaluate(&self, z: f64) -> f64 {
        match self {
            Self::Standard { m0, gradient } => m0 + gradient * z,
            Self::EvaporationDuct { m0, duct_height } => {
                let z = z.max(0.0);
                m0 + DUCT_GRADIENT * (z - duct_height * ((z + ROUGHNESS_LENGTH) / ROUGHNESS_LENGTH).ln())
            }
            Self::Tabulated { table } => {
                let last = table.len() - 1;
                if table.len() == 1 || z <= table[0].0 {
                    return table[0].1;
                }
                if z >= table[last].0 {
                    let (z1, m1) = table[last - 1];
                    let (z2, m2) = table[last];
                    return m2 + (m2 - m1) / (z2 - z1) * (z - z2);
                }
                let i = table.partition_point(|&(zt, _)| zt <= z);
                let (z1, m1) = table[i - 1];
                let (z2, m2) = table[i];
                m1 + (m2 - m1) * (z - z1) / (z2 - z1)
            }
        }
    }

    /// Profile sampled at every grid height.
    pub fn column(&self, grid: &SimulationGrid) -> Vec<f64> {
        (0..grid.num_height_points).map(|j| self.evaluate(grid.height(j))).collect()
    }
}

/// Profiles anchored at increasing ranges, interpolated linearly in range.
#[derive(Clone, Debug, PartialEq)]
pub struct RefractivityField {
    anchors: Vec<(f64, RefractivityProfile)>,
}

impl RefractivityField {
    pub fn new(anchors: Vec<(f64, RefractivityProfile)>) -> Result<Self> {
        match anchors.first() {
            None => return Err(PeError::Refractivity("no refractivity anchors".into())),
            Some(&(x0, _)) if x0 != 0.0 => {
                return Err(PeError::Refractivity(format!("first anchor must sit at range 0, got {x0}")))
            }
            _ => {}
        }
        for w in anchors.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(PeError::Refractivity(format!(
                    "anchor ranges must increase strictly: {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(Self { anchors })
    }

    pub fn homogeneous(profile: RefractivityProfile) -> Self {
        Self { anchors: vec![(0.0, profile)] }
    }

    /// `M ≡ 0`: no refraction at all.
    pub fn vacuum() -> Self {
        Self::homogeneous(RefractivityProfile::Standard { m0: 0.0, gradient: 0.0 })
    }

    pub fn anchors(&self) -> &[(f64, RefractivityProfile)] {
        &self.anchors
    }

    /// True when the field does not depend on range.
    pub fn is_range_independent(&self) -> bool {
        self.anchors.len() == 1
    }

    /// M-units at every grid height for range `x`.
    pub fn sample_column(&self, grid: &SimulationGrid, x: f64) -> Result<Vec<f64>> {
        if x.is_nan() || x < 0.0 {
            return Err(PeError::Refractivity(format!("range must be non-negative, got {x}")));
        }
        let i = self.anchors.partition_point(|(xa, _)| *xa <= x);
        let (x1, p1) = &self.anchors[i - 1];
        if i == self.anchors.len() {
            return Ok(p1.column(grid));
        }
        let (x2, p2) = &self.anchors[i];
        let t = (x - x1) / (x2 - x1);
        let a = p1.column(grid);
        let b = p2.column(grid);
        Ok(a.iter().zip(&b).map(|(ma, mb)| ma + t * (mb - ma)).collect())
    }
}
