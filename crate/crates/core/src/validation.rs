//! Acceptance suites: each runs a desk-scale scenario against an
//! independent oracle and reports one line per check.

use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::parse_config;
use crate::error::{PeError, Result};
use crate::field::relative_l2;
use crate::grid::{build_grid, GridSpec};
use crate::oracles::{
    cn_fd_march, freespace_gaussian, fresnel_parameter, imaged_freespace_gaussian, knife_edge_loss,
    knife_edge_loss_exact,
};
use crate::pefm;
use crate::postprocess::propagation_factor;
use crate::propagator::{
    complex_permittivity, dmft_step, march, march_two_way, spectral_step, AngleMode, BoundarySpec, PropagationResult,
    SpectralStepper,
};
use crate::refractivity::{evaporation_duct_profile, RefractivityField};
use crate::run::run_scenario;
use crate::scenario::Scenario;
use crate::source::{gaussian_initial_field, AntennaSpec, Polarization};
use crate::terrain::TerrainProfile;
use crate::transform::Transformer;

/// Suite names accepted by [`run_suite`], in execution order.
pub const SUITES: &[&str] = &[
    "roundtrip",
    "unitarity",
    "single_mode",
    "freespace",
    "two_ray",
    "cross_validation",
    "knife_edge",
    "impedance",
    "two_way",
    "convergence",
    "format",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    /// Passes when `metric <= threshold`.
    AtMost,
    /// Passes when `metric >= threshold`.
    AtLeast,
}

/// One measured quantity and its acceptance threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub metric: f64,
    pub threshold: f64,
    pub bound: Bound,
}

impl Check {
    pub fn at_most(name: impl Into<String>, metric: f64, threshold: f64) -> Self {
        Self { name: name.into(), metric, threshold, bound: Bound::AtMost }
    }

    pub fn at_least(name: impl Into<String>, metric: f64, threshold: f64) -> Self {
        Self { name: name.into(), metric, threshold, bound: Bound::AtLeast }
    }

    /// A yes/no property, reported as metric 1 (holds) or 0.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.metric <= self.threshold,
            Bound::AtLeast => self.metric >= self.threshold,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        write!(
            f,
            "{} metric={:.6e} threshold{}{:.6e} {}",
            self.name,
            self.metric,
            op,
            self.threshold,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{}.{}", self.suite, c)?;
        }
        write!(f, "{} {} ({:.2} s)", self.suite, if self.passed() { "PASS" } else { "FAIL" }, self.seconds)
    }
}

/// Runs one suite by name, or every suite for `"all"`.
pub fn run_suite(name: &str) -> Result<Vec<SuiteReport>> {
    if name == "all" {
        return SUITES.iter().map(|s| run_one(s)).collect();
    }
    let suite = SUITES
        .iter()
        .find(|s| **s == name)
        .ok_or_else(|| PeError::UnknownSuite { name: name.to_string(), available: SUITES.join(", ") })?;
    Ok(vec![run_one(suite)?])
}

fn run_one(suite: &'static str) -> Result<SuiteReport> {
    let start = Instant::now();
    let checks = match suite {
        "roundtrip" => roundtrip()?,
        "unitarity" => unitarity()?,
        "single_mode" => single_mode()?,
        "freespace" => freespace()?,
        "two_ray" => two_ray()?,
        "cross_validation" => cross_validation()?,
        "knife_edge" => knife_edge()?,
        "impedance" => impedance()?,
        "two_way" => two_way()?,
        "convergence" => convergence()?,
        "format" => format()?,
        _ => unreachable!("suite list and dispatch agree"),
    };
    Ok(SuiteReport { suite, checks, seconds: start.elapsed().as_secs_f64() })
}

fn grid(
    frequency_hz: f64,
    range: f64,
    dx: f64,
    height: f64,
    n: usize,
    max_angle_deg: f64,
) -> Result<crate::SimulationGrid> {
    build_grid(&GridSpec {
        frequency_hz,
        max_range_m: range,
        range_step_m: dx,
        max_height_m: height,
        num_height_points: n,
        max_angle_deg,
    })
}

fn antenna(height: f64, beamwidth_deg: f64, polarization: Polarization) -> AntennaSpec {
    AntennaSpec { height, beamwidth_deg, elevation_deg: 0.0, polarization }
}

fn random_field(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn roundtrip() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checks = Vec::new();
    for n in [64usize, 1024] {
        let t = Transformer::new(n);
        let mut scratch = Vec::new();
        let (mut sine, mut cosine) = (0.0f64, 0.0f64);
        for _ in 0..100 {
            let mut u = random_field(&mut rng, n);
            let mut v = u.clone();
            t.cosine_forward_in_place(&mut v, &mut scratch);
            t.cosine_inverse_in_place(&mut v, &mut scratch);
            cosine = cosine.max(relative_l2(&v, &u));
            // the sine basis carries no ground sample
            u[0] = Complex64::new(0.0, 0.0);
            let mut v = u.clone();
            t.dst_in_place(&mut v, &mut scratch);
            t.dst_in_place(&mut v, &mut scratch);
            sine = sine.max(relative_l2(&v, &u));
        }
        checks.push(Check::at_most(format!("dst_n{n}"), sine, 1e-12));
        checks.push(Check::at_most(format!("dct_n{n}"), cosine, 1e-12));
    }
    Ok(checks)
}

fn unitarity() -> Result<Vec<Check>> {
    let g = grid(3e9, 10_000.0, 10.0, 512.0, 2048, 10.0)?;
    let mut s = Scenario::new(g, antenna(100.0, 3.0, Polarization::Horizontal));
    s.absorber = None;
    let r = march(&s)?;
    let n0 = r.diagnostics[0].norm;
    let per_step = r.diagnostics.windows(2).map(|w| (w[1].norm / w[0].norm - 1.0).abs()).fold(0.0, f64::max);
    let total = (r.diagnostics.last().expect("steps").norm / n0 - 1.0).abs();
    Ok(vec![Check::at_most("per_step_drift", per_step, 1e-12), Check::at_most("cumulative_drift", total, 1e-10)])
}

fn single_mode() -> Result<Vec<Check>> {
    let g = grid(3e9, 1000.0, 10.0, 256.0, 1024, 10.0)?;
    let k = g.wavenumber;
    let mut checks = Vec::new();
    for mode in [1usize, 40, 1023] {
        let p = g.sine_wavenumber(mode);
        let stepper = SpectralStepper::new(&g, g.range_step, AngleMode::Wide, &BoundarySpec::dirichlet())?;
        let factor = if p <= k {
            Complex64::new(0.0, g.range_step * ((k * k - p * p).sqrt() - k)).exp()
        } else {
            Complex64::new(-g.range_step * (p * p - k * k).sqrt(), -k * g.range_step).exp()
        };
        let mut u: Vec<Complex64> =
            (0..g.num_height_points).map(|j| Complex64::new((p * g.height(j)).sin(), 0.0)).collect();
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let expected: Vec<Complex64> = u.iter().map(|c| c * factor).collect();
            stepper.step(&mut u);
            worst = worst.max(relative_l2(&u, &expected));
        }
        checks.push(Check::at_most(format!("wide_mode_{mode}"), worst, 1e-12));
    }
    Ok(checks)
}

/// Largest pointwise relative error against the imaged free-space beam over
/// its 20 dB footprint, across all recorded columns past the origin.
fn freespace_error(result: &PropagationResult, s: &Scenario) -> f64 {
    let (k, w0, zs) = (s.grid.wavenumber, s.waist(), s.antenna.height);
    let mut worst = 0.0f64;
    for (&step, col) in result.steps.iter().zip(&result.columns).skip(1) {
        let x = s.grid.range(step);
        let exact: Vec<Complex64> =
            (0..col.len()).map(|j| imaged_freespace_gaussian(x, s.grid.height(j), zs, w0, k)).collect();
        let peak = exact.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (u, e) in col.iter().zip(&exact) {
            if e.norm() >= 0.1 * peak {
                worst = worst.max((u - e).norm() / e.norm());
            }
        }
    }
    worst
}

fn freespace_scenario(dx: f64, dz: f64, max_angle_deg: f64) -> Result<Scenario> {
    let height = 4096.0;
    let g = grid(3e9, 10_000.0, dx, height, (height / dz).round() as usize, max_angle_deg)?;
    let mut s = Scenario::new(g, antenna(100.0, 3.0, Polarization::Horizontal));
    s.output_every = (1000.0 / dx).round() as usize;
    Ok(s)
}

fn freespace() -> Result<Vec<Check>> {
    let s = freespace_scenario(10.0, 0.25, 10.0)?;
    let r = march(&s)?;
    Ok(vec![Check::at_most("max_relative_error", freespace_error(&r, &s), 1e-3)])
}

fn convergence() -> Result<Vec<Check>> {
    let mut errors = Vec::new();
    for (dx, dz) in [(40.0, 1.0), (20.0, 0.5), (10.0, 0.25)] {
        let s = freespace_scenario(dx, dz, 2.5)?;
        errors.push(freespace_error(&march(&s)?, &s));
    }
    let mut checks: Vec<Check> = errors
        .iter()
        .zip([(40.0, 1.0), (20.0, 0.5), (10.0, 0.25)])
        .map(|(e, (dx, dz))| Check::at_least(format!("error_dx{dx}_dz{dz}"), *e, 0.0))
        .collect();
    for (i, w) in errors.windows(2).enumerate() {
        checks.push(Check::at_least(format!("reduction_level{}", i + 1), w[0] / w[1], 1.0 + 1e-9));
    }
    Ok(checks)
}

fn two_ray() -> Result<Vec<Check>> {
    let zs = 25.0;
    let g = grid(3e9, 10_000.0, 10.0, 1024.0, 8192, 15.0)?;
    let mut s = Scenario::new(g, antenna(zs, 10.0, Polarization::Horizontal));
    s.output_every = s.grid.num_range_steps;
    let r = march(&s)?;
    let pf = propagation_factor(&r, &s)?;
    let last = pf.n_range - 1;
    let column = pf.column(last);
    let x = pf.range(last);
    let k = s.grid.wavenumber;
    let dz = s.grid.height_step;
    let spacing = std::f64::consts::PI * x / (k * zs);
    let index = |z: f64| (z / dz).round() as usize;

    let mut peak_err = 0.0f64;
    let mut null_err = 0.0f64;
    for m in 0..5 {
        let (lo, hi) = (index(m as f64 * spacing), index((m + 1) as f64 * spacing));
        let peak = column[lo..=hi].iter().copied().fold(f64::MIN, f64::max);
        peak_err = peak_err.max((peak - 20.0 * 2f64.log10()).abs());
        let null = (m + 1) as f64 * spacing;
        let (a, b) = (index(null - 0.25 * spacing), index(null + 0.25 * spacing));
        let j = (a..=b).min_by(|&p, &q| column[p].total_cmp(&column[q])).expect("window");
        null_err = null_err.max((pf.height(j) - null).abs());
    }
    Ok(vec![Check::at_most("lobe_peak_error_db", peak_err, 0.1), Check::at_most("null_height_error_m", null_err, dz)])
}

fn cross_validation() -> Result<Vec<Check>> {
    let g = grid(3e9, 5000.0, 5.0, 256.0, 4096, 15.0)?;
    let mut s = Scenario::new(g, antenna(10.0, 1.0, Polarization::Horizontal));
    s.refractivity = RefractivityField::homogeneous(evaporation_duct_profile(330.0, 15.0)?);
    s.output_every = 50;
    let pe = march(&s)?;
    let cn = cn_fd_march(&s)?;
    let worst = pe.magnitudes().iter().zip(cn.magnitudes()).map(|(a, b)| real_relative_l2(a, &b)).fold(0.0, f64::max);
    Ok(vec![Check::at_most("max_column_relative_l2", worst, 0.01)])
}

fn real_relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn knife_edge() -> Result<Vec<Check>> {
    let (zs, edge, x_wall, x_rx) = (500.0, 550.0, 5000.0, 10_000.0);
    let g = grid(1e9, x_rx, 10.0, 2048.0, 8192, 15.0)?;
    let dx = g.range_step;
    let lambda = g.wavelength();
    let mut s = Scenario::new(g, antenna(zs, 10.0, Polarization::Horizontal));
    s.terrain = Some(TerrainProfile::new(vec![
        (0.0, 0.0),
        (x_wall - dx, 0.0),
        (x_wall, edge),
        (x_wall + dx, 0.0),
        (x_rx, 0.0),
    ])?);
    s.output_every = s.grid.num_range_steps;
    let r = march(&s)?;
    let col = r.columns.last().expect("final column");
    let (k, w0) = (s.grid.wavenumber, s.waist());

    let (d1, d2) = (x_wall, x_rx - x_wall);
    let mut worst = 0.0f64;
    let mut formula = 0.0f64;
    let mut receivers = 0usize;
    for (j, u) in col.iter().enumerate() {
        let z = s.grid.height(j);
        let los = zs + (z - zs) * d1 / x_rx;
        let nu = fresnel_parameter(edge - los, d1, d2, lambda);
        if !(-1.0..=2.0).contains(&nu) {
            continue;
        }
        receivers += 1;
        // the wall shadows the ground-reflected ray, so the reference is the
        // direct beam alone
        let reference = freespace_gaussian(x_rx, z, zs, w0, k).norm();
        let loss = -20.0 * (u.norm() / reference).log10();
        let exact = knife_edge_loss_exact(nu);
        worst = worst.max((loss - exact).abs());
        formula = formula.max((knife_edge_loss(nu) - exact).abs());
    }
    Ok(vec![
        Check::at_least("receivers", receivers as f64, 2.0),
        Check::at_most("pe_vs_fresnel_db", worst, 1.0),
        Check::at_most("formula_vs_fresnel_db", formula, 1.01),
    ])
}

fn impedance() -> Result<Vec<Check>> {
    let g = grid(3e9, 200.0, 10.0, 128.0, 1024, 15.0)?;
    let k = g.wavenumber;
    let a = antenna(20.0, 5.0, Polarization::Horizontal);
    let start = gaussian_initial_field(&g, &a, 0.25)?;
    let limit = |boundary: &BoundarySpec, reference: &BoundarySpec| -> Result<f64> {
        let (mut u, mut v) = (start.clone(), start.clone());
        for _ in 0..g.num_range_steps {
            u = dmft_step(&u, &g, boundary, g.range_step, AngleMode::Narrow)?;
            v = spectral_step(&v, &g, g.range_step, AngleMode::Narrow, reference)?;
        }
        Ok(relative_l2(&u.samples, &v.samples))
    };
    let hard = BoundarySpec::impedance(Complex64::new(1e16, 1e16), Polarization::Horizontal, k)?;
    let soft = BoundarySpec::impedance_from_alpha(Complex64::new(1e-9, 1e-9))?;
    let mut checks = vec![
        Check::at_most("dirichlet_limit", limit(&hard, &BoundarySpec::dirichlet())?, 1e-6),
        Check::at_most("neumann_limit", limit(&soft, &BoundarySpec::neumann())?, 1e-6),
    ];

    let g = grid(3e9, 2000.0, 5.0, 128.0, 4096, 15.0)?;
    let eps = complex_permittivity(70.0, 5.0, g.angular_frequency());
    for pol in [Polarization::Horizontal, Polarization::Vertical] {
        let mut s = Scenario::new(g.clone(), antenna(10.0, 1.0, pol));
        s.boundary = BoundarySpec::impedance(eps, pol, g.wavenumber)?;
        s.output_every = 40;
        let pe = march(&s)?;
        let cn = cn_fd_march(&s)?;
        let worst = pe.columns.iter().zip(&cn.columns).map(|(a, b)| relative_l2(a, b)).fold(0.0, f64::max);
        let tag = match pol {
            Polarization::Horizontal => "sea_horizontal",
            Polarization::Vertical => "sea_vertical",
        };
        checks.push(Check::at_most(format!("{tag}_vs_cn"), worst, 0.01));
    }
    Ok(checks)
}

fn two_way() -> Result<Vec<Check>> {
    let g = grid(3e9, 2000.0, 10.0, 256.0, 2048, 15.0)?;
    let mut s = Scenario::new(g, antenna(40.0, 3.0, Polarization::Horizontal));
    s.terrain = Some(TerrainProfile::new(vec![(0.0, 3.0), (2000.0, 3.0)])?);
    let one = march(&s)?;
    let two = march_two_way(&s)?;
    let identical = one.columns.len() == two.columns.len()
        && one.columns.iter().zip(&two.columns).all(|(a, b)| {
            a.iter().zip(b).all(|(p, q)| p.re.to_bits() == q.re.to_bits() && p.im.to_bits() == q.im.to_bits())
        });
    let mut checks = vec![Check::holds("flat_bit_identical", identical)];

    // A quarter-wavelength range step puts a standing-wave antinode one step
    // in front of the wall face and a node two steps in front.
    let lambda = crate::grid::wavelength(3e9);
    let dx = lambda / 4.0;
    let steps_to_wall = 200usize;
    let x_wall = steps_to_wall as f64 * dx;
    let g = grid(3e9, x_wall + 10.0 * dx, dx, 32.0, 1024, 15.0)?;
    let mut s = Scenario::new(g, antenna(5.0, 10.0, Polarization::Horizontal));
    s.terrain =
        Some(TerrainProfile::new(vec![(0.0, 0.0), (x_wall - dx, 0.0), (x_wall, 10.0), (x_wall + 20.0 * dx, 10.0)])?);
    let r = march_two_way(&s)?;
    let wall = r.steps.iter().position(|&i| i == steps_to_wall).expect("wall column recorded");
    let incident_peak = |i: usize| r.forward_column(i).iter().map(|c| c.norm()).fold(0.0, f64::max);
    let total_peak = |i: usize| r.columns[i].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let spawn = r.spawns.iter().find(|sp| sp.step == steps_to_wall).expect("wall spawn");
    let incident = spawn.incident.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let face_rows = spawn.lower..spawn.upper;
    let face = r.columns[wall][face_rows].iter().map(|c| c.norm()).fold(0.0, f64::max) / incident;
    let node = total_peak(wall - 2) / incident_peak(wall - 2);
    let antinode = total_peak(wall - 1) / incident_peak(wall - 1);
    let spawn_ok = r.spawns.iter().all(|sp| sp.first_step_norm <= sp.clip_energy().sqrt() * (1.0 + 1e-12));
    checks.extend([
        Check::at_most("face_total_over_incident", face, 0.05),
        Check::at_most("node_total_over_incident", node, 0.05),
        Check::at_least("antinode_total_over_incident", antinode, 1.9),
        Check::holds("reflected_energy_bounded", !r.spawns.is_empty() && spawn_ok),
    ]);
    Ok(checks)
}

const FORMAT_CONFIG: &str = "\
[antenna]
frequency_hz = 3e9
polarization = horizontal
antenna_height_m = 25
beamwidth_deg = 5

[grid]
max_range_m = 2000
range_step_m = 20
max_height_m = 128
nz = 1024

[output]
output_every = 10
";

fn format() -> Result<Vec<Check>> {
    let config = parse_config(FORMAT_CONFIG)?;
    let dir = tempfile::tempdir()?;
    let (a, b) = (dir.path().join("a.pefm"), dir.path().join("b.pefm"));
    run_scenario(&config, dir.path(), &a)?;
    run_scenario(&config, dir.path(), &b)?;
    let (bytes_a, bytes_b) = (std::fs::read(&a)?, std::fs::read(&b)?);

    let map = pefm::decode(&bytes_a)?;
    let header = pefm::decode_header(&bytes_a)?;
    let mut csv = Vec::new();
    pefm::export_csv(&map, &mut csv)?;
    let text = String::from_utf8(csv).map_err(|e| PeError::Format(e.to_string()))?;
    let mut rows = text.lines();
    let header_ok = rows.next() == Some("range_m,height_m,value_db");
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for (line, v) in rows.zip(&map.values) {
        let parsed: f64 = line.rsplit(',').next().and_then(|f| f.parse().ok()).unwrap_or(f64::NAN);
        worst = worst.max((parsed - v).abs());
        count += 1;
    }
    let info = pefm::describe(&header);
    Ok(vec![
        Check::holds("rerun_byte_identical", bytes_a == bytes_b),
        Check::holds("reencode_byte_identical", pefm::encode(&map)? == bytes_a),
        Check::holds(
            "info_lists_header",
            info.contains(&format!("n_range: {}", map.n_range)) && header.n_height as usize == map.n_height,
        ),
        Check::holds("csv_header_and_rows", header_ok && count == map.values.len()),
        Check::at_most("csv_value_error_db", if worst.is_nan() { f64::INFINITY } else { worst }, 1e-4),
    ])
}
