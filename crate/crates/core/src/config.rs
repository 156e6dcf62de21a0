//! Sectioned `key = value` scenario files.
//!
//! ```text
//! [antenna]
//! frequency_hz = 3e9
//! antenna_height_m = 25
//! beamwidth_deg = 10
//!
//! [grid]
//! max_range_m = 10000
//! range_step_m = 10
//! max_height_m = 512
//! nz = 4096
//! ```
//!
//! Everything else has a default. Unknown or repeated keys are errors, and
//! every error names its key and line.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{PeError, Result};
use crate::grid::{build_grid, GridSpec};
use crate::postprocess::Quantity;
use crate::propagator::{complex_permittivity, AbsorberWindow, AngleMode, BoundarySpec};
use crate::refractivity::{
    evaporation_duct_profile, parse_profile_table, standard_profile, RefractivityField, DEFAULT_GRADIENT, DEFAULT_M0,
};
use crate::scenario::Scenario;
use crate::source::{gaussian_initial_field, AntennaSpec, Polarization};
use crate::terrain::ingest_elevation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    SplitStep,
    CrankNicolson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ground {
    Pec,
    Impedance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefractivityKind {
    Vacuum,
    Standard,
    EvaporationDuct,
    Tabulated,
}

/// A fully validated scenario description.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub frequency_hz: f64,
    pub polarization: Polarization,
    pub antenna_height_m: f64,
    pub beamwidth_deg: f64,
    pub elevation_deg: f64,

    pub max_range_m: f64,
    pub range_step_m: f64,
    pub max_height_m: f64,
    pub nz: usize,
    pub max_angle_deg: f64,
    pub angle_mode: AngleMode,
    pub solver: Solver,

    pub boundary: Ground,
    pub epsilon_r: f64,
    pub sigma_s_per_m: f64,
    pub absorber_fraction: f64,
    pub two_way: bool,
    pub refractivity: RefractivityKind,
    pub m0: f64,
    pub gradient: f64,
    pub duct_height_m: Option<f64>,
    pub refractivity_file: Option<String>,
    pub terrain_file: Option<String>,

    pub output_every: usize,
    pub quantity: Quantity,
}

const SECTIONS: [&str; 4] = ["antenna", "grid", "environment", "output"];

fn section_of(key: &str) -> Option<&'static str> {
    Some(match key {
        "frequency_hz" | "polarization" | "antenna_height_m" | "beamwidth_deg" | "elevation_deg" => "antenna",
        "max_range_m" | "range_step_m" | "max_height_m" | "nz" | "max_angle_deg" | "angle_mode" | "solver" => "grid",
        "boundary" | "epsilon_r" | "sigma_s_per_m" | "absorber_fraction" | "two_way" | "refractivity" | "m0"
        | "gradient" | "duct_height_m" | "refractivity_file" | "terrain_file" => "environment",
        "output_every" | "quantity" => "output",
        _ => return None,
    })
}

struct Entry {
    line: usize,
    value: String,
}

struct Raw {
    entries: HashMap<String, Entry>,
    last_line: usize,
}

impl Raw {
    fn err(&self, key: &str, message: impl std::fmt::Display) -> PeError {
        let line = self.entries.get(key).map_or(self.last_line, |e| e.line);
        PeError::Config { line, message: format!("{key}: {message}") }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| PeError::Config {
            line: self.last_line,
            message: format!("{key}: missing required key in [{}]", section_of(key).unwrap_or("?")),
        })
    }

    fn number(&self, key: &str, default: Option<f64>) -> Result<f64> {
        let text = match (self.get(key), default) {
            (Some(t), _) => t,
            (None, Some(d)) => return Ok(d),
            (None, None) => self.required(key)?,
        };
        let v: f64 = text.parse().map_err(|_| self.err(key, format!("expected a number, got `{text}`")))?;
        if !v.is_finite() {
            return Err(self.err(key, "must be finite"));
        }
        Ok(v)
    }

    fn positive(&self, key: &str, default: Option<f64>) -> Result<f64> {
        let v = self.number(key, default)?;
        if v <= 0.0 {
            return Err(self.err(key, format!("must be positive, got {v}")));
        }
        Ok(v)
    }

    fn integer(&self, key: &str, default: Option<usize>) -> Result<usize> {
        let text = match (self.get(key), default) {
            (Some(t), _) => t,
            (None, Some(d)) => return Ok(d),
            (None, None) => self.required(key)?,
        };
        text.parse().map_err(|_| self.err(key, format!("expected a non-negative integer, got `{text}`")))
    }

    fn choice<T: Copy>(&self, key: &str, default: T, options: &[(&str, T)]) -> Result<T> {
        let Some(text) = self.get(key) else { return Ok(default) };
        options.iter().find(|(name, _)| *name == text).map(|&(_, v)| v).ok_or_else(|| {
            let names: Vec<_> = options.iter().map(|(n, _)| *n).collect();
            self.err(key, format!("expected one of {}, got `{text}`", names.join(", ")))
        })
    }
}

fn lex(text: &str) -> Result<Raw> {
    let mut entries: HashMap<String, Entry> = HashMap::new();
    let mut section: Option<String> = None;
    let mut last_line = 0;
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| PeError::Config { line, message: format!("malformed section header `{content}`") })?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(PeError::Config {
                    line,
                    message: format!("unknown section [{name}]; expected one of [{}]", SECTIONS.join("], [")),
                });
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| PeError::Config { line, message: format!("expected `key = value`, got `{content}`") })?;
        let (key, value) = (key.trim(), value.trim());
        let home = section_of(key).ok_or_else(|| PeError::Config { line, message: format!("{key}: unknown key") })?;
        match &section {
            None => return Err(PeError::Config { line, message: format!("{key}: appears before any [section]") }),
            Some(s) if s != home => {
                return Err(PeError::Config { line, message: format!("{key}: belongs in [{home}], not [{s}]") })
            }
            _ => {}
        }
        if value.is_empty() {
            return Err(PeError::Config { line, message: format!("{key}: empty value") });
        }
        if let Some(first) = entries.get(key) {
            return Err(PeError::Config {
                line,
                message: format!("{key}: duplicate key (first set on line {})", first.line),
            });
        }
        entries.insert(key.to_string(), Entry { line, value: value.to_string() });
    }
    Ok(Raw { entries, last_line })
}

/// Parses and validates a scenario file. Referenced files are not read.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let raw = lex(text)?;
    let on_off = [("on", true), ("off", false)];
    let cfg = ScenarioConfig {
        frequency_hz: raw.positive("frequency_hz", None)?,
        polarization: raw.choice(
            "polarization",
            Polarization::Horizontal,
            &[("horizontal", Polarization::Horizontal), ("vertical", Polarization::Vertical)],
        )?,
        antenna_height_m: raw.positive("antenna_height_m", None)?,
        beamwidth_deg: raw.positive("beamwidth_deg", None)?,
        elevation_deg: raw.number("elevation_deg", Some(0.0))?,
        max_range_m: raw.positive("max_range_m", None)?,
        range_step_m: raw.positive("range_step_m", None)?,
        max_height_m: raw.positive("max_height_m", None)?,
        nz: raw.integer("nz", None)?,
        max_angle_deg: raw.positive("max_angle_deg", Some(15.0))?,
        angle_mode: raw.choice(
            "angle_mode",
            AngleMode::Narrow,
            &[("narrow", AngleMode::Narrow), ("wide", AngleMode::Wide)],
        )?,
        solver: raw.choice(
            "solver",
            Solver::SplitStep,
            &[("ssft", Solver::SplitStep), ("cn_fd", Solver::CrankNicolson)],
        )?,
        boundary: raw.choice("boundary", Ground::Pec, &[("pec", Ground::Pec), ("impedance", Ground::Impedance)])?,
        epsilon_r: raw.number("epsilon_r", Some(70.0))?,
        sigma_s_per_m: raw.number("sigma_s_per_m", Some(5.0))?,
        absorber_fraction: raw.number("absorber_fraction", Some(0.25))?,
        two_way: raw.choice("two_way", false, &on_off)?,
        refractivity: raw.choice(
            "refractivity",
            RefractivityKind::Standard,
            &[
                ("vacuum", RefractivityKind::Vacuum),
                ("standard", RefractivityKind::Standard),
                ("evaporation_duct", RefractivityKind::EvaporationDuct),
                ("tabulated", RefractivityKind::Tabulated),
            ],
        )?,
        m0: raw.number("m0", Some(DEFAULT_M0))?,
        gradient: raw.number("gradient", Some(DEFAULT_GRADIENT))?,
        duct_height_m: raw.get("duct_height_m").map(|_| raw.positive("duct_height_m", None)).transpose()?,
        refractivity_file: raw.get("refractivity_file").map(str::to_string),
        terrain_file: raw.get("terrain_file").map(str::to_string),
        output_every: raw.integer("output_every", Some(1))?,
        quantity: raw.choice(
            "quantity",
            Quantity::PropagationFactor,
            &[
                ("pf", Quantity::PropagationFactor),
                ("path_loss", Quantity::PathLoss),
                ("magnitude", Quantity::Magnitude),
            ],
        )?,
    };
    cross_check(&cfg, &raw)?;
    Ok(cfg)
}

fn cross_check(cfg: &ScenarioConfig, raw: &Raw) -> Result<()> {
    if !cfg.nz.is_power_of_two() {
        return Err(raw.err("nz", "nz must be a power of two"));
    }
    if AbsorberWindow::new(cfg.absorber_fraction).is_none() {
        return Err(raw.err("absorber_fraction", format!("must lie in (0, 1), got {}", cfg.absorber_fraction)));
    }
    if cfg.output_every == 0 {
        return Err(raw.err("output_every", "must be at least 1"));
    }
    if cfg.sigma_s_per_m < 0.0 {
        return Err(raw.err("sigma_s_per_m", "conductivity must be non-negative"));
    }
    match cfg.refractivity {
        RefractivityKind::EvaporationDuct if cfg.duct_height_m.is_none() => {
            return Err(raw.err("duct_height_m", "required when refractivity = evaporation_duct"));
        }
        RefractivityKind::Tabulated if cfg.refractivity_file.is_none() => {
            return Err(raw.err("refractivity_file", "required when refractivity = tabulated"));
        }
        _ => {}
    }
    if cfg.solver == Solver::CrankNicolson && cfg.angle_mode == AngleMode::Wide {
        return Err(raw.err("solver", "cn_fd supports angle_mode = narrow only"));
    }
    if cfg.solver == Solver::CrankNicolson && cfg.two_way {
        return Err(raw.err("two_way", "the two-way march needs solver = ssft"));
    }
    let grid = build_grid(&cfg.grid_spec()).map_err(|e| {
        let key = match &e {
            PeError::Grid(m) if m.contains("range step") => "range_step_m",
            PeError::Grid(m) if m.contains("maximum angle") => "max_angle_deg",
            _ => "nz",
        };
        raw.err(key, e)
    })?;
    let antenna = cfg.antenna();
    gaussian_initial_field(&grid, &antenna, cfg.absorber_fraction).map_err(|e| {
        let key = match &e {
            PeError::Source(m) if m.contains("beamwidth") => "beamwidth_deg",
            PeError::Source(m) if m.contains("elevation") => "elevation_deg",
            _ => "antenna_height_m",
        };
        raw.err(key, e)
    })?;
    if cfg.boundary == Ground::Impedance {
        cfg.boundary_spec(grid.wavenumber).map_err(|e| raw.err("epsilon_r", e))?;
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            frequency_hz: self.frequency_hz,
            max_range_m: self.max_range_m,
            range_step_m: self.range_step_m,
            max_height_m: self.max_height_m,
            num_height_points: self.nz,
            max_angle_deg: self.max_angle_deg,
        }
    }

    pub fn antenna(&self) -> AntennaSpec {
        AntennaSpec {
            height: self.antenna_height_m,
            beamwidth_deg: self.beamwidth_deg,
            elevation_deg: self.elevation_deg,
            polarization: self.polarization,
        }
    }

    pub fn boundary_spec(&self, k: f64) -> Result<BoundarySpec> {
        match self.boundary {
            Ground::Pec => Ok(BoundarySpec::pec(self.polarization)),
            Ground::Impedance => {
                let omega = 2.0 * std::f64::consts::PI * self.frequency_hz;
                BoundarySpec::impedance(
                    complex_permittivity(self.epsilon_r, self.sigma_s_per_m, omega),
                    self.polarization,
                    k,
                )
            }
        }
    }

    /// Builds the scenario, reading referenced files relative to `base_dir`.
    pub fn to_scenario(&self, base_dir: &Path) -> Result<Scenario> {
        let grid = build_grid(&self.grid_spec())?;
        let resolve = |p: &str| -> PathBuf { base_dir.join(p) };
        let read = |key: &str, p: &str| {
            std::fs::read_to_string(resolve(p)).map_err(|e| PeError::ConfigValue(format!("{key} `{p}`: {e}")))
        };
        let profile = match self.refractivity {
            RefractivityKind::Vacuum => None,
            RefractivityKind::Standard => Some(standard_profile(self.m0, self.gradient)?),
            RefractivityKind::EvaporationDuct => Some(evaporation_duct_profile(
                self.m0,
                self.duct_height_m.ok_or_else(|| PeError::ConfigValue("duct_height_m missing".into()))?,
            )?),
            RefractivityKind::Tabulated => {
                let p = self.refractivity_file.as_deref().unwrap_or_default();
                Some(parse_profile_table(&read("refractivity_file", p)?)?)
            }
        };
        let terrain = match &self.terrain_file {
            Some(p) => Some(ingest_elevation(&read("terrain_file", p)?)?),
            None => None,
        };
        let mut s = Scenario::new(grid, self.antenna());
        s.refractivity = profile.map_or_else(RefractivityField::vacuum, RefractivityField::homogeneous);
        s.terrain = terrain;
        s.boundary = self.boundary_spec(s.grid.wavenumber)?;
        s.absorber = AbsorberWindow::new(self.absorber_fraction);
        s.angle_mode = self.angle_mode;
        s.output_every = self.output_every;
        s.validate()?;
        Ok(s)
    }

    /// Canonical text form; parsing it yields `self` again.
    pub fn serialize(&self) -> String {
        fn name<T: PartialEq>(v: T, options: &[(&'static str, T)]) -> &'static str {
            options.iter().find(|(_, o)| *o == v).map(|(n, _)| *n).expect("every variant is named")
        }
        let mut s = String::new();
        let w = &mut s;
        let _ = writeln!(w, "[antenna]");
        let _ = writeln!(w, "frequency_hz = {}", self.frequency_hz);
        let pol =
            name(self.polarization, &[("horizontal", Polarization::Horizontal), ("vertical", Polarization::Vertical)]);
        let _ = writeln!(w, "polarization = {pol}");
        let _ = writeln!(w, "antenna_height_m = {}", self.antenna_height_m);
        let _ = writeln!(w, "beamwidth_deg = {}", self.beamwidth_deg);
        let _ = writeln!(w, "elevation_deg = {}", self.elevation_deg);
        let _ = writeln!(w, "\n[grid]");
        let _ = writeln!(w, "max_range_m = {}", self.max_range_m);
        let _ = writeln!(w, "range_step_m = {}", self.range_step_m);
        let _ = writeln!(w, "max_height_m = {}", self.max_height_m);
        let _ = writeln!(w, "nz = {}", self.nz);
        let _ = writeln!(w, "max_angle_deg = {}", self.max_angle_deg);
        let mode = name(self.angle_mode, &[("narrow", AngleMode::Narrow), ("wide", AngleMode::Wide)]);
        let _ = writeln!(w, "angle_mode = {mode}");
        let solver = name(self.solver, &[("ssft", Solver::SplitStep), ("cn_fd", Solver::CrankNicolson)]);
        let _ = writeln!(w, "solver = {solver}");
        let _ = writeln!(w, "\n[environment]");
        let ground = name(self.boundary, &[("pec", Ground::Pec), ("impedance", Ground::Impedance)]);
        let _ = writeln!(w, "boundary = {ground}");
        let _ = writeln!(w, "epsilon_r = {}", self.epsilon_r);
        let _ = writeln!(w, "sigma_s_per_m = {}", self.sigma_s_per_m);
        let _ = writeln!(w, "absorber_fraction = {}", self.absorber_fraction);
        let _ = writeln!(w, "two_way = {}", if self.two_way { "on" } else { "off" });
        let kind = name(
            self.refractivity,
            &[
                ("vacuum", RefractivityKind::Vacuum),
                ("standard", RefractivityKind::Standard),
                ("evaporation_duct", RefractivityKind::EvaporationDuct),
                ("tabulated", RefractivityKind::Tabulated),
            ],
        );
        let _ = writeln!(w, "refractivity = {kind}");
        let _ = writeln!(w, "m0 = {}", self.m0);
        let _ = writeln!(w, "gradient = {}", self.gradient);
        if let Some(d) = self.duct_height_m {
            let _ = writeln!(w, "duct_height_m = {d}");
        }
        if let Some(p) = &self.refractivity_file {
            let _ = writeln!(w, "refractivity_file = {p}");
        }
        if let Some(p) = &self.terrain_file {
            let _ = writeln!(w, "terrain_file = {p}");
        }
        let _ = writeln!(w, "\n[output]");
        let _ = writeln!(w, "output_every = {}", self.output_every);
        let q = match self.quantity {
            Quantity::PropagationFactor => "pf",
            Quantity::PathLoss => "path_loss",
            Quantity::Magnitude => "magnitude",
        };
        let _ = writeln!(w, "quantity = {q}");
        s
    }
}
