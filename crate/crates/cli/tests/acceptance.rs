//! The acceptance gate: every criterion at its stated tolerance, with one
//! pass/fail line each. The report goes straight to stdout, so it shows up
//! without `--nocapture`.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use sspe_core::validation::{run_suite, Check};

struct Criterion {
    id: usize,
    suite: &'static str,
    title: &'static str,
    /// Wall-clock ceiling, if the criterion states one.
    budget: Option<Duration>,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, suite: "roundtrip", title: "transform round trip", budget: Some(Duration::from_secs(1)) },
    Criterion { id: 2, suite: "unitarity", title: "interior unitarity", budget: Some(Duration::from_secs(5)) },
    Criterion { id: 3, suite: "single_mode", title: "single-mode exactness", budget: None },
    Criterion { id: 4, suite: "freespace", title: "free-space Gaussian", budget: Some(Duration::from_secs(30)) },
    Criterion { id: 5, suite: "two_ray", title: "two-ray over PEC sea", budget: None },
    Criterion {
        id: 6,
        suite: "cross_validation",
        title: "split-step vs Crank-Nicolson",
        budget: Some(Duration::from_secs(120)),
    },
    Criterion { id: 7, suite: "knife_edge", title: "knife-edge wall", budget: Some(Duration::from_secs(60)) },
    Criterion { id: 8, suite: "impedance", title: "impedance limits", budget: None },
    Criterion { id: 9, suite: "two_way", title: "two-way sanity", budget: None },
    Criterion { id: 10, suite: "convergence", title: "grid convergence", budget: None },
    Criterion { id: 11, suite: "format", title: "format and CLI", budget: None },
];

const CONFIG: &str = "\
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

/// Drives the binary: run twice, info, export, and compares the results.
fn cli_round_trip(dir: &Path) -> Vec<Check> {
    let sspe = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_sspe")).args(args).current_dir(dir).output().expect("spawn sspe")
    };
    std::fs::write(dir.join("s.cfg"), CONFIG).unwrap();
    let runs_ok = sspe(&["run", "s.cfg", "-o", "a.pefm"]).status.success()
        && sspe(&["run", "s.cfg", "-o", "b.pefm"]).status.success();
    let a = std::fs::read(dir.join("a.pefm")).unwrap_or_default();
    let b = std::fs::read(dir.join("b.pefm")).unwrap_or_default();
    let info = sspe(&["info", "a.pefm"]);
    let export = sspe(&["export", "a.pefm", "--csv", "-o", "a.csv"]);
    let csv = std::fs::read_to_string(dir.join("a.csv")).unwrap_or_default();

    let map = sspe_core::pefm::decode(&a);
    let (info_ok, worst) = match &map {
        Ok(m) => {
            let text = String::from_utf8_lossy(&info.stdout);
            let info_ok = info.status.success()
                && text.contains(&format!("n_range: {}", m.n_range))
                && text.contains(&format!("n_height: {}", m.n_height));
            let mut rows = csv.lines();
            let header = rows.next() == Some("range_m,height_m,value_db");
            let mut worst = if header && export.status.success() { 0.0f64 } else { f64::INFINITY };
            let mut count = 0;
            for (line, v) in rows.zip(&m.values) {
                let mut f = line.split(',').map(|s| s.parse::<f64>().unwrap_or(f64::NAN));
                let (x, z, val) = (f.next().unwrap(), f.next().unwrap(), f.next().unwrap());
                let i = count / m.n_height;
                let j = count % m.n_height;
                if x != m.range(i) || z != m.height(j) || val.is_nan() {
                    worst = f64::INFINITY;
                }
                worst = worst.max((val - v).abs());
                count += 1;
            }
            if count != m.values.len() {
                worst = f64::INFINITY;
            }
            (info_ok, worst)
        }
        Err(_) => (false, f64::INFINITY),
    };
    vec![
        Check::holds("cli_rerun_byte_identical", runs_ok && !a.is_empty() && a == b),
        Check::holds("cli_info_header", info_ok),
        Check::at_most("cli_export_value_error_db", worst, 1e-4),
    ]
}

#[test]
fn acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    let mut failed = Vec::new();
    for c in CRITERIA {
        let start = Instant::now();
        let report = run_suite(c.suite).expect("suite runs").remove(0);
        let mut checks = report.checks;
        if c.id == 11 {
            checks.extend(cli_round_trip(dir.path()));
        }
        let elapsed = start.elapsed();
        if let Some(budget) = c.budget {
            checks.push(Check::at_most("runtime_s", elapsed.as_secs_f64(), budget.as_secs_f64()));
        }
        for check in &checks {
            writeln!(out, "    {}.{check}", c.suite).unwrap();
        }
        let ok = checks.iter().all(Check::passed);
        let verdict = if ok { "PASS" } else { "FAIL" };
        writeln!(out, "criterion {:>2} {:<30} {verdict} ({:.2} s)", c.id, c.title, elapsed.as_secs_f64()).unwrap();
        if !ok {
            failed.push(c.id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
