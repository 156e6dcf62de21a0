//! Config text to field map, through the public API only.

use sspe_core::field::relative_l2;
use sspe_core::postprocess::{free_space_loss, path_loss, propagation_factor, TERRAIN_SENTINEL};
use sspe_core::run::{coverage, manifest_path, solve};
use sspe_core::{march, parse_config, pefm, run_scenario, Quantity};

const FLAT_SEA: &str = "\
# flat PEC sea, horizontal polarization
[antenna]
frequency_hz = 3e9
polarization = horizontal
antenna_height_m = 10
beamwidth_deg = 1

[grid]
max_range_m = 2000
range_step_m = 5
max_height_m = 128
nz = 4096

[output]
output_every = 40
";

fn vacuum_config(extra_output: &str) -> String {
    format!(
        "[antenna]\nfrequency_hz = 3e9\npolarization = horizontal\nantenna_height_m = 150\nbeamwidth_deg = 3\n\n\
         [grid]\nmax_range_m = 3000\nrange_step_m = 10\nmax_height_m = 512\nnz = 4096\n\n\
         [environment]\nrefractivity = vacuum\n\n\
         [output]\noutput_every = 50\n{extra_output}"
    )
}

#[test]
fn vacuum_propagation_factor_is_zero_on_axis() {
    let cfg = parse_config(&vacuum_config("")).unwrap();
    let scenario = cfg.to_scenario(std::path::Path::new(".")).unwrap();
    let result = march(&scenario).unwrap();
    let pf = propagation_factor(&result, &scenario).unwrap();
    let axis = (150.0 / pf.dz).round() as usize;
    for i in 0..pf.n_range {
        assert!(pf.value(i, axis).abs() < 0.05, "range {}: {}", pf.range(i), pf.value(i, axis));
    }
}

#[test]
fn path_loss_is_free_space_minus_pf() {
    let cfg = parse_config(&vacuum_config("quantity = path_loss\n")).unwrap();
    let scenario = cfg.to_scenario(std::path::Path::new(".")).unwrap();
    let result = solve(&cfg, &scenario).unwrap();
    let pl = coverage(&cfg, &scenario, &result).unwrap();
    let pf = propagation_factor(&result, &scenario).unwrap();
    assert_eq!(pl.quantity, Quantity::PathLoss);
    assert_eq!(pl.n_range, pf.n_range - 1);
    let fsl = free_space_loss(pl.range(0), 3e9);
    for j in (0..pl.n_height).step_by(97) {
        assert!((pl.value(0, j) - (fsl - pf.value(1, j))).abs() < 1e-9);
    }
    assert_eq!(path_loss(&pf, 3e9).unwrap(), pl);
}

#[test]
fn cn_and_split_step_files_agree_on_flat_sea() {
    let dir = tempfile::tempdir().unwrap();
    let ssft = parse_config(&FLAT_SEA.replace("[output]", "[output]\nquantity = magnitude")).unwrap();
    let cn_text = FLAT_SEA
        .replace("nz = 4096", "nz = 4096\nsolver = cn_fd")
        .replace("[output]", "[output]\nquantity = magnitude");
    let cn = parse_config(&cn_text).unwrap();
    let (a, b) = (dir.path().join("ssft.pefm"), dir.path().join("cn.pefm"));
    run_scenario(&ssft, dir.path(), &a).unwrap();
    run_scenario(&cn, dir.path(), &b).unwrap();
    let (ma, mb) = (pefm::read_file(&a).unwrap(), pefm::read_file(&b).unwrap());
    assert_eq!((ma.n_range, ma.n_height), (mb.n_range, mb.n_height));
    let to_c = |v: &[f64]| v.iter().map(|x| num_complex::Complex64::new(*x, 0.0)).collect::<Vec<_>>();
    for i in 1..ma.n_range {
        let d = relative_l2(&to_c(ma.column(i)), &to_c(mb.column(i)));
        assert!(d < 0.01, "column {i}: {d}");
    }
}

#[test]
fn manifest_records_config_and_norms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(FLAT_SEA).unwrap();
    let out = dir.path().join("run.pefm");
    let summary = run_scenario(&cfg, dir.path(), &out).unwrap();
    let manifest = std::fs::read_to_string(manifest_path(&out)).unwrap();
    assert!(manifest.contains("frequency_hz = 3000000000"));
    assert!(manifest.contains("norm"));
    assert!(summary.norm_min <= summary.norm_max);
    assert_eq!(pefm::read_file(&out).unwrap().n_range, summary.n_range);
}

#[test]
fn unwritable_output_leaves_nothing_behind() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(FLAT_SEA).unwrap();
    let out = dir.path().join("missing/run.pefm");
    assert!(run_scenario(&cfg, dir.path(), &out).is_err());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn terrain_file_masks_and_two_way_runs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("hill.txt"), "0 0\n900 0\n1000 30\n2000 30\n").unwrap();
    let text = FLAT_SEA.replace("[output]", "[environment]\nterrain_file = hill.txt\ntwo_way = on\n\n[output]");
    let cfg = parse_config(&text).unwrap();
    let scenario = cfg.to_scenario(dir.path()).unwrap();
    let result = solve(&cfg, &scenario).unwrap();
    assert!(result.is_two_way());
    assert!(!result.spawns.is_empty());
    let pf = coverage(&cfg, &scenario, &result).unwrap();
    let last = pf.n_range - 1;
    let ground = (30.0 / pf.dz).ceil() as usize;
    assert!(pf.column(last)[..ground].iter().all(|&v| v == TERRAIN_SENTINEL));
    assert!(pf.column(last)[ground..].iter().all(|v| v.is_finite() && *v != TERRAIN_SENTINEL));
}

#[test]
fn serialized_config_reproduces_the_run() {
    let cfg = parse_config(FLAT_SEA).unwrap();
    let again = parse_config(&cfg.serialize()).unwrap();
    assert_eq!(again, cfg);
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.pefm"), dir.path().join("b.pefm"));
    run_scenario(&cfg, dir.path(), &a).unwrap();
    run_scenario(&again, dir.path(), &b).unwrap();
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}
