use jost_besov::cli::{main_with, EXIT_HYPOTHESIS, EXIT_INVALID};
use jost_besov::io::{csv_body, read_csv, read_jost_dump, read_kernel_dump};
use jost_besov::kernels::Provenance;
use jost_besov::{FrequencyGrid, JostField, JostSolver, Potential, Side, SolverOptions, SpatialGrid};
use std::path::Path;
use std::process::Command;

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> i32 {
    main_with(std::iter::once("jost-besov").chain(args.iter().copied()))
}

#[test]
fn scatter_free_case() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[potential]\nkind = \"zero\"\n[scatter]\ntau_max = 5.0\nh_tau = 0.5\n");
    let out = dir.path().join("out");
    assert_eq!(run(&["scatter", "--config", &cfg, "--out", out.to_str().unwrap(), "--grid-points", "513"]), 0);
    let rows: Vec<(f64, f64, f64, f64, f64, f64, f64)> = read_csv(&out.join("scatter.csv")).unwrap();
    assert_eq!(rows.len(), 21);
    for r in rows {
        assert!((r.1 - 1.0).abs() < 1e-12 && r.2.abs() < 1e-12);
        assert!(r.3.abs() + r.4.abs() + r.5.abs() + r.6.abs() < 1e-12);
    }
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("scatter.json")).unwrap()).unwrap();
    assert_eq!(summary["result"]["verdict"], "resonant");
    let text = std::fs::read_to_string(out.join("scatter.csv")).unwrap();
    assert!(text.contains("# config_sha256=") && text.contains("# calibration=") && text.contains("# grid="));
}

#[test]
fn counterexample_fits_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "command = \"counterexample\"\n[counterexample]\nn_values = [4, 8, 16, 32]\n");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(run(&["--config", &cfg, "--out", a.to_str().unwrap()]), 0);
    assert_eq!(run(&["--config", &cfg, "--out", b.to_str().unwrap()]), 0);
    let j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("counterexample.json")).unwrap()).unwrap();
    assert!((j["result"]["slope_i0_sq"].as_f64().unwrap() - 2.0).abs() < 0.05);
    assert!((j["result"]["slope_norm_sq"].as_f64().unwrap() - 1.0).abs() < 0.05);
    assert_eq!(
        std::fs::read(a.join("counterexample.csv")).unwrap(),
        std::fs::read(b.join("counterexample.csv")).unwrap()
    );
}

#[test]
fn crossloc_is_reproducible_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[grid]\nx_min = -15.0\nx_max = 15.0\npoints = 385\n[crossloc]\nk = 2\nj = [-1, 0, 1]\nprobes = 4\nband = [0.5, 8.0]\n",
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    assert_eq!(run(&["crossloc", "--config", &cfg, "--out", a.to_str().unwrap(), "--seed", "11"]), 0);
    assert_eq!(run(&["crossloc", "--config", &cfg, "--out", b.to_str().unwrap(), "--seed", "11"]), 0);
    assert_eq!(run(&["crossloc", "--config", &cfg, "--out", c.to_str().unwrap(), "--seed", "12"]), 0);
    let body = |d: &Path| csv_body(&d.join("crossloc.csv")).unwrap();
    assert_eq!(body(&a), body(&b));
    assert_ne!(body(&a), body(&c));
    assert!(std::fs::read_to_string(a.join("crossloc.csv")).unwrap().contains("# seed=11"));
}

#[test]
fn validation_and_hypothesis_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "[tolerances]\nsolver = 0.0\n");
    assert_eq!(run(&["scatter", "--config", &bad]), EXIT_INVALID);
    assert_eq!(run(&["scatter", "--tol=-1"]), EXIT_INVALID);
    assert_eq!(run(&["scatter", "--grid-points", "1"]), EXIT_INVALID);
    assert_eq!(run(&["--config", &write(dir.path(), "none.toml", "")]), EXIT_INVALID);
    assert_eq!(run(&["bogus"]), EXIT_INVALID);

    let out = dir.path().join("o");
    let high_s = write(dir.path(), "s.toml", "[besov]\ns = [0.6]\n");
    assert_eq!(run(&["besov", "--config", &high_s, "--out", out.to_str().unwrap()]), EXIT_HYPOTHESIS);

    let mut csv = String::from("x,v\n");
    for i in 0..=400 {
        let x = -20.0 + 0.1 * i as f64;
        csv += &format!("{x},{}\n", -2.0 / x.cosh().powi(2));
    }
    write(dir.path(), "well.csv", &csv);
    let well = write(
        dir.path(),
        "well.toml",
        "[potential]\nkind = \"sampled\"\nfile = \"well.csv\"\n[grid]\nx_min = -20.0\nx_max = 20.0\npoints = 513\n",
    );
    assert_eq!(run(&["besov", "--config", &well, "--out", out.to_str().unwrap()]), EXIT_HYPOTHESIS);
}

#[test]
fn jost_dump_matches_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[grid]\nx_min = -10.0\nx_max = 10.0\npoints = 201\n[jost]\nexport_tau_max = 2.0\nexport_h_tau = 1.0\ntau_max = 2.0\nh_tau = 0.1\n",
    );
    let out = dir.path().join("o");
    assert_eq!(run(&["jost", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    let d = read_jost_dump(&out.join("jost.bin")).unwrap();
    let g = SpatialGrid::new(-10.0, 10.0, 201).unwrap();
    let f = FrequencyGrid::uniform(2.0, 1.0).unwrap();
    let solver = JostSolver::new(&Potential::square_barrier(1.0, 1.0), &g, SolverOptions::default()).unwrap();
    let field = JostField::compute(&solver, &f, true).unwrap();
    assert_eq!(d.x, g.nodes());
    assert_eq!(d.tau, f.taus());
    for i in 0..201 {
        for k in 0..f.len() {
            assert_eq!(d.m_plus[[i, k]], field.m(Side::Plus, i, k));
            assert_eq!(d.m_minus[[i, k]], field.m(Side::Minus, i, k));
        }
    }
    let est: Vec<(String, f64, Option<f64>)> = read_csv(&out.join("estimates.csv")).unwrap();
    assert!(est.iter().any(|e| e.0 == "holder"));
}

#[test]
fn kernel_dumps_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[grid]\nx_min = -8.0\nx_max = 8.0\npoints = 129\n[kernel]\nscales = [0.5, 2.0]\n",
    );
    let out = dir.path().join("o");
    assert_eq!(run(&["kernel", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    let k = read_kernel_dump(&out.join("kernel_M2_perturbed.bin")).unwrap();
    assert_eq!(k.provenance, Provenance::Perturbed);
    assert_eq!(k.scale, 2.0);
    assert_eq!(k.n(), 129);
    assert!(k.symmetry_defect() < 1e-6);
    let lead = read_kernel_dump(&out.join("kernel_M0.5_leadingkm.bin")).unwrap();
    assert_eq!(lead.provenance, Provenance::LeadingKm);
    let rows: Vec<(f64, String, Option<f64>, f64, f64)> = read_csv(&out.join("kernel.csv")).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.2.is_some_and(f64::is_finite)));
}

#[test]
fn binary_reports_usage_errors() {
    let bin = env!("CARGO_BIN_EXE_jost-besov");
    let out = Command::new(bin).arg("--seed").arg("notanumber").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INVALID));
    let out = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("--grid-points"));
}
