use std::path::PathBuf;
use std::process::{Command, Output};

use nanoramsey::commands::{visibility_for, SurfaceAxes};
use nanoramsey::RunConfig;
use nanoramsey_core::decoherence::{visibility_point, BlackbodyFamily};

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nanoramsey")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn cfg(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn write_config(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn column(csv: &str, idx: usize) -> Vec<f64> {
    csv.lines().skip(1).map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

fn paper_without(key: &str) -> String {
    std::fs::read_to_string(configs().join("paper_nominal.toml"))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with(key))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn certify_bundled_config_passes() {
    let o = run(&["certify", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn certify_unbalanced_fails() {
    let o = run(&["certify", "--config", &cfg("unbalanced.toml"), "--format", "text"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn negative_t3_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("desk_scale.toml")).unwrap().replace("t3 = 4e-3", "t3 = -4e-3");
    let path = write_config(&dir, "bad.toml", &text);
    let o = run(&["certify", "--config", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("t3"));
}

#[test]
fn missing_mw_frequency_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(&dir, "c.toml", &paper_without("mw_frequency"));
    let o = run(&["budget", "--config", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mw_frequency"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["fringe", "--config", &cfg("desk_scale.toml")]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let o = run(&["fringe", "--config", &cfg("desk_scale.toml"), "--param", "colour", "--values", "1,2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn theta_fringe_ends_at_unit_probability() {
    let o = run(&[
        "fringe", "--config", &cfg("paper_nominal.toml"), "--param", "theta", "--start", "0",
        "--stop", "1.5707963267948966", "--count", "9",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), "theta,phi_g_rad,p0,delta_x_max_m");
    let p0 = column(&out, 2);
    assert_eq!(p0.len(), 9);
    assert!((p0[8] - 1.0).abs() < 1e-12);
}

#[test]
fn t3_fringe_is_cubic() {
    let o = run(&["fringe", "--config", &cfg("paper_nominal.toml"), "--param", "t3", "--start", "1e-5", "--stop", "1e-4", "--count", "6", "--log"]);
    let out = stdout(&o);
    let t = column(&out, 0);
    let phi = column(&out, 1);
    for w in t.iter().zip(&phi).collect::<Vec<_>>().windows(2) {
        let slope = (w[1].1 / w[0].1).ln() / (w[1].0 / w[0].0).ln();
        assert!((slope - 3.0).abs() < 1e-9, "{slope}");
    }
}

#[test]
fn force_free_fringe_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let text = paper_without("b_gradient") + "\nb_gradient = 0\n";
    let path = write_config(&dir, "free.toml", &text);
    let o = run(&["fringe", "--config", &path, "--param", "t3", "--values", "1e-5,5e-5,1e-4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(column(&stdout(&o), 2).iter().all(|p| *p == 1.0));
}

#[test]
fn visibility_matches_library_points() {
    let args = ["--dx-min", "1e-8", "--dx-max", "1e-6", "--dx-count", "4", "--tint-min", "10", "--tint-max", "2000", "--tint-count", "3"];
    let o = run(&[&["visibility", "--config", &cfg("paper_nominal.toml")][..], &args].concat());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rc = RunConfig::load(&configs().join("paper_nominal.toml")).unwrap();
    let params = rc.params().unwrap();
    let fam = BlackbodyFamily::from_config(&params, &rc.values);
    let axes = SurfaceAxes { dx_count: 4, t_int_count: 3, ..SurfaceAxes::default() };
    let (dx_axis, t_axis) = axes.axes().unwrap();
    assert_eq!(out.lines().count(), 1 + t_axis.len());
    for (line, t) in out.lines().skip(1).zip(&t_axis) {
        let cells: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(cells.len(), 1 + dx_axis.len());
        for (dx, v) in dx_axis.iter().zip(&cells[1..]) {
            let lib = visibility_point(&fam, *dx, *t, params.t3).unwrap();
            assert_eq!(format!("{lib:.11e}").parse::<f64>().unwrap(), *v);
        }
    }
}

#[test]
fn zero_rate_surface_is_all_ones() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("paper_nominal.toml")).unwrap() + "response_im = 0\nresponse_scatter = 0\n";
    let path = write_config(&dir, "dark.toml", &text);
    let rc = RunConfig::load(std::path::Path::new(&path)).unwrap();
    let axes = SurfaceAxes { dx_count: 5, t_int_count: 5, ..SurfaceAxes::default() };
    let s = visibility_for(&rc, &axes, 2).unwrap();
    assert!(s.visibility.iter().flatten().all(|v| *v == 1.0));
}

#[test]
fn budget_json_reports_collapse_bound() {
    let o = run(&["budget", "--config", &cfg("paper_nominal.toml"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let bound = v["data"]["csl_bound"].as_f64().unwrap();
    assert!((bound - 5e-15).abs() < 1e-27);
    assert!(v["config_hash"].is_string());
    assert!(v["data"]["notes"].as_array().unwrap().len() >= 3);
}

#[test]
fn nucleon_override_changes_bound() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(&dir, "c.toml", &paper_without("n_nucleons"));
    let bound = |c: &str| {
        let o = run(&["budget", "--config", c, "--format", "json"]);
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        (v["data"]["csl_bound"].as_f64().unwrap(), v["data"]["csl_bound_from_mass"].as_f64().unwrap())
    };
    let (with, from_mass) = bound(&cfg("paper_nominal.toml"));
    let (without, _) = bound(&path);
    assert!(with != without);
    assert_eq!(without, from_mass);
}

#[test]
fn dicke_sectors() {
    let o = run(&["dicke", "--config", &cfg("desk_scale.toml"), "--l", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 5);
    let mult = column(&out, 2);
    assert_eq!(mult, vec![1.0, 3.0, 3.0, 1.0]);
}

#[test]
fn dump_snapshots_rows() {
    let o = run(&["dump-snapshots", "--config", &cfg("desk_scale.toml"), "--times", "0,2e-3,4e-3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.lines().count() > 3);
    // megaradian phase: refused up front as out of the grid's range
    let o = run(&["dump-snapshots", "--config", &cfg("paper_nominal.toml"), "--times", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
}

#[test]
fn thermal_sweep_requires_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(&dir, "c.toml", &paper_without("seed"));
    let args = ["sweep", "--config", &path, "--param", "t_cm", "--values", "1e-3", "--outputs", "thermal_phase_spread"];
    assert_eq!(run(&args).status.code(), Some(1));
    let mut with = args.to_vec();
    with.extend(["--seed", "7"]);
    assert_eq!(run(&with).status.code(), Some(0));
}

#[test]
fn outputs_are_byte_reproducible() {
    let paper = cfg("paper_nominal.toml");
    let desk = cfg("desk_scale.toml");
    let cases: Vec<Vec<&str>> = vec![
        vec!["fringe", "--config", &paper, "--param", "theta", "--start", "0", "--stop", "1.5", "--count", "5"],
        vec!["visibility", "--config", &paper, "--dx-count", "3", "--tint-count", "3", "--format", "json"],
        vec!["certify", "--format", "json"],
        vec!["budget", "--config", &paper, "--format", "json"],
        vec!["dicke", "--config", &desk, "--l", "4", "--format", "json"],
        vec!["sweep", "--config", &paper, "--param", "t_cm", "--values", "1e-4,1e-3", "--outputs", "thermal_phase_spread,p0"],
        vec!["dump-snapshots", "--config", &desk, "--times", "1e-3"],
    ];
    for args in cases {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn worker_count_does_not_change_sweeps() {
    let paper = cfg("paper_nominal.toml");
    let base = ["sweep", "--config", &paper, "--param", "theta", "--start", "0", "--stop", "1.5", "--count", "17", "--outputs", "phi_g,p0,overlap_modulus"];
    let one = run(&[&base[..], &["--workers", "1"]].concat());
    let four = run(&[&base[..], &["--workers", "4"]].concat());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(stdout(&one).lines().count(), 18);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.txt");
    let o = run(&["budget", "--config", &cfg("paper_nominal.toml"), "--format", "text", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(out).unwrap().contains("csl"));
}
