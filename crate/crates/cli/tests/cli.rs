use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracdelay")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn small_run(out: &Path) -> Vec<String> {
    ["--preset", "ex1", "--tmax", "1.4", "--out", out.to_str().unwrap()].iter().map(|s| s.to_string()).collect()
}

#[test]
fn successful_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = small_run(dir.path());
    args.push("--plot-data".into());
    let o = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["euler.csv", "rk4.csv", "rk4-interp.csv", "errors.csv", "plotdata.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let errors = fs::read_to_string(dir.path().join("errors.csv")).unwrap();
    assert_eq!(errors.lines().next().unwrap(), "scheme,max_rel,rms_rel,max_abs,n_points,diverged_at");
    let plot = fs::read_to_string(dir.path().join("plotdata.csv")).unwrap();
    assert_eq!(plot.lines().next().unwrap(), "t,series,euler,rk4,rk4-interp,rel_euler,rel_rk4,rel_rk4-interp");
    let traj = fs::read_to_string(dir.path().join("euler.csv")).unwrap();
    assert_eq!(traj.lines().next().unwrap(), "t,y");
    assert_eq!(traj.lines().count(), 1 + 1401);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"preset": "ex1", "t_max": 100.0, "schemes": ["rk4"]}"#).unwrap();
    let out = dir.path().join("out");
    let o = run(&["--config", cfg.to_str().unwrap(), "--tmax", "0.7", "--schemes", "euler", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("euler.csv").exists());
    assert!(!out.join("rk4.csv").exists());
    assert_eq!(fs::read_to_string(out.join("euler.csv")).unwrap().lines().count(), 1 + 701);
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, "{\n  \"alpha\": 0.5,\n  \"beta\": 2\n}").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("beta"));
}

#[test]
fn invalid_values_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--alpha", "1.5", "--schemes", "caputo-l1,rk4", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("alpha"), "{err}");
    assert_eq!(run(&["--preset", "ex9"]).status.code(), Some(2));
    assert_eq!(run(&["--no-such-flag"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    let o = run(&small_run(&out).iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&o), 4);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&run(&["--config", missing.to_str().unwrap()])), 4);
}

#[test]
fn divergence_exits_three_and_keeps_results() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--alpha", "1", "--a", "1e150", "--delay", "0.1", "--h", "0.05", "--tmax", "5", "--schemes", "euler", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let errors = fs::read_to_string(dir.path().join("errors.csv")).unwrap();
    let row = errors.lines().nth(1).unwrap();
    assert!(row.starts_with("euler,") && !row.ends_with(','), "{row}");
}

#[test]
fn caputo_preset_with_forcing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--preset", "caputo-bench", "--tmax", "2", "--b-coeffs", "1,0.2,-0.05", "--K", "4", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let errors = fs::read_to_string(dir.path().join("errors.csv")).unwrap();
    let schemes: Vec<&str> = errors.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(schemes, ["caputo-l1", "caputo-l21sigma", "caputo-pc"]);
}
