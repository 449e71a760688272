use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fractherm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fractherm"))
        .args(args)
        .env_remove("FRACTHERM_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(fractherm(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn range_violation_exits_one_and_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        "schema_version = 1\nkind = \"run\"\n[params]\ndelta = -1.0\n",
    );
    let out = fractherm(&[
        "run",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("params.delta") && err.contains("δ is a positive constant"),
        "{err}"
    );
}

#[test]
fn kind_must_match_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "schema_version = 1\nkind = \"pair\"\n",
    );
    assert_eq!(fractherm(&["run", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn divergence_and_nonconvergence_codes() {
    let dir = tempfile::tempdir().unwrap();
    let blow = write(
        dir.path(),
        "blow.toml",
        "schema_version = 1\nkind = \"run\"\n[basis]\nnx = 6\nny = 6\n[integrator]\ndt = 0.5\nt_end = 50.0\n\
         [initial]\nkind = \"smooth\"\nu = 200.0\nv = 0.0\ntheta = 0.0\n",
    );
    let out = dir.path().join("blow");
    assert_eq!(
        fractherm(&["run", "--config", &blow, "--out", out.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let stuck = write(
        dir.path(),
        "stuck.toml",
        "schema_version = 1\nkind = \"stationary\"\n[basis]\nnx = 6\nny = 6\n[params.forcing]\nkind = \"mode\"\nj = 1\nk = 1\n\
         amplitude = 50.0\n[stationary]\nmax_iter = 1\n",
    );
    let out = dir.path().join("stuck");
    assert_eq!(
        fractherm(&[
            "stationary",
            "--config",
            &stuck,
            "--out",
            out.to_str().unwrap()
        ])
        .status
        .code(),
        Some(3)
    );
}

#[test]
fn rerun_from_manifest_matches() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "pair.toml",
        "schema_version = 1\nkind = \"pair\"\nseed = 5\n[basis]\nnx = 6\nny = 6\n[integrator]\ndt = 0.01\nt_end = 0.5\n\
         log_every = 5\n[pair]\ncount = 3\n",
    );
    let first = dir.path().join("first");
    let out = fractherm(&[
        "pair",
        "--config",
        &cfg,
        "--out",
        first.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest = first.join("manifest.json");
    let second = dir.path().join("second");
    let out = fractherm(&[
        "pair",
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("all hashes identical"));
    for f in ["pair_report.json", "pairs/pair_002.csv"] {
        assert_eq!(
            fs::read(first.join(f)).unwrap(),
            fs::read(second.join(f)).unwrap()
        );
    }
}

#[test]
fn env_override_sets_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from_env");
    let out = Command::new(env!("CARGO_BIN_EXE_fractherm"))
        .args(["selfcheck"])
        .env("FRACTHERM_OUT_DIR", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("manifest.json").exists());
    assert!(target.join("selfcheck.json").exists());
}
