//! `fractherm` command-line driver.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 numerical divergence,
//! 3 nonconvergence.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fractherm::experiment::{resolve_output_dir, MANIFEST_FILE};
use fractherm::{
    exit_code, parse_config, run_experiment, Error, ExperimentConfig, ExperimentKind, Manifest,
};

#[derive(Debug, Parser)]
#[command(
    name = "fractherm",
    version,
    about = "Spectral laboratory for fractional thermoviscoelastic dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single trajectory with energy and Hölder monitors.
    Run(Common),
    /// Pairs of nearby trajectories with Lipschitz and quasi-stability fits.
    Pair(Common),
    /// Newton solve of the stationary problem.
    Stationary(Common),
    /// Ensemble sampling of an attractor cloud.
    Attractor(Common),
    /// Semidistance sweep of the fractional exponents toward zero.
    Sweep(Common),
    /// Growth and sign certificate of the configured source term.
    Audit(Common),
    /// Fast invariant suite.
    Selfcheck(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration, or a manifest.json to re-run and compare against.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides the configuration and FRACTHERM_OUT_DIR).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed override.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads for ensembles and pairs.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

impl Command {
    fn split(&self) -> (ExperimentKind, &Common) {
        match self {
            Command::Run(c) => (ExperimentKind::Run, c),
            Command::Pair(c) => (ExperimentKind::Pair, c),
            Command::Stationary(c) => (ExperimentKind::Stationary, c),
            Command::Attractor(c) => (ExperimentKind::Attractor, c),
            Command::Sweep(c) => (ExperimentKind::Sweep, c),
            Command::Audit(c) => (ExperimentKind::Audit, c),
            Command::Selfcheck(c) => (ExperimentKind::Selfcheck, c),
        }
    }
}

/// Configuration source: a TOML file, a manifest, or the defaults.
fn load(
    kind: ExperimentKind,
    path: Option<&Path>,
) -> fractherm::Result<(ExperimentConfig, Option<Manifest>)> {
    let Some(path) = path else {
        return Ok((ExperimentConfig::new(kind), None));
    };
    let text = std::fs::read_to_string(path)?;
    let (cfg, manifest) = if path.extension().is_some_and(|e| e == "json") {
        let m = Manifest::parse(&text)?;
        (m.experiment_config()?, Some(m))
    } else {
        (parse_config(&text)?, None)
    };
    if cfg.kind != kind {
        return Err(Error::Config(vec![format!(
            "kind = \"{}\" does not match the `{}` subcommand",
            cfg.kind.name(),
            kind.name()
        )]));
    }
    Ok((cfg, manifest))
}

fn execute(cli: Cli) -> fractherm::Result<()> {
    let (kind, common) = cli.command.split();
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(Error::Config(vec!["--threads must be at least 1".into()]));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Internal(format!("cannot start thread pool: {e}")))?;
    }
    let (mut cfg, original) = load(kind, common.config.as_deref())?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let out = resolve_output_dir(&cfg, common.out.as_deref());
    let manifest = run_experiment(&cfg, &out)?;
    println!(
        "{} complete: {} data files in {} ({:.2} s)",
        kind.name(),
        manifest.files.len(),
        out.join(MANIFEST_FILE).display(),
        manifest.wall_time_s
    );
    if let Some(original) = original {
        let diff = original.mismatches(&manifest);
        if diff.is_empty() {
            println!("rerun matches the recorded manifest: all hashes identical");
        } else {
            for d in &diff {
                eprintln!("mismatch: {d}");
            }
            return Err(Error::Integrity(format!(
                "{} data files differ from the recorded run",
                diff.len()
            )));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
