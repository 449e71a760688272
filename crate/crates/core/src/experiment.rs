//! Experiment orchestration: dispatch, artifacts and manifests.
//!
//! Each experiment writes its data files plus `manifest.json` into one output
//! directory. The manifest echoes the effective configuration, so re-running
//! from it reproduces every data file byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::attractor::{
    absorbing_entry, box_dimension, hausdorff_semidist_coords, leading_coords, member_rng,
    quasi_stability_check, random_state, sample_attractor, semicontinuity_sweep, CloudMeta,
    DimensionEstimate, EpsRange, QuasiStabilityReport, MIN_BOX_POINTS,
};
use crate::checkpoint::{save_states, sha256_file, FORMAT_VERSION};
use crate::config::{parse_config, ExperimentConfig, ExperimentKind, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::integrate::{
    run, run_pair, write_pair_csv, write_trajectory_csv, Integrator, IntegratorConfig, Monitors,
    PairLog, TRAJECTORY_CSV_VERSION,
};
use crate::model::{audit_nonlinearity, Model, NonlinearitySpec, SystemParams};
use crate::spectral::{
    accretivity_form, apply_frac_power, apply_generator, build_basis, resolvent_solve_with,
    state_inner, state_norm, Coupling, PhaseNorm, SineGrid, SpectralField, StateVector,
};
use crate::stationary::{solve_stationary, StationaryExport};

pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
/// Environment variable overriding the configured output directory.
pub const OUT_DIR_ENV: &str = "FRACTHERM_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Running,
    Complete,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Versions {
    pub fractherm: String,
    pub config_schema: u32,
    pub checkpoint_format: u32,
    pub trajectory_csv: u32,
}

impl Default for Versions {
    fn default() -> Self {
        Versions {
            fractherm: env!("CARGO_PKG_VERSION").into(),
            config_schema: SCHEMA_VERSION,
            checkpoint_format: FORMAT_VERSION,
            trajectory_csv: TRAJECTORY_CSV_VERSION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataFile {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub manifest_version: u32,
    pub kind: ExperimentKind,
    pub status: RunStatus,
    #[serde(default)]
    pub error: Option<String>,
    pub seed: u64,
    pub versions: Versions,
    pub started_unix: u64,
    pub wall_time_s: f64,
    /// Effective configuration as a TOML document.
    pub config: String,
    pub files: Vec<DataFile>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Manifest::parse(&fs::read_to_string(path)?)
    }

    /// The configuration recorded in the manifest.
    pub fn experiment_config(&self) -> Result<ExperimentConfig> {
        parse_config(&self.config)
    }

    /// Data files whose hashes differ from `other` (or exist in only one).
    pub fn mismatches(&self, other: &Manifest) -> Vec<String> {
        let mut out = Vec::new();
        for f in &self.files {
            match other.files.iter().find(|g| g.path == f.path) {
                Some(g) if g.sha256 == f.sha256 => {}
                Some(_) => out.push(format!("{}: hash differs", f.path)),
                None => out.push(format!("{}: missing from rerun", f.path)),
            }
        }
        for g in &other.files {
            if !self.files.iter().any(|f| f.path == g.path) {
                out.push(format!("{}: only in rerun", g.path));
            }
        }
        out
    }
}

/// Process exit code for an error: 2 divergence, 3 nonconvergence, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::Divergence { .. } => 2,
        Error::NonConvergence { .. } => 3,
        _ => 1,
    }
}

/// Command-line value, then the environment override, then the configured directory.
pub fn resolve_output_dir(cfg: &ExperimentConfig, cli: Option<&Path>) -> PathBuf {
    if let Some(p) = cli {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(&cfg.output_dir),
    }
}

/// Tracks the data files of one run.
struct Artifacts {
    dir: PathBuf,
    files: Vec<String>,
}

impl Artifacts {
    fn path(&mut self, rel: &str) -> Result<PathBuf> {
        let p = self.dir.join(rel);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent)?;
        }
        self.files.push(rel.to_string());
        Ok(p)
    }

    fn json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let p = self.path(rel)?;
        fs::write(p, serde_json::to_string_pretty(value)? + "\n")?;
        Ok(())
    }

    fn text(&mut self, rel: &str, body: &str) -> Result<()> {
        let p = self.path(rel)?;
        fs::write(p, body)?;
        Ok(())
    }

    fn states(
        &mut self,
        stem: &str,
        states: &[StateVector],
        meta: serde_json::Value,
    ) -> Result<()> {
        let p = self.dir.join(stem);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent)?;
        }
        save_states(&p, states, meta)?;
        self.files.push(format!("{stem}.bin"));
        self.files.push(format!("{stem}.json"));
        Ok(())
    }

    fn hashes(&self) -> Result<Vec<DataFile>> {
        let mut v: Vec<DataFile> = self
            .files
            .iter()
            .map(|f| {
                Ok(DataFile {
                    path: f.clone(),
                    sha256: sha256_file(&self.dir.join(f))?,
                })
            })
            .collect::<Result<_>>()?;
        v.sort_by(|a, b| a.path.cmp(&b.path));
        Ok(v)
    }
}

fn write_manifest(dir: &Path, m: &Manifest) -> Result<()> {
    fs::write(
        dir.join(MANIFEST_FILE),
        serde_json::to_string_pretty(m)? + "\n",
    )?;
    Ok(())
}

/// Run the experiment into `out_dir`, always leaving a manifest behind.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Manifest> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let mut echo = cfg.clone();
    echo.output_dir = out_dir.display().to_string();
    let started = Instant::now();
    let mut manifest = Manifest {
        manifest_version: MANIFEST_VERSION,
        kind: cfg.kind,
        status: RunStatus::Running,
        error: None,
        seed: cfg.seed,
        versions: Versions::default(),
        started_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        wall_time_s: 0.0,
        config: echo.to_toml()?,
        files: Vec::new(),
    };
    write_manifest(out_dir, &manifest)?;
    let mut art = Artifacts {
        dir: out_dir.to_path_buf(),
        files: Vec::new(),
    };
    let result = dispatch(cfg, &mut art);
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    manifest.files = art.hashes()?;
    match result {
        Ok(()) => {
            manifest.status = RunStatus::Complete;
            write_manifest(out_dir, &manifest)?;
            Ok(manifest)
        }
        Err(e) => {
            manifest.status = RunStatus::Failed;
            manifest.error = Some(e.to_string());
            write_manifest(out_dir, &manifest)?;
            Err(e)
        }
    }
}

/// Re-execute the configuration recorded in `manifest_path` into `out_dir`.
pub fn rerun_from_manifest(manifest_path: &Path, out_dir: &Path) -> Result<Manifest> {
    let cfg = Manifest::read(manifest_path)?.experiment_config()?;
    run_experiment(&cfg, out_dir)
}

fn dispatch(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<()> {
    match cfg.kind {
        ExperimentKind::Run => single_run(cfg, art),
        ExperimentKind::Pair => pairs(cfg, art),
        ExperimentKind::Stationary => stationary(cfg, art),
        ExperimentKind::Attractor => attractor(cfg, art),
        ExperimentKind::Sweep => sweep(cfg, art),
        ExperimentKind::Audit => {
            let r = audit_nonlinearity(&cfg.nonlinearity, cfg.audit.half_width, cfg.audit.samples)?;
            art.json("audit.json", &r)
        }
        ExperimentKind::Selfcheck => {
            let r = selfcheck(cfg.seed)?;
            art.json("selfcheck.json", &r)?;
            if r.pass {
                Ok(())
            } else {
                let failed: Vec<&str> = r
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| c.name.as_str())
                    .collect();
                Err(Error::Internal(format!(
                    "selfcheck failed: {}",
                    failed.join(", ")
                )))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub t_end: f64,
    pub steps: usize,
    pub holder_constant: f64,
    pub energy_monotone: bool,
    pub monotone_tolerance: f64,
    pub absorbing_radius: f64,
    pub absorbing_entry: Option<f64>,
    pub lower_bound_violations: usize,
    pub upper_bound_violations: usize,
}

fn single_run(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<()> {
    let model = Model::new(cfg.system_params()?)?;
    let icfg = cfg.integrator_config();
    let state0 = cfg.initial.state(model.basis(), cfg.seed)?;
    let monitors = Monitors {
        keep_snapshots: false,
        checkpoint_every: cfg.checkpoint.every,
    };
    let log = run(&state0, &model, &icfg, monitors)?;
    let mut body = Vec::new();
    write_trajectory_csv(&mut body, &log.to_rows())?;
    art.text(
        "trajectory.csv",
        std::str::from_utf8(&body).expect("ascii csv"),
    )?;
    let p = model.params().nonlinearity.p;
    let (mut lower, mut upper) = (0, 0);
    for r in &log.reports {
        let (lo, up) = r.bounds_hold(p);
        lower += usize::from(!lo);
        upper += usize::from(!up);
    }
    let r0 = model.bounds().absorbing_radius();
    let summary = RunSummary {
        t_end: log.reports.last().map(|r| r.t).unwrap_or(0.0),
        steps: icfg.steps(),
        holder_constant: log.holder_constant,
        energy_monotone: log.energy_monotone,
        monotone_tolerance: log.monotone_tolerance,
        absorbing_radius: r0,
        absorbing_entry: absorbing_entry(&log, r0)?,
        lower_bound_violations: lower,
        upper_bound_violations: upper,
    };
    art.json("summary.json", &summary)?;
    art.json("bounds.json", model.bounds())?;
    if let Some(fin) = &log.final_state {
        art.states(
            "final_state",
            std::slice::from_ref(fin),
            json!({ "t": fin.t }),
        )?;
    }
    for (i, c) in log.checkpoints.iter().enumerate() {
        let step = (i + 1) * cfg.checkpoint.every;
        art.states(
            &format!("checkpoints/step_{step:09}"),
            std::slice::from_ref(c),
            json!({ "step": step, "t": c.t }),
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairSummary {
    pub index: usize,
    pub d0: f64,
    pub growth_exponent: f64,
    pub quasi: QuasiStabilityReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairReport {
    /// Single exponent `Ĉ₀` covering every pair.
    pub c0_hat: f64,
    pub lipschitz_holds: bool,
    pub quasi_pass: bool,
    pub pairs: Vec<PairSummary>,
}

/// Pair logs for the configured pairs, in index order.
pub fn pair_logs(cfg: &ExperimentConfig, model: &Model) -> Result<Vec<PairLog>> {
    let icfg = cfg.integrator_config();
    let logs: Vec<Result<PairLog>> = (0..cfg.pair.count)
        .into_par_iter()
        .map(|i| {
            let (a, b) = cfg.pair.initial(model.basis(), cfg.seed, i)?;
            run_pair(&a, &b, model, &icfg)
        })
        .collect();
    logs.into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| Error::Member {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

fn pairs(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<()> {
    let model = Model::new(cfg.system_params()?)?;
    let logs = pair_logs(cfg, &model)?;
    let c0_hat = logs
        .iter()
        .map(|l| l.growth_exponent)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut summaries = Vec::with_capacity(logs.len());
    for (index, log) in logs.iter().enumerate() {
        let mut body = Vec::new();
        write_pair_csv(&mut body, log)?;
        art.text(
            &format!("pairs/pair_{index:03}.csv"),
            std::str::from_utf8(&body).expect("ascii csv"),
        )?;
        summaries.push(PairSummary {
            index,
            d0: log.d[0],
            growth_exponent: log.growth_exponent,
            quasi: quasi_stability_check(log, cfg.quasi)?,
        });
    }
    let report = PairReport {
        c0_hat,
        lipschitz_holds: logs.iter().all(|l| l.lipschitz_holds(c0_hat)),
        quasi_pass: summaries.iter().all(|s| s.quasi.pass),
        pairs: summaries,
    };
    art.json("pair_report.json", &report)
}

fn stationary(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<()> {
    let model = Model::new(cfg.system_params()?)?;
    let r = solve_stationary(&model, cfg.stationary.tol, cfg.stationary.max_iter)?;
    let state = r.as_state();
    let next = Integrator::new(&model, cfg.integrator_config())?.step(&state)?;
    let mut drift = next.minus(&state)?;
    drift.t = 0.0;
    let mut export = serde_json::to_value(StationaryExport::from(&r))?;
    export["drift_per_step"] = json!(state_norm(&drift));
    art.json("stationary.json", &export)?;
    art.states(
        "stationary_state",
        std::slice::from_ref(&state),
        json!({ "residual_norm": r.residual_norm }),
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttractorReport {
    pub cloud: CloudMeta,
    pub absorbing_radius: f64,
    pub diameter: f64,
    pub dimension: Option<DimensionEstimate>,
    /// Why no dimension was estimated, if it was not.
    pub dimension_note: Option<String>,
}

fn attractor(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<()> {
    let model = Model::new(cfg.system_params()?)?;
    let cloud = sample_attractor(&model, &cfg.ensemble_config())?;
    let coords = cfg.dimension.coords;
    let (dimension, note) = if cloud.points.len() < MIN_BOX_POINTS {
        (
            None,
            Some(format!(
                "{} points; box counting needs {MIN_BOX_POINTS}",
                cloud.points.len()
            )),
        )
    } else {
        let pts: Vec<Vec<f64>> = cloud
            .points
            .iter()
            .map(|p| leading_coords(p, coords))
            .collect();
        match EpsRange::spanning(&pts, cfg.dimension.levels) {
            Ok(eps) => (Some(box_dimension(&cloud, coords, eps)?), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let report = AttractorReport {
        cloud: cloud.meta(),
        absorbing_radius: model.bounds().absorbing_radius(),
        diameter: cloud.diameter(PhaseNorm::Energy),
        dimension,
        dimension_note: note,
    };
    art.json("attractor.json", &report)?;
    art.json("traces.json", &cloud.traces)?;
    art.states("cloud", &cloud.points, serde_json::to_value(cloud.meta())?)
}

fn sweep(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<()> {
    let base = cfg.system_params()?;
    let outcome = semicontinuity_sweep(&base, &cfg.sweep_config())?;
    art.json("sweep.json", &outcome.report)?;
    let mut csv = String::from("nu,sigma,distance,diameter,higher_norm_max,points\n");
    for r in &outcome.report.rows {
        csv.push_str(&format!(
            "{:e},{:e},{:e},{:e},{:e},{}\n",
            r.nu, r.sigma, r.distance, r.diameter, r.higher_norm_max, r.points
        ));
    }
    art.text("sweep.csv", &csv)?;
    for (i, cloud) in outcome.clouds.iter().enumerate() {
        art.states(
            &format!("clouds/beta_{i:02}"),
            &cloud.points,
            serde_json::to_value(cloud.meta())?,
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    /// Observed quantity compared with the threshold.
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelfcheckReport {
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

/// Fast invariant suite on small bases.
pub fn selfcheck(seed: u64) -> Result<SelfcheckReport> {
    let mut checks = Vec::new();
    let mut push = |name: &str, value: f64, threshold: f64| {
        checks.push(CheckResult {
            name: name.into(),
            pass: value <= threshold,
            value,
            threshold,
        });
    };
    let basis = build_basis(8, 6, std::f64::consts::PI, 2.0)?;
    let mut rng = member_rng(seed, 0);
    let states: Vec<StateVector> = (0..20)
        .map(|_| random_state(&basis, 1.0, &mut rng))
        .collect::<Result<_>>()?;

    let grid = SineGrid::new(&basis, 2)?;
    let mut worst = 0.0f64;
    for s in &states {
        let back = grid.from_grid(&grid.to_grid(&s.u)?)?;
        worst = worst.max(back.minus(&s.u)?.norm_l2() / s.u.norm_l2());
    }
    push("grid round trip", worst, 1e-12);

    let mut worst = 0.0f64;
    for s in &states {
        let two = apply_frac_power(&apply_frac_power(&s.v, 0.3)?, 0.4)?;
        let one = apply_frac_power(&s.v, 0.7)?;
        worst = worst.max(two.minus(&one)?.norm_l2() / one.norm_l2());
    }
    push("fractional power composition", worst, 1e-13);

    let c = Coupling {
        nu: 0.4,
        sigma: 0.7,
        delta: 0.5,
    };
    let (mut residual, mut form) = (0.0f64, 0.0f64);
    for s in &states {
        let x = resolvent_solve_with(s, c)?;
        let ax = apply_generator(&x, c);
        let r = x.plus(&ax)?.minus(s)?;
        residual = residual.max(state_norm(&r) / state_norm(s));
        let lhs = state_inner(&ax, &x)?;
        form = form.max((lhs - accretivity_form(&x, c)).abs() / lhs.abs().max(1e-300));
    }
    push("resolvent residual", residual, 1e-10);
    push("accretivity identity", form, 1e-12);

    let coords: Vec<Vec<f64>> = states
        .iter()
        .map(|s| s.weighted_coords(PhaseNorm::Energy))
        .collect();
    let (a, rest) = coords.split_at(5);
    let (b, cset) = rest.split_at(7);
    let self_d = hausdorff_semidist_coords(a, a)?;
    push("semidistance d(A|A)", self_d, 0.0);
    let tri = hausdorff_semidist_coords(a, cset)?
        - hausdorff_semidist_coords(a, b)?
        - hausdorff_semidist_coords(b, cset)?;
    push("semidistance triangle excess", tri, 1e-12);

    let audit = audit_nonlinearity(&NonlinearitySpec::cubic(), 10.0, 2001)?;
    push(
        "cubic certificate failures",
        audit.checks.iter().filter(|c| !c.pass).count() as f64,
        0.0,
    );

    let h = SpectralField::mode(&basis, 1, 1, 1.0)?;
    let model = Model::new(SystemParams::new(h))?;
    let st = solve_stationary(&model, 1e-10, 8)?;
    push("stationary residual", st.residual_norm, 1e-10);

    let icfg = IntegratorConfig::new(1e-3, 0.5, 10);
    let log = run(&states[0], &model, &icfg, Monitors::default())?;
    push(
        "energy monotonicity failures",
        f64::from(u8::from(!log.energy_monotone)),
        0.0,
    );

    let pass = checks.iter().all(|c| c.pass);
    Ok(SelfcheckReport { checks, pass })
}
