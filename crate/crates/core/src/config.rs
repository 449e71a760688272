//! Experiment configuration files (TOML).
//!
//! Every section is optional and falls back to the documented defaults.
//! Unknown keys are rejected; range checks report every offending key.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::attractor::{member_rng, random_state, EnsembleConfig, QuasiFitConfig, SweepConfig};
use crate::error::{Error, Result};
use crate::integrate::{IntegratorConfig, Scheme};
use crate::model::{NonlinearitySpec, SystemParams};
use crate::spectral::{build_basis, BasisSpec, PhaseNorm, SpectralField, StateVector};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Run,
    Pair,
    Stationary,
    Attractor,
    Sweep,
    Audit,
    Selfcheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Run => "run",
            ExperimentKind::Pair => "pair",
            ExperimentKind::Stationary => "stationary",
            ExperimentKind::Attractor => "attractor",
            ExperimentKind::Sweep => "sweep",
            ExperimentKind::Audit => "audit",
            ExperimentKind::Selfcheck => "selfcheck",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasisSection {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Default for BasisSection {
    fn default() -> Self {
        BasisSection {
            nx: 32,
            ny: 32,
            lx: PI,
            ly: PI,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ForcingSpec {
    Zero,
    /// `amplitude · e_jk`, 1-based indices.
    Mode {
        j: usize,
        k: usize,
        amplitude: f64,
    },
    /// Sine expansion of `amplitude · x(Lx - x) y(Ly - y)`.
    Smooth {
        amplitude: f64,
    },
}

impl ForcingSpec {
    pub fn field(&self, basis: &Arc<BasisSpec>) -> Result<SpectralField> {
        match *self {
            ForcingSpec::Zero => Ok(SpectralField::zeros(basis)),
            ForcingSpec::Mode { j, k, amplitude } => SpectralField::mode(basis, j, k, amplitude),
            ForcingSpec::Smooth { amplitude } => Ok(SpectralField::smooth_bump(basis, amplitude)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSection {
    pub nu: f64,
    pub sigma: f64,
    pub delta: f64,
    pub n1: f64,
    pub n2: f64,
    pub padding: usize,
    pub forcing: ForcingSpec,
}

impl Default for ParamsSection {
    fn default() -> Self {
        ParamsSection {
            nu: 0.5,
            sigma: 0.5,
            delta: 0.5,
            n1: 4.0,
            n2: 1.0,
            padding: 2,
            forcing: ForcingSpec::Smooth { amplitude: 1.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSection {
    pub dt: f64,
    pub scheme: Scheme,
    pub t_end: f64,
    pub log_every: usize,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        IntegratorSection {
            dt: d.dt,
            scheme: d.scheme,
            t_end: d.t_end,
            log_every: d.log_every,
        }
    }
}

impl IntegratorSection {
    pub fn config(&self) -> IntegratorConfig {
        IntegratorConfig {
            dt: self.dt,
            scheme: self.scheme,
            t_end: self.t_end,
            log_every: self.log_every,
        }
    }
}

/// Initial state of single runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSpec {
    Zero,
    /// Smooth bump in each component.
    Smooth {
        u: f64,
        v: f64,
        theta: f64,
    },
    /// Ensemble law at `𝓗`-radius `radius`, drawn from stream 0 of the seed.
    Random {
        radius: f64,
    },
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec::Smooth {
            u: 1.0,
            v: 0.0,
            theta: 0.5,
        }
    }
}

impl InitialSpec {
    pub fn state(&self, basis: &Arc<BasisSpec>, seed: u64) -> Result<StateVector> {
        match *self {
            InitialSpec::Zero => Ok(StateVector::zeros(basis)),
            InitialSpec::Smooth { u, v, theta } => StateVector::new(
                SpectralField::smooth_bump(basis, u),
                SpectralField::smooth_bump(basis, v),
                SpectralField::smooth_bump(basis, theta),
                0.0,
            ),
            InitialSpec::Random { radius } => random_state(basis, radius, &mut member_rng(seed, 0)),
        }
    }
}

/// Pairs `(a, a + e)` with `‖a‖_𝓗 = radius` and `‖e‖_𝓗 = separation`, both drawn from the ensemble law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairSection {
    pub count: usize,
    pub radius: f64,
    pub separation: f64,
}

impl Default for PairSection {
    fn default() -> Self {
        PairSection {
            count: 20,
            radius: 1.0,
            separation: 0.1,
        }
    }
}

impl PairSection {
    /// Initial states of pair `index`; streams `2 index` and `2 index + 1` of the seed.
    pub fn initial(
        &self,
        basis: &Arc<BasisSpec>,
        seed: u64,
        index: usize,
    ) -> Result<(StateVector, StateVector)> {
        let a = random_state(basis, self.radius, &mut member_rng(seed, 2 * index))?;
        let e = random_state(basis, self.separation, &mut member_rng(seed, 2 * index + 1))?;
        let b = a.plus(&e)?;
        Ok((a, b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSection {
    pub size: usize,
    pub radius: f64,
    pub t_trans: f64,
    pub t_sample: f64,
    pub stride: f64,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        let d = EnsembleConfig::default();
        EnsembleSection {
            size: d.size,
            radius: d.radius,
            t_trans: d.t_trans,
            t_sample: d.t_sample,
            stride: d.stride,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub betas: Vec<[f64; 2]>,
    pub band: f64,
    pub norm: PhaseNorm,
}

impl Default for SweepSection {
    fn default() -> Self {
        let d = SweepConfig::default();
        SweepSection {
            betas: d.betas,
            band: d.band,
            norm: d.norm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationarySection {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for StationarySection {
    fn default() -> Self {
        StationarySection {
            tol: 1e-10,
            max_iter: 8,
        }
    }
}

/// Box-counting settings for attractor experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DimensionSection {
    pub coords: usize,
    pub levels: usize,
}

impl Default for DimensionSection {
    fn default() -> Self {
        DimensionSection {
            coords: 3,
            levels: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckpointSection {
    /// Steps between state checkpoints of single runs; 0 disables them.
    pub every: usize,
}

impl Default for CheckpointSection {
    fn default() -> Self {
        CheckpointSection { every: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditSection {
    pub half_width: f64,
    pub samples: usize,
}

impl Default for AuditSection {
    fn default() -> Self {
        AuditSection {
            half_width: 10.0,
            samples: 10_001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    #[serde(default)]
    pub basis: BasisSection,
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub nonlinearity: NonlinearitySpec,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub pair: PairSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub stationary: StationarySection,
    #[serde(default)]
    pub quasi: QuasiFitConfig,
    #[serde(default)]
    pub dimension: DimensionSection,
    #[serde(default)]
    pub checkpoint: CheckpointSection,
    #[serde(default)]
    pub audit: AuditSection,
}

fn default_output_dir() -> String {
    "out".into()
}

impl ExperimentConfig {
    /// Defaults for the given kind.
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            kind,
            seed: 0,
            output_dir: default_output_dir(),
            basis: BasisSection::default(),
            params: ParamsSection::default(),
            nonlinearity: NonlinearitySpec::default(),
            integrator: IntegratorSection::default(),
            initial: InitialSpec::default(),
            pair: PairSection::default(),
            ensemble: EnsembleSection::default(),
            sweep: SweepSection::default(),
            stationary: StationarySection::default(),
            quasi: QuasiFitConfig::default(),
            dimension: DimensionSection::default(),
            checkpoint: CheckpointSection::default(),
            audit: AuditSection::default(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self)
            .map_err(|e| Error::Internal(format!("cannot serialize configuration: {e}")))
    }

    pub fn basis(&self) -> Result<Arc<BasisSpec>> {
        build_basis(self.basis.nx, self.basis.ny, self.basis.lx, self.basis.ly)
    }

    pub fn system_params(&self) -> Result<SystemParams> {
        let basis = self.basis()?;
        let p = &self.params;
        let params = SystemParams {
            nu: p.nu,
            sigma: p.sigma,
            delta: p.delta,
            h: p.forcing.field(&basis)?,
            nonlinearity: self.nonlinearity.clone(),
            n1: p.n1,
            n2: p.n2,
            padding: p.padding,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn integrator_config(&self) -> IntegratorConfig {
        self.integrator.config()
    }

    pub fn ensemble_config(&self) -> EnsembleConfig {
        let e = &self.ensemble;
        EnsembleConfig {
            size: e.size,
            seed: self.seed,
            radius: e.radius,
            t_trans: e.t_trans,
            t_sample: e.t_sample,
            stride: e.stride,
            integrator: self.integrator_config(),
        }
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            betas: self.sweep.betas.clone(),
            ensemble: self.ensemble_config(),
            band: self.sweep.band,
            norm: self.sweep.norm,
        }
    }

    /// Range checks; every violation is reported with its key.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let mut check = |ok: bool, msg: String| {
            if !ok {
                errs.push(msg);
            }
        };
        check(
            self.schema_version == SCHEMA_VERSION,
            format!(
                "schema_version = {}: only version {SCHEMA_VERSION} is supported",
                self.schema_version
            ),
        );
        let b = &self.basis;
        check(
            b.nx >= 1,
            format!("basis.nx = {}: must be at least 1", b.nx),
        );
        check(
            b.ny >= 1,
            format!("basis.ny = {}: must be at least 1", b.ny),
        );
        check(
            b.lx > 0.0 && b.lx.is_finite(),
            format!("basis.lx = {}: must be positive", b.lx),
        );
        check(
            b.ly > 0.0 && b.ly.is_finite(),
            format!("basis.ly = {}: must be positive", b.ly),
        );
        let p = &self.params;
        check(
            p.delta > 0.0 && p.delta.is_finite(),
            format!("params.delta = {}: δ is a positive constant", p.delta),
        );
        check(
            (0.0..=1.0).contains(&p.nu),
            format!("params.nu = {}: ν,σ∈[0,1] is required", p.nu),
        );
        check(
            (0.0..=1.0).contains(&p.sigma),
            format!("params.sigma = {}: ν,σ∈[0,1] is required", p.sigma),
        );
        check(
            p.n1 > 0.0 && p.n1.is_finite(),
            format!("params.n1 = {}: must be positive", p.n1),
        );
        check(
            p.n2 > 0.0 && p.n2.is_finite(),
            format!("params.n2 = {}: must be positive", p.n2),
        );
        check(
            p.padding >= 1,
            format!("params.padding = {}: must be at least 1", p.padding),
        );
        match &p.forcing {
            ForcingSpec::Zero => {}
            ForcingSpec::Mode { j, k, amplitude } => {
                check(
                    (1..=b.nx).contains(j) && (1..=b.ny).contains(k),
                    format!(
                        "params.forcing: mode ({j}, {k}) lies outside the {}×{} basis",
                        b.nx, b.ny
                    ),
                );
                check(
                    amplitude.is_finite(),
                    "params.forcing.amplitude: must be finite".into(),
                );
            }
            ForcingSpec::Smooth { amplitude } => check(
                amplitude.is_finite(),
                "params.forcing.amplitude: must be finite".into(),
            ),
        }
        if let Err(e) = self.nonlinearity.validate() {
            check(false, format!("nonlinearity: {e}"));
        }
        check(
            p.padding >= self.nonlinearity.min_padding(),
            format!(
                "params.padding = {}: a degree-{} source needs at least {}",
                p.padding,
                self.nonlinearity.degree(),
                self.nonlinearity.min_padding()
            ),
        );
        let i = &self.integrator;
        check(
            i.dt > 0.0 && i.dt.is_finite(),
            format!("integrator.dt = {}: must be positive", i.dt),
        );
        check(
            i.t_end >= 0.0 && i.t_end.is_finite(),
            format!("integrator.t_end = {}: must be nonnegative", i.t_end),
        );
        check(
            i.log_every >= 1,
            "integrator.log_every = 0: must be at least 1".into(),
        );
        match self.initial {
            InitialSpec::Random { radius } => check(
                radius >= 0.0 && radius.is_finite(),
                format!("initial.radius = {radius}: must be nonnegative"),
            ),
            InitialSpec::Smooth { u, v, theta } => check(
                u.is_finite() && v.is_finite() && theta.is_finite(),
                "initial: amplitudes must be finite".into(),
            ),
            InitialSpec::Zero => {}
        }
        let pr = &self.pair;
        check(pr.count >= 1, "pair.count = 0: must be at least 1".into());
        check(
            pr.radius >= 0.0 && pr.radius.is_finite(),
            format!("pair.radius = {}: must be nonnegative", pr.radius),
        );
        check(
            pr.separation > 0.0 && pr.separation.is_finite(),
            format!("pair.separation = {}: must be positive", pr.separation),
        );
        let e = &self.ensemble;
        check(e.size >= 1, "ensemble.size = 0: must be at least 1".into());
        check(
            e.radius >= 0.0 && e.radius.is_finite(),
            format!("ensemble.radius = {}: must be nonnegative", e.radius),
        );
        check(
            e.t_trans > 0.0 && e.t_trans.is_finite(),
            format!("ensemble.t_trans = {}: must be positive", e.t_trans),
        );
        check(
            e.t_sample > 0.0 && e.t_sample.is_finite(),
            format!("ensemble.t_sample = {}: must be positive", e.t_sample),
        );
        check(
            e.stride > 0.0 && e.stride <= e.t_sample,
            format!("ensemble.stride = {}: must lie in (0, t_sample]", e.stride),
        );
        let s = &self.sweep;
        check(
            s.betas.iter().any(|b| b[0] == 0.0 && b[1] == 0.0),
            "sweep.betas: must include [0.0, 0.0]".into(),
        );
        for beta in &s.betas {
            check(
                (0.0..=1.0).contains(&beta[0]) && (0.0..=1.0).contains(&beta[1]),
                format!("sweep.betas entry {beta:?}: ν,σ∈[0,1] is required"),
            );
        }
        check(
            s.band >= 0.0 && s.band.is_finite(),
            format!("sweep.band = {}: must be nonnegative", s.band),
        );
        let st = &self.stationary;
        check(
            st.tol > 0.0 && st.tol.is_finite(),
            format!("stationary.tol = {}: must be positive", st.tol),
        );
        check(
            self.quasi.fit_fraction > 0.0 && self.quasi.fit_fraction <= 1.0,
            format!(
                "quasi.fit_fraction = {}: must lie in (0, 1]",
                self.quasi.fit_fraction
            ),
        );
        let d = &self.dimension;
        check(
            (2..=10).contains(&d.coords),
            format!("dimension.coords = {}: must lie in 2..=10", d.coords),
        );
        check(
            d.levels >= 2,
            format!("dimension.levels = {}: must be at least 2", d.levels),
        );
        let a = &self.audit;
        check(
            a.half_width > 0.0 && a.half_width.is_finite(),
            format!("audit.half_width = {}: must be positive", a.half_width),
        );
        check(
            a.samples >= 100,
            format!("audit.samples = {}: must be at least 100", a.samples),
        );
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        toml::from_str(text).map_err(|e| Error::Config(vec![e.message().to_string()]))?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn errors(text: &str) -> Vec<String> {
        match parse_config(text).unwrap_err() {
            Error::Config(v) => v,
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config("schema_version = 1\nkind = \"run\"\n").unwrap();
        assert_eq!((cfg.basis.nx, cfg.basis.ny), (32, 32));
        assert_eq!(cfg.basis.lx, PI);
        assert_eq!(cfg.params.delta, 0.5);
        assert_eq!((cfg.params.nu, cfg.params.sigma), (0.5, 0.5));
        assert_eq!(cfg.integrator.dt, 1e-3);
        assert_eq!(cfg.nonlinearity, NonlinearitySpec::cubic());
    }

    #[test]
    fn negative_delta_rejected() {
        let errs = errors("schema_version = 1\nkind = \"run\"\n[params]\ndelta = -1.0\n");
        assert!(errs
            .iter()
            .any(|e| e.contains("params.delta") && e.contains("δ is a positive constant")));
    }

    #[test]
    fn exponent_out_of_range_rejected() {
        let errs = errors("schema_version = 1\nkind = \"run\"\n[params]\nnu = 1.5\nsigma = -0.1\n");
        assert!(errs
            .iter()
            .any(|e| e.contains("params.nu") && e.contains("ν,σ∈[0,1]")));
        assert!(errs.iter().any(|e| e.contains("params.sigma")));
    }

    #[test]
    fn unknown_key_rejected() {
        let errs = errors("schema_version = 1\nkind = \"run\"\n[params]\nnuu = 0.3\n");
        assert!(errs[0].contains("nuu"), "{errs:?}");
    }

    #[test]
    fn type_mismatch_rejected() {
        let errs = errors("schema_version = 1\nkind = \"run\"\n[basis]\nnx = \"many\"\n");
        assert!(!errs.is_empty());
    }

    #[test]
    fn toml_echo_round_trips() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Sweep);
        cfg.params.forcing = ForcingSpec::Mode {
            j: 2,
            k: 1,
            amplitude: 0.3,
        };
        cfg.initial = InitialSpec::Random { radius: 1.5 };
        let text = cfg.to_toml().unwrap();
        assert_eq!(parse_config(&text).unwrap(), cfg);
    }
}
