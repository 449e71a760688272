//! Long-time ensembles and the geometry of sampled attractors.
//!
//! Clouds are finite samples of post-transient dynamics. Semidistances are
//! exact over the finite sets; dimensions are projected box-counting
//! regressions and so give finite-sample estimates from below.

use std::collections::HashSet;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{
    nonincreasing_within, Integrator, IntegratorConfig, PairLog, TrajectoryLog,
};
use crate::model::{Model, SystemParams};
use crate::spectral::{state_norm, BasisDims, BasisSpec, PhaseNorm, SpectralField, StateVector};

/// First logged time after which the state stays in the closed ball of radius `r0`.
pub fn absorbing_entry(log: &TrajectoryLog, r0: f64) -> Result<Option<f64>> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::invalid(format!(
            "absorbing radius must be positive, got {r0}"
        )));
    }
    let reports = &log.reports;
    match reports.iter().rposition(|r| !(r.state_norm <= r0)) {
        None => Ok(reports.first().map(|r| r.t)),
        Some(i) => Ok(reports.get(i + 1).map(|r| r.t)),
    }
}

/// Generator for ensemble member `member`; streams are independent of scheduling.
pub fn member_rng(seed: u64, member: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(member as u64);
    rng
}

/// Random state with coefficient standard deviation `λ⁻¹`, rescaled to `‖U‖_𝓗 = radius`.
pub fn random_state(
    basis: &Arc<BasisSpec>,
    radius: f64,
    rng: &mut ChaCha8Rng,
) -> Result<StateVector> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!(
            "radius must be nonnegative, got {radius}"
        )));
    }
    let draw = |rng: &mut ChaCha8Rng| {
        let coeffs = basis.lambda().mapv(|l| {
            let z: f64 = StandardNormal.sample(rng);
            z / l
        });
        SpectralField::from_coeffs(basis, coeffs)
    };
    let u = draw(rng)?;
    let v = draw(rng)?;
    let theta = draw(rng)?;
    let state = StateVector::new(u, v, theta, 0.0)?;
    let n = state_norm(&state);
    if n == 0.0 {
        return Ok(state);
    }
    Ok(state.scaled(radius / n))
}

/// Ensemble schedule shared by every member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub size: usize,
    pub seed: u64,
    /// `𝓗`-norm radius of the initial states.
    pub radius: f64,
    pub t_trans: f64,
    pub t_sample: f64,
    /// Time between snapshots; also the spacing of the Lyapunov monitor.
    pub stride: f64,
    pub integrator: IntegratorConfig,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            size: 16,
            seed: 0,
            radius: 2.0,
            t_trans: 30.0,
            t_sample: 2.0,
            stride: 0.1,
            integrator: IntegratorConfig::default(),
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        self.integrator.validate()?;
        if self.size == 0 {
            return Err(Error::invalid("ensemble size must be at least 1"));
        }
        if !(self.radius >= 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid(format!(
                "radius must be nonnegative, got {}",
                self.radius
            )));
        }
        if !(self.t_trans > 0.0 && self.t_trans.is_finite()) {
            return Err(Error::invalid(format!(
                "t_trans must be positive, got {}",
                self.t_trans
            )));
        }
        if !(self.t_sample > 0.0 && self.t_sample.is_finite()) {
            return Err(Error::invalid(format!(
                "t_sample must be positive, got {}",
                self.t_sample
            )));
        }
        if !(self.stride > 0.0 && self.stride <= self.t_sample) {
            return Err(Error::invalid(format!(
                "stride must lie in (0, t_sample], got {} with t_sample = {}",
                self.stride, self.t_sample
            )));
        }
        Ok(())
    }

    fn schedule(&self) -> (usize, usize, usize) {
        let dt = self.integrator.dt;
        let trans = (self.t_trans / dt).round().max(1.0) as usize;
        let stride = (self.stride / dt).round().max(1.0) as usize;
        let samples = ((self.t_sample / self.stride) + 1e-9).floor().max(1.0) as usize;
        (trans, stride, samples)
    }
}

/// Lyapunov monitor of one member, sampled every stride from `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberTrace {
    pub t: Vec<f64>,
    pub phi: Vec<f64>,
    /// `‖A^{ν/2}u_t‖² + ‖A^{1/2}θ‖²`
    pub dissipation: Vec<f64>,
    /// `‖u_t‖ + ‖A^{1/2}θ‖`
    pub motion: Vec<f64>,
    pub phi_monotone: bool,
    pub monotone_tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct AttractorCloud {
    pub points: Vec<StateVector>,
    /// Member index of each point.
    pub members: Vec<usize>,
    pub nu: f64,
    pub sigma: f64,
    pub delta: f64,
    pub ensemble: EnsembleConfig,
    /// Max over samples of `‖u‖_{V₂} + ‖u_t‖_{V₁} + ‖θ‖_{V₂}`.
    pub higher_norm_max: f64,
    pub traces: Vec<MemberTrace>,
}

/// Serializable description of a cloud without its coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudMeta {
    pub basis: BasisDims,
    pub nu: f64,
    pub sigma: f64,
    pub delta: f64,
    pub ensemble: EnsembleConfig,
    pub points: usize,
    pub higher_norm_max: f64,
    pub phi_monotone: Vec<bool>,
}

impl AttractorCloud {
    pub fn basis(&self) -> &Arc<BasisSpec> {
        self.points[0].basis()
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn meta(&self) -> CloudMeta {
        CloudMeta {
            basis: BasisDims::from(&**self.basis()),
            nu: self.nu,
            sigma: self.sigma,
            delta: self.delta,
            ensemble: self.ensemble,
            points: self.points.len(),
            higher_norm_max: self.higher_norm_max,
            phi_monotone: self.traces.iter().map(|t| t.phi_monotone).collect(),
        }
    }

    pub fn diameter(&self, norm: PhaseNorm) -> f64 {
        let coords: Vec<Vec<f64>> = self
            .points
            .iter()
            .map(|p| p.weighted_coords(norm))
            .collect();
        let mut d = 0.0f64;
        for (i, a) in coords.iter().enumerate() {
            for b in &coords[i + 1..] {
                d = d.max(euclid(a, b));
            }
        }
        d
    }
}

struct MemberRun {
    points: Vec<StateVector>,
    higher: f64,
    trace: MemberTrace,
}

fn run_member(model: &Model, ens: &EnsembleConfig, member: usize) -> Result<MemberRun> {
    let (trans, stride, samples) = ens.schedule();
    let mut rng = member_rng(ens.seed, member);
    let mut state = random_state(model.basis(), ens.radius, &mut rng)?;
    let mut integ = Integrator::new(model, ens.integrator)?;
    let mut trace = MemberTrace {
        t: Vec::new(),
        phi: Vec::new(),
        dissipation: Vec::new(),
        motion: Vec::new(),
        phi_monotone: true,
        monotone_tolerance: 0.0,
    };
    let record = |s: &StateVector, trace: &mut MemberTrace| -> Result<f64> {
        let r = model.compute_energy(s)?;
        trace.t.push(s.t);
        trace.phi.push(r.phi);
        trace.dissipation.push(r.dissipation());
        trace.motion.push(s.v.norm_l2() + r.diss_theta.sqrt());
        Ok(r.u_v2 + r.ut_v1 + r.theta_v2)
    };
    record(&state, &mut trace)?;
    let total = trans + stride * samples;
    let mut points = Vec::with_capacity(samples);
    let mut higher = 0.0f64;
    for n in 1..=total {
        state = integ.step(&state)?;
        let sample = n > trans && (n - trans) % stride == 0;
        if sample || n % stride == 0 || n == trans {
            let h = record(&state, &mut trace)?;
            if sample {
                higher = higher.max(h);
                points.push(state.clone());
            }
        }
    }
    let (ok, tol) = nonincreasing_within(&trace.t, &trace.phi, ens.integrator.dt);
    trace.phi_monotone = ok;
    trace.monotone_tolerance = tol;
    Ok(MemberRun {
        points,
        higher,
        trace,
    })
}

/// Evolve a seeded ensemble past `t_trans` and collect snapshots every `stride`.
pub fn sample_attractor(model: &Model, ens: &EnsembleConfig) -> Result<AttractorCloud> {
    ens.validate()?;
    let runs: Vec<Result<MemberRun>> = (0..ens.size)
        .into_par_iter()
        .map(|i| run_member(model, ens, i))
        .collect();
    let mut cloud = AttractorCloud {
        points: Vec::new(),
        members: Vec::new(),
        nu: model.params().nu,
        sigma: model.params().sigma,
        delta: model.params().delta,
        ensemble: *ens,
        higher_norm_max: 0.0,
        traces: Vec::with_capacity(ens.size),
    };
    for (index, run) in runs.into_iter().enumerate() {
        let run = run.map_err(|e| Error::Member {
            index,
            source: Box::new(e),
        })?;
        cloud
            .members
            .extend(std::iter::repeat(index).take(run.points.len()));
        cloud.points.extend(run.points);
        cloud.higher_norm_max = cloud.higher_norm_max.max(run.higher);
        cloud.traces.push(run.trace);
    }
    Ok(cloud)
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `sup_{a∈A} inf_{b∈B} ‖a - b‖` over coordinate vectors.
pub fn hausdorff_semidist_coords(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("semidistance needs nonempty point sets"));
    }
    let dim = a[0].len();
    if a.iter().chain(b).any(|p| p.len() != dim) {
        return Err(Error::invalid("points have inconsistent dimension"));
    }
    Ok(a.par_iter()
        .map(|x| b.iter().map(|y| euclid(x, y)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max))
}

/// `d{A|B}` in the chosen phase norm.
pub fn hausdorff_semidist(a: &[StateVector], b: &[StateVector], norm: PhaseNorm) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("semidistance needs nonempty point sets"));
    }
    let basis = a[0].basis();
    for p in a.iter().chain(b) {
        basis.check_same(p.basis())?;
    }
    let ca: Vec<Vec<f64>> = a.iter().map(|p| p.weighted_coords(norm)).collect();
    let cb: Vec<Vec<f64>> = b.iter().map(|p| p.weighted_coords(norm)).collect();
    hausdorff_semidist_coords(&ca, &cb)
}

/// Dyadic scales `eps_max · 2^{-k}`, `k = 0 .. levels-1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsRange {
    pub eps_max: f64,
    pub levels: usize,
}

impl EpsRange {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_max > 0.0 && self.eps_max.is_finite()) {
            return Err(Error::invalid(format!(
                "eps_max must be positive, got {}",
                self.eps_max
            )));
        }
        if self.levels < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 scales, got {}",
                self.levels
            )));
        }
        Ok(())
    }

    pub fn scales(&self) -> Vec<f64> {
        (0..self.levels)
            .map(|k| self.eps_max * 0.5f64.powi(k as i32))
            .collect()
    }

    /// Half the coordinate-box extent down through `levels` halvings.
    pub fn spanning(points: &[Vec<f64>], levels: usize) -> Result<Self> {
        let extent = bounding_extent(points);
        let r = EpsRange {
            eps_max: 0.5 * extent,
            levels,
        };
        r.validate()?;
        Ok(r)
    }
}

fn bounding_extent(points: &[Vec<f64>]) -> f64 {
    let Some(first) = points.first() else {
        return 0.0;
    };
    let mut ext = 0.0f64;
    for d in 0..first.len() {
        let (lo, hi) = points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p[d]), hi.max(p[d]))
            });
        ext = ext.max(hi - lo);
    }
    ext
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    /// Least-squares slope of `ln n(ε)` against `ln(1/ε)`.
    pub dimension: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// `dimension ± 2 stderr`
    pub band: (f64, f64),
    pub eps: Vec<f64>,
    pub counts: Vec<usize>,
}

pub const MIN_BOX_POINTS: usize = 100;

/// Box-counting regression over raw coordinate vectors.
pub fn box_dimension_points(points: &[Vec<f64>], eps: EpsRange) -> Result<DimensionEstimate> {
    eps.validate()?;
    if points.len() < MIN_BOX_POINTS {
        return Err(Error::invalid(format!(
            "box counting needs at least {MIN_BOX_POINTS} points, got {}",
            points.len()
        )));
    }
    let dim = points[0].len();
    if dim == 0
        || points
            .iter()
            .any(|p| p.len() != dim || p.iter().any(|x| !x.is_finite()))
    {
        return Err(Error::invalid(
            "points must be finite with a common positive dimension",
        ));
    }
    let lo: Vec<f64> = (0..dim)
        .map(|d| points.iter().map(|p| p[d]).fold(f64::INFINITY, f64::min))
        .collect();
    let scales = eps.scales();
    let counts: Vec<usize> = scales
        .iter()
        .map(|&e| {
            let boxes: HashSet<Vec<i64>> = points
                .iter()
                .map(|p| {
                    p.iter()
                        .zip(&lo)
                        .map(|(x, l)| ((x - l) / e).floor() as i64)
                        .collect()
                })
                .collect();
            boxes.len()
        })
        .collect();
    let xs: Vec<f64> = scales.iter().map(|e| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&n| (n as f64).ln()).collect();
    let m = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / m;
    let ym = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let stderr = if xs.len() > 2 {
        let rss: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (rss / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(DimensionEstimate {
        dimension: slope,
        intercept,
        stderr,
        band: (slope - 2.0 * stderr, slope + 2.0 * stderr),
        eps: scales,
        counts,
    })
}

/// Leading `𝓗`-weighted coordinates, modes in eigenvalue order, `(√λ u, v, θ)` interleaved.
pub fn leading_coords(state: &StateVector, coords: usize) -> Vec<f64> {
    let basis = state.basis();
    let mut out = Vec::with_capacity(coords);
    for (j, k) in basis.modes_by_eigenvalue() {
        let l = basis.lambda()[[j, k]];
        for c in [
            l.sqrt() * state.u.coeffs()[[j, k]],
            state.v.coeffs()[[j, k]],
            state.theta.coeffs()[[j, k]],
        ] {
            if out.len() == coords {
                return out;
            }
            out.push(c);
        }
    }
    out
}

pub const MAX_BOX_COORDS: usize = 10;

/// Projected box-counting dimension of a cloud; a finite-sample lower estimate.
pub fn box_dimension(
    cloud: &AttractorCloud,
    coords: usize,
    eps: EpsRange,
) -> Result<DimensionEstimate> {
    if !(2..=MAX_BOX_COORDS).contains(&coords) {
        return Err(Error::invalid(format!(
            "coords must lie in 2..={MAX_BOX_COORDS}, got {coords}"
        )));
    }
    if coords > 3 * cloud.basis().len() {
        return Err(Error::invalid(format!(
            "basis has fewer than {coords} coordinates"
        )));
    }
    let pts: Vec<Vec<f64>> = cloud
        .points
        .iter()
        .map(|p| leading_coords(p, coords))
        .collect();
    box_dimension_points(&pts, eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuasiFitConfig {
    /// Leading fraction of the time span used to fit `b(t)`.
    pub fit_fraction: f64,
}

impl Default for QuasiFitConfig {
    fn default() -> Self {
        QuasiFitConfig { fit_fraction: 0.25 }
    }
}

/// Certificate for `d(t)² ≤ b(t) d(0)² + c(t) s(t)²` on one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiStabilityReport {
    /// Exponent of `a(t) = e^{Ĉ₀ t}`.
    pub growth_exponent: f64,
    pub b0: f64,
    pub omega: f64,
    pub t: Vec<f64>,
    /// Nondecreasing coefficient of the seminorm term.
    pub c: Vec<f64>,
    pub c_sup: f64,
    pub slack: Vec<f64>,
    pub pass: bool,
    pub fit_failure: Option<String>,
}

const MIN_FIT_POINTS: usize = 3;

pub fn quasi_stability_check(pair: &PairLog, fit: QuasiFitConfig) -> Result<QuasiStabilityReport> {
    let n = pair.t.len();
    if n < MIN_FIT_POINTS || pair.d.len() != n || pair.s.len() != n {
        return Err(Error::invalid(format!(
            "pair log needs aligned series of at least {MIN_FIT_POINTS} points"
        )));
    }
    if !(fit.fit_fraction > 0.0 && fit.fit_fraction <= 1.0) {
        return Err(Error::invalid(format!(
            "fit_fraction must lie in (0, 1], got {}",
            fit.fit_fraction
        )));
    }
    let d0 = pair.d[0];
    if !(d0 > 0.0) {
        return Err(Error::invalid("initial separation must be positive"));
    }
    let t0 = pair.t[0];
    let tau: Vec<f64> = pair.t.iter().map(|t| t - t0).collect();
    let ratio: Vec<f64> = pair.d.iter().map(|d| (d / d0).powi(2)).collect();
    let horizon = fit.fit_fraction * tau[n - 1];
    let window = tau
        .iter()
        .take_while(|&&t| t <= horizon)
        .count()
        .max(MIN_FIT_POINTS)
        .min(n);

    let mut report = QuasiStabilityReport {
        growth_exponent: pair.growth_exponent,
        b0: f64::NAN,
        omega: f64::NAN,
        t: pair.t.clone(),
        c: vec![0.0; n],
        c_sup: 0.0,
        slack: vec![f64::NAN; n],
        pass: false,
        fit_failure: None,
    };
    if ratio[..window].iter().any(|&r| !(r > 0.0)) {
        report.fit_failure = Some("separation vanished inside the fit window".into());
        return Ok(report);
    }
    let xs = &tau[..window];
    let ys: Vec<f64> = ratio[..window].iter().map(|r| r.ln()).collect();
    let m = window as f64;
    let xm = xs.iter().sum::<f64>() / m;
    let ym = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let omega = -sxy / sxx;
    report.omega = omega;
    if !(omega > 0.0) {
        report.fit_failure = Some(format!("fitted decay rate is not positive (ω = {omega})"));
        return Ok(report);
    }
    let b0 = xs
        .iter()
        .zip(&ratio[..window])
        .map(|(t, r)| r * (omega * t).exp())
        .fold(0.0, f64::max);
    report.b0 = b0;

    let d0sq = d0 * d0;
    let mut c_run = 0.0f64;
    for i in 0..n {
        let b = b0 * (-omega * tau[i]).exp();
        let dsq = pair.d[i] * pair.d[i];
        let excess = (dsq - b * d0sq).max(0.0);
        let s2 = pair.s[i] * pair.s[i];
        if excess > 0.0 {
            if s2 == 0.0 {
                report.fit_failure = Some(format!(
                    "seminorm is zero at t = {} while d² exceeds b(t)d(0)²",
                    pair.t[i]
                ));
                report.c_sup = f64::INFINITY;
                return Ok(report);
            }
            c_run = c_run.max(excess / s2);
        }
        report.c[i] = c_run;
        report.slack[i] = b * d0sq + c_run * s2 - dsq;
    }
    report.c_sup = c_run;
    let tol = 1e-12;
    report.pass = c_run.is_finite()
        && report
            .slack
            .iter()
            .zip(&pair.d)
            .all(|(s, d)| *s >= -tol * d * d);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// `(ν, σ)` rows in the order they approach `(0, 0)`.
    pub betas: Vec<[f64; 2]>,
    pub ensemble: EnsembleConfig,
    /// Relative slack for the nonincreasing test.
    pub band: f64,
    pub norm: PhaseNorm,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            betas: vec![
                [0.5, 0.5],
                [0.25, 0.25],
                [0.1, 0.1],
                [0.05, 0.05],
                [0.0, 0.0],
            ],
            ensemble: EnsembleConfig::default(),
            band: 0.1,
            norm: PhaseNorm::Energy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub nu: f64,
    pub sigma: f64,
    /// `d{cloud_β | cloud_β₀}`
    pub distance: f64,
    pub diameter: f64,
    pub higher_norm_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub basis: BasisDims,
    pub ensemble: EnsembleConfig,
    pub norm: PhaseNorm,
    pub band: f64,
    pub rows: Vec<SweepRow>,
    /// Nonincreasing within the band over the rows other than `β₀`.
    pub nonincreasing: bool,
    /// First over last distance among the rows other than `β₀`.
    pub first_over_last: f64,
    pub verdict: bool,
}

/// Sweep outcome with the clouds, in row order.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub report: SweepReport,
    pub clouds: Vec<AttractorCloud>,
}

fn is_origin(b: &[f64; 2]) -> bool {
    b[0] == 0.0 && b[1] == 0.0
}

pub fn semicontinuity_sweep(base: &SystemParams, cfg: &SweepConfig) -> Result<SweepOutcome> {
    cfg.ensemble.validate()?;
    if !cfg.betas.iter().any(is_origin) {
        return Err(Error::invalid("the sweep must include β₀ = (0, 0)"));
    }
    if !(cfg.band >= 0.0 && cfg.band.is_finite()) {
        return Err(Error::invalid(format!(
            "band must be nonnegative, got {}",
            cfg.band
        )));
    }
    let sample = |beta: &[f64; 2]| -> Result<AttractorCloud> {
        let wrap = |e: Error| Error::Sweep {
            nu: beta[0],
            sigma: beta[1],
            source: Box::new(e),
        };
        let model = Model::new(base.clone().with_exponents(beta[0], beta[1])).map_err(wrap)?;
        sample_attractor(&model, &cfg.ensemble).map_err(wrap)
    };
    let reference = sample(&[0.0, 0.0])?;
    let mut clouds = Vec::with_capacity(cfg.betas.len());
    let mut rows = Vec::with_capacity(cfg.betas.len());
    for beta in &cfg.betas {
        let cloud = if is_origin(beta) {
            reference.clone()
        } else {
            sample(beta)?
        };
        let distance = if is_origin(beta) {
            0.0
        } else {
            hausdorff_semidist(&cloud.points, &reference.points, cfg.norm)?
        };
        rows.push(SweepRow {
            nu: beta[0],
            sigma: beta[1],
            distance,
            diameter: cloud.diameter(cfg.norm),
            higher_norm_max: cloud.higher_norm_max,
            points: cloud.points.len(),
        });
        clouds.push(cloud);
    }
    let trend: Vec<f64> = rows
        .iter()
        .filter(|r| !(r.nu == 0.0 && r.sigma == 0.0))
        .map(|r| r.distance)
        .collect();
    let nonincreasing = trend.windows(2).all(|w| w[1] <= (1.0 + cfg.band) * w[0]);
    let first_over_last = match (trend.first(), trend.last()) {
        (Some(&f), Some(&l)) if trend.len() >= 2 => f / l,
        _ => f64::NAN,
    };
    let verdict = trend.len() >= 2 && nonincreasing && first_over_last >= 2.0;
    let report = SweepReport {
        basis: BasisDims::from(&**base.basis()),
        ensemble: cfg.ensemble,
        norm: cfg.norm,
        band: cfg.band,
        rows,
        nonincreasing,
        first_over_last,
        verdict,
    };
    Ok(SweepOutcome { report, clouds })
}
