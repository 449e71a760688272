//! IMEX time stepping, trajectory logs, and paired runs.
//!
//! Per mode `(j, k)` the state `y = (u, u_t, θ)` obeys `y' = G y + (0, h - f(u), 0)`
//! with
//!
//! ```text
//!     | 0     1        0     |
//! G = | -λ   -λ^ν     δλ^σ   |
//!     | 0    -δλ^σ    -λ     |
//! ```
//!
//! The linear part is propagated by Crank–Nicolson (or backward Euler), the
//! forcing by Adams–Bashforth 2 (or forward Euler). The 3×3 propagators are
//! constant in time and assembled once per configuration.

use std::io::{BufRead, Write};

use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EnergyReport, Model};
use crate::spectral::{extended_norm, state_norm, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Crank–Nicolson on the linear generator, AB2 on the forcing.
    #[default]
    ImexCnAb2,
    /// Backward Euler on the linear generator, forward Euler on the forcing.
    ImexEuler,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    #[serde(default)]
    pub scheme: Scheme,
    pub t_end: f64,
    /// Steps between logged reports.
    pub log_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 1e-3,
            scheme: Scheme::ImexCnAb2,
            t_end: 1.0,
            log_every: 10,
        }
    }
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64, log_every: usize) -> Self {
        IntegratorConfig {
            dt,
            scheme: Scheme::ImexCnAb2,
            t_end,
            log_every,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid(format!(
                "t_end must be nonnegative, got {}",
                self.t_end
            )));
        }
        if self.log_every == 0 {
            return Err(Error::invalid("log_every must be at least 1"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

type Mat3 = [[f64; 3]; 3];

fn inverse3(m: &Mat3) -> Option<Mat3> {
    let c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    let c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    let c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    if !(det.is_finite() && det.abs() > 0.0) {
        return None;
    }
    let inv_det = 1.0 / det;
    Some([
        [
            c00 * inv_det,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det,
        ],
        [
            c01 * inv_det,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det,
        ],
        [
            c02 * inv_det,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det,
        ],
    ])
}

fn matmul3(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Per-mode generator `G_jk`.
pub fn mode_generator(lambda: f64, nu: f64, sigma: f64, delta: f64) -> Mat3 {
    let ln = if nu == 0.0 { 1.0 } else { lambda.powf(nu) };
    let ls = if sigma == 0.0 {
        1.0
    } else {
        lambda.powf(sigma)
    };
    [
        [0.0, 1.0, 0.0],
        [-lambda, -ln, delta * ls],
        [0.0, -delta * ls, -lambda],
    ]
}

/// Constant one-step maps: `y⁺ = P y + q · forcing`.
#[derive(Debug, Clone)]
struct Propagator {
    p: Vec<Mat3>,
    q: Vec<[f64; 3]>,
}

impl Propagator {
    fn assemble(model: &Model, dt: f64, scheme: Scheme) -> Result<Self> {
        let basis = model.basis();
        let params = model.params();
        let n = basis.len();
        let mut p = Vec::with_capacity(n);
        let mut q = Vec::with_capacity(n);
        let theta = match scheme {
            Scheme::ImexCnAb2 => 0.5,
            Scheme::ImexEuler => 1.0,
        };
        for &lambda in basis.lambda().iter() {
            let g = mode_generator(lambda, params.nu, params.sigma, params.delta);
            let mut implicit = [[0.0; 3]; 3];
            let mut explicit = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    let id = if i == j { 1.0 } else { 0.0 };
                    implicit[i][j] = id - theta * dt * g[i][j];
                    explicit[i][j] = id + (1.0 - theta) * dt * g[i][j];
                }
            }
            let inv = inverse3(&implicit).ok_or_else(|| {
                Error::Internal(format!(
                    "singular implicit block for λ = {lambda}, dt = {dt}"
                ))
            })?;
            p.push(matmul3(&inv, &explicit));
            q.push([dt * inv[0][1], dt * inv[1][1], dt * inv[2][1]]);
        }
        Ok(Propagator { p, q })
    }
}

/// Stateful stepper; keeps the forcing history needed by AB2.
#[derive(Debug, Clone)]
pub struct Integrator<'m> {
    model: &'m Model,
    cfg: IntegratorConfig,
    prop: Propagator,
    prev_forcing: Option<Array2<f64>>,
}

impl<'m> Integrator<'m> {
    pub fn new(model: &'m Model, cfg: IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        let prop = Propagator::assemble(model, cfg.dt, cfg.scheme)?;
        Ok(Integrator {
            model,
            cfg,
            prop,
            prev_forcing: None,
        })
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.cfg
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    /// Forget the forcing history; the next step bootstraps again.
    pub fn reset(&mut self) {
        self.prev_forcing = None;
    }

    /// Advance by one step of size `dt`.
    pub fn step(&mut self, state: &StateVector) -> Result<StateVector> {
        self.model.basis().check_same(state.basis())?;
        let now = self.model.forcing_coeffs(state.u.coeffs());
        let forcing = match (&self.prev_forcing, self.cfg.scheme) {
            (Some(prev), Scheme::ImexCnAb2) => {
                let mut f = now.clone();
                Zip::from(&mut f)
                    .and(prev)
                    .for_each(|f, &p| *f = 1.5 * *f - 0.5 * p);
                f
            }
            _ => now.clone(),
        };
        let dim = state.u.coeffs().dim();
        let n = dim.0 * dim.1;
        let (u0, v0, t0) = (
            state.u.coeffs().as_standard_layout(),
            state.v.coeffs().as_standard_layout(),
            state.theta.coeffs().as_standard_layout(),
        );
        let forcing = forcing.as_standard_layout();
        let (u0, v0, t0, fc) = (
            u0.as_slice().expect("standard layout"),
            v0.as_slice().expect("standard layout"),
            t0.as_slice().expect("standard layout"),
            forcing.as_slice().expect("standard layout"),
        );
        let mut u = vec![0.0; n];
        let mut v = vec![0.0; n];
        let mut th = vec![0.0; n];
        for i in 0..n {
            let p = &self.prop.p[i];
            let q = &self.prop.q[i];
            let (a, b, c, f) = (u0[i], v0[i], t0[i], fc[i]);
            u[i] = p[0][0] * a + p[0][1] * b + p[0][2] * c + q[0] * f;
            v[i] = p[1][0] * a + p[1][1] * b + p[1][2] * c + q[1] * f;
            th[i] = p[2][0] * a + p[2][1] * b + p[2][2] * c + q[2] * f;
        }
        let shape = |x: Vec<f64>| Array2::from_shape_vec(dim, x).expect("shape matches basis");
        let (u, v, th) = (shape(u), shape(v), shape(th));
        self.prev_forcing = Some(now);
        let t = state.t + self.cfg.dt;
        let next = StateVector {
            u: state.u.with_coeffs(u),
            v: state.u.with_coeffs(v),
            theta: state.u.with_coeffs(th),
            t,
        };
        if !next.is_finite() {
            return Err(Error::Divergence { t, dt: self.cfg.dt });
        }
        Ok(next)
    }
}

/// Single step from a fresh integrator (bootstrap step).
pub fn step(state: &StateVector, model: &Model, cfg: &IntegratorConfig) -> Result<StateVector> {
    Integrator::new(model, *cfg)?.step(state)
}

/// What to keep besides the energy reports.
#[derive(Debug, Clone, Copy, Default)]
pub struct Monitors {
    pub keep_snapshots: bool,
    /// Steps between retained checkpoint states; 0 keeps none.
    pub checkpoint_every: usize,
}

/// Logged energy reports plus increments in the extended space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryLog {
    pub dt: f64,
    pub log_every: usize,
    pub reports: Vec<EnergyReport>,
    /// `‖U(tᵢ) - U(tᵢ₋₁)‖_{𝓗₋₁}` for consecutive log points.
    pub increments: Vec<f64>,
    /// Largest observed `increment / (tᵢ - tᵢ₋₁)`.
    pub holder_constant: f64,
    pub energy_monotone: bool,
    pub monotone_tolerance: f64,
    #[serde(skip)]
    pub snapshots: Vec<StateVector>,
    #[serde(skip)]
    pub checkpoints: Vec<StateVector>,
    #[serde(skip)]
    pub final_state: Option<StateVector>,
}

impl TrajectoryLog {
    pub fn times(&self) -> Vec<f64> {
        self.reports.iter().map(|r| r.t).collect()
    }

    /// Increment ratios `‖ΔU‖_{𝓗₋₁} / Δt`.
    pub fn holder_ratios(&self) -> Vec<f64> {
        self.increments
            .iter()
            .zip(self.reports.windows(2))
            .map(|(inc, w)| inc / (w[1].t - w[0].t))
            .collect()
    }

    pub fn to_rows(&self) -> Vec<TrajectoryRow> {
        self.reports
            .iter()
            .enumerate()
            .map(|(i, r)| TrajectoryRow {
                t: r.t,
                energy: r.energy,
                modified_energy: r.modified_energy,
                phi: r.phi,
                j: r.j,
                composite: r.composite,
                diss_ut: r.diss_ut,
                diss_theta: r.diss_theta,
                state_norm: r.state_norm,
                u_v2: r.u_v2,
                ut_v1: r.ut_v1,
                theta_v2: r.theta_v2,
                holder_increment: if i == 0 { 0.0 } else { self.increments[i - 1] },
            })
            .collect()
    }
}

/// Monotone-nonincreasing test with slack `10 dt² max|second difference|`,
/// floored at a few ulps of the largest value.
///
/// Returns the verdict and the slack used.
pub fn nonincreasing_within(t: &[f64], e: &[f64], dt: f64) -> (bool, f64) {
    let mut curvature = 0.0f64;
    for i in 1..e.len().saturating_sub(1) {
        let h1 = t[i] - t[i - 1];
        let h2 = t[i + 1] - t[i];
        let d2 = 2.0 * ((e[i + 1] - e[i]) / h2 - (e[i] - e[i - 1]) / h1) / (h1 + h2);
        curvature = curvature.max(d2.abs());
    }
    let scale = e.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = (10.0 * dt * dt * curvature).max(64.0 * f64::EPSILON * scale);
    (e.windows(2).all(|w| w[1] - w[0] <= tol), tol)
}

/// Largest ratio `‖ΔU‖_{𝓗₋₁}/Δt` and the monotonicity audit of the modified energy.
fn finish_log(log: &mut TrajectoryLog) {
    log.holder_constant = log.holder_ratios().into_iter().fold(0.0, f64::max);
    let e: Vec<f64> = log.reports.iter().map(|r| r.modified_energy).collect();
    let (ok, tol) = nonincreasing_within(&log.times(), &e, log.dt);
    log.energy_monotone = ok;
    log.monotone_tolerance = tol;
}

pub fn run(
    state0: &StateVector,
    model: &Model,
    cfg: &IntegratorConfig,
    monitors: Monitors,
) -> Result<TrajectoryLog> {
    let mut integ = Integrator::new(model, *cfg)?;
    let steps = cfg.steps();
    let mut log = TrajectoryLog {
        dt: cfg.dt,
        log_every: cfg.log_every,
        reports: vec![model.compute_energy(state0)?],
        increments: Vec::new(),
        holder_constant: 0.0,
        energy_monotone: true,
        monotone_tolerance: 0.0,
        snapshots: Vec::new(),
        checkpoints: Vec::new(),
        final_state: None,
    };
    if monitors.keep_snapshots {
        log.snapshots.push(state0.clone());
    }
    let mut last_logged = state0.clone();
    let mut state = state0.clone();
    for n in 1..=steps {
        state = integ.step(&state)?;
        if monitors.checkpoint_every > 0 && n % monitors.checkpoint_every == 0 {
            log.checkpoints.push(state.clone());
        }
        if n % cfg.log_every == 0 || n == steps {
            log.reports.push(model.compute_energy(&state)?);
            log.increments
                .push(extended_norm(&state.minus(&last_logged)?));
            if monitors.keep_snapshots {
                log.snapshots.push(state.clone());
            }
            last_logged = state.clone();
        }
    }
    finish_log(&mut log);
    log.final_state = Some(state);
    Ok(log)
}

/// Two trajectories under one parameter set, sampled on a common schedule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairLog {
    pub t: Vec<f64>,
    /// `‖Sₜa - Sₜb‖_𝓗`
    pub d: Vec<f64>,
    /// `μ(u_a(t) - u_b(t))`
    pub mu: Vec<f64>,
    /// Running supremum of `mu`.
    pub s: Vec<f64>,
    /// `max_t ln(d(t)/d(0)) / t`
    pub growth_exponent: f64,
}

impl PairLog {
    /// `d(t) ≤ e^{Ĉ₀ t} d(0)` at every sample (with relative rounding slack).
    pub fn lipschitz_holds(&self, c0: f64) -> bool {
        let d0 = self.d[0];
        self.t
            .iter()
            .zip(&self.d)
            .all(|(&t, &d)| d <= (c0 * t).exp() * d0 * (1.0 + 1e-12))
    }
}

pub fn run_pair(
    a0: &StateVector,
    b0: &StateVector,
    model: &Model,
    cfg: &IntegratorConfig,
) -> Result<PairLog> {
    a0.basis().check_same(b0.basis())?;
    let diff0 = a0.minus(b0)?;
    let d0 = state_norm(&diff0);
    if d0 == 0.0 {
        return Err(Error::DegeneratePair);
    }
    let mut ia = Integrator::new(model, *cfg)?;
    let mut ib = Integrator::new(model, *cfg)?;
    let mu0 = model.l6_seminorm(&diff0.u)?;
    let mut log = PairLog {
        t: vec![a0.t],
        d: vec![d0],
        mu: vec![mu0],
        s: vec![mu0],
        growth_exponent: f64::NEG_INFINITY,
    };
    let (mut a, mut b) = (a0.clone(), b0.clone());
    let steps = cfg.steps();
    for n in 1..=steps {
        a = ia.step(&a)?;
        b = ib.step(&b)?;
        if n % cfg.log_every == 0 || n == steps {
            let diff = a.minus(&b)?;
            let mu = model.l6_seminorm(&diff.u)?;
            let s = log.s.last().copied().unwrap_or(0.0).max(mu);
            log.t.push(a.t);
            log.d.push(state_norm(&diff));
            log.mu.push(mu);
            log.s.push(s);
        }
    }
    let t0 = log.t[0];
    log.growth_exponent = log
        .t
        .iter()
        .zip(&log.d)
        .skip(1)
        .map(|(&t, &d)| (d / d0).ln() / (t - t0))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(log)
}

/// One CSV row of a trajectory log; column order is frozen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub energy: f64,
    pub modified_energy: f64,
    pub phi: f64,
    pub j: f64,
    pub composite: f64,
    pub diss_ut: f64,
    pub diss_theta: f64,
    pub state_norm: f64,
    pub u_v2: f64,
    pub ut_v1: f64,
    pub theta_v2: f64,
    /// `‖U(tᵢ) - U(tᵢ₋₁)‖_{𝓗₋₁}`; 0 on the first row.
    pub holder_increment: f64,
}

pub const TRAJECTORY_CSV_VERSION: u32 = 1;
pub const TRAJECTORY_CSV_HEADER: &str =
    "t,E,modified_E,Phi,J,L,diss_ut,diss_theta,norm_H,u_V2,ut_V1,theta_V2,holder_increment";

impl TrajectoryRow {
    fn values(&self) -> [f64; 13] {
        [
            self.t,
            self.energy,
            self.modified_energy,
            self.phi,
            self.j,
            self.composite,
            self.diss_ut,
            self.diss_theta,
            self.state_norm,
            self.u_v2,
            self.ut_v1,
            self.theta_v2,
            self.holder_increment,
        ]
    }

    fn from_values(v: &[f64]) -> Self {
        TrajectoryRow {
            t: v[0],
            energy: v[1],
            modified_energy: v[2],
            phi: v[3],
            j: v[4],
            composite: v[5],
            diss_ut: v[6],
            diss_theta: v[7],
            state_norm: v[8],
            u_v2: v[9],
            ut_v1: v[10],
            theta_v2: v[11],
            holder_increment: v[12],
        }
    }
}

pub fn write_trajectory_csv<W: Write>(mut w: W, rows: &[TrajectoryRow]) -> Result<()> {
    writeln!(w, "{TRAJECTORY_CSV_HEADER}")?;
    for r in rows {
        let line: Vec<String> = r.values().iter().map(|x| format!("{x:e}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn read_trajectory_csv<R: BufRead>(r: R) -> Result<Vec<TrajectoryRow>> {
    let mut lines = r.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != TRAJECTORY_CSV_HEADER {
        return Err(Error::Integrity(format!(
            "unexpected trajectory header: {header}"
        )));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let vals = vals.map_err(|e| Error::Integrity(format!("row {}: {e}", i + 1)))?;
        if vals.len() != 13 {
            return Err(Error::Integrity(format!(
                "row {}: expected 13 columns, got {}",
                i + 1,
                vals.len()
            )));
        }
        rows.push(TrajectoryRow::from_values(&vals));
    }
    Ok(rows)
}

pub const PAIR_CSV_HEADER: &str = "t,d,mu,s";

pub fn write_pair_csv<W: Write>(mut w: W, log: &PairLog) -> Result<()> {
    writeln!(w, "{PAIR_CSV_HEADER}")?;
    for i in 0..log.t.len() {
        writeln!(
            w,
            "{:e},{:e},{:e},{:e}",
            log.t[i], log.d[i], log.mu[i], log.s[i]
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{NonlinearitySpec, SystemParams};
    use crate::spectral::{build_basis, SpectralField};
    use std::f64::consts::PI;

    fn linear_model(n: usize, nu: f64) -> Model {
        let b = build_basis(n, n, PI, PI).unwrap();
        let p = SystemParams::new(SpectralField::zeros(&b))
            .with_exponents(nu, nu)
            .with_nonlinearity(NonlinearitySpec::zero());
        Model::new(p).unwrap()
    }

    #[test]
    fn inverse3_roundtrip() {
        let m = mode_generator(7.0, 0.3, 0.6, 0.5);
        let mut a = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = if i == j { 1.0 } else { 0.0 } - 0.01 * m[i][j];
            }
        }
        let prod = matmul3(&a, &inverse3(&a).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((prod[i][j] - id).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_state_stays_zero() {
        let b = build_basis(8, 8, PI, PI).unwrap();
        let model = Model::new(SystemParams::new(SpectralField::zeros(&b))).unwrap();
        let cfg = IntegratorConfig::new(1e-2, 0.5, 5);
        let log = run(&StateVector::zeros(&b), &model, &cfg, Monitors::default()).unwrap();
        assert!(log.reports.iter().all(|r| r.state_norm == 0.0));
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::new(0.0, 1.0, 1).validate().is_err());
        assert!(IntegratorConfig::new(1e-3, -1.0, 1).validate().is_err());
        assert!(IntegratorConfig::new(1e-3, 1.0, 0).validate().is_err());
        assert_eq!(IntegratorConfig::new(1e-3, 1.0, 1).steps(), 1000);
    }

    #[test]
    fn linear_flow_is_contractive() {
        let model = linear_model(8, 0.3);
        let b = model.basis().clone();
        let mut s = StateVector::zeros(&b);
        s.u = SpectralField::smooth_bump(&b, 1.0);
        s.theta = SpectralField::mode(&b, 2, 1, 0.5).unwrap();
        let log = run(
            &s,
            &model,
            &IntegratorConfig::new(1e-2, 2.0, 10),
            Monitors::default(),
        )
        .unwrap();
        for w in log.reports.windows(2) {
            assert!(w[1].energy <= w[0].energy * (1.0 + 1e-14));
        }
        assert!(log.energy_monotone);
    }

    #[test]
    fn degenerate_pair_rejected() {
        let model = linear_model(4, 0.5);
        let s = StateVector::zeros(model.basis());
        let err = run_pair(&s, &s.clone(), &model, &IntegratorConfig::default()).unwrap_err();
        assert!(matches!(err, Error::DegeneratePair));
    }

    #[test]
    fn divergence_is_reported() {
        // explicit cubic forcing with a huge amplitude and a large step blows up
        let b = build_basis(8, 8, PI, PI).unwrap();
        let model = Model::new(SystemParams::new(SpectralField::zeros(&b))).unwrap();
        let mut s = StateVector::zeros(&b);
        s.u = SpectralField::smooth_bump(&b, 1e3);
        let err = run(
            &s,
            &model,
            &IntegratorConfig::new(0.5, 50.0, 1),
            Monitors::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }), "{err}");
    }

    #[test]
    fn csv_round_trip() {
        let model = linear_model(4, 0.5);
        let b = model.basis().clone();
        let mut s = StateVector::zeros(&b);
        s.u = SpectralField::smooth_bump(&b, 1.0);
        let log = run(
            &s,
            &model,
            &IntegratorConfig::new(1e-2, 0.1, 2),
            Monitors::default(),
        )
        .unwrap();
        let rows = log.to_rows();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &rows).unwrap();
        let back = read_trajectory_csv(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
        assert!(read_trajectory_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
