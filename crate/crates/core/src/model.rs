//! Source term, its growth certificate, and the energy functionals monitored along runs.

use std::sync::Arc;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    frac_norm, state_norm, BasisSpec, Coupling, SineGrid, SpectralField, StateVector,
};

/// Odd polynomial `f(s) = Σ_m a_m s^{2m+1}` with nonnegative `a_m`, plus the
/// constants certifying its growth and sign conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearitySpec {
    /// `a_0, a_1, ...`, coefficient of `s^{2m+1}` at index `m`.
    pub coeffs: Vec<f64>,
    /// Growth exponent in `|f'(s)| ≤ C_f (1 + |s|^p)`.
    pub p: f64,
    pub c_f: f64,
    /// Lower bound `F ≥ -m_F` of the primitive.
    pub m_f: f64,
    /// Primitive growth constant, `|F(s)| ≤ C_F (1 + |s|^{p+2})`.
    pub c_cap_f: f64,
}

impl Default for NonlinearitySpec {
    fn default() -> Self {
        NonlinearitySpec::cubic()
    }
}

impl NonlinearitySpec {
    /// `f(s) = s³`.
    pub fn cubic() -> Self {
        NonlinearitySpec {
            coeffs: vec![0.0, 1.0],
            p: 2.0,
            c_f: 3.0,
            m_f: 1.0,
            c_cap_f: 12.0,
        }
    }

    /// `f ≡ 0`, the linear system.
    pub fn zero() -> Self {
        NonlinearitySpec {
            coeffs: vec![],
            p: 0.0,
            c_f: 1.0,
            m_f: 1.0,
            c_cap_f: 4.0,
        }
    }

    /// `f(s) = s`.
    pub fn identity() -> Self {
        NonlinearitySpec {
            coeffs: vec![1.0],
            p: 0.0,
            c_f: 1.0,
            m_f: 1.0,
            c_cap_f: 4.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((m, a)) = self
            .coeffs
            .iter()
            .enumerate()
            .find(|(_, a)| !(**a >= 0.0 && a.is_finite()))
        {
            return Err(Error::invalid(format!(
                "nonlinearity coefficient a_{m} = {a} must be finite and nonnegative (f(s)s >= 0 requires it)"
            )));
        }
        for (name, v) in [
            ("p", self.p),
            ("c_f", self.c_f),
            ("m_f", self.m_f),
            ("c_cap_f", self.c_cap_f),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|a| *a == 0.0)
    }

    /// Polynomial degree; 0 for `f ≡ 0`.
    pub fn degree(&self) -> usize {
        match self.coeffs.iter().rposition(|a| *a != 0.0) {
            Some(m) => 2 * m + 1,
            None => 0,
        }
    }

    /// Smallest padding factor for which products are alias-free.
    pub fn min_padding(&self) -> usize {
        self.degree().div_ceil(2).max(1)
    }

    pub fn eval(&self, s: f64) -> f64 {
        let s2 = s * s;
        s * self.coeffs.iter().rev().fold(0.0, |acc, a| acc * s2 + a)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let s2 = s * s;
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (m, a)| acc * s2 + a * (2 * m + 1) as f64)
    }

    /// `F(s) = ∫₀ˢ f`.
    pub fn primitive(&self, s: f64) -> f64 {
        let s2 = s * s;
        s2 * self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (m, a)| acc * s2 + a / (2 * m + 2) as f64)
    }
}

/// One sampled inequality `lhs(s) ≤ rhs(s)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub pass: bool,
    /// Smallest `rhs - lhs` over the samples.
    pub worst_margin: f64,
    /// Largest `lhs / rhs` over samples with `rhs > 0`.
    pub worst_ratio: f64,
    /// Sample where the margin is smallest.
    pub worst_at: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditReport {
    pub half_width: f64,
    pub samples: usize,
    pub checks: Vec<InequalityCheck>,
    pub pass: bool,
}

/// Scan `[-half_width, half_width]` and test the growth, sign and primitive
/// bounds the energy estimates rely on.
pub fn audit_nonlinearity(
    spec: &NonlinearitySpec,
    half_width: f64,
    samples: usize,
) -> Result<AuditReport> {
    spec.validate()?;
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::invalid(format!(
            "audit range half-width must be positive, got {half_width}"
        )));
    }
    if samples < 100 {
        return Err(Error::invalid(format!(
            "audit needs at least 100 samples, got {samples}"
        )));
    }
    let p = spec.p;
    let checks: [(&str, Box<dyn Fn(f64) -> (f64, f64)>); 5] = [
        (
            "derivative growth |f'(s)| <= C_f(1+|s|^p)",
            Box::new(|s: f64| (spec.derivative(s).abs(), spec.c_f * (1.0 + s.abs().powf(p)))),
        ),
        (
            "sign f(s)s >= 0",
            Box::new(|s: f64| (-spec.eval(s) * s, 0.0)),
        ),
        (
            "primitive lower bound F(s) >= -m_F",
            Box::new(|s: f64| (-spec.primitive(s), spec.m_f)),
        ),
        (
            "growth |f(s)| <= 2C_f(1+|s|^(p+1))",
            Box::new(|s: f64| {
                (
                    spec.eval(s).abs(),
                    2.0 * spec.c_f * (1.0 + s.abs().powf(p + 1.0)),
                )
            }),
        ),
        (
            "primitive growth |F(s)| <= C_F(1+|s|^(p+2))",
            Box::new(|s: f64| {
                (
                    spec.primitive(s).abs(),
                    spec.c_cap_f * (1.0 + s.abs().powf(p + 2.0)),
                )
            }),
        ),
    ];
    let points: Vec<f64> = (0..samples)
        .map(|i| -half_width + 2.0 * half_width * i as f64 / (samples - 1) as f64)
        .chain(std::iter::once(0.0))
        .collect();
    let mut out = Vec::with_capacity(checks.len());
    for (name, check) in checks.iter() {
        let mut worst_margin = f64::INFINITY;
        let mut worst_ratio = 0.0f64;
        let mut worst_at = 0.0;
        let mut pass = true;
        for &s in &points {
            let (lhs, rhs) = check(s);
            let margin = rhs - lhs;
            // rounding slack relative to the magnitudes involved
            let slack = 1e-12 * lhs.abs().max(rhs.abs());
            if margin < -slack {
                pass = false;
            }
            if margin < worst_margin {
                worst_margin = margin;
                worst_at = s;
            }
            if rhs > 0.0 {
                worst_ratio = worst_ratio.max(lhs / rhs);
            }
        }
        out.push(InequalityCheck {
            name: name.to_string(),
            pass,
            worst_margin,
            worst_ratio,
            worst_at,
        });
    }
    let pass = out.iter().all(|c| c.pass);
    Ok(AuditReport {
        half_width,
        samples,
        checks: out,
        pass,
    })
}

/// Coefficients `(ν, σ, δ)`, forcing `h`, source term and monitor weights.
#[derive(Debug, Clone)]
pub struct SystemParams {
    pub nu: f64,
    pub sigma: f64,
    pub delta: f64,
    pub h: SpectralField,
    pub nonlinearity: NonlinearitySpec,
    /// Weights of the composite functional `N₁E + N₂J`.
    pub n1: f64,
    pub n2: f64,
    /// Padding factor of the pseudo-spectral grid.
    pub padding: usize,
}

impl SystemParams {
    /// Defaults: `f(s) = s³`, `δ = 0.5`, `ν = σ = 0.5`, `N₁ = 4`, `N₂ = 1`, padding 2.
    pub fn new(h: SpectralField) -> Self {
        SystemParams {
            nu: 0.5,
            sigma: 0.5,
            delta: 0.5,
            h,
            nonlinearity: NonlinearitySpec::cubic(),
            n1: 4.0,
            n2: 1.0,
            padding: 2,
        }
    }

    pub fn with_exponents(mut self, nu: f64, sigma: f64) -> Self {
        self.nu = nu;
        self.sigma = sigma;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_nonlinearity(mut self, spec: NonlinearitySpec) -> Self {
        self.nonlinearity = spec;
        self
    }

    pub fn basis(&self) -> &Arc<BasisSpec> {
        self.h.basis()
    }

    pub fn coupling(&self) -> Coupling {
        Coupling {
            nu: self.nu,
            sigma: self.sigma,
            delta: self.delta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            errs.push(format!("delta = {}: δ is a positive constant", self.delta));
        }
        for (name, v) in [("nu", self.nu), ("sigma", self.sigma)] {
            if !(0.0..=1.0).contains(&v) {
                errs.push(format!("{name} = {v}: ν,σ∈[0,1] is required"));
            }
        }
        for (name, v) in [("n1", self.n1), ("n2", self.n2)] {
            if !(v > 0.0 && v.is_finite()) {
                errs.push(format!("{name} = {v}: monitor weights must be positive"));
            }
        }
        if let Err(e) = self.nonlinearity.validate() {
            errs.push(e.to_string());
        }
        if self.padding < self.nonlinearity.min_padding() {
            errs.push(format!(
                "padding = {} is below (degree + 1) / 2 = {} for a degree-{} source",
                self.padding,
                self.nonlinearity.min_padding(),
                self.nonlinearity.degree()
            ));
        }
        if !self.h.is_finite() {
            errs.push("forcing h has non-finite coefficients".into());
        }
        match errs.len() {
            0 => Ok(()),
            1 => Err(Error::InvalidArgument(errs.remove(0))),
            _ => Err(Error::InvalidArgument(errs.join("; "))),
        }
    }
}

/// Constants of the two-sided energy bounds, fixed per basis and parameter set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundConstants {
    pub kappa: f64,
    pub area: f64,
    pub h_norm: f64,
    /// Largest observed `‖u‖_{p+2} / ‖A^{1/2}u‖₂` over random band-limited fields.
    pub embed_ratio: f64,
    /// `(2 · embed_ratio)^{p+2}`: bounds `‖u‖_{p+2}^{p+2}` by `C ‖A^{1/2}u‖^{p+2}`.
    pub c_embed: f64,
    pub c1: f64,
    pub c2: f64,
    /// `κ²‖h‖² + |Ω| m_F`
    pub k: f64,
    /// `C₁ + C₂ + 1`
    pub m: f64,
    pub p: f64,
}

impl BoundConstants {
    /// Radius `R₀` with `R₀² = 1 + 4M (κ‖h‖)^{p+2} + 4(M + K)` of the absorbing ball.
    pub fn absorbing_radius(&self) -> f64 {
        let n_sup = self.kappa * self.h_norm;
        (1.0 + 4.0 * self.m * n_sup.powf(self.p + 2.0) + 4.0 * (self.m + self.k)).sqrt()
    }
}

const EMBED_SAMPLES: usize = 1000;
const EMBED_SEED: u64 = 0x00e3_bed5;

/// Estimate the `V₁ ↪ L^{p+2}` ratio on band-limited fields of this basis.
pub fn estimate_embedding_ratio(basis: &Arc<BasisSpec>, p: f64) -> Result<f64> {
    let r = p + 2.0;
    let grid = SineGrid::new(basis, quadrature_factor(r))?;
    let mut rng = ChaCha8Rng::seed_from_u64(EMBED_SEED);
    let decay = [0.0, 0.5, 1.0];
    let mut best = 0.0f64;
    for i in 0..EMBED_SAMPLES {
        let s = decay[i % decay.len()];
        let c = Array2::from_shape_fn((basis.nx(), basis.ny()), |(j, k)| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * basis.lambda()[[j, k]].powf(-s)
        });
        let f = SpectralField::from_coeffs(basis, c)?;
        let ratio = lp_norm_on(&grid, &f, r) / frac_norm(&f, 1.0);
        best = best.max(ratio);
    }
    Ok(best)
}

/// Padding factor making `|u|^r` quadrature exact for even integer `r`.
fn quadrature_factor(r: f64) -> usize {
    ((r / 2.0).ceil() as usize).max(1)
}

fn lp_norm_on(grid: &SineGrid, u: &SpectralField, r: f64) -> f64 {
    let g = grid.synthesize(u.coeffs());
    let integral = g.iter().map(|x| x.abs().powf(r)).sum::<f64>() * grid.cell_area();
    integral.powf(1.0 / r)
}

/// Sampled functionals at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub t: f64,
    /// `½‖U‖²_𝓗`
    pub energy: f64,
    /// `E + ∫F(u) - (h, u)₂`
    pub modified_energy: f64,
    pub phi: f64,
    /// `(u_t, u)₂`
    pub j: f64,
    /// `N₁E + N₂J`
    pub composite: f64,
    /// `‖A^{ν/2}u_t‖²`
    pub diss_ut: f64,
    /// `‖A^{1/2}θ‖²`
    pub diss_theta: f64,
    pub state_norm: f64,
    pub k: f64,
    pub m: f64,
    pub h_norm: f64,
    pub u_v2: f64,
    pub ut_v1: f64,
    pub theta_v2: f64,
}

impl EnergyReport {
    pub fn dissipation(&self) -> f64 {
        self.diss_ut + self.diss_theta
    }

    /// `¼‖U‖² - K ≤ 𝓔` and `𝓔 ≤ M(‖U‖^{p+2} + 1)`.
    pub fn bounds_hold(&self, p: f64) -> (bool, bool) {
        let n = self.state_norm;
        let lower = self.modified_energy >= 0.25 * n * n - self.k;
        let upper = self.modified_energy <= self.m * (n.powf(p + 2.0) + 1.0);
        (lower, upper)
    }
}

/// Parameter set with its transform grids and bound constants, ready for evaluation.
#[derive(Debug, Clone)]
pub struct Model {
    params: SystemParams,
    grid: SineGrid,
    l6_grid: SineGrid,
    bounds: BoundConstants,
}

impl Model {
    pub fn new(params: SystemParams) -> Result<Self> {
        params.validate()?;
        let basis = Arc::clone(params.basis());
        let grid = SineGrid::new(&basis, params.padding)?;
        let l6_grid = SineGrid::new(&basis, quadrature_factor(6.0))?;
        let spec = &params.nonlinearity;
        let embed_ratio = estimate_embedding_ratio(&basis, spec.p)?;
        let c_embed = (2.0 * embed_ratio).powf(spec.p + 2.0);
        let kappa = basis.kappa();
        let area = basis.area();
        let h_norm = params.h.norm_l2();
        let c1 = (spec.c_cap_f * area).max(spec.c_cap_f * c_embed);
        let c2 = kappa * kappa * h_norm * h_norm + 1.0;
        let bounds = BoundConstants {
            kappa,
            area,
            h_norm,
            embed_ratio,
            c_embed,
            c1,
            c2,
            k: kappa * kappa * h_norm * h_norm + area * spec.m_f,
            m: c1 + c2 + 1.0,
            p: spec.p,
        };
        Ok(Model {
            params,
            grid,
            l6_grid,
            bounds,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn basis(&self) -> &Arc<BasisSpec> {
        self.params.basis()
    }

    pub fn grid(&self) -> &SineGrid {
        &self.grid
    }

    pub fn bounds(&self) -> &BoundConstants {
        &self.bounds
    }

    fn check_basis(&self, state: &StateVector) -> Result<()> {
        self.basis().check_same(state.basis())
    }

    /// Spectral image of `f(u)`: padded synthesis, pointwise `f`, analysis, truncation.
    pub fn nonlinear_term(&self, u: &SpectralField) -> Result<SpectralField> {
        self.basis().check_same(u.basis())?;
        Ok(u.with_coeffs(self.nonlinear_coeffs(u.coeffs())))
    }

    pub(crate) fn nonlinear_coeffs(&self, u: &Array2<f64>) -> Array2<f64> {
        let spec = &self.params.nonlinearity;
        if spec.is_zero() {
            return Array2::zeros(u.dim());
        }
        let mut g = self.grid.synthesize(u);
        g.mapv_inplace(|s| spec.eval(s));
        self.grid.analyze(&g)
    }

    /// `h - f(u)` in coefficient space.
    pub(crate) fn forcing_coeffs(&self, u: &Array2<f64>) -> Array2<f64> {
        if self.params.nonlinearity.is_zero() {
            return self.params.h.coeffs().clone();
        }
        self.params.h.coeffs() - &self.nonlinear_coeffs(u)
    }

    /// Action of `f'(u)·` on `w`, projected back onto the basis.
    pub(crate) fn linearized_coeffs(&self, u_grid: &Array2<f64>, w: &Array2<f64>) -> Array2<f64> {
        let spec = &self.params.nonlinearity;
        let mut g = self.grid.synthesize(w);
        ndarray::Zip::from(&mut g)
            .and(u_grid)
            .for_each(|x, &s| *x *= spec.derivative(s));
        self.grid.analyze(&g)
    }

    /// `∫_Ω F(u) dx` on the padded grid.
    pub fn primitive_integral(&self, u: &SpectralField) -> Result<f64> {
        self.basis().check_same(u.basis())?;
        Ok(self.primitive_integral_coeffs(u.coeffs()))
    }

    fn primitive_integral_coeffs(&self, u: &Array2<f64>) -> f64 {
        let spec = &self.params.nonlinearity;
        if spec.is_zero() {
            return 0.0;
        }
        let g = self.grid.synthesize(u);
        g.iter().map(|&s| spec.primitive(s)).sum::<f64>() * self.grid.cell_area()
    }

    /// `μ(u) = ‖u‖_{L⁶}`.
    pub fn l6_seminorm(&self, u: &SpectralField) -> Result<f64> {
        self.basis().check_same(u.basis())?;
        Ok(lp_norm_on(&self.l6_grid, u, 6.0))
    }

    /// `(‖A^{ν/2}u_t‖², ‖A^{1/2}θ‖²)`.
    pub fn dissipation(&self, state: &StateVector) -> Result<(f64, f64)> {
        self.check_basis(state)?;
        let a = frac_norm(&state.v, self.params.nu);
        let b = frac_norm(&state.theta, 1.0);
        Ok((a * a, b * b))
    }

    /// Lyapunov function `½‖U‖²_𝓗 + ∫F(u) - (h, u)₂`.
    pub fn lyapunov(&self, state: &StateVector) -> Result<f64> {
        self.check_basis(state)?;
        let n = state_norm(state);
        let half_sq = 0.5 * (n * n);
        Ok(half_sq + self.primitive_integral_coeffs(state.u.coeffs())
            - self.params.h.dot(&state.u)?)
    }

    pub fn compute_energy(&self, state: &StateVector) -> Result<EnergyReport> {
        self.check_basis(state)?;
        let n = state_norm(state);
        let energy = 0.5 * (n * n);
        let int_f = self.primitive_integral_coeffs(state.u.coeffs());
        let hu = self.params.h.dot(&state.u)?;
        let modified_energy = energy + int_f - hu;
        let phi = self.lyapunov(state)?;
        let j = state.v.dot(&state.u)?;
        let (diss_ut, diss_theta) = self.dissipation(state)?;
        Ok(EnergyReport {
            t: state.t,
            energy,
            modified_energy,
            phi,
            j,
            composite: self.params.n1 * energy + self.params.n2 * j,
            diss_ut,
            diss_theta,
            state_norm: n,
            k: self.bounds.k,
            m: self.bounds.m,
            h_norm: self.bounds.h_norm,
            u_v2: frac_norm(&state.u, 2.0),
            ut_v1: frac_norm(&state.v, 1.0),
            theta_v2: frac_norm(&state.theta, 2.0),
        })
    }
}

/// `f(u)` on a freshly built padded grid.
pub fn nonlinear_term(
    u: &SpectralField,
    spec: &NonlinearitySpec,
    padding: usize,
) -> Result<SpectralField> {
    spec.validate()?;
    if padding < spec.min_padding() {
        return Err(Error::invalid(format!(
            "padding {padding} too small for degree {}",
            spec.degree()
        )));
    }
    if spec.is_zero() {
        return Ok(SpectralField::zeros(u.basis()));
    }
    let grid = SineGrid::new(u.basis(), padding)?;
    let mut g = grid.synthesize(u.coeffs());
    g.mapv_inplace(|s| spec.eval(s));
    Ok(u.with_coeffs(grid.analyze(&g)))
}

/// `‖u‖_{L⁶}` on a grid fine enough to integrate `u⁶` exactly.
pub fn l6_seminorm(u: &SpectralField) -> Result<f64> {
    let grid = SineGrid::new(u.basis(), quadrature_factor(6.0))?;
    Ok(lp_norm_on(&grid, u, 6.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::build_basis;
    use std::f64::consts::PI;

    fn pi_basis(n: usize) -> Arc<BasisSpec> {
        build_basis(n, n, PI, PI).unwrap()
    }

    #[test]
    fn polynomial_pieces() {
        let f = NonlinearitySpec {
            coeffs: vec![1.0, 0.0, 2.0],
            ..NonlinearitySpec::cubic()
        };
        let s = 1.3f64;
        assert!((f.eval(s) - (s + 2.0 * s.powi(5))).abs() < 1e-12);
        assert!((f.derivative(s) - (1.0 + 10.0 * s.powi(4))).abs() < 1e-12);
        assert!((f.primitive(s) - (s * s / 2.0 + s.powi(6) / 3.0)).abs() < 1e-12);
        assert_eq!(f.degree(), 5);
        assert_eq!(f.min_padding(), 3);
        assert_eq!(NonlinearitySpec::zero().degree(), 0);
        assert_eq!(NonlinearitySpec::cubic().min_padding(), 2);
    }

    #[test]
    fn cubic_certificate_passes() {
        let r = audit_nonlinearity(&NonlinearitySpec::cubic(), 10.0, 2001).unwrap();
        assert!(r.pass, "{r:?}");
        // f'(s) = 3s² <= 3(1 + s²): the ratio approaches but never reaches 1
        assert!(r.checks[0].worst_ratio < 1.0 && r.checks[0].worst_ratio > 0.99);
    }

    #[test]
    fn zero_and_identity_pass() {
        assert!(
            audit_nonlinearity(&NonlinearitySpec::zero(), 10.0, 200)
                .unwrap()
                .pass
        );
        let zero_arbitrary = NonlinearitySpec {
            c_f: 1e-3,
            ..NonlinearitySpec::zero()
        };
        assert!(audit_nonlinearity(&zero_arbitrary, 5.0, 200).unwrap().pass);
        assert!(
            audit_nonlinearity(&NonlinearitySpec::identity(), 10.0, 200)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn audit_flags_violations() {
        let weak = NonlinearitySpec {
            c_f: 2.0,
            ..NonlinearitySpec::cubic()
        };
        let r = audit_nonlinearity(&weak, 10.0, 500).unwrap();
        assert!(!r.pass);
        assert!(!r.checks[0].pass);
        let negative = NonlinearitySpec {
            coeffs: vec![0.0, -1.0],
            ..NonlinearitySpec::cubic()
        };
        assert!(matches!(
            audit_nonlinearity(&negative, 10.0, 500),
            Err(Error::InvalidArgument(_))
        ));
        assert!(audit_nonlinearity(&NonlinearitySpec::cubic(), 10.0, 50).is_err());
    }

    #[test]
    fn params_validation_messages() {
        let b = pi_basis(4);
        let p = SystemParams::new(SpectralField::zeros(&b)).with_delta(-1.0);
        let msg = p.validate().unwrap_err().to_string();
        assert!(msg.contains("δ is a positive constant"), "{msg}");
        let p = SystemParams::new(SpectralField::zeros(&b)).with_exponents(1.5, 0.5);
        let msg = p.validate().unwrap_err().to_string();
        assert!(msg.contains("ν,σ∈[0,1]"), "{msg}");
        let mut p = SystemParams::new(SpectralField::zeros(&b));
        p.padding = 1;
        assert!(p.validate().is_err());
    }

    #[test]
    fn nonlinear_term_simple_cases() {
        let b = pi_basis(8);
        let zero = SpectralField::zeros(&b);
        let out = nonlinear_term(&zero, &NonlinearitySpec::cubic(), 2).unwrap();
        assert_eq!(out.norm_l2(), 0.0);
        let u = SpectralField::smooth_bump(&b, 0.7);
        let id = nonlinear_term(&u, &NonlinearitySpec::identity(), 1).unwrap();
        for (a, b) in id.coeffs().iter().zip(u.coeffs()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn nonlinear_term_is_odd() {
        let b = pi_basis(10);
        let model = Model::new(SystemParams::new(SpectralField::zeros(&b))).unwrap();
        let u = SpectralField::smooth_bump(&b, 1.3);
        let plus = model.nonlinear_term(&u).unwrap();
        let minus = model.nonlinear_term(&u.scaled(-1.0)).unwrap();
        for (a, b) in plus.coeffs().iter().zip(minus.coeffs()) {
            assert!((a + b).abs() <= 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn energy_of_zero_state() {
        let b = pi_basis(6);
        let model = Model::new(SystemParams::new(SpectralField::zeros(&b))).unwrap();
        let r = model.compute_energy(&StateVector::zeros(&b)).unwrap();
        assert_eq!(
            (r.energy, r.modified_energy, r.phi, r.j),
            (0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn energy_single_mode_linear() {
        let b = build_basis(5, 5, 1.0, 1.0).unwrap();
        let params =
            SystemParams::new(SpectralField::zeros(&b)).with_nonlinearity(NonlinearitySpec::zero());
        let model = Model::new(params).unwrap();
        let a = 0.8;
        let mut s = StateVector::zeros(&b);
        s.u = SpectralField::mode(&b, 1, 1, a).unwrap();
        let r = model.compute_energy(&s).unwrap();
        let expect = 0.5 * a * a * 2.0 * PI * PI;
        assert!((r.energy - expect).abs() < 1e-13 * expect);
        assert_eq!(r.modified_energy, r.energy);
    }

    #[test]
    fn phi_equals_modified_energy_exactly() {
        let b = pi_basis(8);
        let h = SpectralField::mode(&b, 1, 2, 0.9).unwrap();
        let model = Model::new(SystemParams::new(h)).unwrap();
        let mut s = StateVector::zeros(&b);
        s.u = SpectralField::smooth_bump(&b, 0.4);
        s.v = SpectralField::mode(&b, 2, 1, -0.3).unwrap();
        s.theta = SpectralField::mode(&b, 3, 3, 0.2).unwrap();
        let r = model.compute_energy(&s).unwrap();
        assert_eq!(r.phi.to_bits(), r.modified_energy.to_bits());
        assert_eq!(
            model.lyapunov(&s).unwrap().to_bits(),
            r.modified_energy.to_bits()
        );
    }

    #[test]
    fn dissipation_examples() {
        let b = pi_basis(6);
        let mut s = StateVector::zeros(&b);
        s.u = SpectralField::smooth_bump(&b, 1.0);
        let params = SystemParams::new(SpectralField::zeros(&b)).with_exponents(0.0, 0.5);
        let model = Model::new(params).unwrap();
        assert_eq!(model.dissipation(&s).unwrap(), (0.0, 0.0));
        s.v = SpectralField::smooth_bump(&b, 0.5);
        let (du, _) = model.dissipation(&s).unwrap();
        assert!((du - s.v.norm_l2().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn l6_is_homogeneous() {
        let b = pi_basis(8);
        assert_eq!(l6_seminorm(&SpectralField::zeros(&b)).unwrap(), 0.0);
        let u = SpectralField::smooth_bump(&b, 1.0);
        let a = l6_seminorm(&u).unwrap();
        let c = l6_seminorm(&u.scaled(3.0)).unwrap();
        assert!((c - 3.0 * a).abs() < 1e-13 * c);
    }

    #[test]
    fn absorbing_radius_formula() {
        let b = pi_basis(6);
        let h = SpectralField::mode(&b, 1, 1, 1.0).unwrap();
        let model = Model::new(SystemParams::new(h)).unwrap();
        let c = model.bounds();
        assert_eq!(c.kappa, 1.0);
        assert!((c.k - (1.0 + PI * PI)).abs() < 1e-12);
        assert!((c.c2 - 2.0).abs() < 1e-15);
        let r2 = 1.0 + 4.0 * c.m + 4.0 * (c.m + c.k);
        assert!((c.absorbing_radius() - r2.sqrt()).abs() < 1e-12);
    }
}
