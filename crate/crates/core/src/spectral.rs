//! Dirichlet eigenbasis on a rectangle and everything that acts diagonally on it.
//!
//! Fields are stored as coefficient arrays against the L²-orthonormal product
//! sines
//!
//! ```text
//! e_jk(x, y) = 2 / sqrt(Lx Ly) · sin(jπx / Lx) · sin(kπy / Ly),   1 ≤ j ≤ nx, 1 ≤ k ≤ ny
//! ```
//!
//! with `A = -Δ` acting as `A e_jk = λ_jk e_jk`, so every fractional power `A^γ`
//! is an exact diagonal scaling. Array index `[j - 1, k - 1]` holds mode `(j, k)`.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemParams;

/// Eigenvalue table of the Dirichlet Laplacian on `[0, Lx] × [0, Ly]`.
#[derive(Debug, Clone)]
pub struct BasisSpec {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    lambda: Array2<f64>,
    kappa: f64,
}

impl PartialEq for BasisSpec {
    fn eq(&self, other: &Self) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && self.lx.to_bits() == other.lx.to_bits()
            && self.ly.to_bits() == other.ly.to_bits()
    }
}

impl BasisSpec {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::invalid(format!(
                "mode counts must be positive (nx = {nx}, ny = {ny})"
            )));
        }
        if !(lx > 0.0 && lx.is_finite() && ly > 0.0 && ly.is_finite()) {
            return Err(Error::invalid(format!(
                "side lengths must be positive and finite (Lx = {lx}, Ly = {ly})"
            )));
        }
        let lambda = Array2::from_shape_fn((nx, ny), |(j, k)| {
            let a = (j + 1) as f64 * PI / lx;
            let b = (k + 1) as f64 * PI / ly;
            a * a + b * b
        });
        let kappa = lambda[[0, 0]].powf(-0.5).max(1.0);
        Ok(BasisSpec {
            nx,
            ny,
            lx,
            ly,
            lambda,
            kappa,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    /// Embedding constant `max(λ₁₁^{-1/2}, 1)`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn lambda(&self) -> &Array2<f64> {
        &self.lambda
    }

    /// Eigenvalue of mode `(j, k)`, 1-based.
    pub fn eigenvalue(&self, j: usize, k: usize) -> f64 {
        self.lambda[[j - 1, k - 1]]
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda[[0, 0]]
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda[[self.nx - 1, self.ny - 1]]
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `λ^γ` for every mode.
    pub fn lambda_pow(&self, gamma: f64) -> Array2<f64> {
        if gamma == 0.0 {
            return Array2::ones((self.nx, self.ny));
        }
        self.lambda.mapv(|l| l.powf(gamma))
    }

    /// 0-based mode indices sorted by eigenvalue (ties broken by `(j, k)`).
    pub fn modes_by_eigenvalue(&self) -> Vec<(usize, usize)> {
        let mut modes: Vec<(usize, usize)> = (0..self.nx)
            .flat_map(|j| (0..self.ny).map(move |k| (j, k)))
            .collect();
        modes.sort_by(|a, b| {
            self.lambda[*a]
                .total_cmp(&self.lambda[*b])
                .then_with(|| a.cmp(b))
        });
        modes
    }

    pub(crate) fn check_same(&self, other: &BasisSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::BasisMismatch(format!(
                "{}x{} on [0,{}]x[0,{}] vs {}x{} on [0,{}]x[0,{}]",
                self.nx, self.ny, self.lx, self.ly, other.nx, other.ny, other.lx, other.ly
            )))
        }
    }
}

/// Serializable description of a basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisDims {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl From<&BasisSpec> for BasisDims {
    fn from(b: &BasisSpec) -> Self {
        BasisDims {
            nx: b.nx,
            ny: b.ny,
            lx: b.lx,
            ly: b.ly,
        }
    }
}

pub fn build_basis(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Arc<BasisSpec>> {
    BasisSpec::new(nx, ny, lx, ly).map(Arc::new)
}

/// Real coefficient array on a shared basis.
#[derive(Debug, Clone)]
pub struct SpectralField {
    coeffs: Array2<f64>,
    basis: Arc<BasisSpec>,
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        *self.basis == *other.basis && self.coeffs == other.coeffs
    }
}

impl SpectralField {
    pub fn zeros(basis: &Arc<BasisSpec>) -> Self {
        SpectralField {
            coeffs: Array2::zeros((basis.nx, basis.ny)),
            basis: Arc::clone(basis),
        }
    }

    pub fn from_coeffs(basis: &Arc<BasisSpec>, coeffs: Array2<f64>) -> Result<Self> {
        if coeffs.dim() != (basis.nx, basis.ny) {
            return Err(Error::invalid(format!(
                "coefficient shape {:?} does not match basis {}x{}",
                coeffs.dim(),
                basis.nx,
                basis.ny
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("coefficients must be finite"));
        }
        Ok(SpectralField {
            coeffs,
            basis: Arc::clone(basis),
        })
    }

    /// `amplitude · e_jk`, 1-based mode indices.
    pub fn mode(basis: &Arc<BasisSpec>, j: usize, k: usize, amplitude: f64) -> Result<Self> {
        if j == 0 || k == 0 || j > basis.nx || k > basis.ny {
            return Err(Error::invalid(format!(
                "mode ({j}, {k}) outside 1..={} x 1..={}",
                basis.nx, basis.ny
            )));
        }
        let mut f = SpectralField::zeros(basis);
        f.coeffs[[j - 1, k - 1]] = amplitude;
        Ok(f)
    }

    /// Projection of `amplitude · x(Lx - x) y(Ly - y)`; coefficients decay like `(jk)^-3`.
    pub fn smooth_bump(basis: &Arc<BasisSpec>, amplitude: f64) -> Self {
        let line = |n: usize, len: f64| -> Vec<f64> {
            (1..=n)
                .map(|j| {
                    if j % 2 == 1 {
                        let w = j as f64 * PI;
                        (2.0 / len).sqrt() * 4.0 * len.powi(3) / (w * w * w)
                    } else {
                        0.0
                    }
                })
                .collect()
        };
        let cx = line(basis.nx, basis.lx);
        let cy = line(basis.ny, basis.ly);
        let coeffs =
            Array2::from_shape_fn((basis.nx, basis.ny), |(j, k)| amplitude * cx[j] * cy[k]);
        SpectralField {
            coeffs,
            basis: Arc::clone(basis),
        }
    }

    pub fn basis(&self) -> &Arc<BasisSpec> {
        &self.basis
    }

    pub fn coeffs(&self) -> &Array2<f64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array2<f64> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Array2<f64> {
        self.coeffs
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub(crate) fn with_coeffs(&self, coeffs: Array2<f64>) -> Self {
        SpectralField {
            coeffs,
            basis: Arc::clone(&self.basis),
        }
    }

    pub fn plus(&self, other: &SpectralField) -> Result<Self> {
        self.basis.check_same(&other.basis)?;
        Ok(self.with_coeffs(&self.coeffs + &other.coeffs))
    }

    pub fn minus(&self, other: &SpectralField) -> Result<Self> {
        self.basis.check_same(&other.basis)?;
        Ok(self.with_coeffs(&self.coeffs - &other.coeffs))
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.with_coeffs(&self.coeffs * s)
    }

    /// L² inner product.
    pub fn dot(&self, other: &SpectralField) -> Result<f64> {
        self.basis.check_same(&other.basis)?;
        Ok(Zip::from(&self.coeffs)
            .and(&other.coeffs)
            .fold(0.0, |acc, a, b| acc + a * b))
    }

    pub fn norm_l2(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `(A^{γ/2} self, A^{γ/2} other)₂`.
    pub fn frac_inner(&self, other: &SpectralField, gamma: f64) -> Result<f64> {
        self.basis.check_same(&other.basis)?;
        let w = self.basis.lambda_pow(gamma);
        Ok(Zip::from(&self.coeffs)
            .and(&other.coeffs)
            .and(&w)
            .fold(0.0, |acc, a, b, w| acc + w * a * b))
    }
}

/// `A^γ field`.
pub fn apply_frac_power(field: &SpectralField, gamma: f64) -> Result<SpectralField> {
    if !gamma.is_finite() {
        return Err(Error::invalid(format!(
            "exponent must be finite, got {gamma}"
        )));
    }
    if !field.is_finite() {
        return Err(Error::invalid("field has non-finite coefficients"));
    }
    let w = field.basis.lambda_pow(gamma);
    Ok(field.with_coeffs(&field.coeffs * &w))
}

/// `‖A^{γ/2} field‖₂`.
pub fn frac_norm(field: &SpectralField, gamma: f64) -> f64 {
    let w = field.basis.lambda_pow(gamma);
    Zip::from(&field.coeffs)
        .and(&w)
        .fold(0.0, |acc, c, w| acc + w * c * c)
        .sqrt()
}

/// Phase-space point `(u, u_t, θ)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub u: SpectralField,
    pub v: SpectralField,
    pub theta: SpectralField,
    pub t: f64,
}

/// Which phase-space norm to use for distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseNorm {
    /// `‖A^{1/2}u‖² + ‖v‖² + ‖θ‖²`
    Energy,
    /// `‖A^{-1/2}u‖² + ‖v‖² + ‖A^{-1/2}θ‖²`
    Extended,
}

impl StateVector {
    pub fn new(u: SpectralField, v: SpectralField, theta: SpectralField, t: f64) -> Result<Self> {
        u.basis.check_same(&v.basis)?;
        u.basis.check_same(&theta.basis)?;
        Ok(StateVector { u, v, theta, t })
    }

    pub fn zeros(basis: &Arc<BasisSpec>) -> Self {
        StateVector {
            u: SpectralField::zeros(basis),
            v: SpectralField::zeros(basis),
            theta: SpectralField::zeros(basis),
            t: 0.0,
        }
    }

    pub fn basis(&self) -> &Arc<BasisSpec> {
        &self.u.basis
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite() && self.theta.is_finite()
    }

    /// Componentwise difference; the time stamp is taken from `self`.
    pub fn minus(&self, other: &StateVector) -> Result<Self> {
        Ok(StateVector {
            u: self.u.minus(&other.u)?,
            v: self.v.minus(&other.v)?,
            theta: self.theta.minus(&other.theta)?,
            t: self.t,
        })
    }

    pub fn plus(&self, other: &StateVector) -> Result<Self> {
        Ok(StateVector {
            u: self.u.plus(&other.u)?,
            v: self.v.plus(&other.v)?,
            theta: self.theta.plus(&other.theta)?,
            t: self.t,
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        StateVector {
            u: self.u.scaled(s),
            v: self.v.scaled(s),
            theta: self.theta.scaled(s),
            t: self.t,
        }
    }

    /// Coordinates whose Euclidean norm equals the requested phase norm.
    pub fn weighted_coords(&self, norm: PhaseNorm) -> Vec<f64> {
        let exponent = match norm {
            PhaseNorm::Energy => (0.5, 0.0),
            PhaseNorm::Extended => (-0.5, -0.5),
        };
        let wu = self.basis().lambda_pow(exponent.0);
        let wt = self.basis().lambda_pow(exponent.1);
        let mut out = Vec::with_capacity(3 * self.basis().len());
        out.extend(Zip::from(&self.u.coeffs).and(&wu).map_collect(|c, w| c * w));
        out.extend(self.v.coeffs.iter().copied());
        out.extend(
            Zip::from(&self.theta.coeffs)
                .and(&wt)
                .map_collect(|c, w| c * w),
        );
        out
    }

    pub fn phase_norm(&self, norm: PhaseNorm) -> f64 {
        match norm {
            PhaseNorm::Energy => state_norm(self),
            PhaseNorm::Extended => extended_norm(self),
        }
    }
}

/// `‖(u, v, θ)‖_𝓗 = (‖A^{1/2}u‖² + ‖v‖² + ‖θ‖²)^{1/2}`.
pub fn state_norm(state: &StateVector) -> f64 {
    let a = frac_norm(&state.u, 1.0);
    let b = state.v.norm_l2();
    let c = state.theta.norm_l2();
    (a * a + b * b + c * c).sqrt()
}

/// Inner product inducing [`state_norm`].
pub fn state_inner(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.u.frac_inner(&b.u, 1.0)? + a.v.dot(&b.v)? + a.theta.dot(&b.theta)?)
}

/// Norm of the extended space `H⁻¹ × L² × H⁻¹`.
pub fn extended_norm(state: &StateVector) -> f64 {
    let a = frac_norm(&state.u, -1.0);
    let b = state.v.norm_l2();
    let c = frac_norm(&state.theta, -1.0);
    (a * a + b * b + c * c).sqrt()
}

/// Collocation grid for pseudo-spectral evaluation and quadrature.
///
/// With padding factor `q` the interior grid has `q (n + 1) - 1` nodes per
/// direction at spacing `L / (q (n + 1))`. Synthesis and analysis are type-I
/// sine transforms evaluated as dense products with precomputed sine tables;
/// analysis is the composite trapezoid rule, exact for trigonometric content
/// below frequency `2 q (n + 1)`.
#[derive(Debug, Clone)]
pub struct SineGrid {
    basis: Arc<BasisSpec>,
    factor: usize,
    mx: usize,
    my: usize,
    /// `sqrt(2/Lx) sin(jπ x_i / Lx)`, shape `(nx, mx)`.
    sx: Array2<f64>,
    sy: Array2<f64>,
    /// `sx` pre-multiplied by the quadrature weight.
    sx_w: Array2<f64>,
    sy_w: Array2<f64>,
    cell: f64,
}

impl SineGrid {
    pub fn new(basis: &Arc<BasisSpec>, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::invalid("padding factor must be at least 1"));
        }
        let mx = factor * (basis.nx + 1) - 1;
        let my = factor * (basis.ny + 1) - 1;
        let table = |n: usize, m: usize, len: f64| {
            let norm = (2.0 / len).sqrt();
            Array2::from_shape_fn((n, m), |(j, i)| {
                // exact reduction of the angle keeps the table symmetric to rounding
                let idx = ((j + 1) * (i + 1)) % (2 * (m + 1));
                norm * (PI * idx as f64 / (m + 1) as f64).sin()
            })
        };
        let sx = table(basis.nx, mx, basis.lx);
        let sy = table(basis.ny, my, basis.ly);
        let hx = basis.lx / (mx + 1) as f64;
        let hy = basis.ly / (my + 1) as f64;
        Ok(SineGrid {
            basis: Arc::clone(basis),
            factor,
            mx,
            my,
            sx_w: &sx * hx,
            sy_w: &sy * hy,
            sx,
            sy,
            cell: hx * hy,
        })
    }

    pub fn basis(&self) -> &Arc<BasisSpec> {
        &self.basis
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.mx, self.my)
    }

    /// Area of one quadrature cell.
    pub fn cell_area(&self) -> f64 {
        self.cell
    }

    /// Interior node coordinates along x.
    pub fn nodes_x(&self) -> Vec<f64> {
        let h = self.basis.lx / (self.mx + 1) as f64;
        (1..=self.mx).map(|i| i as f64 * h).collect()
    }

    pub fn nodes_y(&self) -> Vec<f64> {
        let h = self.basis.ly / (self.my + 1) as f64;
        (1..=self.my).map(|i| i as f64 * h).collect()
    }

    /// Inverse transform: coefficients to grid values.
    pub fn to_grid(&self, field: &SpectralField) -> Result<Array2<f64>> {
        self.basis.check_same(&field.basis)?;
        Ok(self.synthesize(&field.coeffs))
    }

    pub(crate) fn synthesize(&self, coeffs: &Array2<f64>) -> Array2<f64> {
        self.sx.t().dot(&coeffs.dot(&self.sy))
    }

    /// Forward transform: grid values to coefficients, truncated to the basis modes.
    pub fn from_grid(&self, grid: &Array2<f64>) -> Result<SpectralField> {
        if grid.dim() != (self.mx, self.my) {
            return Err(Error::invalid(format!(
                "grid shape {:?} does not match collocation grid {}x{}",
                grid.dim(),
                self.mx,
                self.my
            )));
        }
        Ok(SpectralField {
            coeffs: self.analyze(grid),
            basis: Arc::clone(&self.basis),
        })
    }

    pub(crate) fn analyze(&self, grid: &Array2<f64>) -> Array2<f64> {
        self.sx_w.dot(&grid.dot(&self.sy_w.t()))
    }

    /// Trapezoid quadrature of grid values over the rectangle.
    pub fn integrate(&self, grid: &Array2<f64>) -> f64 {
        grid.sum() * self.cell
    }
}

/// Linear coupling coefficients `(ν, σ, δ)` of the generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub nu: f64,
    pub sigma: f64,
    pub delta: f64,
}

/// `𝒜(u, φ, θ) = (-φ, Au + A^ν φ - δA^σ θ, Aθ + δA^σ φ)`.
pub fn apply_generator(state: &StateVector, c: Coupling) -> StateVector {
    let basis = state.basis();
    let lam = basis.lambda();
    let lnu = basis.lambda_pow(c.nu);
    let lsig = basis.lambda_pow(c.sigma);
    let (u, phi, th) = (&state.u.coeffs, &state.v.coeffs, &state.theta.coeffs);
    let first = phi.mapv(|x| -x);
    let mut second = Array2::zeros(u.dim());
    let mut third = Array2::zeros(u.dim());
    for ((j, k), &l) in lam.indexed_iter() {
        let (ln, ls) = (lnu[[j, k]], lsig[[j, k]]);
        let (uu, p, t) = (u[[j, k]], phi[[j, k]], th[[j, k]]);
        second[[j, k]] = l * uu + ln * p - c.delta * ls * t;
        third[[j, k]] = l * t + c.delta * ls * p;
    }
    StateVector {
        u: state.u.with_coeffs(first),
        v: state.u.with_coeffs(second),
        theta: state.u.with_coeffs(third),
        t: state.t,
    }
}

/// Closed form of `⟨𝒜U, U⟩_𝓗 = ‖A^{ν/2}φ‖² + ‖A^{1/2}θ‖²`.
pub fn accretivity_form(state: &StateVector, c: Coupling) -> f64 {
    let a = frac_norm(&state.v, c.nu);
    let b = frac_norm(&state.theta, 1.0);
    a * a + b * b
}

/// Solve `(I + 𝒜) U = U*` mode by mode.
///
/// Eliminating `φ = u - u*` leaves, per mode,
///
/// ```text
/// (1 + λ + λ^ν) u - δλ^σ θ = φ* + u* + λ^ν u*
///  δλ^σ u + (1 + λ) θ       = θ* + δλ^σ u*
/// ```
pub fn resolvent_solve(ustar: &StateVector, params: &SystemParams) -> Result<StateVector> {
    resolvent_solve_with(ustar, params.coupling())
}

pub fn resolvent_solve_with(ustar: &StateVector, c: Coupling) -> Result<StateVector> {
    let basis = ustar.basis();
    let lnu = basis.lambda_pow(c.nu);
    let lsig = basis.lambda_pow(c.sigma);
    let dim = (basis.nx, basis.ny);
    let mut u = Array2::zeros(dim);
    let mut phi = Array2::zeros(dim);
    let mut th = Array2::zeros(dim);
    for j in 0..basis.nx {
        for k in 0..basis.ny {
            let l = basis.lambda[[j, k]];
            let (ln, ls) = (lnu[[j, k]], lsig[[j, k]]);
            let us = ustar.u.coeffs[[j, k]];
            let ps = ustar.v.coeffs[[j, k]];
            let ts = ustar.theta.coeffs[[j, k]];
            let a11 = 1.0 + l + ln;
            let a12 = -c.delta * ls;
            let a21 = c.delta * ls;
            let a22 = 1.0 + l;
            let det = a11 * a22 - a12 * a21;
            if !(det.is_finite() && det > 0.0) {
                return Err(Error::Internal(format!(
                    "singular resolvent block at mode ({}, {}): det = {det}",
                    j + 1,
                    k + 1
                )));
            }
            let r1 = ps + us + ln * us;
            let r2 = ts + c.delta * ls * us;
            let uj = (r1 * a22 - a12 * r2) / det;
            let tj = (a11 * r2 - a21 * r1) / det;
            u[[j, k]] = uj;
            th[[j, k]] = tj;
            phi[[j, k]] = uj - us;
        }
    }
    Ok(StateVector {
        u: ustar.u.with_coeffs(u),
        v: ustar.u.with_coeffs(phi),
        theta: ustar.u.with_coeffs(th),
        t: ustar.t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    fn random_field(basis: &Arc<BasisSpec>, rng: &mut ChaCha8Rng) -> SpectralField {
        let c = Array2::from_shape_fn((basis.nx(), basis.ny()), |_| rng.random_range(-1.0..1.0));
        SpectralField::from_coeffs(basis, c).unwrap()
    }

    #[test]
    fn unit_square_first_eigenvalue() {
        let b = build_basis(4, 4, 1.0, 1.0).unwrap();
        assert!(close(b.eigenvalue(1, 1), 2.0 * PI * PI, 1e-15));
        assert!((b.eigenvalue(1, 1) - 19.7392).abs() < 1e-4);
        assert_eq!(b.kappa(), 1.0);
    }

    #[test]
    fn pi_square_has_unit_kappa() {
        let b = build_basis(4, 4, PI, PI).unwrap();
        assert!(close(b.lambda_min(), 2.0, 1e-15));
        assert_eq!(b.kappa(), 1.0);
    }

    #[test]
    fn large_square_kappa() {
        let b = build_basis(3, 3, 2.0 * PI, 2.0 * PI).unwrap();
        assert!(close(b.lambda_min(), 0.5, 1e-15));
        assert!(close(b.kappa(), 2f64.sqrt(), 1e-15));
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(matches!(
            build_basis(0, 4, 1.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_basis(4, 4, -1.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_basis(4, 4, 1.0, 0.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn eigenvalues_monotone_and_minimal_at_origin() {
        let b = build_basis(7, 5, 1.3, 0.7).unwrap();
        let lam = b.lambda();
        for j in 0..7 {
            for k in 0..5 {
                assert!(lam[[j, k]] > 0.0);
                assert!(lam[[j, k]] >= b.lambda_min());
                if j > 0 {
                    assert!(lam[[j, k]] > lam[[j - 1, k]]);
                }
                if k > 0 {
                    assert!(lam[[j, k]] > lam[[j, k - 1]]);
                }
            }
        }
    }

    #[test]
    fn sampled_basis_function_maps_to_unit_coefficient() {
        let b = build_basis(6, 5, PI, 2.0).unwrap();
        let grid = SineGrid::new(&b, 1).unwrap();
        let (xs, ys) = (grid.nodes_x(), grid.nodes_y());
        let norm = 2.0 / (b.area()).sqrt();
        let g = Array2::from_shape_fn(grid.shape(), |(i, l)| {
            norm * (PI * xs[i] / b.lx()).sin() * (PI * ys[l] / b.ly()).sin()
        });
        let f = grid.from_grid(&g).unwrap();
        for ((j, k), c) in f.coeffs().indexed_iter() {
            let expect = if (j, k) == (0, 0) { 1.0 } else { 0.0 };
            assert!((c - expect).abs() < 1e-13, "mode {j},{k}: {c}");
        }
    }

    #[test]
    fn transform_round_trip_padded_and_unpadded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let b = build_basis(9, 12, PI, 1.5).unwrap();
        for q in 1..=3 {
            let grid = SineGrid::new(&b, q).unwrap();
            let f = random_field(&b, &mut rng);
            let back = grid.from_grid(&grid.to_grid(&f).unwrap()).unwrap();
            let err = (back.coeffs() - f.coeffs())
                .mapv(f64::abs)
                .fold(0.0f64, |a, &b| a.max(b));
            assert!(err < 1e-13, "q = {q}: {err}");
        }
        // grid -> coeffs -> grid is the identity only on the unpadded grid
        let grid = SineGrid::new(&b, 1).unwrap();
        let g = Array2::from_shape_fn(grid.shape(), |_| rng.random_range(-1.0..1.0));
        let back = grid.to_grid(&grid.from_grid(&g).unwrap()).unwrap();
        let scale = g.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        let err = (&back - &g).mapv(f64::abs).fold(0.0f64, |a, &b| a.max(b));
        assert!(err <= 1e-12 * scale, "{err}");
    }

    #[test]
    fn transform_rejects_wrong_shape() {
        let b = build_basis(4, 4, PI, PI).unwrap();
        let grid = SineGrid::new(&b, 2).unwrap();
        let g = Array2::zeros((4, 4));
        assert!(matches!(grid.from_grid(&g), Err(Error::InvalidArgument(_))));
        let other = build_basis(5, 4, PI, PI).unwrap();
        assert!(matches!(
            grid.to_grid(&SpectralField::zeros(&other)),
            Err(Error::BasisMismatch(_))
        ));
    }

    #[test]
    fn frac_power_examples() {
        let b = build_basis(4, 4, 1.0, 1.0).unwrap();
        let e11 = SpectralField::mode(&b, 1, 1, 1.0).unwrap();
        let a = apply_frac_power(&e11, 1.0).unwrap();
        assert!(close(a.coeffs()[[0, 0]], 2.0 * PI * PI, 1e-15));
        let id = apply_frac_power(&e11, 0.0).unwrap();
        assert_eq!(id, e11);
        assert!(apply_frac_power(&e11, f64::NAN).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_field(&b, &mut rng);
        let twice = apply_frac_power(&apply_frac_power(&f, 0.5).unwrap(), 0.5).unwrap();
        let once = apply_frac_power(&f, 1.0).unwrap();
        for (x, y) in twice.coeffs().iter().zip(once.coeffs()) {
            assert!(close(*x, *y, 1e-14));
        }
    }

    #[test]
    fn frac_norm_examples() {
        let b = build_basis(4, 4, 1.0, 1.0).unwrap();
        let a = -1.7;
        let f = SpectralField::mode(&b, 1, 1, a).unwrap();
        assert!(close(
            frac_norm(&f, 1.0),
            a.abs() * (2.0 * PI * PI).sqrt(),
            1e-15
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = random_field(&b, &mut rng);
        assert!(close(frac_norm(&g, 0.0), g.norm_l2(), 1e-15));
    }

    #[test]
    fn resolvent_of_zero_is_zero() {
        let b = build_basis(5, 5, PI, PI).unwrap();
        let z = StateVector::zeros(&b);
        let c = Coupling {
            nu: 0.3,
            sigma: 0.7,
            delta: 0.5,
        };
        let u = resolvent_solve_with(&z, c).unwrap();
        assert_eq!(state_norm(&u), 0.0);
    }

    #[test]
    fn resolvent_decoupled_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = build_basis(6, 4, PI, 2.0).unwrap();
        let us = StateVector::new(
            random_field(&b, &mut rng),
            random_field(&b, &mut rng),
            random_field(&b, &mut rng),
            0.0,
        )
        .unwrap();
        let nu = 0.4;
        let sol = resolvent_solve_with(
            &us,
            Coupling {
                nu,
                sigma: 0.6,
                delta: 0.0,
            },
        )
        .unwrap();
        for ((j, k), &l) in b.lambda().indexed_iter() {
            let (u0, p0, t0) = (
                us.u.coeffs()[[j, k]],
                us.v.coeffs()[[j, k]],
                us.theta.coeffs()[[j, k]],
            );
            let ln = l.powf(nu);
            let u = (u0 + p0 + ln * u0) / (1.0 + l + ln);
            let t = t0 / (1.0 + l);
            assert!(close(sol.u.coeffs()[[j, k]], u, 1e-14));
            assert!(close(sol.theta.coeffs()[[j, k]], t, 1e-14));
            assert!(close(sol.v.coeffs()[[j, k]], u - u0, 1e-13));
        }
    }

    #[test]
    fn resolvent_residual_and_accretivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = build_basis(10, 10, PI, PI).unwrap();
        let c = Coupling {
            nu: 0.3,
            sigma: 0.3,
            delta: 0.5,
        };
        for _ in 0..20 {
            let us = StateVector::new(
                random_field(&b, &mut rng),
                random_field(&b, &mut rng),
                random_field(&b, &mut rng),
                0.0,
            )
            .unwrap();
            let sol = resolvent_solve_with(&us, c).unwrap();
            let res = sol
                .plus(&apply_generator(&sol, c))
                .unwrap()
                .minus(&us)
                .unwrap();
            assert!(state_norm(&res) <= 1e-10 * state_norm(&us));

            let form = state_inner(&apply_generator(&us, c), &us).unwrap();
            assert!(close(form, accretivity_form(&us, c), 1e-12));
        }
    }

    #[test]
    fn extended_norm_is_weaker() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = build_basis(8, 8, PI, PI).unwrap();
        let s = StateVector::new(
            random_field(&b, &mut rng),
            random_field(&b, &mut rng),
            random_field(&b, &mut rng),
            0.0,
        )
        .unwrap();
        // λ ≥ 2 on [0,π]², so every weight shrinks
        assert!(extended_norm(&s) <= state_norm(&s));
        let w = s.weighted_coords(PhaseNorm::Extended);
        let n: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(close(n, extended_norm(&s), 1e-14));
    }
}
