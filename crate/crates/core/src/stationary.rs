//! Stationary states: Newton iteration for `A u + f(u) = h`.

use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;
use crate::spectral::{frac_norm, SpectralField, StateVector};

#[derive(Debug, Clone)]
pub struct StationaryResult {
    pub u: SpectralField,
    /// `‖A u + f(u) - h‖₂`
    pub residual_norm: f64,
    pub iterations: usize,
    /// Residual before each Newton step and after the last one.
    pub residual_history: Vec<f64>,
    pub bound: BoundCheck,
}

/// `‖A^{1/2}u‖² ≤ κ²‖h‖²`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl StationaryResult {
    /// The stationary point `(u, 0, 0)` of the evolution.
    pub fn as_state(&self) -> StateVector {
        StateVector {
            u: self.u.clone(),
            v: SpectralField::zeros(self.u.basis()),
            theta: SpectralField::zeros(self.u.basis()),
            t: 0.0,
        }
    }
}

const MAX_HALVINGS: usize = 20;
const MAX_CG_ITER: usize = 2000;

fn norm(a: &Array2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    Zip::from(a).and(b).fold(0.0, |acc, x, y| acc + x * y)
}

fn residual(model: &Model, u: &Array2<f64>) -> Array2<f64> {
    let lam = model.basis().lambda();
    let mut r = model.forcing_coeffs(u);
    // forcing is h - f(u); residual is A u + f(u) - h
    Zip::from(&mut r)
        .and(lam)
        .and(u)
        .for_each(|r, &l, &u| *r = l * u - *r);
    r
}

/// Solve `J x = b` with `J = A + f'(u)` by preconditioned conjugate gradients.
fn jacobian_solve(
    model: &Model,
    u: &Array2<f64>,
    b: &Array2<f64>,
    rel_tol: f64,
) -> Result<Array2<f64>> {
    let lam = model.basis().lambda();
    let linear = model.params().nonlinearity.is_zero();
    let u_grid = model.grid().synthesize(u);
    let spec = &model.params().nonlinearity;
    let mean_slope = if linear {
        0.0
    } else {
        u_grid.iter().map(|&s| spec.derivative(s)).sum::<f64>() / u_grid.len() as f64
    };
    let precond = lam.mapv(|l| 1.0 / (l + mean_slope));
    let apply = |w: &Array2<f64>| -> Array2<f64> {
        let mut out = lam * w;
        if !linear {
            out += &model.linearized_coeffs(&u_grid, w);
        }
        out
    };

    let b_norm = norm(b);
    let mut x = Array2::zeros(b.dim());
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut r = b.clone();
    let mut z = &r * &precond;
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for _ in 0..MAX_CG_ITER {
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0 && pap.is_finite()) {
            return Err(Error::Internal(format!(
                "conjugate gradient breakdown: pᵀJp = {pap}"
            )));
        }
        let alpha = rz / pap;
        x.scaled_add(alpha, &p);
        r.scaled_add(-alpha, &ap);
        if norm(&r) <= rel_tol * b_norm {
            return Ok(x);
        }
        z = &r * &precond;
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p = &z + &(beta * &p);
    }
    Err(Error::Internal(format!(
        "conjugate gradient did not reach relative tolerance {rel_tol:e} in {MAX_CG_ITER} iterations"
    )))
}

/// Newton from `u⁰ = A⁻¹h`.
pub fn solve_stationary(model: &Model, tol: f64, max_iter: usize) -> Result<StationaryResult> {
    let h = &model.params().h;
    let initial = h.with_coeffs(h.coeffs() / model.basis().lambda());
    solve_stationary_from(model, &initial, tol, max_iter)
}

pub fn solve_stationary_from(
    model: &Model,
    initial: &SpectralField,
    tol: f64,
    max_iter: usize,
) -> Result<StationaryResult> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    model.basis().check_same(initial.basis())?;
    let mut u = initial.coeffs().clone();
    let mut r = residual(model, &u);
    let mut r_norm = norm(&r);
    let mut history = vec![r_norm];
    let mut iterations = 0;
    while r_norm > tol {
        if iterations == max_iter {
            return Err(Error::NonConvergence {
                iterations,
                residual: r_norm,
            });
        }
        // inexact Newton with forcing term proportional to the residual
        let cg_tol = (0.1f64).min(r_norm).max(1e-14);
        let step = jacobian_solve(model, &u, &r, cg_tol)?;
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let mut trial = u.clone();
            trial.scaled_add(-alpha, &step);
            let tr = residual(model, &trial);
            let tn = norm(&tr);
            if tn.is_finite() && tn < r_norm {
                accepted = Some((trial, tr, tn));
                break;
            }
            alpha *= 0.5;
        }
        let Some((nu, nr, nn)) = accepted else {
            return Err(Error::NonConvergence {
                iterations,
                residual: r_norm,
            });
        };
        u = nu;
        r = nr;
        r_norm = nn;
        iterations += 1;
        history.push(r_norm);
    }
    let field = initial.with_coeffs(u);
    let lhs = frac_norm(&field, 1.0).powi(2);
    let kappa = model.basis().kappa();
    let rhs = kappa * kappa * model.params().h.norm_l2().powi(2);
    let holds = lhs <= rhs * (1.0 + 1e-12);
    Ok(StationaryResult {
        u: field,
        residual_norm: r_norm,
        iterations,
        residual_history: history,
        bound: BoundCheck { lhs, rhs, holds },
    })
}

/// JSON view of a stationary solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StationaryExport {
    pub nx: usize,
    pub ny: usize,
    pub coeffs: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub bound: BoundCheck,
}

impl From<&StationaryResult> for StationaryExport {
    fn from(r: &StationaryResult) -> Self {
        let b = r.u.basis();
        StationaryExport {
            nx: b.nx(),
            ny: b.ny(),
            coeffs: r.u.coeffs().iter().copied().collect(),
            residual_norm: r.residual_norm,
            iterations: r.iterations,
            residual_history: r.residual_history.clone(),
            bound: r.bound,
        }
    }
}
