//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use fractherm::spectral::{BasisSpec, SpectralField, StateVector};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type M3 = [[f64; 3]; 3];

pub fn mul(a: &M3, b: &M3) -> M3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// Matrix exponential by scaling and squaring of a degree-24 Taylor polynomial.
pub fn expm(a: &M3) -> M3 {
    let norm = a
        .iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.125 {
        (norm / 0.125).log2().ceil() as i32
    } else {
        0
    };
    let scale = 0.5f64.powi(s);
    let b: M3 = a.map(|r| r.map(|x| x * scale));
    let mut term = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut sum = term;
    for k in 1..=24 {
        term = mul(&term, &b).map(|r| r.map(|x| x / k as f64));
        for i in 0..3 {
            for j in 0..3 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        sum = mul(&sum, &sum);
    }
    sum
}

/// Per-mode generator of the linear evolution of `(u, u_t, θ)`.
pub fn generator(lambda: f64, nu: f64, sigma: f64, delta: f64) -> M3 {
    let ls = lambda.powf(sigma);
    [
        [0.0, 1.0, 0.0],
        [-lambda, -lambda.powf(nu), delta * ls],
        [0.0, -delta * ls, -lambda],
    ]
}

pub fn apply(m: &M3, x: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| (0..3).map(|k| m[i][k] * x[k]).sum())
}

/// `(π/L)²(j² ...)` eigenvalue written out from the Dirichlet sine modes.
pub fn eigenvalue(j: usize, k: usize, lx: f64, ly: f64) -> f64 {
    (j as f64 * PI / lx).powi(2) + (k as f64 * PI / ly).powi(2)
}

/// Sine coefficients of `x(Lx - x) y(Ly - y)` from the closed-form integral.
pub fn bump(basis: &Arc<BasisSpec>, amplitude: f64) -> SpectralField {
    let c = |j: usize, len: f64| {
        if j % 2 == 0 {
            0.0
        } else {
            (2.0 / len).sqrt() * 4.0 * len.powi(3) / (j as f64 * PI).powi(3)
        }
    };
    let a = Array2::from_shape_fn((basis.nx(), basis.ny()), |(j, k)| {
        amplitude * c(j + 1, basis.lx()) * c(k + 1, basis.ly())
    });
    SpectralField::from_coeffs(basis, a).unwrap()
}

/// Gaussian field with coefficient scale `λ^{-decay}`.
pub fn gaussian_field(basis: &Arc<BasisSpec>, decay: f64, rng: &mut ChaCha8Rng) -> SpectralField {
    let a = Array2::from_shape_fn((basis.nx(), basis.ny()), |(j, k)| {
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        let z = (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos();
        z * eigenvalue(j + 1, k + 1, basis.lx(), basis.ly()).powf(-decay)
    });
    SpectralField::from_coeffs(basis, a).unwrap()
}

pub fn gaussian_state(basis: &Arc<BasisSpec>, decay: f64, rng: &mut ChaCha8Rng) -> StateVector {
    let u = gaussian_field(basis, decay, rng);
    let v = gaussian_field(basis, decay, rng);
    let t = gaussian_field(basis, decay, rng);
    StateVector::new(u, v, t, 0.0).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `‖U‖_𝓗²` from coefficients.
pub fn energy_norm_sq(s: &StateVector) -> f64 {
    let b = s.basis();
    let mut acc = 0.0;
    for j in 0..b.nx() {
        for k in 0..b.ny() {
            let l = eigenvalue(j + 1, k + 1, b.lx(), b.ly());
            acc += l * s.u.coeffs()[[j, k]].powi(2)
                + s.v.coeffs()[[j, k]].powi(2)
                + s.theta.coeffs()[[j, k]].powi(2);
        }
    }
    acc
}

/// One result line written straight to the terminal, bypassing test capture.
pub fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[acceptance {id:>2}] {verdict} {name}: {detail}");
}
