//! Invariants of the spectral kernels over random inputs.

mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::*;
use fractherm::attractor::hausdorff_semidist_coords;
use fractherm::spectral::{
    accretivity_form, apply_frac_power, apply_generator, build_basis, extended_norm, frac_norm,
    resolvent_solve_with, state_norm, BasisSpec, Coupling, SineGrid, StateVector,
};
use proptest::prelude::*;

fn basis_strategy() -> impl Strategy<Value = Arc<BasisSpec>> {
    (2usize..10, 2usize..10, 0.5f64..4.0, 0.5f64..4.0)
        .prop_map(|(nx, ny, lx, ly)| build_basis(nx, ny, lx, ly).unwrap())
}

fn coupling_strategy() -> impl Strategy<Value = Coupling> {
    (0.0f64..=1.0, 0.0f64..=1.0, 0.01f64..5.0).prop_map(|(nu, sigma, delta)| Coupling {
        nu,
        sigma,
        delta,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_round_trip(basis in basis_strategy(), factor in 1usize..4, seed in any::<u64>()) {
        let f = gaussian_field(&basis, 0.0, &mut rng(seed));
        let grid = SineGrid::new(&basis, factor).unwrap();
        let back = grid.from_grid(&grid.to_grid(&f).unwrap()).unwrap();
        let err = back.minus(&f).unwrap().norm_l2();
        prop_assert!(err <= 1e-12 * f.norm_l2().max(1.0));
    }

    #[test]
    fn grid_matches_analytic_mode(basis in basis_strategy(), j in 1usize..3, k in 1usize..3) {
        let f = fractherm::spectral::SpectralField::mode(&basis, j, k, 1.0).unwrap();
        let grid = SineGrid::new(&basis, 2).unwrap();
        let g = grid.to_grid(&f).unwrap();
        let (xs, ys) = (grid.nodes_x(), grid.nodes_y());
        let (lx, ly) = (basis.lx(), basis.ly());
        for (a, x) in xs.iter().enumerate() {
            for (b, y) in ys.iter().enumerate() {
                let exact = (2.0 / lx).sqrt() * (j as f64 * PI * x / lx).sin() * (2.0 / ly).sqrt() * (k as f64 * PI * y / ly).sin();
                prop_assert!((g[[a, b]] - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn powers_compose(basis in basis_strategy(), a in -1.5f64..1.5, b in -1.5f64..1.5, seed in any::<u64>()) {
        let f = gaussian_field(&basis, 0.0, &mut rng(seed));
        let two = apply_frac_power(&apply_frac_power(&f, a).unwrap(), b).unwrap();
        let one = apply_frac_power(&f, a + b).unwrap();
        prop_assert!(two.minus(&one).unwrap().norm_l2() <= 1e-12 * one.norm_l2());
        let n = frac_norm(&f, 2.0 * a);
        prop_assert!((n - apply_frac_power(&f, a).unwrap().norm_l2()).abs() <= 1e-12 * n);
    }

    #[test]
    fn poincare_embedding(basis in basis_strategy(), seed in any::<u64>()) {
        let f = gaussian_field(&basis, 0.25, &mut rng(seed));
        let l11 = eigenvalue(1, 1, basis.lx(), basis.ly());
        prop_assert!(frac_norm(&f, -1.0) <= l11.powf(-0.5) * f.norm_l2() * (1.0 + 1e-12));
        prop_assert!(f.norm_l2() <= basis.kappa() * frac_norm(&f, 1.0) * (1.0 + 1e-12));
        let s = gaussian_state(&basis, 0.25, &mut rng(seed ^ 1));
        prop_assert!(extended_norm(&s) <= basis.kappa().powi(2) * state_norm(&s) * (1.0 + 1e-12));
    }

    #[test]
    fn generator_is_accretive(basis in basis_strategy(), c in coupling_strategy(), seed in any::<u64>()) {
        let s = gaussian_state(&basis, 0.5, &mut rng(seed));
        let form = accretivity_form(&s, c);
        prop_assert!(form >= 0.0);
        let direct = fractherm::spectral::state_inner(&apply_generator(&s, c), &s).unwrap();
        prop_assert!((direct - form).abs() <= 1e-10 * form.max(1e-300) + 1e-14);
    }

    #[test]
    fn resolvent_inverts_and_contracts(basis in basis_strategy(), c in coupling_strategy(), seed in any::<u64>()) {
        let ustar = gaussian_state(&basis, 0.5, &mut rng(seed));
        let u = resolvent_solve_with(&ustar, c).unwrap();
        let back = u.plus(&apply_generator(&u, c)).unwrap();
        prop_assert!(state_norm(&back.minus(&ustar).unwrap()) <= 1e-10 * state_norm(&ustar));
        prop_assert!(state_norm(&u) <= state_norm(&ustar) * (1.0 + 1e-12));
    }

    #[test]
    fn semidistance_identity_and_triangle(seed in any::<u64>(), na in 1usize..20, nb in 1usize..20, nc in 1usize..20) {
        use rand::Rng;
        let mut r = rng(seed);
        let mut cloud = |n: usize| -> Vec<Vec<f64>> {
            (0..n).map(|_| (0..3).map(|_| r.random_range(-2.0..2.0)).collect()).collect()
        };
        let (a, b, c) = (cloud(na), cloud(nb), cloud(nc));
        prop_assert_eq!(hausdorff_semidist_coords(&a, &a).unwrap(), 0.0);
        let ab = hausdorff_semidist_coords(&a, &b).unwrap();
        let bc = hausdorff_semidist_coords(&b, &c).unwrap();
        let ac = hausdorff_semidist_coords(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc);
        let mut union = b.clone();
        union.extend(a.iter().cloned());
        prop_assert_eq!(hausdorff_semidist_coords(&a, &union).unwrap(), 0.0);
    }

    #[test]
    fn linear_flow_matches_exponential(seed in any::<u64>(), nu in 0.0f64..=1.0, sigma in 0.0f64..=1.0) {
        use fractherm::{Integrator, IntegratorConfig, Model, NonlinearitySpec, SystemParams};
        let basis = build_basis(3, 3, PI, PI).unwrap();
        let params = SystemParams::new(fractherm::spectral::SpectralField::zeros(&basis))
            .with_nonlinearity(NonlinearitySpec::zero())
            .with_exponents(nu, sigma);
        let model = Model::new(params).unwrap();
        let s0 = gaussian_state(&basis, 0.5, &mut rng(seed));
        let cfg = IntegratorConfig::new(1e-3, 0.2, 1);
        let mut integ = Integrator::new(&model, cfg).unwrap();
        let mut s = s0.clone();
        for _ in 0..cfg.steps() {
            s = integ.step(&s).unwrap();
        }
        for j in 0..3 {
            for k in 0..3 {
                let l = eigenvalue(j + 1, k + 1, PI, PI);
                let g = generator(l, nu, sigma, 0.5).map(|r| r.map(|x| x * 0.2));
                let y0 = [s0.u.coeffs()[[j, k]], s0.v.coeffs()[[j, k]], s0.theta.coeffs()[[j, k]]];
                let ye = apply(&expm(&g), y0);
                let y = [s.u.coeffs()[[j, k]], s.v.coeffs()[[j, k]], s.theta.coeffs()[[j, k]]];
                let scale = y0.iter().map(|x| x.abs()).fold(0.0, f64::max) * l.sqrt();
                for i in 0..3 {
                    prop_assert!((y[i] - ye[i]).abs() <= 1e-5 * scale);
                }
            }
        }
    }
}

#[test]
fn expm_oracle_matches_closed_form() {
    let a = [[0.0, 1.0, 0.0], [-4.0, 0.0, 0.0], [0.0, 0.0, -1.0]];
    let e = expm(&a.map(|r| r.map(|x| x * 0.7)));
    let w = 2.0 * 0.7f64;
    assert!((e[0][0] - w.cos()).abs() < 1e-14);
    assert!((e[0][1] - w.sin() / 2.0).abs() < 1e-14);
    assert!((e[1][0] + 2.0 * w.sin()).abs() < 1e-14);
    assert!((e[2][2] - (-0.7f64).exp()).abs() < 1e-14);
}

#[test]
fn bump_oracle_matches_library() {
    let basis = build_basis(7, 5, 2.0, 3.0).unwrap();
    let lib = fractherm::spectral::SpectralField::smooth_bump(&basis, 1.3);
    let ours = bump(&basis, 1.3);
    assert!(lib.minus(&ours).unwrap().norm_l2() <= 1e-13 * ours.norm_l2());
    let z = StateVector::zeros(&basis);
    assert_eq!(energy_norm_sq(&z), 0.0);
}
