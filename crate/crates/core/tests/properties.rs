mod common;

use lcqo::backends::{oss_tolerance, solve_iterative, solve_noisy};
use lcqo::cost::psi_spectrum;
use lcqo::null_space::build_null_basis;
use lcqo::{
    assemble_oss, central_path_metrics, hermitian_dilation, recover_direction, safeguard_step,
    synthesize_instance, validate_and_preprocess, LcqoProblem, PrimalDualPoint,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = (LcqoProblem, PrimalDualPoint)> {
    (2usize..8, 2usize..12, 0.2f64..1.0, any::<u64>()).prop_map(|(m, extra, density, seed)| {
        synthesize_instance(m, m + extra, density, seed).unwrap()
    })
}

/// An interior point (not necessarily feasible) with entries in `[0.05, 3]`.
fn interior(n: usize, m: usize, seed: u64) -> PrimalDualPoint {
    let mut state = seed | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let x = DVector::from_fn(n, |_, _| 0.05 + 2.95 * next());
    let s = DVector::from_fn(n, |_, _| 0.05 + 2.95 * next());
    let y = DVector::from_fn(m, |_, _| next() - 0.5);
    PrimalDualPoint::new(x, y, s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basis_spans_null_space_and_adjoint_matches((p, _) in instance(), seed in any::<u64>()) {
        let basis = build_null_basis(&p).unwrap();
        let v = basis.to_dense();
        prop_assert!((p.a() * &v).amax() <= 1e-10 * (1.0 + v.amax()));
        let pt = interior(p.n(), p.m(), seed);
        let lambda = pt.x.rows(0, basis.dim()).into_owned();
        let w = pt.s.clone();
        let lhs = basis.forward(&lambda).unwrap().dot(&w);
        let rhs = lambda.dot(&basis.adjoint(&w).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn any_oss_solution_preserves_feasibility((p, _) in instance(), seed in any::<u64>(), sigma in 0.1f64..1.0) {
        let basis = build_null_basis(&p).unwrap();
        let pt = interior(p.n(), p.m(), seed);
        let oss = assemble_oss(&p, &basis, &pt, sigma).unwrap();
        // arbitrary z, not a solution
        let z = DVector::from_fn(p.n(), |i, _| ((i as f64 + 1.0) * 0.37).sin());
        let (lambda, dy) = oss.split(&z);
        let d = recover_direction(&p, &basis, &lambda, &dy, &oss).unwrap();
        let scale = 1.0 + d.dx.amax() + d.ds.amax() + d.dy.amax();
        prop_assert!((p.a() * &d.dx).amax() <= 1e-10 * scale);
        let dual = p.a().tr_mul(&d.dy) + &d.ds - p.q() * &d.dx;
        prop_assert!(dual.amax() <= 1e-10 * scale);
        prop_assert!((&d.r - oss.residual(&z)).amax() <= 1e-10 * scale * (1.0 + oss.frob_m));
        let dxds = d.dx.dot(&d.ds);
        let dxqdx = d.dx.dot(&(p.q() * &d.dx));
        prop_assert!((dxds - dxqdx).abs() <= 1e-9 * scale * scale);
        prop_assert!(dxqdx >= -1e-10 * scale * scale);
    }

    #[test]
    fn dilated_residual_controls_oss_residual((p, _) in instance(), seed in any::<u64>()) {
        let basis = build_null_basis(&p).unwrap();
        let pt = interior(p.n(), p.m(), seed);
        let oss = assemble_oss(&p, &basis, &pt, 0.9).unwrap();
        let tol = oss_tolerance(0.3, &oss).unwrap();
        let out = solve_iterative(&oss, tol, 20 * p.n()).unwrap();
        // rounding floor for residuals that MINRES drove to machine precision
        let floor = 1e-12 * oss.rc.norm();
        let bound = std::f64::consts::SQRT_2 * oss.frob_m * out.dilated_residual;
        prop_assert!(out.residual_norm <= bound * (1.0 + 1e-10) + floor);
        prop_assert!(out.residual_norm <= 0.3 * oss.rc.norm() * (1.0 + 1e-10));
        let h = hermitian_dilation(&oss);
        prop_assert!((h.to_dense().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_backend_meets_delta((p, _) in instance(), seed in any::<u64>(), delta in 0.01f64..0.9) {
        let basis = build_null_basis(&p).unwrap();
        let pt = interior(p.n(), p.m(), seed);
        let oss = assemble_oss(&p, &basis, &pt, 0.8).unwrap();
        let out = solve_noisy(&oss, delta, seed).unwrap();
        prop_assert!(out.residual_norm <= delta * oss.rc.norm() * (1.0 + 1e-10));
    }

    #[test]
    fn neighborhood_bounds_each_product(n in 2usize..30, seed in any::<u64>(), theta in 0.01f64..0.5) {
        let pt = interior(n, 0, seed);
        let m = central_path_metrics(&pt, theta).unwrap();
        if m.in_neighborhood {
            for i in 0..n {
                let xs = pt.x[i] * pt.s[i];
                prop_assert!(xs >= (1.0 - theta) * m.mu * (1.0 - 1e-12));
                prop_assert!(xs <= (1.0 + theta) * m.mu * (1.0 + 1e-12));
            }
        }
        prop_assert!(m.e_diag.norm() * theta * m.mu - m.neighborhood_distance <= 1e-10 * m.mu);
    }

    #[test]
    fn closed_form_psi_matches_dense(n in 1usize..12, seed in any::<u64>()) {
        let pt = interior(n, 0, seed);
        let pairs = psi_spectrum(&pt).unwrap();
        let mut closed: Vec<f64> = pairs.iter().flat_map(|q| [q.plus, q.minus]).collect();
        closed.sort_by(f64::total_cmp);
        let mut dense: Vec<f64> = common::psi1_dense(&pt).symmetric_eigenvalues().iter().copied().collect();
        dense.sort_by(f64::total_cmp);
        let scale = dense.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (c, d) in closed.iter().zip(&dense) {
            prop_assert!((c - d).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn safeguarded_step_stays_positive(n in 1usize..20, seed in any::<u64>(), bf in 0.5f64..0.999) {
        let pt = interior(n, 0, seed);
        let dirs = interior(n, 0, seed.wrapping_add(1));
        let dx = dirs.x.map(|v| 4.0 * (v - 1.5));
        let ds = dirs.s.map(|v| 4.0 * (v - 1.5));
        let d = lcqo::oss::NewtonDirection {
            lambda: DVector::zeros(0),
            dy: DVector::zeros(0),
            dx: dx.clone(),
            ds: ds.clone(),
            r: DVector::zeros(n),
        };
        let alpha = safeguard_step(&pt, &d, bf);
        prop_assert!(alpha > 0.0 && alpha <= 1.0);
        prop_assert!((&pt.x + dx * alpha).iter().all(|&v| v > 0.0));
        prop_assert!((&pt.s + ds * alpha).iter().all(|&v| v > 0.0));
    }

    #[test]
    fn preprocessing_is_idempotent(m in 1usize..4, extra in 1usize..5, zero_col in 0usize..3, seed in any::<u64>()) {
        let n = m + extra + 1;
        let mut rng_state = seed | 1;
        let mut a = DMatrix::from_fn(m, n, |_, _| {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((rng_state >> 33) % 5) as f64 - 2.0
        });
        for i in 0..m {
            a[(i, i)] = 1.0;
            for j in 0..m {
                if i != j {
                    a[(i, j)] = 0.0;
                }
            }
        }
        a.column_mut(m + zero_col % (n - m)).fill(0.0);
        let p = LcqoProblem::from_dense(a, DVector::from_element(m, 1.0), DVector::zeros(n), DMatrix::zeros(n, n)).unwrap();
        let once = validate_and_preprocess(&p).unwrap();
        prop_assert!(once.problem.zero_columns().is_empty());
        let twice = validate_and_preprocess(&once.problem).unwrap();
        prop_assert!(twice.is_identity());
        prop_assert_eq!(twice.problem, once.problem);
    }
}

#[test]
fn tighter_tolerance_never_worsens_the_residual() {
    for seed in 0..20u64 {
        let (p, _) = synthesize_instance(3 + (seed as usize % 4), 10 + (seed as usize % 7), 0.5, seed).unwrap();
        let basis = build_null_basis(&p).unwrap();
        let pt = interior(p.n(), p.m(), seed + 1);
        let oss = assemble_oss(&p, &basis, &pt, 0.9).unwrap();
        let start = oss_tolerance(0.9, &oss).unwrap();
        let (mut last_dilated, mut last) = (f64::INFINITY, f64::INFINITY);
        for k in 0..12 {
            let out = solve_iterative(&oss, start * 0.3f64.powi(k), 20 * p.n()).unwrap();
            assert!(out.dilated_residual <= last_dilated * (1.0 + 1e-12) + 1e-15);
            assert!(out.residual_norm <= last * (1.0 + 1e-12) + 1e-13, "seed {seed} k {k}");
            last_dilated = out.dilated_residual;
            last = out.residual_norm;
        }
    }
}
