mod common;

use lcqo::cost::{
    block_encoding, cost_report, kappa_bounds, psi_spectrum, ErrorBudget, InstanceConstants,
};
use lcqo::{
    assemble_oss, build_null_basis, run_ifqipm_observed, synthesize_instance, LcqoProblem,
    PrimalDualPoint, SolverConfig,
};
use nalgebra::{DMatrix, DVector};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

#[test]
fn two_by_two_kappa_is_one() {
    let p = LcqoProblem::from_dense(
        DMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
        DVector::from_element(1, 2.0),
        DVector::zeros(2),
        DMatrix::zeros(2, 2),
    )
    .unwrap();
    let basis = build_null_basis(&p).unwrap();
    let pt = PrimalDualPoint::new(DVector::from_element(2, 1.0), DVector::zeros(1), DVector::from_element(2, 1.0));
    let oss = assemble_oss(&p, &basis, &pt, 0.5).unwrap();
    let k = kappa_bounds(&p, &basis, &pt, &oss).unwrap();
    assert!((k.kappa_m - 1.0).abs() < 1e-12);
    assert!(k.kappa_m <= k.kappa_bound);
}

#[test]
fn kappa_vaq_ignores_the_iterate() {
    let (p, start) = synthesize_instance(3, 9, 0.5, 4).unwrap();
    let basis = build_null_basis(&p).unwrap();
    let scaled = PrimalDualPoint::new(&start.x * 3.0, start.y.clone(), start.s.clone());
    let o1 = assemble_oss(&p, &basis, &start, 0.9).unwrap();
    let o2 = assemble_oss(&p, &basis, &scaled, 0.9).unwrap();
    let k1 = kappa_bounds(&p, &basis, &start, &o1).unwrap();
    let k2 = kappa_bounds(&p, &basis, &scaled, &o2).unwrap();
    assert_eq!(k1.kappa_vaq, k2.kappa_vaq);
}

#[test]
fn spectrum_matches_dense_eigensolve() {
    let (p, start) = synthesize_instance(5, 16, 0.5, 8).unwrap();
    let mut checked = 0;
    run_ifqipm_observed(&p, &start, &SolverConfig::default(), |k, pt| {
        if k % 25 != 0 {
            return;
        }
        let pairs = psi_spectrum(pt).unwrap();
        let mut closed: Vec<f64> = pairs.iter().flat_map(|q| [q.plus, q.minus]).collect();
        closed.sort_by(f64::total_cmp);
        let mut dense: Vec<f64> = common::psi1_dense(pt).symmetric_eigenvalues().iter().copied().collect();
        dense.sort_by(f64::total_cmp);
        let scale = dense.last().copied().unwrap();
        for (c, d) in closed.iter().zip(&dense) {
            assert!((c - d).abs() <= 1e-8 * scale);
        }
        assert!(pairs.iter().all(|q| q.within_bounds() && q.minus > 0.0));
        checked += 1;
    })
    .unwrap();
    assert!(checked > 3);
}

#[test]
fn symmetric_pair_on_central_path() {
    let pt = PrimalDualPoint::new(DVector::from_element(3, 0.7), DVector::zeros(0), DVector::from_element(3, 0.7));
    for q in psi_spectrum(&pt).unwrap() {
        assert!((q.plus - 0.49).abs() < 1e-15 && (q.minus - 0.49).abs() < 1e-15);
    }
}

/// Composition rules for block encodings `(alpha, error)`:
/// products multiply subnormalizations, sums add them.
fn product(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0, a.0 * b.1 + b.0 * a.1)
}

fn sum(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 + b.0, a.1 + b.1)
}

#[test]
fn block_encoding_matches_composition_rules() {
    let c = InstanceConstants {
        frob_v: 2.5,
        frob_a: 1.7,
        frob_q: 0.8,
        sigma_max_q: 0.6,
        kappa_vaq: 3.0,
    };
    let (omega, frob_m) = (1.9, 4.2);
    let budget = ErrorBudget::split(&c, 1e-2, 12.0);
    let be = block_encoding(&c, omega, frob_m, budget);

    let root = (2.5f64 * 2.5 + 1.7 * 1.7).sqrt();
    let m1 = (root, budget.eps1);
    let m2 = (1.0, budget.eps2);
    let m3 = (0.8 + 1.0, 1.8 * budget.eps3);
    let m4 = (SQRT_2, budget.eps4);
    let inner = sum(m2, product(m3, m4));
    let whole = product(m1, inner);
    let ratio = SQRT_2 * omega / frob_m;
    let expect = (whole.0 * ratio, whole.1 * ratio);

    let last = be.factors.last().unwrap();
    assert!((be.alpha_be - expect.0).abs() <= 1e-13 * expect.0);
    assert!((last.error - expect.1).abs() <= 1e-13 * expect.1);

    // the split itself
    let k = SQRT_2 * root * (SQRT_2 * 0.8 + SQRT_2 + 1.0).powi(2);
    assert!((budget.eps1 - 1e-2 / 12f64.powi(3) / (2.0 * k)).abs() < 1e-20);
    assert_eq!(budget.eps3, budget.eps2);
}

#[test]
fn unit_norms_give_closed_value() {
    let c = InstanceConstants {
        frob_v: 1.0,
        frob_a: 1.0,
        frob_q: 1.0,
        sigma_max_q: 1.0,
        kappa_vaq: 1.0,
    };
    let be = block_encoding(&c, 1.0, 1.0, ErrorBudget::split(&c, 0.1, 1.0));
    let expect = SQRT_2 * SQRT_2 * (SQRT_2 + SQRT_2 + 1.0);
    assert!((be.alpha_be - expect).abs() < 1e-13);
}

#[test]
fn report_totals_and_invariants() {
    let (p, start) = synthesize_instance(4, 14, 0.5, 12).unwrap();
    let cfg = SolverConfig {
        trace_kappa: true,
        ..SolverConfig::default()
    };
    let r = lcqo::run_ifqipm(&p, &start, &cfg).unwrap();
    let rep = cost_report(&p, &r.trace, cfg.eps).unwrap();
    assert!(rep.violations().is_empty(), "{:?}", rep.violations());
    let total: f64 = rep.rows.iter().map(|row| row.iter_cost_units).sum();
    assert_eq!(total, rep.totals.total_units);
    assert!(rep.rows.iter().all(|row| row.omega_ratio() <= 2.0 && row.t_qta_units == 14.0));
    let json = serde_json::to_value(&rep).unwrap();
    for key in ["frob_V", "frob_A", "frob_Q", "sigma_max_Q", "kappa_VAQ"] {
        assert!(json["constants"][key].is_number(), "{key}");
    }
    for key in ["kappa_M", "kappa_bound", "alpha_BE", "t_qlsa_units", "iter_cost_units"] {
        assert!(json["rows"][0][key].is_number(), "{key}");
    }
    assert!(rep.render_table().lines().count() > r.trace.len());
}
