#![allow(dead_code)]

use lcqo::svm::SvmDataset;
use lcqo::{synthesize_instance, LcqoProblem, PrimalDualPoint};
use nalgebra::{DMatrix, DVector};

pub struct Instance {
    pub id: u64,
    pub problem: LcqoProblem,
    pub start: PrimalDualPoint,
}

/// The 30-instance synthetic suite: `m` in `[2, 20]`, `n` in `[4, 60]`.
pub fn suite() -> Vec<Instance> {
    (0..30u64)
        .map(|i| {
            let m = 2 + (i as usize * 7) % 19;
            let n = (4 + (i as usize * 37) % 57).max(m + 2);
            let (problem, start) = synthesize_instance(m, n, 0.5, 100 + i).unwrap();
            Instance { id: i, problem, start }
        })
        .collect()
}

/// `ceil(sqrt(n)/beta * ln(mu0 n / eps)) + 5`
pub fn iteration_bound(n: usize, mu0: f64, beta: f64, eps: f64) -> usize {
    let n = n as f64;
    ((n.sqrt() / beta) * (mu0 * n / eps).ln()).ceil() as usize + 5
}

/// Dense `Psi_1 = [[S^2, -(XS - mu I)], [-(XS - mu I), X^2]]`.
pub fn psi1_dense(point: &PrimalDualPoint) -> DMatrix<f64> {
    let n = point.x.len();
    let mu = point.mu();
    let mut psi = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let (x, s) = (point.x[i], point.s[i]);
        psi[(i, i)] = s * s;
        psi[(n + i, n + i)] = x * x;
        psi[(i, n + i)] = -(x * s - mu);
        psi[(n + i, i)] = -(x * s - mu);
    }
    psi
}

/// `tr(SVV'S) + 2 tr(XQVV'S) + tr(XQVV'QX) + tr(XA'AX)`
pub fn frob_squared_by_traces(
    problem: &LcqoProblem,
    v: &DMatrix<f64>,
    point: &PrimalDualPoint,
) -> f64 {
    let x = DMatrix::from_diagonal(&point.x);
    let s = DMatrix::from_diagonal(&point.s);
    let q = problem.q();
    let a = problem.a();
    let vvt = v * v.transpose();
    (&s * &vvt * &s).trace()
        + 2.0 * (&x * q * &vvt * &s).trace()
        + (&x * q * &vvt * q * &x).trace()
        + (&x * a.transpose() * a * &x).trace()
}

/// Minimum over `t` of the hinge objective for fixed `w`; the optimum sits at
/// a breakpoint `t = zeta_i - <w, phi_i>`.
fn best_hinge(w: &DVector<f64>, data: &SvmDataset, c: f64) -> f64 {
    let scores = data.features() * w;
    let eval = |t: f64| {
        let loss: f64 = (0..data.n())
            .map(|i| (1.0 - data.labels()[i] * (scores[i] + t)).max(0.0))
            .sum();
        0.5 * w.norm_squared() + c * loss
    };
    (0..data.n())
        .map(|i| eval(data.labels()[i] - scores[i]))
        .fold(f64::INFINITY, f64::min)
}

/// Brute-force SVM optimum by active-set enumeration of the dual
/// `max e'a - 1/2 a'Ga,  zeta'a = 0,  0 <= a <= C`.
///
/// Every partition of the points into `a_i = 0`, `a_i = C` and free is tried.
/// Each box-feasible stationary point gives a lower bound (its dual value) and
/// an upper bound (the hinge objective at `w = Phi'Z a` with the best bias).
/// Returns `(lower, upper)`; the optimum lies between them.
pub fn svm_reference(data: &SvmDataset, c: f64) -> (f64, f64) {
    let n = data.n();
    let z = DVector::from_column_slice(data.labels());
    let zphi = DMatrix::from_fn(n, data.m(), |i, j| z[i] * data.features()[(i, j)]);
    let g = &zphi * zphi.transpose();
    let (mut lower, mut upper) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut state = vec![0u8; n];
    loop {
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut alpha = DVector::from_fn(n, |i, _| if state[i] == 1 { c } else { 0.0 });
        let k = free.len();
        let mut ok = true;
        if k > 0 {
            let mut kkt = DMatrix::zeros(k + 1, k + 1);
            let mut rhs = DVector::zeros(k + 1);
            let fixed = &g * &alpha;
            for (r, &i) in free.iter().enumerate() {
                for (col, &j) in free.iter().enumerate() {
                    kkt[(r, col)] = g[(i, j)];
                }
                kkt[(r, k)] = z[i];
                kkt[(k, r)] = z[i];
                rhs[r] = 1.0 - fixed[i];
            }
            rhs[k] = -z.dot(&alpha);
            let sol = kkt.clone().svd(true, true).solve(&rhs, 1e-12).unwrap();
            if (&kkt * &sol - &rhs).amax() > 1e-9 {
                ok = false;
            } else {
                for (r, &i) in free.iter().enumerate() {
                    alpha[i] = sol[r];
                }
            }
        }
        let feasible = ok
            && z.dot(&alpha).abs() <= 1e-9
            && alpha.iter().all(|&a| a >= -1e-12 && a <= c + 1e-12);
        if feasible {
            let dual = alpha.sum() - 0.5 * alpha.dot(&(&g * &alpha));
            lower = lower.max(dual);
            let w = zphi.tr_mul(&alpha);
            upper = upper.min(best_hinge(&w, data, c));
        }
        let mut pos = 0;
        while pos < n && state[pos] == 2 {
            state[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
        state[pos] += 1;
    }
    (lower, upper)
}

/// Small labeled sets: the symmetric 1-D pair plus four inseparable or
/// tight 2-D and 3-D sets.
pub fn toy_datasets() -> Vec<SvmDataset> {
    let set = |pts: &[&[f64]], labels: &[f64]| {
        SvmDataset::new(pts.iter().map(|p| p.to_vec()).collect(), labels.to_vec()).unwrap()
    };
    vec![
        set(&[&[1.0], &[-1.0]], &[1.0, -1.0]),
        set(
            &[&[1.0, 0.5], &[-1.0, 0.2], &[0.3, -2.0], &[0.1, 0.1], &[2.0, 1.0], &[-0.5, -0.4]],
            &[1.0, -1.0, 1.0, -1.0, 1.0, -1.0],
        ),
        set(
            &[&[0.0, 0.0], &[1.0, 1.0], &[1.0, 0.0], &[0.0, 1.0], &[0.5, 0.5], &[2.0, 2.0], &[-1.0, 0.5], &[1.5, -0.5]],
            &[-1.0, -1.0, 1.0, 1.0, 1.0, -1.0, -1.0, 1.0],
        ),
        set(
            &[
                &[1.0, 0.0, 0.2], &[0.0, 1.0, -0.3], &[-1.0, 0.5, 0.0], &[0.3, -0.7, 1.0], &[0.9, 0.9, 0.9],
                &[-0.4, -0.2, -1.0], &[0.2, 0.1, 0.0], &[-0.8, 1.2, 0.4], &[1.1, -0.6, -0.5], &[0.0, 0.0, 1.5],
            ],
            &[1.0, -1.0, -1.0, 1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0],
        ),
        set(
            &[&[2.0], &[1.5], &[0.5], &[-0.2], &[-1.0], &[0.8], &[-1.7]],
            &[1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -1.0],
        ),
    ]
}
