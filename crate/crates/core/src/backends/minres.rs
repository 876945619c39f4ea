//! MINRES for symmetric (possibly indefinite) operators, with full
//! reorthogonalization of the Lanczos vectors.

use nalgebra::DVector;

/// Result of a MINRES run started from `x = 0`.
#[derive(Debug, Clone)]
pub struct MinresRun {
    pub x: DVector<f64>,
    pub iterations: usize,
    /// True residual `||b - A x||_2` of the returned iterate.
    pub residual: f64,
    pub converged: bool,
}

/// Runs MINRES on `op` until `||b - A x||_2 <= tol` or `max_iters` steps.
///
/// The Lanczos basis is kept and every new vector is orthogonalized against
/// it twice, which keeps the short-recurrence residual estimate honest when
/// the operator is badly conditioned.
pub fn minres<F>(op: F, b: &DVector<f64>, tol: f64, max_iters: usize) -> MinresRun
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let dim = b.len();
    let beta1 = b.norm();
    let mut x = DVector::zeros(dim);
    if beta1 <= tol {
        return MinresRun {
            x,
            iterations: 0,
            residual: beta1,
            converged: true,
        };
    }

    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut v_prev = DVector::zeros(dim);
    let mut v = b / beta1;
    let mut beta = beta1;

    // Givens QR state of the Lanczos tridiagonal
    let (mut cs, mut sn) = (-1.0_f64, 0.0_f64);
    let (mut dbar, mut epsln) = (0.0_f64, 0.0_f64);
    let mut phibar = beta1;
    let mut w = DVector::zeros(dim);
    let mut w_old = DVector::zeros(dim);

    let true_residual = |x: &DVector<f64>| (b - op(x)).norm();

    for itn in 1..=max_iters {
        basis.push(v.clone());
        let mut p = op(&v) - &v_prev * beta;
        let alpha = v.dot(&p);
        p.axpy(-alpha, &v, 1.0);
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dot(&p);
                p.axpy(-proj, q, 1.0);
            }
        }
        let beta_next = p.norm();

        let oldeps = epsln;
        let delta = cs * dbar + sn * alpha;
        let gbar = sn * dbar - cs * alpha;
        epsln = sn * beta_next;
        dbar = -cs * beta_next;
        let gamma = gbar.hypot(beta_next).max(f64::MIN_POSITIVE);
        cs = gbar / gamma;
        sn = beta_next / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        let w_new = (&v - &w_old * oldeps - &w * delta) / gamma;
        x.axpy(phi, &w_new, 1.0);
        w_old = std::mem::replace(&mut w, w_new);

        let exhausted = beta_next <= f64::EPSILON * beta1;
        if phibar <= tol || exhausted || itn == max_iters {
            let residual = true_residual(&x);
            if residual <= tol || exhausted || itn == max_iters {
                return MinresRun {
                    x,
                    iterations: itn,
                    residual,
                    converged: residual <= tol,
                };
            }
        }

        v_prev = std::mem::replace(&mut v, p / beta_next);
        beta = beta_next;
    }
    let residual = true_residual(&x);
    MinresRun {
        x,
        iterations: max_iters,
        residual,
        converged: residual <= tol,
    }
}
