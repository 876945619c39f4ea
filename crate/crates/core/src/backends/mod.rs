//! Interchangeable OSS solvers.
//!
//! Each backend returns `z = (lambda, dy)` together with the residual
//! `||M z - r_c||_2`. The driver only accepts outcomes with
//! `||M z - r_c|| <= delta ||r_c||`.

pub mod minres;

use std::f64::consts::SQRT_2;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{BackendKind, SolverConfig};
use crate::error::{Error, Result};
use crate::oss::{hermitian_dilation, OssSystem};

/// Smallest dilated-residual tolerance handed to the iterative backend.
pub const TOLERANCE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub lambda: DVector<f64>,
    pub dy: DVector<f64>,
    /// `||M z - r_c||_2`
    pub residual_norm: f64,
    /// Residual of the normalized Hermitian system at the returned dilated vector.
    pub dilated_residual: f64,
    pub inner_iterations: usize,
    pub backend: BackendKind,
    /// Normalized-direction error injected by the noisy backend.
    pub direction_error: Option<f64>,
}

/// Residual tolerance on the normalized Hermitian system that guarantees
/// `||M z - r_c|| <= delta ||r_c||`:
/// `eps_oss = delta ||r_c|| / (sqrt(2) ||M||_F)`.
pub fn oss_tolerance(delta: f64, oss: &OssSystem) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidConfig(format!("delta must lie in (0, 1), got {delta}")));
    }
    let rc_norm = oss.rc.norm();
    if rc_norm == 0.0 {
        return Err(Error::ZeroResidual);
    }
    Ok(delta * rc_norm / (SQRT_2 * oss.frob_m))
}

fn outcome(oss: &OssSystem, z: &DVector<f64>, iterations: usize, backend: BackendKind) -> SolveOutcome {
    let residual_norm = oss.residual(z).norm();
    let (lambda, dy) = oss.split(z);
    SolveOutcome {
        lambda,
        dy,
        residual_norm,
        dilated_residual: residual_norm / (SQRT_2 * oss.frob_m),
        inner_iterations: iterations,
        backend,
        direction_error: None,
    }
}

fn exact_z(oss: &OssSystem) -> Result<DVector<f64>> {
    let lu = oss.matrix.clone().lu();
    let z = lu.solve(&oss.rc).ok_or(Error::SingularM)?;
    if z.iter().all(|v| v.is_finite()) {
        Ok(z)
    } else {
        Err(Error::SingularM)
    }
}

/// Dense LU solve of `M z = r_c`.
pub fn solve_exact(oss: &OssSystem) -> Result<SolveOutcome> {
    let z = exact_z(oss)?;
    Ok(outcome(oss, &z, 0, BackendKind::Exact))
}

/// MINRES on the normalized Hermitian dilation, stopped once the dilated
/// residual is at most `max(tol, TOLERANCE_FLOOR)`. Only the `z` block is
/// kept, whose residual `||M z - r_c||` is at most `sqrt(2) ||M||_F` times
/// the dilated one.
pub fn solve_iterative(oss: &OssSystem, tol: f64, max_iters: usize) -> Result<SolveOutcome> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
    }
    let tol = tol.max(TOLERANCE_FLOOR);
    let system = hermitian_dilation(oss);
    let rhs = system.rhs();
    let run = minres::minres(|v| system.apply(v), &rhs, tol, max_iters);
    if !run.converged {
        return Err(Error::MaxInnerIters {
            iterations: run.iterations,
            residual: run.residual,
            tolerance: tol,
        });
    }
    let z = system.z_block(&run.x);
    let mut out = outcome(oss, &z, run.iterations, BackendKind::Iterative);
    out.dilated_residual = run.residual;
    Ok(out)
}

/// Emulates a quantum linear-system solve followed by tomography.
///
/// The exact solution direction is rotated by a seeded random angle so that
/// the normalized-direction error is `eps_qlsa + eps_qta` with the two terms
/// equal, then rescaled to the exact norm. The per-stage error is
/// `min(delta/2, delta ||r_c|| / (||M||_F ||z||)) / 2`; the second term keeps
/// `||M z~ - r_c|| <= ||M||_2 ||z~ - z|| <= delta ||r_c||`.
pub fn solve_noisy(oss: &OssSystem, delta: f64, seed: u64) -> Result<SolveOutcome> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidConfig(format!("delta must lie in (0, 1), got {delta}")));
    }
    let z = exact_z(oss)?;
    let z_norm = z.norm();
    if z_norm == 0.0 {
        let mut out = outcome(oss, &z, 0, BackendKind::Noisy);
        out.direction_error = Some(0.0);
        return Ok(out);
    }
    let ceiling = delta * oss.rc.norm() / (oss.frob_m * z_norm);
    let stage = 0.5 * (0.5 * delta).min(ceiling);
    let total = 2.0 * stage;

    let unit = &z / z_norm;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perturbed = if z.len() == 1 {
        // no orthogonal direction; the error can only flip the sign
        unit.clone()
    } else {
        let mut g;
        loop {
            g = DVector::from_fn(z.len(), |_, _| rng.random_range(-1.0..1.0));
            g.axpy(-unit.dot(&g), &unit, 1.0);
            let norm = g.norm();
            if norm > 1e-8 {
                g /= norm;
                break;
            }
        }
        // chord length 2 sin(phi / 2) equals the requested error
        let phi = 2.0 * (0.5 * total).min(1.0).asin();
        &unit * phi.cos() + g * phi.sin()
    };
    let z_tilde = perturbed * z_norm;
    let mut out = outcome(oss, &z_tilde, 0, BackendKind::Noisy);
    out.direction_error = Some(if z.len() == 1 { 0.0 } else { total });
    Ok(out)
}

/// Mixes the configured seed with the iteration index.
pub(crate) fn iteration_seed(seed: u64, iteration: usize) -> u64 {
    seed ^ (iteration as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs the configured backend with the inexactness rule of `config`.
pub fn solve(oss: &OssSystem, config: &SolverConfig, iteration: usize) -> Result<SolveOutcome> {
    match config.backend {
        BackendKind::Exact => solve_exact(oss),
        BackendKind::Iterative => {
            let tol = match config.inner_rtol {
                Some(rtol) => rtol * hermitian_dilation(oss).rhs().norm(),
                None => oss_tolerance(config.delta, oss)?,
            };
            let budget = config.max_inner_iters.unwrap_or(10 * oss.n());
            solve_iterative(oss, tol, budget)
        }
        BackendKind::Noisy => solve_noisy(oss, config.delta, iteration_seed(config.seed, iteration)),
    }
}
