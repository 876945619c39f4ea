//! Short-step inexact feasible interior point loop.
//!
//! Every iteration assembles the OSS at the current iterate with
//! `sigma = 1 - beta / sqrt(n)`, solves it to the accuracy
//! `||M z - r_c|| <= delta ||r_c||` with the configured backend, recovers a
//! feasibility-preserving direction and takes the full Newton step. The
//! step is shortened only if it would leave the positive orthant.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::backends::{self, SolveOutcome};
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::linalg;
use crate::null_space::{build_null_basis, NullBasis};
use crate::oss::{recover_direction, NewtonDirection, OssAssembler};
use crate::problem::{central_path_metrics, residuals, theta_max, LcqoProblem, PrimalDualPoint};

/// Scaled infinity-norm threshold for calling a point feasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Centering stops once the distance is below this fraction of `theta mu`.
const CENTERING_TARGET: f64 = 0.5;

const MAX_BACKTRACKS: usize = 60;

/// One row per main-loop iteration, describing iterate `k` and the solve made there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub k: usize,
    pub mu: f64,
    pub gap: f64,
    pub omega: f64,
    #[serde(rename = "frob_M")]
    pub frob_m: f64,
    pub eps_oss: f64,
    /// `||M z - r_c||_2` of the accepted OSS solution.
    pub residual_norm: f64,
    pub neighborhood_distance: f64,
    #[serde(rename = "kappa_M")]
    pub kappa_m: Option<f64>,
    pub wall_time: f64,
    pub rc_norm: f64,
    /// `||S dx + X ds - r_c||_2` of the recovered direction.
    pub r_norm: f64,
    /// `max_i (x_i^2 + s_i^2)` at iterate `k`.
    pub max_square_sum: f64,
    pub step_length: f64,
    pub inner_iterations: usize,
}

impl IterationTrace {
    pub fn full_step(&self) -> bool {
        self.step_length == 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    IterLimit,
    NumericalBreakdown,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub point: PrimalDualPoint,
    pub trace: Vec<IterationTrace>,
    pub status: SolveStatus,
    pub theta: f64,
    pub theta_max: f64,
}

impl SolveResult {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

/// Largest `alpha` in `(0, 1]` with `alpha = min(1, boundary_fraction * alpha_max)`,
/// where `alpha_max` is the exact step to the boundary of `x, s >= 0`.
pub fn safeguard_step(
    point: &PrimalDualPoint,
    direction: &NewtonDirection,
    boundary_fraction: f64,
) -> f64 {
    let ratio = |v: &nalgebra::DVector<f64>, dv: &nalgebra::DVector<f64>| {
        v.iter()
            .zip(dv.iter())
            .filter(|(_, d)| **d < 0.0)
            .map(|(v, d)| -v / d)
            .fold(f64::INFINITY, f64::min)
    };
    let alpha_max = ratio(&point.x, &direction.dx).min(ratio(&point.s, &direction.ds));
    (boundary_fraction * alpha_max).min(1.0)
}

fn take_step(point: &PrimalDualPoint, d: &NewtonDirection, alpha: f64) -> PrimalDualPoint {
    PrimalDualPoint {
        x: &point.x + &d.dx * alpha,
        y: &point.y + &d.dy * alpha,
        s: &point.s + &d.ds * alpha,
    }
}

/// Feasibility precondition. The tolerance grows with the magnitude of the
/// terms being summed, so a start that is exact up to rounding is accepted
/// even when its entries are large.
fn require_feasible(problem: &LcqoProblem, point: &PrimalDualPoint) -> Result<()> {
    point.require_interior()?;
    let (rp, rd) = residuals(problem, point)?;
    let (a, q) = (problem.a().abs(), problem.q().abs());
    let primal_scale = 1.0 + linalg::inf_norm(problem.b()) + linalg::inf_norm(&(&a * point.x.abs()));
    let dual_terms = a.tr_mul(&point.y.abs()) + point.s.abs() + &q * point.x.abs();
    let dual_scale = 1.0 + linalg::inf_norm(problem.c()) + linalg::inf_norm(&dual_terms);
    let primal = linalg::inf_norm(&rp) / primal_scale;
    let dual = linalg::inf_norm(&rd) / dual_scale;
    if primal > FEASIBILITY_TOL || dual > FEASIBILITY_TOL {
        return Err(Error::NotFeasible { primal, dual });
    }
    Ok(())
}

/// Neighborhood radius used by a solve: the configured one, or `0.9 theta_max`.
pub fn resolve_theta(config: &SolverConfig, theta_max: f64) -> Result<f64> {
    let theta = config.theta.unwrap_or(0.9 * theta_max);
    if theta >= theta_max {
        return Err(Error::InvalidConfig(format!(
            "theta = {theta} must be below theta_max = {theta_max}"
        )));
    }
    Ok(theta)
}

struct Setup {
    basis: NullBasis,
    assembler: OssAssembler,
    theta: f64,
    theta_max: f64,
}

fn setup(problem: &LcqoProblem, config: &SolverConfig) -> Result<Setup> {
    config.validate()?;
    let basis = build_null_basis(problem)?;
    let theta_max = theta_max(problem, &basis);
    let theta = resolve_theta(config, theta_max)?;
    let assembler = OssAssembler::new(problem, &basis);
    Ok(Setup {
        basis,
        assembler,
        theta,
        theta_max,
    })
}

fn direction(
    problem: &LcqoProblem,
    setup: &Setup,
    point: &PrimalDualPoint,
    sigma: f64,
    config: &SolverConfig,
    k: usize,
) -> Result<(crate::oss::OssSystem, f64, SolveOutcome, NewtonDirection)> {
    let oss = setup.assembler.assemble(point, sigma)?;
    let eps_oss = backends::oss_tolerance(config.delta, &oss)?;
    let outcome = backends::solve(&oss, config, k)?;
    let d = recover_direction(problem, &setup.basis, &outcome.lambda, &outcome.dy, &oss)?;
    Ok((oss, eps_oss, outcome, d))
}

/// The short-step inexact feasible method. `start` must be interior,
/// feasible and inside the neighborhood of radius `theta`.
pub fn run_ifqipm(
    problem: &LcqoProblem,
    start: &PrimalDualPoint,
    config: &SolverConfig,
) -> Result<SolveResult> {
    run_ifqipm_observed(problem, start, config, |_, _| {})
}

/// [`run_ifqipm`] that also hands every iterate to `observe`, starting with
/// `(0, start)` and continuing with `(k + 1, point)` after each step.
pub fn run_ifqipm_observed<F>(
    problem: &LcqoProblem,
    start: &PrimalDualPoint,
    config: &SolverConfig,
    mut observe: F,
) -> Result<SolveResult>
where
    F: FnMut(usize, &PrimalDualPoint),
{
    let setup = setup(problem, config)?;
    require_feasible(problem, start)?;
    let theta = setup.theta;
    let first = central_path_metrics(start, theta)?;
    if !first.in_neighborhood {
        return Err(Error::NotInNeighborhood {
            distance: first.neighborhood_distance,
            bound: theta * first.mu,
        });
    }

    let n = problem.n();
    let sigma = config.sigma(n);
    let threshold = n as f64 * config.eps;
    let mut point = start.clone();
    let mut trace = Vec::new();
    let mut status = SolveStatus::IterLimit;
    observe(0, &point);

    for k in 0..=config.max_iters {
        let metrics = central_path_metrics(&point, theta)?;
        if metrics.gap <= threshold {
            status = SolveStatus::Optimal;
            break;
        }
        if k == config.max_iters {
            break;
        }
        let clock = Instant::now();
        let (oss, eps_oss, outcome, d) = match direction(problem, &setup, &point, sigma, config, k) {
            Ok(v) => v,
            Err(Error::ZeroResidual) => {
                status = SolveStatus::NumericalBreakdown;
                break;
            }
            Err(e) => return Err(Error::at_iteration(k, e)),
        };
        let finite = d.dx.iter().chain(d.ds.iter()).chain(d.dy.iter()).all(|v| v.is_finite());
        if !finite {
            status = SolveStatus::NumericalBreakdown;
            break;
        }
        let alpha = safeguard_step(&point, &d, config.boundary_fraction);
        let kappa_m = config
            .trace_kappa
            .then(|| linalg::condition_number(&oss.matrix));
        trace.push(IterationTrace {
            k,
            mu: metrics.mu,
            gap: metrics.gap,
            omega: metrics.omega,
            frob_m: oss.frob_m,
            eps_oss,
            residual_norm: outcome.residual_norm,
            neighborhood_distance: metrics.neighborhood_distance,
            kappa_m,
            wall_time: 0.0,
            rc_norm: oss.rc.norm(),
            r_norm: d.r.norm(),
            max_square_sum: point.max_square_sum(),
            step_length: alpha,
            inner_iterations: outcome.inner_iterations,
        });
        point = take_step(&point, &d, alpha);
        if let Some(row) = trace.last_mut() {
            row.wall_time = clock.elapsed().as_secs_f64();
        }
        observe(k + 1, &point);
        if !point.is_interior() {
            status = SolveStatus::NumericalBreakdown;
            break;
        }
    }

    Ok(SolveResult {
        point,
        trace,
        status,
        theta,
        theta_max: setup.theta_max,
    })
}

/// Output of [`center_to_neighborhood`].
#[derive(Debug, Clone)]
pub struct Centering {
    pub point: PrimalDualPoint,
    /// `||XSe - mu e||` of the start and of every accepted step.
    pub distances: Vec<f64>,
    pub theta: f64,
}

impl Centering {
    pub fn steps(&self) -> usize {
        self.distances.len() - 1
    }
}

/// Pure centering (`sigma = 1`) with damped steps until the iterate sits in
/// the neighborhood. Each accepted step strictly reduces `||XSe - mu e||`.
pub fn center_to_neighborhood(
    problem: &LcqoProblem,
    start: &PrimalDualPoint,
    config: &SolverConfig,
) -> Result<Centering> {
    let setup = setup(problem, config)?;
    require_feasible(problem, start)?;
    let theta = setup.theta;
    let mut point = start.clone();
    let mut metrics = central_path_metrics(&point, theta)?;
    let mut distances = vec![metrics.neighborhood_distance];
    if metrics.in_neighborhood {
        return Ok(Centering {
            point,
            distances,
            theta,
        });
    }

    for k in 0..config.max_iters {
        if metrics.neighborhood_distance <= CENTERING_TARGET * theta * metrics.mu {
            return Ok(Centering {
                point,
                distances,
                theta,
            });
        }
        let (_, _, _, d) = direction(problem, &setup, &point, 1.0, config, k)
            .map_err(|e| Error::at_iteration(k, e))?;
        let mut alpha = safeguard_step(&point, &d, config.boundary_fraction);
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial = take_step(&point, &d, alpha);
            if trial.is_interior() {
                let m = central_path_metrics(&trial, theta)?;
                if m.neighborhood_distance < metrics.neighborhood_distance {
                    accepted = Some((trial, m));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((next, m)) = accepted else {
            return Err(Error::CenteringStalled {
                iterations: k,
                relative_distance: metrics.relative_distance(),
            });
        };
        point = next;
        metrics = m;
        distances.push(metrics.neighborhood_distance);
    }
    if metrics.in_neighborhood {
        return Ok(Centering {
            point,
            distances,
            theta,
        });
    }
    Err(Error::CenteringStalled {
        iterations: config.max_iters,
        relative_distance: metrics.relative_distance(),
    })
}

/// Centers when needed, then runs the main loop.
pub fn solve(
    problem: &LcqoProblem,
    start: &PrimalDualPoint,
    config: &SolverConfig,
) -> Result<(Centering, SolveResult)> {
    let centered = center_to_neighborhood(problem, start, config)?;
    let result = run_ifqipm(problem, &centered.point, config)?;
    Ok((centered, result))
}

pub fn write_trace_jsonl(path: impl AsRef<Path>, trace: &[IterationTrace]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for row in trace {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_trace_jsonl(path: impl AsRef<Path>) -> Result<Vec<IterationTrace>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn dir(dx: Vec<f64>, ds: Vec<f64>) -> NewtonDirection {
        let n = dx.len();
        NewtonDirection {
            lambda: DVector::zeros(0),
            dy: DVector::zeros(0),
            dx: DVector::from_vec(dx),
            ds: DVector::from_vec(ds),
            r: DVector::zeros(n),
        }
    }

    fn pt(x: Vec<f64>, s: Vec<f64>) -> PrimalDualPoint {
        PrimalDualPoint::new(DVector::from_vec(x), DVector::zeros(0), DVector::from_vec(s))
    }

    #[test]
    fn safeguard_cases() {
        assert_eq!(safeguard_step(&pt(vec![1.0], vec![1.0]), &dir(vec![0.0], vec![0.0]), 0.9), 1.0);
        let a = safeguard_step(&pt(vec![1.0], vec![1.0]), &dir(vec![-2.0], vec![0.0]), 0.9);
        assert!((a - 0.45).abs() < 1e-15);
        let a = safeguard_step(&pt(vec![1.0], vec![1.0]), &dir(vec![-0.5], vec![-0.1]), 0.99);
        assert_eq!(a, 1.0);
    }

    #[test]
    fn trace_round_trip() {
        let row = IterationTrace {
            k: 3,
            mu: 0.5,
            gap: 2.0,
            omega: 1.5,
            frob_m: 3.0,
            eps_oss: 1e-3,
            residual_norm: 1e-4,
            neighborhood_distance: 0.01,
            kappa_m: Some(12.0),
            wall_time: 0.0,
            rc_norm: 0.1,
            r_norm: 1e-4,
            max_square_sum: 2.0,
            step_length: 1.0,
            inner_iterations: 7,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.jsonl");
        write_trace_jsonl(&path, std::slice::from_ref(&row)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"frob_M\"") && text.contains("\"kappa_M\""));
        assert_eq!(read_trace_jsonl(&path).unwrap(), vec![row]);
    }
}
