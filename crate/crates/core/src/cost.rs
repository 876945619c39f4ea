//! Classical evaluation of the quantum cost model.
//!
//! Nothing here runs a quantum algorithm. Every quantity is a number the
//! complexity analysis depends on (condition numbers, block-encoding
//! subnormalizations, per-iteration unit costs), computed from a finished
//! classical solve. Polylogarithmic factors are kept as text annotations.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::driver::IterationTrace;
use crate::error::{Error, Result};
use crate::linalg;
use crate::null_space::{build_null_basis, NullBasis};
use crate::oss::OssSystem;
use crate::problem::{LcqoProblem, PrimalDualPoint};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Iteration-independent constants of one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceConstants {
    #[serde(rename = "frob_V")]
    pub frob_v: f64,
    #[serde(rename = "frob_A")]
    pub frob_a: f64,
    #[serde(rename = "frob_Q")]
    pub frob_q: f64,
    #[serde(rename = "sigma_max_Q")]
    pub sigma_max_q: f64,
    #[serde(rename = "kappa_VAQ")]
    pub kappa_vaq: f64,
}

impl InstanceConstants {
    pub fn new(problem: &LcqoProblem, basis: &NullBasis) -> Self {
        let v = basis.to_dense();
        Self {
            frob_v: v.norm(),
            frob_a: problem.a().norm(),
            frob_q: problem.q().norm(),
            sigma_max_q: linalg::max_eigenvalue(problem.q()).max(0.0),
            kappa_vaq: linalg::condition_number(&vaq_matrix(problem, &v)),
        }
    }

    /// `sqrt(||V||_F^2 + ||A||_F^2)`
    pub fn root_va(&self) -> f64 {
        self.frob_v.hypot(self.frob_a)
    }
}

/// `[[V', 0], [0, A]] [[I, -Q], [0, I]] = [[V', -V'Q], [0, A]]`, an `n x 2n` matrix.
pub fn vaq_matrix(problem: &LcqoProblem, v: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, m) = (problem.n(), problem.m());
    let k = v.ncols();
    let mut out = DMatrix::zeros(n, 2 * n);
    out.view_mut((0, 0), (k, n)).copy_from(&v.transpose());
    out.view_mut((0, n), (k, n))
        .copy_from(&-(v.transpose() * problem.q()));
    out.view_mut((k, n), (m, n)).copy_from(problem.a());
    out
}

/// Eigenvalue pair of the `i`-th 2x2 block `[[s_i^2, -d_i], [-d_i, x_i^2]]`
/// of `Psi_1`, with `d_i = x_i s_i - mu`, and the closed-form bounds on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiPair {
    pub plus: f64,
    pub minus: f64,
    /// `mu^2 / (3 (x_i^2 + s_i^2))`
    pub minus_floor: f64,
    /// `x_i^2 + s_i^2 + sqrt(2) mu`
    pub plus_ceiling: f64,
}

impl PsiPair {
    pub fn within_bounds(&self) -> bool {
        self.minus >= self.minus_floor && self.plus <= self.plus_ceiling
    }
}

/// Closed-form spectrum of `Psi_1`. The smaller root is evaluated as
/// `det / q_plus` to avoid cancellation.
pub fn psi_spectrum(point: &PrimalDualPoint) -> Result<Vec<PsiPair>> {
    point.require_interior()?;
    let mu = point.mu();
    Ok(point
        .x
        .iter()
        .zip(point.s.iter())
        .map(|(&x, &s)| {
            let (x2, s2) = (x * x, s * s);
            let p = x2 + s2;
            let d = x * s - mu;
            let plus = 0.5 * (p + (x2 - s2).hypot(2.0 * d));
            let minus = (x2 * s2 - d * d) / plus;
            PsiPair {
                plus,
                minus,
                minus_floor: mu * mu / (3.0 * p),
                plus_ceiling: p + SQRT_2 * mu,
            }
        })
        .collect())
}

/// Upper bound on `kappa(Psi)`:
/// `3 P (P + sqrt(2) mu + 2 mu sigma_max(Q)) / mu^2` with `P = max_i (x_i^2 + s_i^2)`.
pub fn psi_condition_bound(max_square_sum: f64, mu: f64, sigma_max_q: f64) -> f64 {
    let p = max_square_sum;
    3.0 * p * (p + SQRT_2 * mu + 2.0 * mu * sigma_max_q) / (mu * mu)
}

/// The same bound with `P` replaced by `omega^2`. This is the compact form
/// usually quoted; it can undercut the true bound since `P` may reach `2 omega^2`.
pub fn psi_condition_bound_omega(omega: f64, mu: f64, sigma_max_q: f64) -> f64 {
    psi_condition_bound(omega * omega, mu, sigma_max_q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaBounds {
    pub kappa_m: f64,
    /// `sqrt(kappa(Psi) bound) * kappa_VAQ`
    pub kappa_bound: f64,
    pub kappa_bound_omega_form: f64,
    pub kappa_vaq: f64,
}

pub fn kappa_bounds(
    problem: &LcqoProblem,
    basis: &NullBasis,
    point: &PrimalDualPoint,
    oss: &OssSystem,
) -> Result<KappaBounds> {
    point.require_interior()?;
    let c = InstanceConstants::new(problem, basis);
    let mu = point.mu();
    let omega = point
        .x
        .iter()
        .chain(point.s.iter())
        .copied()
        .fold(0.0, f64::max);
    Ok(KappaBounds {
        kappa_m: linalg::condition_number(&oss.matrix),
        kappa_bound: psi_condition_bound(point.max_square_sum(), mu, c.sigma_max_q).sqrt()
            * c.kappa_vaq,
        kappa_bound_omega_form: psi_condition_bound_omega(omega, mu, c.sigma_max_q).sqrt()
            * c.kappa_vaq,
        kappa_vaq: c.kappa_vaq,
    })
}

/// One step in composing the block encoding: `(subnormalization, error)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EncodingFactor {
    pub name: &'static str,
    pub alpha: f64,
    pub error: f64,
    pub gates: &'static str,
}

/// Split of a target QLSA accuracy over the four primitive encodings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub eps_qlsa: f64,
    /// `K = sqrt(2) sqrt(||V||_F^2 + ||A||_F^2) (sqrt(2) ||Q||_F + sqrt(2) + 1)^2`
    pub k: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps4: f64,
}

impl ErrorBudget {
    pub fn split(constants: &InstanceConstants, eps_qlsa: f64, kappa_m: f64) -> Self {
        let root = constants.root_va();
        let q = SQRT_2 * constants.frob_q + SQRT_2 + 1.0;
        let k = SQRT_2 * root * q * q;
        let eps1 = eps_qlsa / kappa_m.powi(3) / (2.0 * k);
        let eps2 = eps1 / (2.0 * root);
        Self {
            eps_qlsa,
            k,
            eps1,
            eps2,
            eps3: eps2,
            eps4: SQRT_2 * eps2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockEncoding {
    #[serde(rename = "alpha_BE")]
    pub alpha_be: f64,
    pub factors: Vec<EncodingFactor>,
    pub budget: ErrorBudget,
}

/// Subnormalization of the block encoding of `M / ||M||_F`, built as
/// `M1 (M2/omega + M3 M4/omega)` with `M1 ~ [V', 0; 0, A]`, `M2 ~ S`,
/// `M3 ~ Q + I`, `M4 ~ X` (all with the scaling used by the analysis).
pub fn block_encoding(
    constants: &InstanceConstants,
    omega: f64,
    frob_m: f64,
    budget: ErrorBudget,
) -> BlockEncoding {
    const POLYLOG: &str = "O(polylog n)";
    let root = constants.root_va();
    let qn = constants.frob_q;
    let ratio = SQRT_2 * omega / frob_m;
    let (e1, e2, e3, e4) = (budget.eps1, budget.eps2, budget.eps3, budget.eps4);
    let sum_alpha = SQRT_2 * qn + SQRT_2 + 1.0;
    let sum_error = (qn + 1.0) * (SQRT_2 * e3 + e4) + e2;
    let alpha_be = root * ratio * sum_alpha;
    let factors = vec![
        EncodingFactor { name: "M1", alpha: root, error: e1, gates: POLYLOG },
        EncodingFactor { name: "M2/omega", alpha: 1.0, error: e2, gates: POLYLOG },
        EncodingFactor { name: "M3", alpha: qn + 1.0, error: (qn + 1.0) * e3, gates: POLYLOG },
        EncodingFactor { name: "M4/omega", alpha: SQRT_2, error: e4, gates: POLYLOG },
        EncodingFactor {
            name: "M3 M4/omega",
            alpha: SQRT_2 * qn + SQRT_2,
            error: (qn + 1.0) * (SQRT_2 * e3 + e4),
            gates: POLYLOG,
        },
        EncodingFactor {
            name: "M2/omega + M3 M4/omega",
            alpha: sum_alpha,
            error: sum_error,
            gates: POLYLOG,
        },
        EncodingFactor {
            name: "M1 (M2/omega + M3 M4/omega)",
            alpha: root * sum_alpha,
            error: root * sum_error + sum_alpha * e1,
            gates: POLYLOG,
        },
        EncodingFactor {
            name: "M / ||M||_F",
            alpha: alpha_be,
            error: ratio * (root * sum_error + sum_alpha * e1),
            gates: POLYLOG,
        },
    ];
    BlockEncoding { alpha_be, factors, budget }
}

/// `alpha_BE` at `point`, with the error budget evaluated for `eps_qlsa`.
pub fn block_encoding_factor(
    problem: &LcqoProblem,
    basis: &NullBasis,
    point: &PrimalDualPoint,
    oss: &OssSystem,
    eps_qlsa: f64,
) -> Result<BlockEncoding> {
    point.require_interior()?;
    let constants = InstanceConstants::new(problem, basis);
    let omega = point
        .x
        .iter()
        .chain(point.s.iter())
        .copied()
        .fold(0.0, f64::max);
    let kappa = linalg::condition_number(&oss.matrix);
    let budget = ErrorBudget::split(&constants, eps_qlsa, kappa);
    Ok(block_encoding(&constants, omega, oss.frob_m, budget))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub k: usize,
    pub omega: f64,
    #[serde(rename = "frob_M")]
    pub frob_m: f64,
    #[serde(rename = "kappa_M")]
    pub kappa_m: f64,
    pub kappa_bound: f64,
    #[serde(rename = "alpha_BE")]
    pub alpha_be: f64,
    pub t_qlsa_units: f64,
    pub t_qta_units: f64,
    pub iter_cost_units: f64,
}

impl CostRow {
    pub fn omega_ratio(&self) -> f64 {
        self.omega / self.frob_m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTotals {
    pub iterations: usize,
    pub total_units: f64,
    pub theorem1_bound_units: f64,
    /// Smallest `c` with `iter_cost_units <= c * theorem1_bound_units` on every row.
    pub calibration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumCostReport {
    pub n: usize,
    pub eps: f64,
    pub rows: Vec<CostRow>,
    pub totals: CostTotals,
    pub constants: InstanceConstants,
    /// Factors omitted from the unit counts, keyed by the quantity they multiply.
    pub polylog: Vec<(String, String)>,
}

/// Replays a trace through the cost model. Every row needs `kappa_M`.
pub fn cost_report(
    problem: &LcqoProblem,
    trace: &[IterationTrace],
    eps: f64,
) -> Result<QuantumCostReport> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let basis = build_null_basis(problem)?;
    let constants = InstanceConstants::new(problem, &basis);
    let n = problem.n() as f64;
    let mut rows = Vec::with_capacity(trace.len());
    for t in trace {
        let kappa_m = t.kappa_m.ok_or(Error::MissingKappa(t.k))?;
        let kappa_bound =
            psi_condition_bound(t.max_square_sum, t.mu, constants.sigma_max_q).sqrt()
                * constants.kappa_vaq;
        let budget = ErrorBudget::split(&constants, eps, kappa_m);
        let alpha_be = block_encoding(&constants, t.omega, t.frob_m, budget).alpha_be;
        let t_qlsa = kappa_m * t.omega / t.frob_m;
        rows.push(CostRow {
            k: t.k,
            omega: t.omega,
            frob_m: t.frob_m,
            kappa_m,
            kappa_bound,
            alpha_be,
            t_qlsa_units: t_qlsa,
            t_qta_units: n,
            iter_cost_units: n * t_qlsa + n * n,
        });
    }
    let omega_bar = rows.iter().map(|r| r.omega).fold(0.0, f64::max);
    let theorem1 =
        n * (omega_bar * omega_bar / eps + constants.sigma_max_q) * constants.kappa_vaq + n * n;
    let total_units = rows.iter().map(|r| r.iter_cost_units).sum();
    let calibration = rows
        .iter()
        .map(|r| r.iter_cost_units / theorem1)
        .fold(0.0, f64::max);
    Ok(QuantumCostReport {
        n: problem.n(),
        eps,
        totals: CostTotals {
            iterations: rows.len(),
            total_units,
            theorem1_bound_units: theorem1,
            calibration,
        },
        rows,
        constants,
        polylog: vec![
            ("t_qlsa_units".into(), "polylog(n, omega_bar, 1/eps)".into()),
            ("t_qta_units".into(), "1/eps_qta^2 tomography samples, polylog(n)".into()),
            ("alpha_BE".into(), "O(polylog n) gates per primitive encoding".into()),
        ],
    })
}

impl QuantumCostReport {
    /// Row invariants that fail, one message per violation.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rows {
            if !(r.kappa_m <= r.kappa_bound) {
                out.push(format!("k={}: kappa_M {:e} > bound {:e}", r.k, r.kappa_m, r.kappa_bound));
            }
            if !(r.omega_ratio() <= 2.0) {
                out.push(format!("k={}: omega/||M||_F = {}", r.k, r.omega_ratio()));
            }
            let units = [r.alpha_be, r.t_qlsa_units, r.t_qta_units, r.iter_cost_units];
            if units.iter().any(|u| !(u.is_finite() && *u >= 0.0)) {
                out.push(format!("k={}: negative or non-finite unit cost", r.k));
            }
        }
        out
    }

    pub fn render_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>5} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>6} {:>11}",
            "k", "omega", "frob_M", "kappa_M", "kappa_bnd", "alpha_BE", "t_qlsa", "t_qta", "iter_cost"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:>5} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>6} {:>11.4e}",
                r.k,
                r.omega,
                r.frob_m,
                r.kappa_m,
                r.kappa_bound,
                r.alpha_be,
                r.t_qlsa_units,
                r.t_qta_units,
                r.iter_cost_units
            );
        }
        let c = &self.constants;
        let t = &self.totals;
        let _ = writeln!(s, "iterations           {}", t.iterations);
        let _ = writeln!(s, "total units          {:.6e}", t.total_units);
        let _ = writeln!(s, "theorem bound units  {:.6e}", t.theorem1_bound_units);
        let _ = writeln!(s, "calibration c        {:.6e}", t.calibration);
        let _ = writeln!(
            s,
            "||V||_F {:.4e}  ||A||_F {:.4e}  ||Q||_F {:.4e}  sigma_max(Q) {:.4e}  kappa_VAQ {:.4e}",
            c.frob_v, c.frob_a, c.frob_q, c.sigma_max_q, c.kappa_vaq
        );
        for (what, factor) in &self.polylog {
            let _ = writeln!(s, "{what}: times {factor}");
        }
        s
    }
}
