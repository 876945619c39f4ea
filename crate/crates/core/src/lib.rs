//! Inexact feasible interior point solver for
//!
//! ```text
//! min c'x + 1/2 x'Qx   s.t.  Ax = b,  x >= 0
//! ```
//!
//! built on the Orthogonal Subspaces System (OSS). Each Newton direction is
//! parametrized by a null-space coordinate `lambda` and a dual step `dy`, so
//! `dx = V lambda` always satisfies `A dx = 0` and `ds = Q dx - A' dy` always
//! keeps dual feasibility, however inaccurately the OSS is solved. That makes
//! the method a natural host for inexact solvers, including the error model
//! of a quantum linear-system solver plus tomography.
//!
//! The pieces:
//!
//! * [`problem`]: problem data, validation, residuals and neighborhood metrics.
//! * [`null_space`]: the basis `V` of `Null(A)`.
//! * [`oss`]: OSS assembly, the normalized Hermitian dilation and direction recovery.
//! * [`backends`]: exact LU, MINRES and a noisy emulation of the quantum pipeline.
//! * [`driver`]: centering and the short-step main loop.
//! * [`cost`]: classical evaluation of the quantum cost model.
//! * [`svm`]: soft-margin SVM training through the solver.
//!
//! Runnable examples live in `examples/` (`cargo run --release --example <name>`):
//! `generate_and_solve`, `null_space`, `backends_compare`, `centering`,
//! `cost_model`, `svm_train` and `trace_export`.
//!
//! ```
//! use lcqo::{solve, synthesize_instance, SolveStatus, SolverConfig};
//!
//! let (problem, start) = synthesize_instance(3, 8, 0.5, 7).unwrap();
//! let (_, result) = solve(&problem, &start, &SolverConfig::default()).unwrap();
//! assert_eq!(result.status, SolveStatus::Optimal);
//! assert!(result.point.gap() <= 8.0 * 1e-6);
//! ```

pub mod backends;
pub mod cli;
pub mod config;
pub mod cost;
pub mod driver;
pub mod error;
pub mod generate;
mod linalg;
pub mod null_space;
pub mod oss;
pub mod problem;
pub mod sparse;
pub mod svm;

pub use backends::SolveOutcome;
pub use config::{BackendKind, SolverConfig};
pub use cost::{cost_report, QuantumCostReport};
pub use driver::{
    center_to_neighborhood, run_ifqipm, run_ifqipm_observed, safeguard_step, solve, IterationTrace, SolveResult,
    SolveStatus,
};
pub use error::{Error, Result};
pub use generate::{synthesize_instance, InstanceSpec};
pub use null_space::{build_null_basis, BasisMode, NullBasis};
pub use oss::{assemble_oss, hermitian_dilation, recover_direction, OssSystem};
pub use problem::{
    central_path_metrics, residuals, theta_max, validate_and_preprocess, LcqoProblem,
    PrimalDualPoint,
};
pub use svm::{SvmDataset, SvmModel};
