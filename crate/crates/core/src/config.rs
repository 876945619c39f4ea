use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which solver produces the OSS solution each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    /// Dense LU of the OSS matrix.
    Exact,
    /// MINRES on the normalized Hermitian dilation.
    Iterative,
    /// Exact solve followed by a seeded direction perturbation that mimics the
    /// accuracy contract of a quantum linear-system solve plus tomography.
    Noisy,
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendKind::Exact => "exact",
            BackendKind::Iterative => "iterative",
            BackendKind::Noisy => "noisy",
        })
    }
}

impl FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(BackendKind::Exact),
            "iterative" => Ok(BackendKind::Iterative),
            "noisy" => Ok(BackendKind::Noisy),
            other => Err(Error::InvalidConfig(format!("unknown backend {other:?}"))),
        }
    }
}

/// Parameters of the short-step method. `sigma = 1 - beta / sqrt(n)` is
/// derived per problem and never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Neighborhood radius; `None` means `0.9 * theta_max` of the instance.
    pub theta: Option<f64>,
    pub beta: f64,
    /// Inexactness fraction: each direction must satisfy `||r|| <= delta ||r_c||`.
    pub delta: f64,
    /// Stop once `x's <= n * eps`.
    pub eps: f64,
    pub backend: BackendKind,
    pub seed: u64,
    pub max_iters: usize,
    pub boundary_fraction: f64,
    /// Record `kappa(M)` per iteration via a dense SVD.
    pub trace_kappa: bool,
    /// Overrides the dilated-residual tolerance of the iterative backend with
    /// `inner_rtol * ||rhs||`; `None` uses the inexactness rule.
    pub inner_rtol: Option<f64>,
    /// Inner iteration budget; `None` means `10 n`.
    pub max_inner_iters: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            theta: None,
            beta: 0.1,
            delta: 0.3,
            eps: 1e-6,
            backend: BackendKind::Exact,
            seed: 0,
            max_iters: 100_000,
            boundary_fraction: 0.99,
            trace_kappa: false,
            inner_rtol: None,
            max_inner_iters: None,
        }
    }
}

impl SolverConfig {
    pub fn with_backend(mut self, backend: BackendKind) -> Self {
        self.backend = backend;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        if let Some(theta) = self.theta {
            open_unit("theta", theta)?;
        }
        open_unit("beta", self.beta)?;
        open_unit("delta", self.delta)?;
        open_unit("boundary_fraction", self.boundary_fraction)?;
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidConfig(format!("eps must be positive, got {}", self.eps)));
        }
        if let Some(r) = self.inner_rtol {
            if !(r > 0.0) {
                return Err(Error::InvalidConfig(format!("inner_rtol must be positive, got {r}")));
            }
        }
        Ok(())
    }

    pub fn sigma(&self, n: usize) -> f64 {
        1.0 - self.beta / (n as f64).sqrt()
    }
}
