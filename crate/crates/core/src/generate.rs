//! Seeded generator of feasible test instances with a known interior start.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::problem::{LcqoProblem, PrimalDualPoint};

/// Knobs of the generator. [`synthesize_instance`] uses the defaults.
#[derive(Debug, Clone)]
pub struct InstanceSpec {
    pub m: usize,
    pub n: usize,
    /// Fraction of nonzero entries in `A_N`.
    pub density: f64,
    pub seed: u64,
    /// `Q` is rescaled so that `||Q V V'||_F = q_weight * sqrt(n)`; zero gives `Q = 0`.
    pub q_weight: f64,
    /// Start primal vector; all ones when absent.
    pub x0: Option<DVector<f64>>,
    /// Start slack vector; all ones when absent.
    pub s0: Option<DVector<f64>>,
}

impl InstanceSpec {
    pub fn new(m: usize, n: usize, density: f64, seed: u64) -> Self {
        Self {
            m,
            n,
            density,
            seed,
            q_weight: 0.25,
            x0: None,
            s0: None,
        }
    }

    pub fn with_q_weight(mut self, q_weight: f64) -> Self {
        self.q_weight = q_weight;
        self
    }

    pub fn with_start(mut self, x0: DVector<f64>, s0: DVector<f64>) -> Self {
        self.x0 = Some(x0);
        self.s0 = Some(s0);
        self
    }

    /// Draws `A = [I, A_N]` and `Q = G'G`, then fixes `b = A x0` and
    /// `c = A'y0 + s0 - Q x0` so the bundled point is exactly feasible.
    ///
    /// `A_N` has small nonzero integer entries and no empty row or column, so
    /// every column of `A` and every row of `V = [A_N; -I]` has norm at least one.
    pub fn build(&self) -> Result<(LcqoProblem, PrimalDualPoint)> {
        let (m, n) = (self.m, self.n);
        if m == 0 || m >= n {
            return Err(Error::BadDims(format!("need 0 < m < n, got m = {m}, n = {n}")));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::BadDims(format!("density must lie in (0, 1], got {}", self.density)));
        }
        if !(self.q_weight >= 0.0 && self.q_weight.is_finite()) {
            return Err(Error::BadDims(format!("q_weight must be >= 0, got {}", self.q_weight)));
        }
        let k = n - m;
        let x0 = self.x0.clone().unwrap_or_else(|| DVector::from_element(n, 1.0));
        let s0 = self.s0.clone().unwrap_or_else(|| DVector::from_element(n, 1.0));
        if x0.len() != n || s0.len() != n {
            return Err(Error::BadDims("start vectors must have length n".into()));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let draw_entry = |rng: &mut ChaCha8Rng| -> f64 {
            let mag = rng.random_range(1..=3) as f64;
            if rng.random_bool(0.5) {
                mag
            } else {
                -mag
            }
        };

        let mut a_n = DMatrix::zeros(m, k);
        for j in 0..k {
            for i in 0..m {
                if rng.random_bool(self.density) {
                    a_n[(i, j)] = draw_entry(&mut rng);
                }
            }
        }
        for j in 0..k {
            if a_n.column(j).iter().all(|&v| v == 0.0) {
                let i = rng.random_range(0..m);
                a_n[(i, j)] = draw_entry(&mut rng);
            }
        }
        for i in 0..m {
            if a_n.row(i).iter().all(|&v| v == 0.0) {
                let j = rng.random_range(0..k);
                a_n[(i, j)] = draw_entry(&mut rng);
            }
        }
        let mut a = DMatrix::zeros(m, n);
        a.view_mut((0, 0), (m, m)).fill_with_identity();
        a.view_mut((0, m), (m, k)).copy_from(&a_n);

        let rank_g = (n / 2).max(1);
        let g = DMatrix::from_fn(rank_g, n, |_, _| rng.random_range(-1.0..1.0));
        let mut q = g.tr_mul(&g);
        if self.q_weight == 0.0 {
            q.fill(0.0);
        } else {
            let mut v = DMatrix::zeros(n, k);
            v.view_mut((0, 0), (m, k)).copy_from(&a_n);
            v.view_mut((m, 0), (k, k)).copy_from(&(-DMatrix::<f64>::identity(k, k)));
            let frob = (&q * &v * v.transpose()).norm();
            if frob > 0.0 {
                q *= self.q_weight * (n as f64).sqrt() / frob;
            }
        }
        // exact symmetry after the floating-point products
        let q = (&q + q.transpose()) * 0.5;

        let y0 = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
        let b = &a * &x0;
        let c = a.tr_mul(&y0) + &s0 - &q * &x0;
        let problem = LcqoProblem::from_dense(a, b, c, q)?;
        Ok((problem, PrimalDualPoint::new(x0, y0, s0)))
    }
}

/// Feasible instance with `A = [I, A_N]`, PSD `Q` and the exactly central
/// start `x = s = e`.
pub fn synthesize_instance(
    m: usize,
    n: usize,
    density: f64,
    seed: u64,
) -> Result<(LcqoProblem, PrimalDualPoint)> {
    InstanceSpec::new(m, n, density, seed).build()
}
