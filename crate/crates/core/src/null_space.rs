//! Implicit basis `V` of the null space of `A`, so that `dx = V lambda`
//! never disturbs primal feasibility.
//!
//! With the columns of `A` split into a basis block `B` and the rest `N`,
//! `V` restricted to `(B, N)` rows is `[B^{-1} N; -I]`. When `A` already
//! contains an identity block the inverse disappears and `V = [A_N; -I]`.

use nalgebra::{DMatrix, DVector, LU};

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::LcqoProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisMode {
    IdentityDetected,
    GeneralBasis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Apply {
    /// `lambda -> V lambda`
    Forward,
    /// `w -> V' w`
    Adjoint,
}

#[derive(Debug, Clone)]
struct BasisFactors {
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    lu_t: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

#[derive(Debug, Clone)]
pub struct NullBasis {
    n: usize,
    /// `basis_cols[i]` is the column pivoted into row `i` of the basis block.
    basis_cols: Vec<usize>,
    /// Remaining columns in increasing order; `lambda_j` drives column `nonbasis_cols[j]`.
    nonbasis_cols: Vec<usize>,
    a_n: DMatrix<f64>,
    mode: BasisMode,
    factors: Option<BasisFactors>,
}

/// For each row, the lowest-index column equal to that unit vector.
fn detect_identity(a: &DMatrix<f64>) -> Option<Vec<usize>> {
    let (m, n) = a.shape();
    let mut found = vec![None; m];
    for j in 0..n {
        let col = a.column(j);
        let mut nonzeros = col.iter().enumerate().filter(|(_, v)| **v != 0.0);
        if let (Some((i, &v)), None) = (nonzeros.next(), nonzeros.next()) {
            if v == 1.0 && found[i].is_none() {
                found[i] = Some(j);
            }
        }
    }
    found.into_iter().collect()
}

pub fn build_null_basis(problem: &LcqoProblem) -> Result<NullBasis> {
    let a = problem.a();
    let (m, n) = a.shape();
    if m > n {
        return Err(Error::DimensionMismatch(format!(
            "more constraints ({m}) than variables ({n})"
        )));
    }
    let (basis_cols, mode) = match detect_identity(a) {
        Some(cols) => (cols, BasisMode::IdentityDetected),
        None => {
            let cols = linalg::pivoted_columns(a, m);
            if cols.len() < m {
                return Err(Error::RankDeficient {
                    rank: cols.len(),
                    m,
                });
            }
            (cols, BasisMode::GeneralBasis)
        }
    };
    let mut is_basic = vec![false; n];
    for &j in &basis_cols {
        is_basic[j] = true;
    }
    let nonbasis_cols: Vec<usize> = (0..n).filter(|&j| !is_basic[j]).collect();
    let a_n = a.select_columns(&nonbasis_cols);

    let factors = match mode {
        BasisMode::IdentityDetected => None,
        BasisMode::GeneralBasis => {
            let b = a.select_columns(&basis_cols);
            let lu = LU::new(b.clone());
            if !lu.is_invertible() {
                return Err(Error::RankDeficient { rank: m - 1, m });
            }
            Some(BasisFactors {
                lu,
                lu_t: LU::new(b.transpose()),
            })
        }
    };
    Ok(NullBasis {
        n,
        basis_cols,
        nonbasis_cols,
        a_n,
        mode,
        factors,
    })
}

impl NullBasis {
    pub fn mode(&self) -> BasisMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Null-space dimension `n - m`.
    pub fn dim(&self) -> usize {
        self.nonbasis_cols.len()
    }

    pub fn basis_columns(&self) -> &[usize] {
        &self.basis_cols
    }

    pub fn nonbasis_columns(&self) -> &[usize] {
        &self.nonbasis_cols
    }

    /// Column permutation placing the basis block first.
    pub fn permutation(&self) -> Vec<usize> {
        self.basis_cols
            .iter()
            .chain(self.nonbasis_cols.iter())
            .copied()
            .collect()
    }

    pub fn a_n(&self) -> &DMatrix<f64> {
        &self.a_n
    }

    pub fn apply(&self, mode: Apply, operand: &DVector<f64>) -> Result<DVector<f64>> {
        match mode {
            Apply::Forward => self.forward(operand),
            Apply::Adjoint => self.adjoint(operand),
        }
    }

    pub fn forward(&self, lambda: &DVector<f64>) -> Result<DVector<f64>> {
        if lambda.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "lambda has length {}, null space has dimension {}",
                lambda.len(),
                self.dim()
            )));
        }
        let mut top = &self.a_n * lambda;
        if let Some(f) = &self.factors {
            f.lu.solve_mut(&mut top);
        }
        let mut out = DVector::zeros(self.n);
        for (i, &j) in self.basis_cols.iter().enumerate() {
            out[j] = top[i];
        }
        for (k, &j) in self.nonbasis_cols.iter().enumerate() {
            out[j] = -lambda[k];
        }
        Ok(out)
    }

    pub fn adjoint(&self, w: &DVector<f64>) -> Result<DVector<f64>> {
        if w.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "operand has length {}, expected {}",
                w.len(),
                self.n
            )));
        }
        let mut w_b = DVector::from_iterator(
            self.basis_cols.len(),
            self.basis_cols.iter().map(|&j| w[j]),
        );
        if let Some(f) = &self.factors {
            f.lu_t.solve_mut(&mut w_b);
        }
        let mut out = self.a_n.tr_mul(&w_b);
        for (k, &j) in self.nonbasis_cols.iter().enumerate() {
            out[k] -= w[j];
        }
        Ok(out)
    }

    /// Dense `n x (n - m)` copy of `V`, for desk-scale diagnostics and the
    /// cost model. The solver itself only applies `V` implicitly.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut v = DMatrix::zeros(self.n, self.dim());
        let mut e = DVector::zeros(self.dim());
        for k in 0..self.dim() {
            e[k] = 1.0;
            let col = self.forward(&e).expect("dimension matches by construction");
            v.set_column(k, &col);
            e[k] = 0.0;
        }
        v
    }
}
