//! The Orthogonal Subspaces System (OSS)
//!
//! ```text
//! M z = r_c,   M = [ (S + XQ) V   -X A' ],   z = (lambda, dy),   r_c = sigma mu e - XSe
//! ```
//!
//! Any `z`, exact or not, gives `dx = V lambda` and `ds = Q dx - A' dy`, which
//! satisfy the first two Newton equations exactly. The solve error only shows
//! up in the complementarity equation as `r = S dx + X ds - r_c = M z - r_c`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::null_space::NullBasis;
use crate::problem::{LcqoProblem, PrimalDualPoint};

/// Per-solve constants reused by every OSS assembly: dense `V`, `QV` and `A'`.
#[derive(Debug, Clone)]
pub struct OssAssembler {
    v: DMatrix<f64>,
    qv: DMatrix<f64>,
    at: DMatrix<f64>,
}

impl OssAssembler {
    pub fn new(problem: &LcqoProblem, basis: &NullBasis) -> Self {
        let v = basis.to_dense();
        let qv = problem.q() * &v;
        Self {
            v,
            qv,
            at: problem.a().transpose(),
        }
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// The bare matrix `M` at `point` (independent of `sigma`).
    pub fn matrix(&self, point: &PrimalDualPoint) -> DMatrix<f64> {
        let (n, k) = self.v.shape();
        let m = self.at.ncols();
        let (x, s) = (&point.x, &point.s);
        let mut out = DMatrix::zeros(n, n);
        for j in 0..k {
            for i in 0..n {
                out[(i, j)] = s[i] * self.v[(i, j)] + x[i] * self.qv[(i, j)];
            }
        }
        for j in 0..m {
            for i in 0..n {
                out[(i, k + j)] = -x[i] * self.at[(i, j)];
            }
        }
        out
    }

    pub fn assemble(&self, point: &PrimalDualPoint, sigma: f64) -> Result<OssSystem> {
        point.require_interior()?;
        if point.x.len() != self.v.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} variables, problem has {}",
                point.x.len(),
                self.v.nrows()
            )));
        }
        let matrix = self.matrix(point);
        let frob_m = matrix
            .column_iter()
            .map(|c| c.norm_squared())
            .sum::<f64>()
            .sqrt();
        let xs = point.x.component_mul(&point.s);
        let mu = xs.sum() / xs.len() as f64;
        let rc = xs.map(|v| sigma * mu - v);
        Ok(OssSystem {
            matrix,
            rc,
            frob_m,
            mu,
            sigma,
            null_dim: self.v.ncols(),
            x: point.x.clone(),
            s: point.s.clone(),
        })
    }
}

/// One assembled OSS `M z = r_c`.
#[derive(Debug, Clone)]
pub struct OssSystem {
    pub matrix: DMatrix<f64>,
    pub rc: DVector<f64>,
    pub frob_m: f64,
    pub mu: f64,
    pub sigma: f64,
    null_dim: usize,
    x: DVector<f64>,
    s: DVector<f64>,
}

impl OssSystem {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Length of `lambda` (`n - m`).
    pub fn null_dim(&self) -> usize {
        self.null_dim
    }

    pub fn x(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn s(&self) -> &DVector<f64> {
        &self.s
    }

    /// Splits `z` into `(lambda, dy)`.
    pub fn split(&self, z: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let k = self.null_dim;
        (
            z.rows(0, k).into_owned(),
            z.rows(k, z.len() - k).into_owned(),
        )
    }

    pub fn join(&self, lambda: &DVector<f64>, dy: &DVector<f64>) -> DVector<f64> {
        let mut z = DVector::zeros(lambda.len() + dy.len());
        z.rows_mut(0, lambda.len()).copy_from(lambda);
        z.rows_mut(lambda.len(), dy.len()).copy_from(dy);
        z
    }

    /// `M z - r_c`
    pub fn residual(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.matrix * z - &self.rc
    }
}

pub fn assemble_oss(
    problem: &LcqoProblem,
    basis: &NullBasis,
    point: &PrimalDualPoint,
    sigma: f64,
) -> Result<OssSystem> {
    OssAssembler::new(problem, basis).assemble(point, sigma)
}

/// The symmetric `2n x 2n` system
/// `[[0, M], [M', 0]] / (sqrt(2) ||M||_F) (u, z) = (r_c, 0) / (sqrt(2) ||M||_F)`,
/// applied as an operator.
#[derive(Debug, Clone, Copy)]
pub struct NormalizedSystem<'a> {
    oss: &'a OssSystem,
    scale: f64,
}

pub fn hermitian_dilation(oss: &OssSystem) -> NormalizedSystem<'_> {
    NormalizedSystem {
        oss,
        scale: 1.0 / (std::f64::consts::SQRT_2 * oss.frob_m),
    }
}

impl NormalizedSystem<'_> {
    pub fn dim(&self) -> usize {
        2 * self.oss.n()
    }

    /// `1 / (sqrt(2) ||M||_F)`
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn rhs(&self) -> DVector<f64> {
        let n = self.oss.n();
        let mut out = DVector::zeros(2 * n);
        out.rows_mut(0, n).copy_from(&(&self.oss.rc * self.scale));
        out
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let n = self.oss.n();
        let (u, z) = (v.rows(0, n), v.rows(n, n));
        let mut out = DVector::zeros(2 * n);
        out.rows_mut(0, n)
            .copy_from(&(&self.oss.matrix * z * self.scale));
        out.rows_mut(n, n)
            .copy_from(&(self.oss.matrix.tr_mul(&u) * self.scale));
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.oss.n();
        let mut out = DMatrix::zeros(2 * n, 2 * n);
        out.view_mut((0, n), (n, n))
            .copy_from(&(&self.oss.matrix * self.scale));
        out.view_mut((n, 0), (n, n))
            .copy_from(&(self.oss.matrix.transpose() * self.scale));
        out
    }

    /// Lower half of a dilated vector, i.e. the OSS unknown `z`.
    pub fn z_block(&self, v: &DVector<f64>) -> DVector<f64> {
        let n = self.oss.n();
        v.rows(n, n).into_owned()
    }

    /// `||H v - rhs||_2`
    pub fn residual_norm(&self, v: &DVector<f64>) -> f64 {
        (self.apply(v) - self.rhs()).norm()
    }
}

/// Newton direction recovered from an OSS solution.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonDirection {
    pub lambda: DVector<f64>,
    pub dy: DVector<f64>,
    pub dx: DVector<f64>,
    pub ds: DVector<f64>,
    /// Complementarity error `S dx + X ds - r_c`.
    pub r: DVector<f64>,
}

pub fn recover_direction(
    problem: &LcqoProblem,
    basis: &NullBasis,
    lambda: &DVector<f64>,
    dy: &DVector<f64>,
    oss: &OssSystem,
) -> Result<NewtonDirection> {
    if dy.len() != problem.m() {
        return Err(Error::DimensionMismatch(format!(
            "dy has length {}, expected {}",
            dy.len(),
            problem.m()
        )));
    }
    if oss.n() != problem.n() {
        return Err(Error::DimensionMismatch("OSS does not match the problem".into()));
    }
    let dx = basis.forward(lambda)?;
    let ds = problem.q() * &dx - problem.a().tr_mul(dy);
    let r = oss.s.component_mul(&dx) + oss.x.component_mul(&ds) - &oss.rc;
    Ok(NewtonDirection {
        lambda: lambda.clone(),
        dy: dy.clone(),
        dx,
        ds,
        r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::null_space::build_null_basis;

    fn tiny() -> (LcqoProblem, NullBasis, PrimalDualPoint) {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let p = LcqoProblem::from_dense(
            a,
            DVector::from_element(1, 2.0),
            DVector::zeros(2),
            DMatrix::zeros(2, 2),
        )
        .unwrap();
        let basis = build_null_basis(&p).unwrap();
        let pt = PrimalDualPoint::new(
            DVector::from_element(2, 1.0),
            DVector::zeros(1),
            DVector::from_element(2, 1.0),
        );
        (p, basis, pt)
    }

    #[test]
    fn hand_assembled_two_by_two() {
        let (p, basis, pt) = tiny();
        let oss = assemble_oss(&p, &basis, &pt, 0.9).unwrap();
        assert_eq!(
            oss.matrix,
            DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, -1.0])
        );
        assert!((oss.rc - DVector::from_element(2, -0.1)).amax() < 1e-15);
        assert!((oss.frob_m - 2.0).abs() < 1e-15);
    }

    #[test]
    fn dilation_has_unit_frobenius_norm() {
        let (p, basis, pt) = tiny();
        let oss = assemble_oss(&p, &basis, &pt, 0.5).unwrap();
        let h = hermitian_dilation(&oss);
        assert!((h.to_dense().norm() - 1.0).abs() < 1e-14);
        let v = DVector::from_vec(vec![0.3, -1.0, 2.0, 0.5]);
        assert!((h.apply(&v) - h.to_dense() * &v).amax() < 1e-15);
    }

    #[test]
    fn one_by_one_dilation_eigenvalues() {
        // M = [a] gives [[0, a], [a, 0]] / (sqrt(2)|a|) with eigenvalues +-1/sqrt(2)
        let oss = OssSystem {
            matrix: DMatrix::from_element(1, 1, -3.0),
            rc: DVector::from_element(1, 1.0),
            frob_m: 3.0,
            mu: 1.0,
            sigma: 0.5,
            null_dim: 1,
            x: DVector::from_element(1, 1.0),
            s: DVector::from_element(1, 1.0),
        };
        let h = hermitian_dilation(&oss).to_dense();
        let mut eig: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((eig[0] + r).abs() < 1e-14 && (eig[1] - r).abs() < 1e-14);
    }

    #[test]
    fn zero_direction_leaves_minus_rc() {
        let (p, basis, pt) = tiny();
        let oss = assemble_oss(&p, &basis, &pt, 0.9).unwrap();
        let d = recover_direction(&p, &basis, &DVector::zeros(1), &DVector::zeros(1), &oss).unwrap();
        assert_eq!(d.dx, DVector::zeros(2));
        assert_eq!(d.ds, DVector::zeros(2));
        assert_eq!(d.r, -&oss.rc);
    }

    #[test]
    fn non_interior_rejected() {
        let (p, basis, mut pt) = tiny();
        pt.s[1] = 0.0;
        assert!(matches!(
            assemble_oss(&p, &basis, &pt, 0.9),
            Err(Error::NonInterior(_))
        ));
    }
}
