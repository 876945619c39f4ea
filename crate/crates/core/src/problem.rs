//! Standard-form problem data, primal-dual points and central-path metrics.
//!
//! The primal problem is `min c'x + x'Qx/2  s.t. Ax = b, x >= 0` and its dual
//! is `max b'y - x'Qx/2  s.t. A'y + s - Qx = c, s >= 0`.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::null_space::NullBasis;
use crate::sparse::{Triplet, TripletMatrix};

/// Relative tolerance of the semidefinite check on `Q`.
pub const PSD_RTOL: f64 = 1e-10;

/// A linearly constrained quadratic problem in standard form.
///
/// `A` and `Q` are kept as triplets (the lower triangle for `Q`) together with
/// dense copies used by the desk-scale linear algebra.
#[derive(Debug, Clone)]
pub struct LcqoProblem {
    a: TripletMatrix,
    q: TripletMatrix,
    b: DVector<f64>,
    c: DVector<f64>,
    a_dense: DMatrix<f64>,
    q_dense: DMatrix<f64>,
}

impl PartialEq for LcqoProblem {
    fn eq(&self, other: &Self) -> bool {
        self.a_dense == other.a_dense
            && self.q_dense == other.q_dense
            && self.b == other.b
            && self.c == other.c
    }
}

impl LcqoProblem {
    /// Structural construction: shapes, in-range unique triplets, lower-triangle `Q`.
    /// Rank and semidefiniteness are checked by [`validate_and_preprocess`].
    pub fn new(
        a: TripletMatrix,
        b: DVector<f64>,
        c: DVector<f64>,
        q_lower: TripletMatrix,
    ) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        if b.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "b has length {}, A has {m} rows",
                b.len()
            )));
        }
        if c.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "c has length {}, A has {n} columns",
                c.len()
            )));
        }
        if q_lower.rows() != n || q_lower.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Q is {}x{}, expected {n}x{n}",
                q_lower.rows(),
                q_lower.cols()
            )));
        }
        if let Some(t) = q_lower.entries().iter().find(|t| t.0 < t.1) {
            return Err(Error::Format(format!(
                "Q entry ({}, {}) lies above the diagonal; store the lower triangle",
                t.0, t.1
            )));
        }
        if b.iter().chain(c.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Format("b and c must be finite".into()));
        }
        let a_dense = a.to_dense();
        let q_dense = q_lower.to_dense_symmetric();
        Ok(Self {
            a,
            q: q_lower,
            b,
            c,
            a_dense,
            q_dense,
        })
    }

    /// Builds a problem from dense data. `q` must be exactly symmetric.
    pub fn from_dense(
        a: DMatrix<f64>,
        b: DVector<f64>,
        c: DVector<f64>,
        q: DMatrix<f64>,
    ) -> Result<Self> {
        if q.nrows() != q.ncols() {
            return Err(Error::DimensionMismatch("Q must be square".into()));
        }
        if q != q.transpose() {
            return Err(Error::Format("Q is not exactly symmetric".into()));
        }
        Self::new(
            TripletMatrix::from_dense(&a),
            b,
            c,
            TripletMatrix::lower_from_dense(&q),
        )
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a_dense
    }

    /// Full symmetric `Q`.
    pub fn q(&self) -> &DMatrix<f64> {
        &self.q_dense
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn a_triplets(&self) -> &TripletMatrix {
        &self.a
    }

    pub fn q_lower_triplets(&self) -> &TripletMatrix {
        &self.q
    }

    /// Primal objective `c'x + x'Qx/2`.
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        self.c.dot(x) + 0.5 * x.dot(&(&self.q_dense * x))
    }

    /// Indices of all-zero columns of `A`.
    pub fn zero_columns(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&j| self.a_dense.column(j).iter().all(|&v| v == 0.0))
            .collect()
    }

    fn check_point_dims(&self, point: &PrimalDualPoint) -> Result<()> {
        let (m, n) = (self.m(), self.n());
        if point.x.len() != n || point.s.len() != n || point.y.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "point has (x, y, s) lengths ({}, {}, {}), problem needs ({n}, {m}, {n})",
                point.x.len(),
                point.y.len(),
                point.s.len()
            )));
        }
        Ok(())
    }

    /// Scaled infinity-norm feasibility errors `(||r_p||/(1+||b||), ||r_d||/(1+||c||))`.
    pub fn feasibility_errors(&self, point: &PrimalDualPoint) -> Result<(f64, f64)> {
        let (rp, rd) = residuals(self, point)?;
        Ok((
            linalg::inf_norm(&rp) / (1.0 + linalg::inf_norm(&self.b)),
            linalg::inf_norm(&rd) / (1.0 + linalg::inf_norm(&self.c)),
        ))
    }
}

/// A primal-dual iterate `(x, y, s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalDualPoint {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub s: DVector<f64>,
}

impl PrimalDualPoint {
    pub fn new(x: DVector<f64>, y: DVector<f64>, s: DVector<f64>) -> Self {
        Self { x, y, s }
    }

    /// `x > 0` and `s > 0` componentwise (and all entries finite).
    pub fn is_interior(&self) -> bool {
        self.x.iter().chain(self.s.iter()).all(|&v| v > 0.0 && v.is_finite())
            && self.y.iter().all(|v| v.is_finite())
    }

    pub fn gap(&self) -> f64 {
        self.x.dot(&self.s)
    }

    pub fn mu(&self) -> f64 {
        self.gap() / self.x.len() as f64
    }

    /// `max_i (x_i^2 + s_i^2)`.
    pub fn max_square_sum(&self) -> f64 {
        self.x
            .iter()
            .zip(self.s.iter())
            .map(|(x, s)| x * x + s * s)
            .fold(0.0, f64::max)
    }

    pub(crate) fn require_interior(&self) -> Result<()> {
        if self.x.len() != self.s.len() {
            return Err(Error::DimensionMismatch("x and s differ in length".into()));
        }
        if let Some(i) = (0..self.x.len()).find(|&i| !(self.x[i] > 0.0 && self.s[i] > 0.0)) {
            return Err(Error::NonInterior(format!(
                "x[{i}] = {:e}, s[{i}] = {:e}",
                self.x[i], self.s[i]
            )));
        }
        Ok(())
    }
}

/// Position of an interior point relative to the central path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralPathMetrics {
    pub mu: f64,
    pub gap: f64,
    /// `||XSe - mu e||_2`
    pub neighborhood_distance: f64,
    /// Largest entry over all `x_i` and `s_i`.
    pub omega: f64,
    /// `(XSe - mu e) / (theta mu)`
    pub e_diag: DVector<f64>,
    pub in_neighborhood: bool,
}

impl CentralPathMetrics {
    pub fn relative_distance(&self) -> f64 {
        self.neighborhood_distance / self.mu
    }
}

/// Primal and dual residuals `r_p = b - Ax`, `r_d = c - A'y - s + Qx`.
pub fn residuals(
    problem: &LcqoProblem,
    point: &PrimalDualPoint,
) -> Result<(DVector<f64>, DVector<f64>)> {
    problem.check_point_dims(point)?;
    let rp = problem.b() - problem.a() * &point.x;
    let rd = problem.c() - problem.a().tr_mul(&point.y) - &point.s + problem.q() * &point.x;
    Ok((rp, rd))
}

pub fn central_path_metrics(point: &PrimalDualPoint, theta: f64) -> Result<CentralPathMetrics> {
    point.require_interior()?;
    if !(theta > 0.0) {
        return Err(Error::InvalidConfig(format!("theta must be positive, got {theta}")));
    }
    let xs = point.x.component_mul(&point.s);
    let gap = xs.sum();
    let mu = gap / xs.len() as f64;
    let dev = xs.add_scalar(-mu);
    let neighborhood_distance = dev.norm();
    let omega = point
        .x
        .iter()
        .chain(point.s.iter())
        .copied()
        .fold(0.0, f64::max);
    Ok(CentralPathMetrics {
        mu,
        gap,
        neighborhood_distance,
        omega,
        e_diag: dev / (theta * mu),
        in_neighborhood: neighborhood_distance <= theta * mu,
    })
}

/// Where a column of a preprocessed problem came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ColumnOrigin {
    Original(usize),
    /// Auxiliary copy introduced for an all-zero column.
    Auxiliary { of: usize },
}

/// Result of [`validate_and_preprocess`].
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub problem: LcqoProblem,
    /// One entry per column of the new problem. Original columns keep their
    /// position; auxiliary columns are appended in increasing order of the
    /// zero column they replace.
    pub columns: Vec<ColumnOrigin>,
    original_n: usize,
    original_m: usize,
}

impl Preprocessed {
    pub fn eliminated(&self) -> impl Iterator<Item = usize> + '_ {
        self.columns.iter().filter_map(|c| match c {
            ColumnOrigin::Auxiliary { of } => Some(*of),
            ColumnOrigin::Original(_) => None,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.columns.len() == self.original_n
    }

    /// Maps an interior feasible point of the original problem into the
    /// rewritten one. Each auxiliary pair `x_j - x_aux = 0` gets multiplier
    /// `s_j / 2`, which keeps both slacks positive.
    pub fn lift_point(&self, point: &PrimalDualPoint) -> Result<PrimalDualPoint> {
        if point.x.len() != self.original_n || point.y.len() != self.original_m {
            return Err(Error::DimensionMismatch(
                "point does not match the original problem".into(),
            ));
        }
        let extra = self.columns.len() - self.original_n;
        let mut x = point.x.clone().resize_vertically(self.columns.len(), 0.0);
        let mut s = point.s.clone().resize_vertically(self.columns.len(), 0.0);
        let mut y = point.y.clone().resize_vertically(self.original_m + extra, 0.0);
        for (k, of) in self.eliminated().collect::<Vec<_>>().into_iter().enumerate() {
            let aux = self.original_n + k;
            let mult = 0.5 * point.s[of];
            x[aux] = point.x[of];
            y[self.original_m + k] = mult;
            s[of] = point.s[of] - mult;
            s[aux] = mult;
        }
        Ok(PrimalDualPoint { x, y, s })
    }

    /// Drops auxiliary variables and rows. The returned `s` is the original
    /// dual slack `c - A'y + Qx` restricted to original columns.
    pub fn restrict_point(&self, point: &PrimalDualPoint) -> PrimalDualPoint {
        let x = point.x.rows(0, self.original_n).into_owned();
        let y = point.y.rows(0, self.original_m).into_owned();
        let mut s = point.s.rows(0, self.original_n).into_owned();
        for (k, of) in self.eliminated().collect::<Vec<_>>().into_iter().enumerate() {
            s[of] += point.y[self.original_m + k];
        }
        PrimalDualPoint { x, y, s }
    }
}

/// Eliminates all-zero columns of `A` and verifies the structural invariants.
///
/// Every zero column `j` gets an auxiliary variable `x_aux >= 0` and a new row
/// `x_j - x_aux = 0`; the auxiliary variable carries no cost and no curvature.
pub fn validate_and_preprocess(problem: &LcqoProblem) -> Result<Preprocessed> {
    let (m, n) = (problem.m(), problem.n());
    if m > n {
        return Err(Error::DimensionMismatch(format!(
            "more constraints ({m}) than variables ({n})"
        )));
    }
    let rank = linalg::numerical_rank(problem.a());
    if rank < m {
        return Err(Error::RankDeficient { rank, m });
    }
    if !linalg::is_psd(problem.q(), PSD_RTOL) {
        return Err(Error::NotPsd {
            tolerance: PSD_RTOL * problem.q().norm(),
        });
    }

    let zero_cols = problem.zero_columns();
    let mut columns: Vec<ColumnOrigin> = (0..n).map(ColumnOrigin::Original).collect();
    if zero_cols.is_empty() {
        return Ok(Preprocessed {
            problem: problem.clone(),
            columns,
            original_n: n,
            original_m: m,
        });
    }

    let k = zero_cols.len();
    let (new_m, new_n) = (m + k, n + k);
    let mut a: Vec<Triplet> = problem.a_triplets().entries().to_vec();
    for (r, &j) in zero_cols.iter().enumerate() {
        a.push(Triplet(m + r, j, 1.0));
        a.push(Triplet(m + r, n + r, -1.0));
        columns.push(ColumnOrigin::Auxiliary { of: j });
    }
    let a = TripletMatrix::new(new_m, new_n, a)?;
    let q = TripletMatrix::new(new_n, new_n, problem.q_lower_triplets().entries().to_vec())?;
    let b = problem.b().clone().resize_vertically(new_m, 0.0);
    let c = problem.c().clone().resize_vertically(new_n, 0.0);
    Ok(Preprocessed {
        problem: LcqoProblem::new(a, b, c, q)?,
        columns,
        original_n: n,
        original_m: m,
    })
}

/// Largest admissible neighborhood radius:
/// `min{ 1/(3 sqrt(n)), 1/(4 ||Q V V'||_F + 1) }`.
pub fn theta_max(problem: &LcqoProblem, basis: &NullBasis) -> f64 {
    let n = problem.n() as f64;
    let v = basis.to_dense();
    let qvvt = problem.q() * &v * v.transpose();
    (1.0 / (3.0 * n.sqrt())).min(1.0 / (4.0 * qvvt.norm() + 1.0))
}

/// On-disk problem layout: `{"m", "n", "A": [[i, j, v], ...], "b", "c", "Q": [...]}`
/// with `Q` given as its lower triangle and 0-based indices. An optional
/// `start` holds an interior feasible point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Triplet>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    #[serde(rename = "Q")]
    pub q: Vec<Triplet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<StartFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StartFile {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
}

impl From<&PrimalDualPoint> for StartFile {
    fn from(p: &PrimalDualPoint) -> Self {
        Self {
            x: p.x.iter().copied().collect(),
            y: p.y.iter().copied().collect(),
            s: p.s.iter().copied().collect(),
        }
    }
}

impl From<StartFile> for PrimalDualPoint {
    fn from(f: StartFile) -> Self {
        PrimalDualPoint::new(
            DVector::from_vec(f.x),
            DVector::from_vec(f.y),
            DVector::from_vec(f.s),
        )
    }
}

impl ProblemFile {
    pub fn from_problem(problem: &LcqoProblem, start: Option<&PrimalDualPoint>) -> Self {
        Self {
            m: problem.m(),
            n: problem.n(),
            a: problem.a_triplets().entries().to_vec(),
            b: problem.b().iter().copied().collect(),
            c: problem.c().iter().copied().collect(),
            q: problem.q_lower_triplets().entries().to_vec(),
            start: start.map(StartFile::from),
        }
    }

    pub fn into_parts(self) -> Result<(LcqoProblem, Option<PrimalDualPoint>)> {
        let a = TripletMatrix::new(self.m, self.n, self.a)?;
        let q = TripletMatrix::new(self.n, self.n, self.q)?;
        let problem = LcqoProblem::new(a, DVector::from_vec(self.b), DVector::from_vec(self.c), q)?;
        Ok((problem, self.start.map(PrimalDualPoint::from)))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}
