//! Soft-margin linear SVM training as a standard-form LCQO.
//!
//! ```text
//! min  1/2 ||w||^2 + C ||xi||_1
//! s.t. zeta_i (<w, phi_i> + t) + xi_i - rho_i = 1,   xi, rho >= 0
//! ```
//!
//! with `w = w+ - w-` and `t = t+ - t-` split into nonnegative parts. A small
//! `eps_reg` on the diagonal of the split block keeps the dual interior
//! nonempty; without it every dual feasible point has `s_{w+} = -s_{w-}`.

use std::fs;
use std::ops::Range;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::driver::{solve, Centering, SolveResult};
use crate::error::{Error, Result};
use crate::problem::{LcqoProblem, PrimalDualPoint};
use crate::sparse::{Triplet, TripletMatrix};

pub const DEFAULT_EPS_REG: f64 = 1e-6;

/// Labeled points; row `i` of `features` is `phi_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmDataset {
    features: DMatrix<f64>,
    labels: Vec<f64>,
}

impl SvmDataset {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        let n = points.len();
        let m = points.first().map_or(0, Vec::len);
        if n == 0 || m == 0 {
            return Err(Error::BadDims("dataset needs at least one point and one feature".into()));
        }
        if let Some(i) = points.iter().position(|p| p.len() != m) {
            return Err(Error::DimensionMismatch(format!(
                "point {i} has {} features, expected {m}",
                points[i].len()
            )));
        }
        if let Some(i) = labels.iter().position(|&l| l != 1.0 && l != -1.0) {
            return Err(Error::Label {
                line: i + 1,
                label: labels[i].to_string(),
            });
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Format("non-finite feature value".into()));
        }
        let features = DMatrix::from_fn(n, m, |i, j| points[i][j]);
        Ok(Self { features, labels })
    }

    /// Number of points.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Feature dimension.
    pub fn m(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn point(&self, i: usize) -> DVector<f64> {
        self.features.row(i).transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    /// `<label> <index>:<value> ...` with 1-based indices.
    Libsvm,
    /// Feature columns followed by a trailing label column.
    Csv { delimiter: char },
}

/// Parsing options. With `map_binary`, labels `0` and `1` become `-1` and `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    pub format: DatasetFormat,
    pub map_binary: bool,
}

impl ParseOptions {
    pub fn libsvm() -> Self {
        Self {
            format: DatasetFormat::Libsvm,
            map_binary: false,
        }
    }

    pub fn csv(delimiter: char) -> Self {
        Self {
            format: DatasetFormat::Csv { delimiter },
            map_binary: false,
        }
    }

    pub fn map_binary(mut self, on: bool) -> Self {
        self.map_binary = on;
        self
    }
}

fn parse_label(token: &str, line: usize, map_binary: bool) -> Result<f64> {
    let value: f64 = token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad label {token:?}"),
    })?;
    match value {
        v if v == 1.0 || v == -1.0 => Ok(v),
        v if map_binary && v == 0.0 => Ok(-1.0),
        _ => Err(Error::Label {
            line,
            label: token.to_string(),
        }),
    }
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    token
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            line,
            message: format!("bad number {token:?}"),
        })
}

pub fn parse_dataset_str(text: &str, options: ParseOptions) -> Result<SvmDataset> {
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut width = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        match options.format {
            DatasetFormat::Libsvm => {
                let mut tokens = raw.split_whitespace();
                let label = tokens.next().unwrap_or_default();
                labels.push(parse_label(label, line, options.map_binary)?);
                let mut last = 0;
                for tok in tokens {
                    let (i, v) = tok.split_once(':').ok_or_else(|| Error::Parse {
                        line,
                        message: format!("expected index:value, got {tok:?}"),
                    })?;
                    let i: usize = i.parse().ok().filter(|&i| i > last).ok_or_else(|| {
                        Error::Parse {
                            line,
                            message: format!("indices must be increasing and 1-based, got {i:?}"),
                        }
                    })?;
                    last = i;
                    row.push((i - 1, parse_number(v, line)?));
                    width = width.max(i);
                }
            }
            DatasetFormat::Csv { delimiter } => {
                let fields: Vec<&str> = raw.split(delimiter).collect();
                if fields.len() < 2 {
                    return Err(Error::Parse {
                        line,
                        message: "need at least one feature and a label".into(),
                    });
                }
                let (label, values) = fields.split_last().expect("two or more fields");
                if !rows.is_empty() && values.len() != width {
                    return Err(Error::Parse {
                        line,
                        message: format!("{} features, earlier rows have {width}", values.len()),
                    });
                }
                width = values.len();
                for (j, v) in values.iter().enumerate() {
                    row.push((j, parse_number(v, line)?));
                }
                labels.push(parse_label(label.trim(), line, options.map_binary)?);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "dataset is empty".into(),
        });
    }
    if width == 0 {
        return Err(Error::Parse {
            line: 0,
            message: "dataset has no features".into(),
        });
    }
    let points = rows
        .into_iter()
        .map(|row| {
            let mut dense = vec![0.0; width];
            for (j, v) in row {
                dense[j] = v;
            }
            dense
        })
        .collect();
    SvmDataset::new(points, labels)
}

pub fn parse_dataset(path: impl AsRef<Path>, options: ParseOptions) -> Result<SvmDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset_str(&text, options)
}

/// Where each SVM quantity lives in the LCQO variable vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableLayout {
    pub features: usize,
    pub points: usize,
    pub w_plus: Range<usize>,
    pub w_minus: Range<usize>,
    pub t_plus: usize,
    pub t_minus: usize,
    pub xi: Range<usize>,
    pub rho: Range<usize>,
}

impl VariableLayout {
    pub fn new(features: usize, points: usize) -> Self {
        let m = features;
        let n = points;
        Self {
            features,
            points,
            w_plus: 0..m,
            w_minus: m..2 * m,
            t_plus: 2 * m,
            t_minus: 2 * m + 1,
            xi: 2 * m + 2..2 * m + 2 + n,
            rho: 2 * m + 2 + n..2 * m + 2 + 2 * n,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.rho.end
    }
}

/// Builds the LCQO with `A = [Z Phi, -Z Phi, zeta, -zeta, I, -I]`, `b = e`,
/// `c = (0, C e, 0)` and `Q` holding `[[I, -I], [-I, I]]` on `(w+, w-)` plus
/// `eps_reg I` on `(w+, w-, t+, t-)`.
pub fn build_svm_lcqo(
    dataset: &SvmDataset,
    c: f64,
    eps_reg: f64,
) -> Result<(LcqoProblem, VariableLayout)> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::BadC(c));
    }
    if !(eps_reg >= 0.0 && eps_reg.is_finite()) {
        return Err(Error::InvalidConfig(format!("eps_reg must be nonnegative, got {eps_reg}")));
    }
    let (n, m) = (dataset.n(), dataset.m());
    let layout = VariableLayout::new(m, n);
    let nv = layout.n_vars();

    let mut a = Vec::new();
    for i in 0..n {
        let zeta = dataset.labels[i];
        for j in 0..m {
            let v = zeta * dataset.features[(i, j)];
            if v != 0.0 {
                a.push(Triplet(i, layout.w_plus.start + j, v));
                a.push(Triplet(i, layout.w_minus.start + j, -v));
            }
        }
        a.push(Triplet(i, layout.t_plus, zeta));
        a.push(Triplet(i, layout.t_minus, -zeta));
        a.push(Triplet(i, layout.xi.start + i, 1.0));
        a.push(Triplet(i, layout.rho.start + i, -1.0));
    }

    let mut q = Vec::new();
    for j in 0..m {
        let (p, mi) = (layout.w_plus.start + j, layout.w_minus.start + j);
        q.push(Triplet(p, p, 1.0 + eps_reg));
        q.push(Triplet(mi, mi, 1.0 + eps_reg));
        q.push(Triplet(mi, p, -1.0));
    }
    if eps_reg > 0.0 {
        q.push(Triplet(layout.t_plus, layout.t_plus, eps_reg));
        q.push(Triplet(layout.t_minus, layout.t_minus, eps_reg));
    }

    let mut cost = DVector::zeros(nv);
    cost.rows_mut(layout.xi.start, n).fill(c);
    let problem = LcqoProblem::new(
        TripletMatrix::new(n, nv, a)?,
        DVector::from_element(n, 1.0),
        cost,
        TripletMatrix::new(nv, nv, q)?,
    )?;
    Ok((problem, layout))
}

/// Strictly feasible interior start: `w+ = w- = v e`, `t+ = t- = tau`,
/// `xi = 2e`, `rho = e`, `y = (C/2) e`.
///
/// With `g = Phi' Z y`, the slacks are `s_{w+-} = eps_reg v -+ g`, so `v` is
/// the larger of `1.1 ||g||_inf / eps_reg` and `sqrt(C / eps_reg)` (the value
/// that makes `x_i s_i = C` when `g = 0`). `tau` is chosen the same way from
/// `zeta' y`.
pub fn svm_initial_point(dataset: &SvmDataset, c: f64, eps_reg: f64) -> Result<PrimalDualPoint> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::BadC(c));
    }
    if !(eps_reg > 0.0) {
        return Err(Error::RegularizationRequired);
    }
    let (n, m) = (dataset.n(), dataset.m());
    let layout = VariableLayout::new(m, n);
    let y = DVector::from_element(n, c / 2.0);
    let zy = DVector::from_iterator(n, (0..n).map(|i| dataset.labels[i] * y[i]));
    let g = dataset.features.tr_mul(&zy);
    let zeta_y = zy.sum();
    let floor = (c / eps_reg).sqrt();
    let v = (1.1 * g.amax() / eps_reg).max(floor);
    let tau = (1.1 * zeta_y.abs() / eps_reg).max(floor);

    let mut x = DVector::zeros(layout.n_vars());
    let mut s = DVector::zeros(layout.n_vars());
    for j in 0..m {
        x[layout.w_plus.start + j] = v;
        x[layout.w_minus.start + j] = v;
        s[layout.w_plus.start + j] = eps_reg * v - g[j];
        s[layout.w_minus.start + j] = eps_reg * v + g[j];
    }
    x[layout.t_plus] = tau;
    x[layout.t_minus] = tau;
    s[layout.t_plus] = eps_reg * tau - zeta_y;
    s[layout.t_minus] = eps_reg * tau + zeta_y;
    x.rows_mut(layout.xi.start, n).fill(2.0);
    x.rows_mut(layout.rho.start, n).fill(1.0);
    s.rows_mut(layout.xi.start, n).fill(c / 2.0);
    s.rows_mut(layout.rho.start, n).fill(c / 2.0);
    Ok(PrimalDualPoint::new(x, y, s))
}

/// A trained linear classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub w: Vec<f64>,
    pub t: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub objective: f64,
}

impl SvmModel {
    /// `sign(<w, phi> + t)` with ties going to `+1`.
    pub fn predict(&self, phi: &[f64]) -> f64 {
        let score: f64 = self.w.iter().zip(phi).map(|(w, p)| w * p).sum::<f64>() + self.t;
        if score >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn accuracy(&self, dataset: &SvmDataset) -> Result<f64> {
        if self.w.len() != dataset.m() {
            return Err(Error::DimensionMismatch(format!(
                "model has {} weights, dataset has {} features",
                self.w.len(),
                dataset.m()
            )));
        }
        let correct = (0..dataset.n())
            .filter(|&i| {
                let phi: Vec<f64> = dataset.features.row(i).iter().copied().collect();
                self.predict(&phi) == dataset.labels[i]
            })
            .count();
        Ok(correct as f64 / dataset.n() as f64)
    }
}

/// `1/2 ||w||^2 + C sum_i max(0, 1 - zeta_i (<w, phi_i> + t))`
pub fn hinge_objective(w: &DVector<f64>, t: f64, c: f64, dataset: &SvmDataset) -> f64 {
    let margins = &dataset.features * w;
    let loss: f64 = (0..dataset.n())
        .map(|i| (1.0 - dataset.labels[i] * (margins[i] + t)).max(0.0))
        .sum();
    0.5 * w.norm_squared() + c * loss
}

/// Reads `(w, t)` off a solution and scores it on `dataset`. The reported
/// objective is `1/2 ||w||^2 + C ||xi||_1` with `xi` from the solution.
pub fn extract_and_evaluate(
    solution: &PrimalDualPoint,
    layout: &VariableLayout,
    dataset: &SvmDataset,
    c: f64,
) -> Result<(SvmModel, f64)> {
    if solution.x.len() != layout.n_vars()
        || layout.features != dataset.m()
        || layout.points != dataset.n()
    {
        return Err(Error::LayoutMismatch(format!(
            "solution has {} variables for a layout of {} ({} features, {} points), dataset is {} x {}",
            solution.x.len(),
            layout.n_vars(),
            layout.features,
            layout.points,
            dataset.n(),
            dataset.m()
        )));
    }
    let x = &solution.x;
    let w = x.rows_range(layout.w_plus.clone()) - x.rows_range(layout.w_minus.clone());
    let t = x[layout.t_plus] - x[layout.t_minus];
    let xi_sum: f64 = x.rows_range(layout.xi.clone()).sum();
    let model = SvmModel {
        w: w.iter().copied().collect(),
        t,
        c,
        objective: 0.5 * w.norm_squared() + c * xi_sum,
    };
    let accuracy = model.accuracy(dataset)?;
    Ok((model, accuracy))
}

/// Everything produced by [`train`].
#[derive(Debug, Clone)]
pub struct Training {
    pub model: SvmModel,
    pub accuracy: f64,
    pub problem: LcqoProblem,
    pub layout: VariableLayout,
    pub centering: Centering,
    pub result: SolveResult,
}

/// Build, start, center, solve and extract in one call.
pub fn train(
    dataset: &SvmDataset,
    c: f64,
    eps_reg: f64,
    config: &SolverConfig,
) -> Result<Training> {
    let (problem, layout) = build_svm_lcqo(dataset, c, eps_reg)?;
    let start = svm_initial_point(dataset, c, eps_reg)?;
    let (centering, result) = solve(&problem, &start, config)?;
    let (model, accuracy) = extract_and_evaluate(&result.point, &layout, dataset, c)?;
    Ok(Training {
        model,
        accuracy,
        problem,
        layout,
        centering,
        result,
    })
}
