//! Ordinary kriging with the separable power-exponential correlation
//! `c(p, q) = exp(-Σ_n β_n |q_n - p_n|^α_n)`.
//!
//! A fitted [`KrigingModel`] keeps the inverse correlation matrix `W`, the
//! constant trend `γ = 1ᵀWΦ / 1ᵀW1` and the crisp coefficients
//! `Λ = W(Φ - γ1)`, so that a prediction reads `γ + Σ_a c(p, p⁽ᵃ⁾) Λ_a`.
//! One model is fitted per sample of the response grid.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::nelder_mead;

/// Input/output examples: `S` parameter vectors and the response of each on
/// a common grid of `K` samples.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    n_params: usize,
    /// Row-major `S × N`.
    inputs: Vec<f64>,
    /// `S × K`, one column per grid sample.
    outputs: DMatrix<f64>,
    theta_grid: Vec<f64>,
}

impl TrainingSet {
    pub fn new(inputs: Vec<Vec<f64>>, outputs: Vec<Vec<f64>>, theta_grid: Vec<f64>) -> Result<Self> {
        let s = inputs.len();
        if s == 0 {
            return Err(Error::InvalidArgument("training set is empty".into()));
        }
        let k = theta_grid.len();
        if k == 0 {
            return Err(Error::InvalidArgument("response grid is empty".into()));
        }
        if outputs.len() != s {
            return Err(Error::DimensionMismatch { what: "output rows", expected: s, got: outputs.len() });
        }
        let n = inputs[0].len();
        if n == 0 {
            return Err(Error::InvalidArgument("training inputs have no parameters".into()));
        }
        let mut flat = Vec::with_capacity(s * n);
        for row in &inputs {
            if row.len() != n {
                return Err(Error::DimensionMismatch { what: "input row length", expected: n, got: row.len() });
            }
            flat.extend_from_slice(row);
        }
        let mut out = DMatrix::zeros(s, k);
        for (i, row) in outputs.iter().enumerate() {
            if row.len() != k {
                return Err(Error::DimensionMismatch { what: "output row length", expected: k, got: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        if flat.iter().chain(out.iter()).chain(&theta_grid).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("training set contains non-finite values".into()));
        }
        if let Some((a, b)) = first_duplicate(&flat, n) {
            return Err(Error::DuplicateInput { first: a, second: b });
        }
        Ok(TrainingSet { n_params: n, inputs: flat, outputs: out, theta_grid })
    }

    pub fn n_samples(&self) -> usize {
        self.outputs.nrows()
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn n_theta(&self) -> usize {
        self.theta_grid.len()
    }

    pub fn theta_grid(&self) -> &[f64] {
        &self.theta_grid
    }

    pub fn input(&self, s: usize) -> &[f64] {
        &self.inputs[s * self.n_params..(s + 1) * self.n_params]
    }

    pub fn inputs(&self) -> Vec<Vec<f64>> {
        self.inputs.chunks(self.n_params).map(<[f64]>::to_vec).collect()
    }

    /// Training responses at grid sample `k`.
    pub fn outputs_at(&self, k: usize) -> Vec<f64> {
        self.outputs.column(k).iter().copied().collect()
    }

    pub fn output(&self, s: usize, k: usize) -> f64 {
        self.outputs[(s, k)]
    }

    pub(crate) fn flat_inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub(crate) fn output_matrix(&self) -> &DMatrix<f64> {
        &self.outputs
    }
}

fn first_duplicate(flat: &[f64], n: usize) -> Option<(usize, usize)> {
    let rows: Vec<&[f64]> = flat.chunks(n).collect();
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| {
        rows[a]
            .iter()
            .zip(rows[b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    order.windows(2).find_map(|w| (rows[w[0]] == rows[w[1]]).then(|| (w[0].min(w[1]), w[0].max(w[1]))))
}

/// `Σ_n β_n |train_n - p_n|^α_n`, summed in parameter order.
#[inline]
pub(crate) fn exponent(p: &[f64], train: &[f64], alpha: &[f64], beta: &[f64]) -> f64 {
    let mut acc = 0.0;
    for n in 0..p.len() {
        acc += beta[n] * (train[n] - p[n]).abs().powf(alpha[n]);
    }
    acc
}

/// Correlation between an arbitrary input `p` and a training input `train`.
pub fn correlation(p: &[f64], train: &[f64], alpha: &[f64], beta: &[f64]) -> f64 {
    (-exponent(p, train, alpha, beta)).exp()
}

/// Correlation hyper-parameters, one exponent and one scale per input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl HyperParams {
    fn validate(&self, n: usize) -> Result<()> {
        for (what, v) in [("alpha", &self.alpha), ("beta", &self.beta)] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    what: if what == "alpha" { "alpha length" } else { "beta length" },
                    expected: n,
                    got: v.len(),
                });
            }
        }
        if self.alpha.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidArgument("alpha must be positive and finite".into()));
        }
        if self.beta.iter().any(|&b| !(b >= 0.0) || !b.is_finite()) {
            return Err(Error::InvalidArgument("beta must be non-negative and finite".into()));
        }
        Ok(())
    }
}

/// Factorised correlation matrix shared by every response column fitted
/// with the same hyper-parameters.
#[derive(Debug)]
struct Factor {
    weights: DMatrix<f64>,
    /// `W·1`
    row_sums: DVector<f64>,
    total: f64,
    log_det: f64,
}

fn correlation_matrix(inputs: &[f64], n: usize, hyper: &HyperParams, nugget: f64) -> DMatrix<f64> {
    let s = inputs.len() / n;
    let mut c = DMatrix::zeros(s, s);
    for a in 0..s {
        c[(a, a)] = 1.0 + nugget;
        for b in 0..a {
            let v = correlation(&inputs[a * n..(a + 1) * n], &inputs[b * n..(b + 1) * n], &hyper.alpha, &hyper.beta);
            c[(a, b)] = v;
            c[(b, a)] = v;
        }
    }
    c
}

fn factor(inputs: &[f64], n: usize, hyper: &HyperParams, nugget: f64) -> Result<Factor> {
    let c = correlation_matrix(inputs, n, hyper, nugget);
    let chol = c.cholesky().ok_or(Error::SingularCorrelation { rcond: 0.0 })?;
    let diag = chol.l_dirty().diagonal();
    let (dmin, dmax) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    let rcond = (dmin / dmax).powi(2);
    if !(rcond > f64::EPSILON) {
        return Err(Error::SingularCorrelation { rcond });
    }
    let log_det = 2.0 * diag.iter().map(|d| d.ln()).sum::<f64>();
    let weights = chol.inverse();
    let row_sums = weights.column_sum();
    let total = row_sums.sum();
    if !(total.abs() > 0.0) || !total.is_finite() {
        return Err(Error::SingularCorrelation { rcond });
    }
    Ok(Factor { weights, row_sums, total, log_det })
}

/// A fitted ordinary-kriging predictor for one response sample.
#[derive(Debug, Clone)]
pub struct KrigingModel {
    n_params: usize,
    inputs: Arc<Vec<f64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    weights: Arc<DMatrix<f64>>,
    gamma: f64,
    lambda: Vec<f64>,
}

impl KrigingModel {
    fn from_factor(
        inputs: Arc<Vec<f64>>,
        n: usize,
        hyper: &HyperParams,
        f: &Arc<Factor>,
        weights: &Arc<DMatrix<f64>>,
        y: &DVector<f64>,
    ) -> Self {
        let wy = &f.weights * y;
        let gamma = f.row_sums.dot(y) / f.total;
        let lambda: Vec<f64> = wy.iter().zip(f.row_sums.iter()).map(|(a, u)| a - gamma * u).collect();
        KrigingModel {
            n_params: n,
            inputs,
            alpha: hyper.alpha.clone(),
            beta: hyper.beta.clone(),
            weights: Arc::clone(weights),
            gamma,
            lambda,
        }
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn n_samples(&self) -> usize {
        self.lambda.len()
    }

    pub fn training_input(&self, a: usize) -> &[f64] {
        &self.inputs[a * self.n_params..(a + 1) * self.n_params]
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// Inverse of the training correlation matrix.
    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    /// Constant trend term.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Crisp coefficients `Λ_a = Σ_b w_ab (Φ_b - γ)`.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Correlations of `p` with every training input.
    pub fn correlations(&self, p: &[f64]) -> Vec<f64> {
        (0..self.n_samples()).map(|a| correlation(p, self.training_input(a), &self.alpha, &self.beta)).collect()
    }

    /// Prediction from precomputed correlations (see [`Self::correlations`]).
    pub fn predict_with(&self, corr: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, l) in corr.iter().zip(&self.lambda) {
            acc += c * l;
        }
        self.gamma + acc
    }

    pub fn predict(&self, p: &[f64]) -> f64 {
        self.predict_with(&self.correlations(p))
    }

    /// `true` when both models were fitted on the same inputs with the
    /// same hyper-parameters, so their correlation vectors coincide.
    pub fn shares_kernel_with(&self, other: &KrigingModel) -> bool {
        Arc::ptr_eq(&self.weights, &other.weights)
            || (self.inputs == other.inputs && self.alpha == other.alpha && self.beta == other.beta)
    }
}

/// Fits a single model to one response column.
pub fn fit(inputs: &[Vec<f64>], outputs: &[f64], hyper: &HyperParams, nugget: f64) -> Result<KrigingModel> {
    let ts = TrainingSet::new(inputs.to_vec(), outputs.iter().map(|&v| vec![v]).collect(), vec![0.0])?;
    let mut models = fit_columns(&ts, &[0], hyper, nugget)?;
    Ok(models.pop().expect("one column requested"))
}

/// Fits the selected response columns with one shared factorisation.
fn fit_columns(ts: &TrainingSet, columns: &[usize], hyper: &HyperParams, nugget: f64) -> Result<Vec<KrigingModel>> {
    if !(nugget >= 0.0) {
        return Err(Error::InvalidArgument("nugget must be non-negative".into()));
    }
    let n = ts.n_params();
    hyper.validate(n)?;
    let f = Arc::new(factor(ts.flat_inputs(), n, hyper, nugget)?);
    let inputs = Arc::new(ts.flat_inputs().to_vec());
    let weights = Arc::new(f.weights.clone());
    Ok(columns
        .iter()
        .map(|&k| {
            let y = DVector::from_iterator(ts.n_samples(), ts.output_matrix().column(k).iter().copied());
            KrigingModel::from_factor(Arc::clone(&inputs), n, hyper, &f, &weights, &y)
        })
        .collect())
}

/// Criterion minimised when choosing `β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Negative concentrated Gaussian log-likelihood.
    Likelihood,
    /// Mean squared leave-one-out residual.
    LeaveOneOut,
}

/// Units in which the `β` search box is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaUnits {
    /// Bounds apply to `β` itself.
    Raw,
    /// Bounds apply to `β_n · sd_n²`, with `sd_n` the sample standard
    /// deviation of training input `n` (a unit-free correlation scale).
    Standardized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaSearch {
    pub lo: f64,
    pub hi: f64,
    pub units: BetaUnits,
    pub objective: Objective,
    /// Objective evaluations across all starts.
    pub budget: usize,
    pub starts: usize,
}

impl Default for BetaSearch {
    fn default() -> Self {
        BetaSearch {
            lo: 1e-3,
            hi: 1e3,
            units: BetaUnits::Raw,
            objective: Objective::Likelihood,
            budget: 200,
            starts: 5,
        }
    }
}

impl BetaSearch {
    /// Search box used by the interval-bounds pipeline: the scale is kept at
    /// or above 2 in standardized units, i.e. the correlation length never
    /// exceeds about 0.7 sample standard deviations. Without the floor the
    /// likelihood drives smooth responses into the near-flat kernel regime,
    /// where `Λ` grows without bound and the interval extension is useless.
    pub fn interval_calibrated() -> Self {
        BetaSearch { lo: 2.0, hi: 1e3, units: BetaUnits::Standardized, ..BetaSearch::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaStrategy {
    Fixed(Vec<f64>),
    Optimize(BetaSearch),
}

/// Whether `β` is tuned separately for every response sample or once for
/// the whole grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaMode {
    PerSample,
    Shared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrigingConfig {
    pub alpha: f64,
    pub beta: BetaStrategy,
    pub mode: BetaMode,
    pub nugget: f64,
}

impl Default for KrigingConfig {
    fn default() -> Self {
        KrigingConfig {
            alpha: 2.0,
            beta: BetaStrategy::Optimize(BetaSearch::default()),
            mode: BetaMode::PerSample,
            nugget: 1e-10,
        }
    }
}

/// Response columns that carry information about `β`; constant columns
/// are dropped.
fn informative_columns(ts: &TrainingSet, columns: &[usize]) -> DMatrix<f64> {
    let keep: Vec<usize> =
        columns.iter().copied().filter(|&k| !is_constant(ts.output_matrix().column(k).as_slice())).collect();
    DMatrix::from_fn(ts.n_samples(), keep.len(), |i, j| ts.output_matrix()[(i, keep[j])])
}

/// Objective value for `β` summed over the columns of `y`.
fn objective_value(ts: &TrainingSet, y: &DMatrix<f64>, hyper: &HyperParams, nugget: f64, objective: Objective) -> f64 {
    let f = match factor(ts.flat_inputs(), ts.n_params(), hyper, nugget) {
        Ok(f) => f,
        Err(_) => return f64::INFINITY,
    };
    let s = ts.n_samples() as f64;
    let wy = &f.weights * y;
    let mut total = 0.0;
    for (j, col) in y.column_iter().enumerate() {
        let gamma = f.row_sums.dot(&col) / f.total;
        let lambda = wy.column(j) - &f.row_sums * gamma;
        match objective {
            Objective::Likelihood => {
                let sigma2 = col.add_scalar(-gamma).dot(&lambda) / s;
                if !(sigma2 > 0.0) {
                    return f64::INFINITY;
                }
                total += 0.5 * s * sigma2.ln() + 0.5 * f.log_det;
            }
            Objective::LeaveOneOut => {
                let mut sse = 0.0;
                for a in 0..ts.n_samples() {
                    let q = f.weights[(a, a)] - f.row_sums[a].powi(2) / f.total;
                    if !(q > 0.0) {
                        return f64::INFINITY;
                    }
                    sse += (lambda[a] / q).powi(2);
                }
                total += sse / s;
            }
        }
    }
    total
}

fn is_constant(y: &[f64]) -> bool {
    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    hi - lo <= 1e-12 * scale
}

/// Per-input scale turning standardized `β` into raw `β`.
fn beta_scales(ts: &TrainingSet, units: BetaUnits) -> Vec<f64> {
    let n = ts.n_params();
    let s = ts.n_samples();
    (0..n)
        .map(|j| match units {
            BetaUnits::Raw => 1.0,
            BetaUnits::Standardized => {
                if s < 2 {
                    return 1.0;
                }
                let col = (0..s).map(|i| ts.input(i)[j]);
                let mean = col.clone().sum::<f64>() / s as f64;
                let var = col.map(|v| (v - mean).powi(2)).sum::<f64>() / (s - 1) as f64;
                if var > 0.0 {
                    1.0 / var
                } else {
                    1.0
                }
            }
        })
        .collect()
}

/// Searches `β` (raw units returned) for the given response columns with a
/// deterministic multi-start Nelder-Mead in `ln β`.
pub fn optimize_beta_columns(
    ts: &TrainingSet,
    columns: &[usize],
    alpha: &[f64],
    search: &BetaSearch,
    nugget: f64,
) -> Result<Vec<f64>> {
    if !(search.lo > 0.0) || !(search.hi >= search.lo) || !search.hi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "beta bounds must satisfy 0 < lo <= hi < inf, got [{}, {}]",
            search.lo, search.hi
        )));
    }
    let n = ts.n_params();
    let scales = beta_scales(ts, search.units);
    let (llo, lhi) = (search.lo.ln(), search.hi.ln());
    let to_raw = |x: &[f64]| -> Vec<f64> { x.iter().zip(&scales).map(|(v, s)| v.exp() * s).collect() };
    let y = informative_columns(ts, columns);
    let eval = |x: &[f64]| -> f64 {
        let hyper = HyperParams { alpha: alpha.to_vec(), beta: to_raw(x) };
        objective_value(ts, &y, &hyper, nugget, search.objective)
    };

    let starts = search.starts.max(1);
    let per_start = (search.budget / starts).max(n + 2);
    let step = 0.1 * (lhi - llo).max(1e-3);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for i in 0..starts {
        let t = (i as f64 + 0.5) / starts as f64;
        let x0 = vec![llo + t * (lhi - llo); n];
        let (x, v) = nelder_mead(eval, &x0, &vec![llo; n], &vec![lhi; n], step, per_start);
        if v.is_finite() && best.as_ref().is_none_or(|(_, bv)| v < *bv) {
            best = Some((x, v));
        }
    }
    let (x, _) = best.ok_or(Error::NoFeasibleBeta)?;
    Ok(to_raw(&x))
}

/// Searches `β` for a single response column.
pub fn optimize_beta(
    inputs: &[Vec<f64>],
    outputs: &[f64],
    alpha: &[f64],
    search: &BetaSearch,
    nugget: f64,
) -> Result<Vec<f64>> {
    let ts = TrainingSet::new(inputs.to_vec(), outputs.iter().map(|&v| vec![v]).collect(), vec![0.0])?;
    optimize_beta_columns(&ts, &[0], alpha, search, nugget)
}

/// Evaluates the search objective at a given raw `β` (exposed so callers
/// can compare candidates).
pub fn beta_objective(
    inputs: &[Vec<f64>],
    outputs: &[f64],
    alpha: &[f64],
    beta: &[f64],
    nugget: f64,
    objective: Objective,
) -> Result<f64> {
    let ts = TrainingSet::new(inputs.to_vec(), outputs.iter().map(|&v| vec![v]).collect(), vec![0.0])?;
    let hyper = HyperParams { alpha: alpha.to_vec(), beta: beta.to_vec() };
    hyper.validate(ts.n_params())?;
    Ok(objective_value(&ts, &informative_columns(&ts, &[0]), &hyper, nugget, objective))
}

/// Leave-one-out residuals of an ordinary-kriging fit (exact closed form
/// with the trend re-estimated on each held-out set).
pub fn loo_residuals(model: &KrigingModel) -> Vec<f64> {
    let w = model.weights();
    let u = w.column_sum();
    let total = u.sum();
    model.lambda().iter().enumerate().map(|(a, l)| l / (w[(a, a)] - u[a] * u[a] / total)).collect()
}

/// Fits one model per response sample.
pub fn train_all(ts: &TrainingSet, config: &KrigingConfig) -> Result<Vec<KrigingModel>> {
    let n = ts.n_params();
    let alpha = vec![config.alpha; n];
    let all: Vec<usize> = (0..ts.n_theta()).collect();
    let choose = |columns: &[usize]| -> Result<Vec<f64>> {
        match &config.beta {
            BetaStrategy::Fixed(b) => Ok(b.clone()),
            BetaStrategy::Optimize(search) => {
                if ts.n_samples() < 2 {
                    // one sample carries no correlation information
                    return Ok(vec![search.lo.max(f64::MIN_POSITIVE); n]);
                }
                optimize_beta_columns(ts, columns, &alpha, search, config.nugget)
            }
        }
    };
    match config.mode {
        BetaMode::Shared => {
            let beta = choose(&all)?;
            let hyper = HyperParams { alpha: alpha.clone(), beta };
            fit_columns(ts, &all, &hyper, config.nugget).map_err(|e| Error::FitAtSample { k: 0, source: Box::new(e) })
        }
        BetaMode::PerSample => all
            .par_iter()
            .map(|&k| {
                let wrap = |e| Error::FitAtSample { k, source: Box::new(e) };
                let beta = choose(&[k]).map_err(wrap)?;
                let hyper = HyperParams { alpha: alpha.clone(), beta };
                fit_columns(ts, &[k], &hyper, config.nugget).map(|mut m| m.pop().expect("one column")).map_err(wrap)
            })
            .collect(),
    }
}
