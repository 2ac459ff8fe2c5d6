//! Interval extension of a fitted kriging predictor.
//!
//! For a parameter box `[p]` the distance term of training point `a` is
//! bounded per input as `|p_n⁽ᵃ⁾ - [p_n]|^α_n`, the exponent sum
//! `[Θ⁽ᵃ⁾] = Σ β_n [D_n⁽ᵃ⁾]` follows from the interval sum, and `exp(-·)` is
//! monotone. Each term `Λ_a exp(-Θ⁽ᵃ⁾)` is then bounded by pairing the sign of
//! `Λ_a` with the right `Θ` endpoint.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalVector};
use crate::kriging::KrigingModel;

/// Method that produced a bounds curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Interval extension of the kriging surrogate.
    IaLbe,
    /// Interval arithmetic applied to the closed-form response.
    IaE,
    /// Monte Carlo envelope.
    Mc,
}

/// Lower and upper response envelopes over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsCurve {
    pub theta_grid: Vec<f64>,
    pub inf: Vec<f64>,
    pub sup: Vec<f64>,
    pub provenance: Provenance,
}

impl BoundsCurve {
    pub fn new(theta_grid: Vec<f64>, inf: Vec<f64>, sup: Vec<f64>, provenance: Provenance) -> Result<Self> {
        let k = theta_grid.len();
        for (what, v) in [("inf envelope", &inf), ("sup envelope", &sup)] {
            if v.len() != k {
                return Err(Error::DimensionMismatch { what, expected: k, got: v.len() });
            }
        }
        if let Some(i) = inf.iter().zip(&sup).position(|(l, h)| !(l <= h)) {
            return Err(Error::InvalidArgument(format!(
                "bounds out of order at sample {i}: inf = {}, sup = {}",
                inf[i], sup[i]
            )));
        }
        Ok(BoundsCurve { theta_grid, inf, sup, provenance })
    }

    /// Zero-width curve.
    pub fn degenerate(theta_grid: Vec<f64>, values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        BoundsCurve::new(theta_grid, values.clone(), values, provenance)
    }

    pub fn len(&self) -> usize {
        self.theta_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta_grid.is_empty()
    }

    pub fn at(&self, k: usize) -> Interval {
        Interval::new(self.inf[k], self.sup[k]).expect("ordered at construction")
    }

    pub fn widths(&self) -> Vec<f64> {
        self.inf.iter().zip(&self.sup).map(|(l, h)| h - l).collect()
    }

    /// `true` when `values[k] ∈ [inf[k], sup[k]]` for every sample.
    pub fn contains_curve(&self, values: &[f64]) -> bool {
        values.len() == self.len() && values.iter().enumerate().all(|(k, &v)| self.inf[k] <= v && v <= self.sup[k])
    }
}

/// Bounds of `|train_coord - p|^α` over `p ∈ [p]`.
pub fn d_bounds(train_coord: f64, p: Interval, alpha: f64) -> Result<Interval> {
    Ok(p.sub_from(train_coord)?.pow_abs(alpha)?)
}

/// Bounds of `Σ_n β_n |train_n - p_n|^α_n` over the box.
pub fn theta_exponent_bounds(
    train_point: &[f64],
    bounds: &IntervalVector,
    alpha: &[f64],
    beta: &[f64],
) -> Result<Interval> {
    let n = bounds.len();
    for (what, len) in
        [("training point length", train_point.len()), ("alpha length", alpha.len()), ("beta length", beta.len())]
    {
        if len != n {
            return Err(Error::DimensionMismatch { what, expected: n, got: len });
        }
    }
    if beta.iter().any(|&b| !(b >= 0.0)) {
        return Err(Error::InvalidArgument("beta must be non-negative".into()));
    }
    let mut acc = Interval::point(0.0)?;
    for i in 0..n {
        let d = d_bounds(train_point[i], bounds[i], alpha[i])?;
        acc = acc.add(d.scale(beta[i])?)?;
    }
    Ok(acc.clamp_lo(0.0))
}

/// Bounds of the surrogate prediction over the box.
pub fn bounds_at(model: &KrigingModel, bounds: &IntervalVector) -> Result<Interval> {
    let corr = correlation_bounds(model, bounds)?;
    Ok(combine(model, &corr))
}

/// `[exp(-sup Θ⁽ᵃ⁾), exp(-inf Θ⁽ᵃ⁾)]` for every training point.
fn correlation_bounds(model: &KrigingModel, bounds: &IntervalVector) -> Result<Vec<(f64, f64)>> {
    if bounds.len() != model.n_params() {
        return Err(Error::DimensionMismatch {
            what: "parameter box length",
            expected: model.n_params(),
            got: bounds.len(),
        });
    }
    (0..model.n_samples())
        .map(|a| {
            let t = theta_exponent_bounds(model.training_input(a), bounds, model.alpha(), model.beta())?;
            Ok(((-t.hi()).exp(), (-t.lo()).exp()))
        })
        .collect()
}

fn combine(model: &KrigingModel, corr: &[(f64, f64)]) -> Interval {
    let (mut lo, mut hi) = (0.0, 0.0);
    for (&l, &(c_lo, c_hi)) in model.lambda().iter().zip(corr) {
        if l >= 0.0 {
            lo += c_lo * l;
            hi += c_hi * l;
        } else {
            lo += c_hi * l;
            hi += c_lo * l;
        }
    }
    Interval::new(model.gamma() + lo, model.gamma() + hi).expect("sign-aware pairing keeps lo <= hi")
}

/// Applies [`bounds_at`] to every model of a response grid.
pub fn bounds_curve(models: &[KrigingModel], theta_grid: &[f64], bounds: &IntervalVector) -> Result<BoundsCurve> {
    if models.len() != theta_grid.len() {
        return Err(Error::DimensionMismatch {
            what: "models per grid sample",
            expected: theta_grid.len(),
            got: models.len(),
        });
    }
    // models fitted with one shared kernel reuse the same correlation bounds
    let shared = models.windows(2).all(|w| w[0].shares_kernel_with(&w[1]));
    let out: Vec<Interval> = if shared && !models.is_empty() {
        let corr = correlation_bounds(&models[0], bounds)?;
        models.par_iter().map(|m| combine(m, &corr)).collect()
    } else {
        models
            .par_iter()
            .enumerate()
            .map(|(k, m)| bounds_at(m, bounds).map_err(|e| Error::FitAtSample { k, source: Box::new(e) }))
            .collect::<Result<_>>()?
    };
    BoundsCurve::new(
        theta_grid.to_vec(),
        out.iter().map(Interval::lo).collect(),
        out.iter().map(Interval::hi).collect(),
        Provenance::IaLbe,
    )
}
