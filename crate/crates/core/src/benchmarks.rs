//! Closed-form test responses with known interval images: a polynomial in
//! `θ` and the power pattern of a uniform linear array with tolerant
//! excitation amplitudes.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalVector};
use crate::kriging::TrainingSet;
use crate::metrics::ReportingConvention;
use crate::sampling::{lhs_with, substream};
use crate::surrogate::{BoundsCurve, Provenance};

/// A response `Φ(θ_k; p)` evaluated on a fixed grid.
pub trait TransferFunction: Sync {
    fn n_params(&self) -> usize;

    fn theta_grid(&self) -> &[f64];

    /// Writes `Φ(θ_k; p)` for every grid sample into `out`.
    fn eval_into(&self, p: &[f64], out: &mut [f64]);

    fn eval_curve(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.theta_grid().len()];
        self.eval_into(p, &mut out);
        out
    }

    /// Interval image computed directly from the closed form, if known.
    fn ia_e_curve(&self, _bounds: &IntervalVector) -> Option<Result<BoundsCurve>> {
        None
    }

    /// How bounds over this grid are integrated and normalised.
    fn convention(&self) -> ReportingConvention {
        ReportingConvention::default()
    }
}

/// `Φ(θ; p) = Σ_{n=1..N} p_n θⁿ` on `θ ∈ [-1, 1]`.
#[derive(Debug, Clone)]
pub struct PolyBenchmark {
    n_params: usize,
    theta: Vec<f64>,
    /// `θ_kⁿ`, row-major `K × N`.
    powers: Vec<f64>,
}

impl PolyBenchmark {
    pub const DEFAULT_GRID: usize = 201;

    pub fn new(n_params: usize, grid_size: usize) -> Result<Self> {
        if n_params == 0 {
            return Err(Error::InvalidArgument("polynomial needs at least one coefficient".into()));
        }
        if grid_size < 2 {
            return Err(Error::InvalidArgument(format!("grid needs at least 2 samples, got {grid_size}")));
        }
        let theta: Vec<f64> = (0..grid_size).map(|k| -1.0 + 2.0 * k as f64 / (grid_size - 1) as f64).collect();
        let powers = theta.iter().flat_map(|&t| (1..=n_params).map(move |n| t.powi(n as i32))).collect();
        Ok(PolyBenchmark { n_params, theta, powers })
    }

    /// Unit coefficients, the usual nominal point.
    pub fn nominal(&self) -> Vec<f64> {
        vec![1.0; self.n_params]
    }
}

/// `Σ_n p_n θⁿ`.
pub fn poly_eval(p: &[f64], theta: f64) -> f64 {
    let mut acc = 0.0;
    for (n, &c) in p.iter().enumerate() {
        acc += c * theta.powi(n as i32 + 1);
    }
    acc
}

/// Interval image of the polynomial over a coefficient box. Every
/// coefficient appears once, so the result is the exact range.
pub fn poly_ia_e(bounds: &IntervalVector, theta: f64) -> Result<Interval> {
    let mut acc = Interval::point(0.0)?;
    for (n, p) in bounds.iter().enumerate() {
        acc = acc.add(p.scale(theta.powi(n as i32 + 1))?)?;
    }
    Ok(acc)
}

impl TransferFunction for PolyBenchmark {
    fn n_params(&self) -> usize {
        self.n_params
    }

    fn theta_grid(&self) -> &[f64] {
        &self.theta
    }

    fn eval_into(&self, p: &[f64], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            let row = &self.powers[k * self.n_params..(k + 1) * self.n_params];
            let mut acc = 0.0;
            for (c, t) in p.iter().zip(row) {
                acc += c * t;
            }
            *o = acc;
        }
    }

    fn ia_e_curve(&self, bounds: &IntervalVector) -> Option<Result<BoundsCurve>> {
        Some((|| {
            check_len(bounds.len(), self.n_params)?;
            let mut inf = Vec::with_capacity(self.theta.len());
            let mut sup = Vec::with_capacity(self.theta.len());
            for k in 0..self.theta.len() {
                let row = &self.powers[k * self.n_params..(k + 1) * self.n_params];
                let mut acc = Interval::point(0.0)?;
                for (p, &t) in bounds.iter().zip(row) {
                    acc = acc.add(p.scale(t)?)?;
                }
                inf.push(acc.lo());
                sup.push(acc.hi());
            }
            BoundsCurve::new(self.theta.clone(), inf, sup, Provenance::IaE)
        })())
    }
}

fn check_len(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::DimensionMismatch { what: "parameter count", expected, got });
    }
    Ok(())
}

/// Power pattern `|Σ_n p_n e^{j 2π (d/λ) n sin θ}|²` of an `N`-element
/// uniform linear array with real excitation amplitudes `p`.
#[derive(Debug, Clone)]
pub struct ArrayBenchmark {
    n_elements: usize,
    spacing: f64,
    nominal_sll_db: f64,
    theta: Vec<f64>,
    /// `cos ψ_kn` and `sin ψ_kn`, row-major `K × N`.
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl ArrayBenchmark {
    pub const DEFAULT_SPACING: f64 = 0.5;
    pub const DEFAULT_SLL_DB: f64 = -20.0;

    /// Twenty times the pattern's Nyquist sample count.
    pub fn default_grid(n_elements: usize) -> usize {
        20 * (2 * n_elements).saturating_sub(1)
    }

    pub fn new(n_elements: usize, spacing_over_lambda: f64, grid_size: usize, nominal_sll_db: f64) -> Result<Self> {
        if n_elements == 0 {
            return Err(Error::InvalidArgument("array needs at least one element".into()));
        }
        if !(spacing_over_lambda > 0.0) || !spacing_over_lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("element spacing must be positive, got {spacing_over_lambda}")));
        }
        let min_grid = (2 * (2 * n_elements - 1)).max(2);
        if grid_size < min_grid {
            return Err(Error::InvalidArgument(format!(
                "grid of {grid_size} samples is below twice the Nyquist count ({min_grid})"
            )));
        }
        let theta: Vec<f64> = (0..grid_size).map(|k| -PI / 2.0 + PI * k as f64 / (grid_size - 1) as f64).collect();
        let mut cos = Vec::with_capacity(grid_size * n_elements);
        let mut sin = Vec::with_capacity(grid_size * n_elements);
        for &t in &theta {
            for n in 0..n_elements {
                let psi = phase(n, t, spacing_over_lambda);
                cos.push(psi.cos());
                sin.push(psi.sin());
            }
        }
        Ok(ArrayBenchmark { n_elements, spacing: spacing_over_lambda, nominal_sll_db, theta, cos, sin })
    }

    /// Half-wavelength spacing, -20 dB Chebyshev nominal, default grid.
    pub fn standard(n_elements: usize) -> Result<Self> {
        Self::new(n_elements, Self::DEFAULT_SPACING, Self::default_grid(n_elements), Self::DEFAULT_SLL_DB)
    }

    pub fn spacing_over_lambda(&self) -> f64 {
        self.spacing
    }

    pub fn nominal_sll_db(&self) -> f64 {
        self.nominal_sll_db
    }

    /// Dolph-Chebyshev excitation for the configured sidelobe level.
    pub fn nominal(&self) -> Result<Vec<f64>> {
        if self.n_elements == 1 {
            return Ok(vec![1.0]);
        }
        dolph_chebyshev(self.n_elements, self.nominal_sll_db)
    }

    fn row(&self, k: usize) -> (&[f64], &[f64]) {
        let r = k * self.n_elements..(k + 1) * self.n_elements;
        (&self.cos[r.clone()], &self.sin[r])
    }
}

#[inline]
fn phase(n: usize, theta: f64, spacing: f64) -> f64 {
    2.0 * PI * spacing * n as f64 * theta.sin()
}

#[inline]
fn power(p: &[f64], cos: &[f64], sin: &[f64]) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for ((&a, &c), &s) in p.iter().zip(cos).zip(sin) {
        re += a * c;
        im += a * s;
    }
    re.powi(2) + im.powi(2)
}

fn power_ia(bounds: &IntervalVector, cos: &[f64], sin: &[f64]) -> Result<Interval> {
    let mut re = Interval::point(0.0)?;
    let mut im = Interval::point(0.0)?;
    for ((p, &c), &s) in bounds.iter().zip(cos).zip(sin) {
        re = re.add(p.scale(c)?)?;
        im = im.add(p.scale(s)?)?;
    }
    Ok(re.pow(2)?.add(im.pow(2)?)?)
}

fn trig_row(n: usize, theta: f64, spacing: f64) -> (Vec<f64>, Vec<f64>) {
    (0..n)
        .map(|i| {
            let psi = phase(i, theta, spacing);
            (psi.cos(), psi.sin())
        })
        .unzip()
}

/// Array power pattern at one angle.
pub fn array_power_pattern(p: &[f64], theta: f64, spacing_over_lambda: f64) -> f64 {
    let (c, s) = trig_row(p.len(), theta, spacing_over_lambda);
    power(p, &c, &s)
}

/// Interval image of the array power pattern, built from the interval real
/// and imaginary parts. Both parts reuse the same amplitudes, so the result
/// over-estimates the true range (wrapping).
pub fn array_ia_e(bounds: &IntervalVector, theta: f64, spacing_over_lambda: f64) -> Result<Interval> {
    let (c, s) = trig_row(bounds.len(), theta, spacing_over_lambda);
    power_ia(bounds, &c, &s)
}

impl TransferFunction for ArrayBenchmark {
    fn n_params(&self) -> usize {
        self.n_elements
    }

    fn theta_grid(&self) -> &[f64] {
        &self.theta
    }

    fn eval_into(&self, p: &[f64], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            let (c, s) = self.row(k);
            *o = power(p, c, s);
        }
    }

    fn ia_e_curve(&self, bounds: &IntervalVector) -> Option<Result<BoundsCurve>> {
        Some((|| {
            check_len(bounds.len(), self.n_elements)?;
            let mut inf = Vec::with_capacity(self.theta.len());
            let mut sup = Vec::with_capacity(self.theta.len());
            for k in 0..self.theta.len() {
                let (c, s) = self.row(k);
                let v = power_ia(bounds, c, s)?;
                inf.push(v.lo());
                sup.push(v.hi());
            }
            BoundsCurve::new(self.theta.clone(), inf, sup, Provenance::IaE)
        })())
    }

    fn convention(&self) -> ReportingConvention {
        ReportingConvention::array()
    }
}

/// Chebyshev polynomial `T_m(x)` by the three-term recurrence (valid for
/// any real `x`).
fn chebyshev_t(m: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if m == 0 {
        return a;
    }
    for _ in 1..m {
        let c = 2.0 * x * b - a;
        a = b;
        b = c;
    }
    b
}

/// Dolph-Chebyshev amplitudes for an `N`-element half-wavelength array with
/// main-lobe-to-sidelobe ratio `-sll_db` dB, normalised to a unit maximum.
///
/// The array factor `T_{N-1}(x₀ cos(ψ/2))` is sampled at `ψ_m = 2πm/N` and
/// inverted with a centred discrete Fourier transform.
pub fn dolph_chebyshev(n_elements: usize, sll_db: f64) -> Result<Vec<f64>> {
    if n_elements < 2 {
        return Err(Error::InvalidArgument(format!("Chebyshev synthesis needs at least 2 elements, got {n_elements}")));
    }
    if !(sll_db < 0.0) || !sll_db.is_finite() {
        return Err(Error::InvalidArgument(format!("sidelobe level must be negative dB, got {sll_db}")));
    }
    let n = n_elements;
    let ratio = 10f64.powf(-sll_db / 20.0);
    let x0 = (ratio.acosh() / (n - 1) as f64).cosh();
    let samples: Vec<f64> = (0..n).map(|m| chebyshev_t(n - 1, x0 * (PI * m as f64 / n as f64).cos())).collect();
    let centre = (n - 1) as f64 / 2.0;
    let mut a: Vec<f64> = (0..n)
        .map(|i| {
            let nc = i as f64 - centre;
            samples.iter().enumerate().map(|(m, v)| v * (2.0 * PI * m as f64 / n as f64 * nc).cos()).sum::<f64>()
                / n as f64
        })
        .collect();
    // enforce exact symmetry against round-off
    for i in 0..n / 2 {
        let v = 0.5 * (a[i] + a[n - 1 - i]);
        a[i] = v;
        a[n - 1 - i] = v;
    }
    let max = a.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    Ok(a.into_iter().map(|v| v / max).collect())
}

/// Default training-set size, six samples per parameter.
pub fn default_sample_count(n_params: usize) -> usize {
    6 * n_params
}

/// LHS inputs inside the box and the exact response of each on the grid.
/// Repeated rows (possible only for degenerate boxes) are dropped.
pub fn sample_training_set(
    tf: &dyn TransferFunction,
    bounds: &IntervalVector,
    count: usize,
    seed: u64,
) -> Result<TrainingSet> {
    sample_training_set_with(tf, bounds, count, &mut substream(seed, 0))
}

/// [`sample_training_set`] driven by a caller-supplied generator.
pub fn sample_training_set_with<R: Rng + ?Sized>(
    tf: &dyn TransferFunction,
    bounds: &IntervalVector,
    count: usize,
    rng: &mut R,
) -> Result<TrainingSet> {
    check_len(bounds.len(), tf.n_params())?;
    let mut inputs = lhs_with(bounds, count, rng)?;
    let mut seen: Vec<Vec<f64>> = Vec::with_capacity(inputs.len());
    inputs.retain(|row| {
        if seen.contains(row) {
            false
        } else {
            seen.push(row.clone());
            true
        }
    });
    let outputs = inputs.iter().map(|p| tf.eval_curve(p)).collect();
    TrainingSet::new(inputs, outputs, tf.theta_grid().to_vec())
}

/// Serializable selection of a built-in benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BenchmarkSpec {
    Poly { n_params: usize, grid_size: usize },
    Array { n_elements: usize, spacing_over_lambda: f64, grid_size: usize, nominal_sll_db: f64 },
}

impl BenchmarkSpec {
    pub fn build(&self) -> Result<(Box<dyn TransferFunction>, Vec<f64>)> {
        match *self {
            BenchmarkSpec::Poly { n_params, grid_size } => {
                let b = PolyBenchmark::new(n_params, grid_size)?;
                let nominal = b.nominal();
                Ok((Box::new(b), nominal))
            }
            BenchmarkSpec::Array { n_elements, spacing_over_lambda, grid_size, nominal_sll_db } => {
                let b = ArrayBenchmark::new(n_elements, spacing_over_lambda, grid_size, nominal_sll_db)?;
                let nominal = b.nominal()?;
                Ok((Box::new(b), nominal))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{uniform_draws, ToleranceSpec};

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn peak_db(p: &[f64]) -> f64 {
        10.0 * (p.iter().sum::<f64>().powi(2)).log10()
    }

    /// Highest sidelobe, in dB below the peak, found on a dense grid in
    /// `u = sin θ` beyond the first null.
    fn measured_sll(p: &[f64]) -> f64 {
        let k = 20_001;
        let curve: Vec<f64> =
            (0..k).map(|i| array_power_pattern(p, (-1.0 + 2.0 * i as f64 / (k - 1) as f64).asin(), 0.5)).collect();
        let c = k / 2;
        let mut r = c;
        while curve[r + 1] < curve[r] {
            r += 1;
        }
        let side = curve[r..].iter().fold(0.0f64, |m, &v| m.max(v));
        10.0 * (side / curve[c]).log10()
    }

    /// Classical closed-form Chebyshev excitation (even/odd element sums).
    fn dolph_closed_form(n: usize, sll_db: f64) -> Vec<f64> {
        let r = 10f64.powf(-sll_db / 20.0);
        let x0 = (r.acosh() / (n - 1) as f64).cosh();
        let big_m = n / 2;
        let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
        let half: Vec<f64> = if n.is_multiple_of(2) {
            (1..=big_m)
                .map(|i| {
                    (i..=big_m)
                        .map(|q| {
                            let s = if (big_m - q).is_multiple_of(2) { 1.0 } else { -1.0 };
                            s * x0.powi(2 * q as i32 - 1) * fact(q + big_m - 2) * (2 * big_m - 1) as f64
                                / (fact(q - i) * fact(q + i - 1) * fact(big_m - q))
                        })
                        .sum()
                })
                .collect()
        } else {
            let big_m = (n - 1) / 2;
            (0..=big_m)
                .map(|i| {
                    (i..=big_m)
                        .map(|q| {
                            let s = if (big_m - q).is_multiple_of(2) { 1.0 } else { -1.0 };
                            s * x0.powi(2 * q as i32) * fact(q + big_m - 1) * (2 * big_m) as f64
                                / (fact(q - i) * fact(q + i) * fact(big_m - q))
                        })
                        .sum()
                })
                .collect()
        };
        let mut full: Vec<f64> = half.iter().rev().copied().collect();
        let skip = n % 2;
        full.extend(half.iter().skip(skip));
        let max = full.iter().fold(0.0f64, |m, &v| m.max(v));
        full.into_iter().map(|v| v / max).collect()
    }

    #[test]
    fn poly_examples() {
        assert_eq!(poly_eval(&[3.0, -2.0, 7.0], 0.0), 0.0);
        assert_eq!(poly_eval(&[1.0], 0.5), 0.5);
        assert_eq!(poly_eval(&[1.0, 1.0], -1.0), 0.0);
        let b = IntervalVector::new(vec![iv(0.8, 1.2)]);
        let r = poly_ia_e(&b, 0.5).unwrap();
        assert!((r.lo() - 0.4).abs() < 1e-15 && (r.hi() - 0.6).abs() < 1e-15);
        let r = poly_ia_e(&b, -0.5).unwrap();
        assert!((r.lo() + 0.6).abs() < 1e-15 && (r.hi() + 0.4).abs() < 1e-15);
        assert_eq!(poly_ia_e(&b, 0.0).unwrap(), iv(0.0, 0.0));
    }

    #[test]
    fn poly_grid_and_curve_agree() {
        let b = PolyBenchmark::new(3, 201).unwrap();
        let g = b.theta_grid();
        assert_eq!((g[0], g[100], g[200]), (-1.0, 0.0, 1.0));
        let p = [0.9, -1.1, 1.3];
        let curve = b.eval_curve(&p);
        for (k, &t) in g.iter().enumerate() {
            assert!((curve[k] - poly_eval(&p, t)).abs() < 1e-14);
        }
        assert!(PolyBenchmark::new(1, 1).is_err());
    }

    #[test]
    fn poly_ia_e_is_tight() {
        // endpoints are attained at box corners, found by exhaustive search
        let bx = IntervalVector::new(vec![iv(0.8, 1.2), iv(-0.5, 0.7), iv(1.9, 2.1)]);
        for &t in &[-1.0, -0.37, 0.0, 0.61, 1.0] {
            let r = poly_ia_e(&bx, t).unwrap();
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for mask in 0..8 {
                let p: Vec<f64> = (0..3).map(|n| if mask >> n & 1 == 1 { bx[n].hi() } else { bx[n].lo() }).collect();
                let v = poly_eval(&p, t);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            assert!((r.lo() - lo).abs() < 1e-6 && (r.hi() - hi).abs() < 1e-6);
        }
    }

    #[test]
    fn array_examples() {
        for t in [-1.2, 0.0, 0.4] {
            assert!((array_power_pattern(&[1.0], t, 0.5) - 1.0).abs() < 1e-15);
        }
        assert!((array_power_pattern(&[1.0, 1.0], 0.0, 0.5) - 4.0).abs() < 1e-15);
        assert!(array_power_pattern(&[1.0, 1.0], PI / 2.0, 0.5).abs() < 1e-15);
        let p = [0.7, 1.0, 0.7];
        let d = array_ia_e(&IntervalVector::from_point(&p).unwrap(), 0.3, 0.5).unwrap();
        let v = array_power_pattern(&p, 0.3, 0.5);
        assert!((d.lo() - v).abs() < 1e-12 && (d.hi() - v).abs() < 1e-12);
    }

    #[test]
    fn array_ia_e_includes_draws_and_wraps() {
        let bench = ArrayBenchmark::standard(4).unwrap();
        let nominal = vec![0.6, 1.0, 1.0, 0.6];
        let bx = ToleranceSpec::relative(nominal, 0.1).expand().unwrap();
        let ia = bench.ia_e_curve(&bx).unwrap().unwrap();
        let mut lo = vec![f64::INFINITY; bench.theta_grid().len()];
        let mut hi = vec![f64::NEG_INFINITY; bench.theta_grid().len()];
        for p in uniform_draws(&bx, 10_000, 8) {
            let c = bench.eval_curve(&p);
            assert!(ia.contains_curve(&c));
            for k in 0..c.len() {
                lo[k] = lo[k].min(c[k]);
                hi[k] = hi[k].max(c[k]);
            }
        }
        let k = bench.theta_grid().len() / 3;
        assert!(ia.sup[k] - ia.inf[k] >= hi[k] - lo[k]);
        assert!(ia.sup[k] - ia.inf[k] > 1.01 * (hi[k] - lo[k]));
    }

    #[test]
    fn array_grid_defaults() {
        let b = ArrayBenchmark::standard(10).unwrap();
        assert_eq!(b.theta_grid().len(), 380);
        assert!(ArrayBenchmark::new(10, 0.5, 37, -20.0).is_err());
        assert!(ArrayBenchmark::new(10, 0.0, 380, -20.0).is_err());
    }

    #[test]
    fn dolph_is_symmetric_and_normalised() {
        for n in [2, 3, 7, 10, 11, 20] {
            let a = dolph_chebyshev(n, -20.0).unwrap();
            for i in 0..n {
                assert_eq!(a[i], a[n - 1 - i]);
                assert!(a[i] > 0.0);
            }
            assert_eq!(a.iter().fold(0.0f64, |m, &v| m.max(v)), 1.0);
        }
        assert!(dolph_chebyshev(1, -20.0).is_err());
        assert!(dolph_chebyshev(5, 3.0).is_err());
    }

    #[test]
    fn dolph_matches_closed_form() {
        for n in [5, 8, 10, 11, 20] {
            let a = dolph_chebyshev(n, -20.0).unwrap();
            let b = dolph_closed_form(n, -20.0);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-9, "n = {n}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn dolph_sidelobe_level() {
        for n in [10, 20] {
            let sll = measured_sll(&dolph_chebyshev(n, -20.0).unwrap());
            assert!((sll + 20.0).abs() < 0.1, "n = {n}: {sll}");
        }
        let sll = measured_sll(&dolph_chebyshev(10, -30.0).unwrap());
        assert!((sll + 30.0).abs() < 0.1);
    }

    #[test]
    fn dolph_peak_values() {
        assert!((peak_db(&dolph_chebyshev(10, -20.0).unwrap()) - 17.92).abs() < 0.15);
        assert!((peak_db(&dolph_chebyshev(50, -20.0).unwrap()) - 25.23).abs() < 0.15);
        let n20 = peak_db(&dolph_chebyshev(20, -20.0).unwrap());
        let oracle = peak_db(&dolph_closed_form(20, -20.0));
        assert!((n20 - oracle).abs() < 1e-9);
    }

    #[test]
    fn training_set_rows_match_response() {
        let b = PolyBenchmark::new(2, 21).unwrap();
        let bx = ToleranceSpec::relative(vec![1.0, 1.0], 0.2).expand().unwrap();
        let ts = sample_training_set(&b, &bx, 12, 4).unwrap();
        assert_eq!(ts.n_samples(), 12);
        for s in 0..12 {
            let p = ts.input(s);
            for (k, &t) in b.theta_grid().iter().enumerate() {
                assert!((ts.output(s, k) - poly_eval(p, t)).abs() < 1e-14);
            }
        }
        let again = sample_training_set(&b, &bx, 12, 4).unwrap();
        assert_eq!(ts.inputs(), again.inputs());
        assert_eq!(default_sample_count(3), 18);
    }

    #[test]
    fn degenerate_box_collapses_training_rows() {
        let b = PolyBenchmark::new(1, 11).unwrap();
        let bx = ToleranceSpec::relative(vec![1.0], 0.0).expand().unwrap();
        let ts = sample_training_set(&b, &bx, 6, 1).unwrap();
        assert_eq!(ts.n_samples(), 1);
    }
}
