//! Monte Carlo envelope of a response over a parameter box.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::TransferFunction;
use crate::error::{Error, Result};
use crate::interval::IntervalVector;
use crate::sampling::{uniform_block, DRAW_BLOCK};
use crate::surrogate::{BoundsCurve, Provenance};

/// Pointwise min/max of `M` response realizations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCBand {
    pub theta_grid: Vec<f64>,
    pub inf: Vec<f64>,
    pub sup: Vec<f64>,
    pub m_realizations: usize,
}

impl MCBand {
    /// Envelope of explicitly given curves (e.g. a validation sample file).
    pub fn from_curves<'a, I>(theta_grid: Vec<f64>, curves: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let k = theta_grid.len();
        let mut acc = Envelope::new(k);
        for c in curves {
            if c.len() != k {
                return Err(Error::DimensionMismatch { what: "realization length", expected: k, got: c.len() });
            }
            acc.push(c);
        }
        if acc.count == 0 {
            return Err(Error::InvalidArgument("envelope needs at least one realization".into()));
        }
        Ok(MCBand { theta_grid, inf: acc.lo, sup: acc.hi, m_realizations: acc.count })
    }

    pub fn to_curve(&self) -> BoundsCurve {
        BoundsCurve {
            theta_grid: self.theta_grid.clone(),
            inf: self.inf.clone(),
            sup: self.sup.clone(),
            provenance: Provenance::Mc,
        }
    }

    pub fn contains_curve(&self, values: &[f64]) -> bool {
        values.len() == self.inf.len() && values.iter().enumerate().all(|(k, &v)| self.inf[k] <= v && v <= self.sup[k])
    }
}

#[derive(Clone)]
struct Envelope {
    lo: Vec<f64>,
    hi: Vec<f64>,
    count: usize,
}

impl Envelope {
    fn new(k: usize) -> Self {
        Envelope { lo: vec![f64::INFINITY; k], hi: vec![f64::NEG_INFINITY; k], count: 0 }
    }

    fn push(&mut self, c: &[f64]) {
        for ((l, h), &v) in self.lo.iter_mut().zip(self.hi.iter_mut()).zip(c) {
            *l = l.min(v);
            *h = h.max(v);
        }
        self.count += 1;
    }

    fn merge(mut self, other: Envelope) -> Envelope {
        for k in 0..self.lo.len() {
            self.lo[k] = self.lo[k].min(other.lo[k]);
            self.hi[k] = self.hi[k].max(other.hi[k]);
        }
        self.count += other.count;
        self
    }
}

#[derive(Debug, Clone, Default)]
pub struct McOptions {
    /// Adds this point as an extra realization.
    pub include_nominal: Option<Vec<f64>>,
}

/// Envelope of `m` uniform draws from the box. Draws come in fixed blocks
/// with their own random streams, and min/max is order independent, so the
/// result does not depend on the thread count and the band for `m₁ ≤ m₂`
/// is nested inside the band for `m₂`.
pub fn mc_band(
    tf: &dyn TransferFunction,
    bounds: &IntervalVector,
    m: usize,
    seed: u64,
    options: &McOptions,
) -> Result<MCBand> {
    if m == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least one realization".into()));
    }
    if bounds.len() != tf.n_params() {
        return Err(Error::DimensionMismatch {
            what: "parameter box length",
            expected: tf.n_params(),
            got: bounds.len(),
        });
    }
    let k = tf.theta_grid().len();
    let blocks = m.div_ceil(DRAW_BLOCK);
    let mut env = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = DRAW_BLOCK.min(m - b * DRAW_BLOCK);
            let mut env = Envelope::new(k);
            let mut buf = vec![0.0; k];
            for p in uniform_block(bounds, seed, b as u64, len) {
                tf.eval_into(&p, &mut buf);
                env.push(&buf);
            }
            env
        })
        .reduce(|| Envelope::new(k), Envelope::merge);
    if let Some(p) = &options.include_nominal {
        if p.len() != tf.n_params() {
            return Err(Error::DimensionMismatch {
                what: "nominal point length",
                expected: tf.n_params(),
                got: p.len(),
            });
        }
        env.push(&tf.eval_curve(p));
    }
    Ok(MCBand { theta_grid: tf.theta_grid().to_vec(), inf: env.lo, sup: env.hi, m_realizations: env.count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{ArrayBenchmark, PolyBenchmark};
    use crate::sampling::{uniform_draws, ToleranceSpec};

    #[test]
    fn single_draw_collapses() {
        let b = PolyBenchmark::new(2, 11).unwrap();
        let bx = ToleranceSpec::relative(vec![1.0, 1.0], 0.2).expand().unwrap();
        let band = mc_band(&b, &bx, 1, 9, &McOptions::default()).unwrap();
        let p = &uniform_draws(&bx, 1, 9)[0];
        assert_eq!(band.inf, b.eval_curve(p));
        assert_eq!(band.sup, band.inf);
        assert_eq!(band.m_realizations, 1);
    }

    #[test]
    fn degenerate_box_is_nominal() {
        let b = ArrayBenchmark::standard(4).unwrap();
        let nominal = b.nominal().unwrap();
        let bx = ToleranceSpec::relative(nominal.clone(), 0.0).expand().unwrap();
        let band = mc_band(&b, &bx, 500, 2, &McOptions::default()).unwrap();
        let nom = b.eval_curve(&nominal);
        assert_eq!(band.inf, nom);
        assert_eq!(band.sup, nom);
    }

    #[test]
    fn bands_nest_in_m() {
        let b = ArrayBenchmark::standard(3).unwrap();
        let bx = ToleranceSpec::relative(vec![0.5, 1.0, 0.5], 0.1).expand().unwrap();
        let small = mc_band(&b, &bx, 1000, 5, &McOptions::default()).unwrap();
        let large = mc_band(&b, &bx, 3 * DRAW_BLOCK + 17, 5, &McOptions::default()).unwrap();
        for k in 0..small.inf.len() {
            assert!(large.inf[k] <= small.inf[k] && small.sup[k] <= large.sup[k]);
        }
    }

    #[test]
    fn include_nominal_covers_nominal_curve() {
        let b = PolyBenchmark::new(1, 21).unwrap();
        let bx = ToleranceSpec::relative(vec![1.0], 0.2).expand().unwrap();
        let opts = McOptions { include_nominal: Some(vec![1.0]) };
        let band = mc_band(&b, &bx, 3, 1, &opts).unwrap();
        assert!(band.contains_curve(&b.eval_curve(&[1.0])));
        assert_eq!(band.m_realizations, 4);
    }

    #[test]
    fn deterministic_and_matches_serial_envelope() {
        let b = PolyBenchmark::new(2, 15).unwrap();
        let bx = ToleranceSpec::relative(vec![1.0, -0.5], 0.3).expand().unwrap();
        let m = DRAW_BLOCK + 100;
        let a = mc_band(&b, &bx, m, 77, &McOptions::default()).unwrap();
        let again = mc_band(&b, &bx, m, 77, &McOptions::default()).unwrap();
        assert_eq!(a, again);
        let curves: Vec<Vec<f64>> = uniform_draws(&bx, m, 77).iter().map(|p| b.eval_curve(p)).collect();
        let serial = MCBand::from_curves(b.theta_grid().to_vec(), curves.iter().map(Vec::as_slice)).unwrap();
        assert_eq!(a, serial);
    }
}
