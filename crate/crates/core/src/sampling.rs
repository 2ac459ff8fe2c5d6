//! Tolerance boxes, Latin hypercube designs and uniform Monte Carlo draws.
//!
//! All randomness comes from ChaCha8 (`rand_chacha`). A run seed selects the
//! key and each independent task (one LHS repeat, one block of Monte Carlo
//! draws) reads its own ChaCha stream, so results do not depend on how tasks
//! are scheduled across threads.

use log::warn;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalVector};

/// Number of draws generated from one ChaCha stream by [`uniform_draws`].
pub const DRAW_BLOCK: usize = 4096;

/// Stream offset reserved for Monte Carlo blocks so they never share a
/// stream with LHS repeats drawn from the same seed.
const MC_STREAM_BASE: u64 = 1 << 40;

/// Returns the ChaCha8 generator for task `index` of run `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// How the nominal vector is widened into a parameter box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tolerance {
    /// Same relative tolerance for every parameter.
    Relative(f64),
    /// One relative tolerance per parameter.
    PerParameter(Vec<f64>),
    /// Explicit intervals, bypassing the relative rule.
    Explicit(Vec<Interval>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceSpec {
    pub nominal: Vec<f64>,
    pub tolerance: Tolerance,
}

impl ToleranceSpec {
    pub fn relative(nominal: Vec<f64>, delta: f64) -> Self {
        ToleranceSpec { nominal, tolerance: Tolerance::Relative(delta) }
    }

    pub fn n_params(&self) -> usize {
        self.nominal.len()
    }

    /// Expands the spec into `[p(1-δ), p(1+δ)]` per parameter (endpoints
    /// ordered, so negative nominals work too).
    pub fn expand(&self) -> Result<IntervalVector> {
        let n = self.nominal.len();
        let deltas: Vec<f64> = match &self.tolerance {
            Tolerance::Relative(d) => vec![*d; n],
            Tolerance::PerParameter(ds) => {
                if ds.len() != n {
                    return Err(Error::DimensionMismatch {
                        what: "per-parameter tolerances",
                        expected: n,
                        got: ds.len(),
                    });
                }
                ds.clone()
            }
            Tolerance::Explicit(xs) => {
                if xs.len() != n {
                    return Err(Error::DimensionMismatch {
                        what: "explicit parameter intervals",
                        expected: n,
                        got: xs.len(),
                    });
                }
                return Ok(IntervalVector::new(xs.clone()));
            }
        };
        let mut out = Vec::with_capacity(n);
        for (i, (&p, &d)) in self.nominal.iter().zip(&deltas).enumerate() {
            if !(0.0..1.0).contains(&d) {
                return Err(Error::InvalidArgument(format!(
                    "relative tolerance of parameter {i} must lie in [0, 1), got {d}"
                )));
            }
            if p == 0.0 && d > 0.0 {
                warn!("parameter {i} has zero nominal value; relative tolerance yields a degenerate interval");
            }
            out.push(Interval::hull(p * (1.0 - d), p * (1.0 + d))?);
        }
        Ok(IntervalVector::new(out))
    }
}

/// Latin hypercube design of `count` points inside `bounds`.
///
/// Each dimension is cut into `count` equal strata; every stratum receives
/// exactly one point, placed uniformly at random inside it, and the stratum
/// order is an independent random permutation per dimension.
pub fn lhs(bounds: &IntervalVector, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    lhs_with(bounds, count, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// [`lhs`] driven by a caller-supplied generator.
pub fn lhs_with<R: Rng + ?Sized>(bounds: &IntervalVector, count: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    if count == 0 {
        return Err(Error::InvalidArgument("latin hypercube needs at least one sample".into()));
    }
    let n = bounds.len();
    let mut points = vec![vec![0.0; n]; count];
    let mut strata: Vec<usize> = (0..count).collect();
    for (j, x) in bounds.iter().enumerate() {
        strata.shuffle(rng);
        for (row, &s) in points.iter_mut().zip(&strata) {
            let u: f64 = rng.random();
            let v = x.lo() + (s as f64 + u) / count as f64 * x.width();
            row[j] = v.min(x.hi());
        }
    }
    Ok(points)
}

/// `count` i.i.d. uniform draws inside `bounds`.
///
/// Draw `m` is taken from block `m / DRAW_BLOCK`, which has its own stream,
/// so the first `k` draws are identical for every `count >= k`.
pub fn uniform_draws(bounds: &IntervalVector, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    let mut block = 0;
    while out.len() < count {
        let len = DRAW_BLOCK.min(count - out.len());
        out.extend(uniform_block(bounds, seed, block, len));
        block += 1;
    }
    out
}

/// Block `block` of the draw sequence used by [`uniform_draws`].
pub fn uniform_block(bounds: &IntervalVector, seed: u64, block: u64, len: usize) -> Vec<Vec<f64>> {
    let mut rng = substream(seed, MC_STREAM_BASE + block);
    (0..len)
        .map(|_| {
            bounds
                .iter()
                .map(|x| {
                    let u: f64 = rng.random();
                    (x.lo() + u * x.width()).min(x.hi())
                })
                .collect()
        })
        .collect()
}
