//! Worst-case response bounds for systems known only through samples.
//!
//! A kriging surrogate is fitted per response-grid sample from a handful of
//! input/output examples and then evaluated in interval arithmetic over a
//! parameter tolerance box, giving closed-form lower and upper envelopes.
//! Monte Carlo envelopes and exact interval images of two closed-form test
//! responses serve as references.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod interval;
pub mod kriging;
pub mod mc;
pub mod metrics;
mod optim;
pub mod sampling;
pub mod surrogate;

pub use error::{Error, IntervalError, Result};
pub use interval::{Interval, IntervalVector};
pub use kriging::{KrigingConfig, KrigingModel, TrainingSet};
pub use mc::MCBand;
pub use surrogate::{BoundsCurve, Provenance};
