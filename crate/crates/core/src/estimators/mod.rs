//! Estimators built on privatized samples.
//!
//! Every estimator passes each raw record through exactly one channel call,
//! so the output is ε-locally private with respect to each record. The
//! SGD-based estimators are sequentially interactive: the channel input for
//! record i depends on the iterate built from records 1..i-1.

pub mod density;
pub mod logistic;
pub mod mean;
pub mod median;
pub mod sgd;
pub mod sparse;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{norm2, norm_inf};

pub use density::{
    classical_density_estimate, classical_density_order, density_estimate,
    density_estimate_with_order, density_order, laplace_density_estimate, trig_basis_eval,
    DensityEstimate, TRIG_SUP_BOUND,
};
pub use logistic::{logistic_gradient, private_logistic_sgd, LogisticModel, LogisticSgd};
pub use mean::{laplace_mean_vector, private_mean_scalar, private_mean_vector, sample_mean_vector};
pub use median::{
    naive_private_median, private_median_sgd, sample_median, MedianInterval, MedianSgd,
};
pub use sgd::{Projection, SgdState, StepSchedule};
pub use sparse::{soft_threshold, sparse_mean, LambdaRule};

/// Norm ball the records live in; selects the matching halfspace sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    L2,
    Linf,
}

impl Geometry {
    pub fn norm(&self, x: &[f64]) -> f64 {
        match self {
            Geometry::L2 => norm2(x),
            Geometry::Linf => norm_inf(x),
        }
    }
}

/// Reject an empty input with a parameter error.
pub(crate) fn require_nonempty<T>(data: &[T], what: &str) -> Result<()> {
    if data.is_empty() {
        Err(Error::param(format!("{what} must not be empty")))
    } else {
        Ok(())
    }
}

/// Prefix a domain error with the offending record index.
pub(crate) fn at_record(index: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Domain(msg) => Error::Domain(format!("record {index}: {msg}")),
        other => other,
    }
}
