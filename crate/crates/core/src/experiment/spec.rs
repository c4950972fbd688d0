use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{Geometry, LambdaRule, MedianInterval};
use crate::experiment::generator::{GeneratorSpec, RecordShape};
use crate::privacy::PrivacyLevel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    MeanScalar,
    MeanVector,
    Median,
    Sparse,
    Logistic,
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MechanismKind {
    Optimal,
    LaplaceBaseline,
    Nonprivate,
}

impl MechanismKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MechanismKind::Optimal => "optimal",
            MechanismKind::LaplaceBaseline => "laplace_baseline",
            MechanismKind::Nonprivate => "nonprivate",
        }
    }

    pub(crate) fn stream_id(&self) -> u64 {
        match self {
            MechanismKind::Optimal => 1,
            MechanismKind::LaplaceBaseline => 2,
            MechanismKind::Nonprivate => 3,
        }
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::MeanScalar => "mean_scalar",
            EstimatorKind::MeanVector => "mean_vector",
            EstimatorKind::Median => "median",
            EstimatorKind::Sparse => "sparse",
            EstimatorKind::Logistic => "logistic",
            EstimatorKind::Density => "density",
        }
    }

    /// Mechanisms this estimator can be run with.
    pub fn mechanisms(&self) -> &'static [MechanismKind] {
        use MechanismKind::*;
        match self {
            EstimatorKind::MeanScalar | EstimatorKind::Sparse => &[Optimal, Nonprivate],
            _ => &[Optimal, LaplaceBaseline, Nonprivate],
        }
    }

    fn shapes(&self) -> &'static [RecordShape] {
        match self {
            EstimatorKind::MeanScalar | EstimatorKind::Median => &[RecordShape::Scalar],
            EstimatorKind::MeanVector => &[RecordShape::Vector, RecordShape::Scalar],
            EstimatorKind::Sparse => &[RecordShape::Vector],
            EstimatorKind::Logistic => &[RecordShape::Labeled],
            EstimatorKind::Density => &[RecordShape::UnitInterval],
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Every valid (estimator, mechanism) pair, formatted for error messages.
pub fn valid_pairs() -> String {
    use EstimatorKind::*;
    [MeanScalar, MeanVector, Median, Sparse, Logistic, Density]
        .iter()
        .flat_map(|e| e.mechanisms().iter().map(move |m| format!("{e}/{m}")))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Estimator tuning; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorOptions {
    /// Channel radius; derived from the generator when absent.
    pub radius: Option<f64>,
    pub geometry: Geometry,
    /// Moment order and bound for the scalar mean; derived from the
    /// generator when absent.
    pub moment_k: Option<f64>,
    pub radius_k: Option<f64>,
    /// Density smoothness.
    pub beta: f64,
    pub lambda: Option<f64>,
    pub lambda_rule: LambdaRule,
    pub median_interval: Option<MedianInterval>,
    pub gamma0: f64,
    pub decay: f64,
    pub projection_radius: Option<f64>,
    /// Record wall-clock time per cell; off by default so output bytes do
    /// not depend on the machine.
    pub timing: bool,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            radius: None,
            geometry: Geometry::Linf,
            moment_k: None,
            radius_k: None,
            beta: 1.0,
            lambda: None,
            lambda_rule: LambdaRule::EpsScaled,
            median_interval: None,
            gamma0: 1.0,
            decay: 0.6,
            projection_radius: None,
            timing: false,
        }
    }
}

/// One experiment: an estimator, a mechanism and a data source evaluated on
/// a grid of sample sizes with independent replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub estimator: EstimatorKind,
    pub mechanism: MechanismKind,
    pub eps: f64,
    pub n_grid: Vec<usize>,
    /// Record dimension; must agree with the generator.
    pub d: usize,
    pub replicates: usize,
    pub generator: GeneratorSpec,
    pub seed: u64,
    #[serde(default)]
    pub options: EstimatorOptions,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::config("replicates must be at least 1"));
        }
        if self.n_grid.is_empty() {
            return Err(Error::config("n_grid must not be empty"));
        }
        if self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("n_grid must be positive and strictly increasing"));
        }
        if self.estimator == EstimatorKind::Density && self.n_grid[0] < 2 {
            return Err(Error::config("density estimation needs n >= 2"));
        }
        PrivacyLevel::new(self.eps).map_err(|e| Error::config(e.to_string()))?;
        if !self.estimator.mechanisms().contains(&self.mechanism) {
            return Err(Error::config(format!(
                "estimator {} cannot run with mechanism {}; valid pairs: {}",
                self.estimator,
                self.mechanism,
                valid_pairs()
            )));
        }
        if !self.estimator.shapes().contains(&self.generator.shape()) {
            return Err(Error::config(format!(
                "generator {:?} does not produce records for estimator {}",
                self.generator.shape(),
                self.estimator
            )));
        }
        Ok(())
    }
}
