use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::mean::private_mean_vector;
use crate::estimators::Geometry;
use crate::privacy::PrivacyLevel;
use crate::random::Rng;

/// Componentwise sign(v_j) · max(|v_j| - λ, 0), the minimizer of
/// ½‖u - v‖² + λ‖u‖₁.
pub fn soft_threshold(v: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !(lambda >= 0.0) {
        return Err(Error::param(format!("lambda must be nonnegative, got {lambda}")));
    }
    Ok(v.iter()
        .map(|&x| x.signum() * (x.abs() - lambda).max(0.0))
        .collect())
}

/// Default regularization level for the sparse mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaRule {
    /// λ = 2r · √(d log d / (n ε²)).
    #[default]
    EpsScaled,
    /// λ = 2r · φ_ε · √(d log d / n).
    PhiScaled,
}

impl LambdaRule {
    pub fn lambda(&self, d: usize, n: usize, radius: f64, level: &PrivacyLevel) -> f64 {
        let d = d as f64;
        let n = n as f64;
        let base = (d * d.ln() / n).sqrt();
        match self {
            LambdaRule::EpsScaled => 2.0 * radius * base / level.epsilon(),
            LambdaRule::PhiScaled => 2.0 * radius * level.phi() * base,
        }
    }
}

/// Sparse mean: average ℓ∞-sampler views, then soft-threshold at λ
/// (default [`LambdaRule::EpsScaled`]).
///
/// Whenever λ ≥ 2‖Z̄ - θ‖∞ and θ is s-sparse, ‖θ̂ - θ‖₂ ≤ 3λ√s.
pub fn sparse_mean<R: AsRef<[f64]>>(
    data: &[R],
    radius: f64,
    level: &PrivacyLevel,
    lambda: Option<f64>,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    let d = data.first().map(|r| r.as_ref().len()).unwrap_or(0);
    if !data.is_empty() && d < 2 {
        return Err(Error::param("sparse mean needs dimension d >= 2"));
    }
    let zbar = private_mean_vector(data, Geometry::Linf, radius, level, rng)?;
    let lambda = lambda.unwrap_or_else(|| LambdaRule::EpsScaled.lambda(d, data.len(), radius, level));
    soft_threshold(&zbar, lambda)
}
