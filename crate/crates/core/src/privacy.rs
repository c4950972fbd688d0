use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A validated local privacy budget ε together with the quantities every
/// channel derives from it.
///
/// `pi` is the probability with which randomized response keeps the true
/// side, e^ε / (1 + e^ε), and `phi` is the inverse gap (e^ε + 1) / (e^ε - 1)
/// that rescales a ±1 response into an unbiased one. Both are computed in a
/// form that stays finite for very large ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PrivacyLevel {
    epsilon: f64,
    exp_eps: f64,
    pi: f64,
    phi: f64,
}

impl PrivacyLevel {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::param(format!(
                "privacy level must be positive and finite, got {epsilon}"
            )));
        }
        let neg = (-epsilon).exp();
        Ok(Self {
            epsilon,
            exp_eps: epsilon.exp(),
            pi: 1.0 / (1.0 + neg),
            phi: 1.0 / (0.5 * epsilon).tanh(),
        })
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// e^ε; may be `inf` for ε beyond ~709.
    #[inline]
    pub fn exp_eps(&self) -> f64 {
        self.exp_eps
    }

    /// e^ε / (1 + e^ε).
    #[inline]
    pub fn pi(&self) -> f64 {
        self.pi
    }

    /// (e^ε + 1) / (e^ε - 1).
    #[inline]
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// e^ε - 1, accurate for small ε.
    #[inline]
    pub fn exp_m1(&self) -> f64 {
        self.epsilon.exp_m1()
    }
}

impl TryFrom<f64> for PrivacyLevel {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<PrivacyLevel> for f64 {
    fn from(level: PrivacyLevel) -> f64 {
        level.epsilon
    }
}
