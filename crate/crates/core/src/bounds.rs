//! Closed-form minimax rate expressions, used as reference curves.
//!
//! Each evaluator comes in the form it is usually quoted in and a `_with`
//! variant taking a [`RateForm`] that selects ε² or (e^ε - 1)² as the
//! effective privacy factor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Effective privacy factor in a rate expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateForm {
    EpsSquared,
    ExpMinusOneSquared,
}

impl RateForm {
    pub fn factor(&self, eps: f64) -> f64 {
        match self {
            RateForm::EpsSquared => eps * eps,
            RateForm::ExpMinusOneSquared => eps.exp_m1().powi(2),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RateForm::EpsSquared => "eps^2",
            RateForm::ExpMinusOneSquared => "(e^eps-1)^2",
        }
    }
}

fn check(n: usize, eps: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::param("sample size must be at least 1"));
    }
    if !(eps > 0.0) {
        return Err(Error::param(format!("epsilon must be positive, got {eps}")));
    }
    Ok(())
}

/// min(1, (nε²)^{-(k-1)/k}); k = ∞ gives the parametric rate.
pub fn mean_rate(k: f64, n: usize, eps: f64) -> Result<f64> {
    mean_rate_with(RateForm::EpsSquared, k, n, eps)
}

pub fn mean_rate_with(form: RateForm, k: f64, n: usize, eps: f64) -> Result<f64> {
    check(n, eps)?;
    if !(k > 1.0) {
        return Err(Error::param(format!("moment order k must exceed 1, got {k}")));
    }
    let base = n as f64 * form.factor(eps);
    let exponent = if k.is_infinite() { 1.0 } else { (k - 1.0) / k };
    Ok(base.powf(-exponent).min(1.0))
}

/// √(d log(2d) / (n (e^ε - 1)²)).
pub fn sparse_mean_lower(d: usize, n: usize, eps: f64) -> Result<f64> {
    sparse_mean_lower_with(RateForm::ExpMinusOneSquared, d, n, eps)
}

pub fn sparse_mean_lower_with(form: RateForm, d: usize, n: usize, eps: f64) -> Result<f64> {
    check(n, eps)?;
    if d < 2 {
        return Err(Error::param(format!("dimension must be at least 2, got {d}")));
    }
    let d = d as f64;
    Ok((d * (2.0 * d).ln() / (n as f64 * form.factor(eps))).sqrt())
}

/// (nε²)^{-2β/(2β+2)}.
pub fn density_rate(beta: f64, n: usize, eps: f64) -> Result<f64> {
    density_rate_with(RateForm::EpsSquared, beta, n, eps)
}

pub fn density_rate_with(form: RateForm, beta: f64, n: usize, eps: f64) -> Result<f64> {
    check(n, eps)?;
    if !(beta > 0.5) {
        return Err(Error::param(format!("smoothness beta must exceed 1/2, got {beta}")));
    }
    let base = n as f64 * form.factor(eps);
    let exponent = if beta.is_infinite() { 1.0 } else { 2.0 * beta / (2.0 * beta + 2.0) };
    Ok(base.powf(-exponent))
}

/// min(d/4, d² / (4n(e^ε - 1)²)).
pub fn logistic_lower(d: usize, n: usize, eps: f64) -> Result<f64> {
    logistic_lower_with(RateForm::ExpMinusOneSquared, d, n, eps)
}

pub fn logistic_lower_with(form: RateForm, d: usize, n: usize, eps: f64) -> Result<f64> {
    check(n, eps)?;
    if d == 0 {
        return Err(Error::param("dimension must be at least 1"));
    }
    let d = d as f64;
    Ok((d / 4.0).min(d * d / (4.0 * n as f64 * form.factor(eps))))
}

/// r · min(1, (nε²)^{-1/2}).
pub fn median_rate(radius: f64, n: usize, eps: f64) -> Result<f64> {
    median_rate_with(RateForm::EpsSquared, radius, n, eps)
}

pub fn median_rate_with(form: RateForm, radius: f64, n: usize, eps: f64) -> Result<f64> {
    check(n, eps)?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::param(format!("radius must be positive, got {radius}")));
    }
    Ok(radius * (n as f64 * form.factor(eps)).sqrt().recip().min(1.0))
}

/// A labelled rate evaluated on a grid of sample sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub label: String,
    pub points: Vec<(usize, f64)>,
}

impl RateCurve {
    pub fn evaluate(
        label: impl Into<String>,
        ns: &[usize],
        rate: impl Fn(usize) -> Result<f64>,
    ) -> Result<Self> {
        let points = ns
            .iter()
            .map(|&n| rate(n).map(|v| (n, v)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { label: label.into(), points })
    }
}
