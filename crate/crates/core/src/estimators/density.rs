//! Orthogonal-series density estimation on [0, 1] with the trigonometric
//! basis φ_0 = 1, φ_{2j-1}(t) = √2 sin(2πjt), φ_{2j}(t) = √2 cos(2πjt).

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{at_record, require_nonempty};
use crate::mechanisms::{Channel, LaplaceSensitivity};
use crate::numeric::CompensatedSum;
use crate::privacy::PrivacyLevel;
use crate::random::Rng;

/// sup_t |φ_j(t)| for j ≥ 1.
pub const TRIG_SUP_BOUND: f64 = SQRT_2;

/// φ_j(t) without the domain check.
#[inline]
fn basis(j: usize, t: f64) -> f64 {
    if j == 0 {
        return 1.0;
    }
    let freq = j.div_ceil(2) as f64;
    let arg = 2.0 * PI * freq * t;
    if j % 2 == 1 {
        SQRT_2 * arg.sin()
    } else {
        SQRT_2 * arg.cos()
    }
}

pub fn trig_basis_eval(j: usize, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("basis argument must lie in [0, 1], got {t}")));
    }
    Ok(basis(j, t))
}

fn fill_basis(t: f64, out: &mut [f64]) {
    for (j, o) in out.iter_mut().enumerate() {
        *o = basis(j + 1, t);
    }
}

/// Number of non-constant basis functions: max(1, round((nε²)^{1/(2β+2)})).
pub fn density_order(n: usize, beta: f64, level: &PrivacyLevel) -> Result<usize> {
    check_beta(beta)?;
    let ne2 = n as f64 * level.epsilon().powi(2);
    Ok((ne2.powf(1.0 / (2.0 * beta + 2.0)).round() as usize).max(1))
}

/// Classical bandwidth n^{1/(2β+1)} for the non-private estimator.
pub fn classical_density_order(n: usize, beta: f64) -> Result<usize> {
    check_beta(beta)?;
    Ok(((n as f64).powf(1.0 / (2.0 * beta + 1.0)).round() as usize).max(1))
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.5 && beta.is_finite()) {
        return Err(Error::param(format!("smoothness beta must exceed 1/2, got {beta}")));
    }
    Ok(())
}

/// f̂(t) = 1 + Σ_{j=1..k} coeffs[j-1] · φ_j(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub k: usize,
    pub coeffs: Vec<f64>,
    pub beta: f64,
    pub orth_bound: f64,
}

impl DensityEstimate {
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::domain(format!("evaluation point must lie in [0, 1], got {t}")));
        }
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: f64) -> f64 {
        1.0 + self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * basis(j + 1, t))
            .sum::<f64>()
    }

    /// ∫₀¹ (f̂ - f)² by the midpoint rule on `points` cells.
    pub fn l2_error_sq(&self, f: impl Fn(f64) -> f64, points: usize) -> f64 {
        let h = 1.0 / points.max(1) as f64;
        let mut acc = CompensatedSum::new();
        for i in 0..points.max(1) {
            let t = (i as f64 + 0.5) * h;
            let e = self.eval_unchecked(t) - f(t);
            acc.add(e * e);
        }
        acc.value() * h
    }
}

fn check_data(data: &[f64]) -> Result<()> {
    require_nonempty(data, "data")?;
    if data.len() < 2 {
        return Err(Error::param("density estimation needs at least two observations"));
    }
    if let Some(i) = data.iter().position(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::domain(format!(
            "record {i}: observation {} outside [0, 1]",
            data[i]
        )));
    }
    Ok(())
}

fn coefficient_average(
    data: &[f64],
    k: usize,
    mut privatize: impl FnMut(usize, &[f64], &mut [f64]) -> Result<()>,
) -> Result<Vec<f64>> {
    let mut v = vec![0.0; k];
    let mut z = vec![0.0; k];
    let mut acc = vec![CompensatedSum::new(); k];
    for (i, &x) in data.iter().enumerate() {
        fill_basis(x, &mut v);
        privatize(i, &v, &mut z)?;
        acc.iter_mut().zip(&z).for_each(|(a, zj)| a.add(*zj));
    }
    let n = data.len() as f64;
    Ok(acc.iter().map(|a| a.value() / n).collect())
}

/// Private estimator with the bandwidth from [`density_order`].
pub fn density_estimate(
    data: &[f64],
    beta: f64,
    level: &PrivacyLevel,
    rng: &mut Rng,
) -> Result<DensityEstimate> {
    let k = density_order(data.len(), beta, level)?;
    density_estimate_with_order(data, k, beta, level, rng)
}

/// Private estimator with an explicit order: one ℓ∞-sampler call of radius
/// √2 per observation on [φ_1(X_i), ..., φ_k(X_i)].
pub fn density_estimate_with_order(
    data: &[f64],
    k: usize,
    beta: f64,
    level: &PrivacyLevel,
    rng: &mut Rng,
) -> Result<DensityEstimate> {
    check_beta(beta)?;
    check_data(data)?;
    let channel = Channel::linf_ball(k, TRIG_SUP_BOUND, *level)?;
    let coeffs = coefficient_average(data, k, |i, v, z| {
        channel.privatize_into(v, rng, z).map_err(at_record(i))
    })?;
    Ok(DensityEstimate { k, coeffs, beta, orth_bound: TRIG_SUP_BOUND })
}

/// Baseline with ℓ1-calibrated Laplace noise on the same basis vector.
pub fn laplace_density_estimate(
    data: &[f64],
    k: usize,
    beta: f64,
    level: &PrivacyLevel,
    rng: &mut Rng,
) -> Result<DensityEstimate> {
    check_beta(beta)?;
    check_data(data)?;
    let channel = Channel::laplace_vector(k, TRIG_SUP_BOUND, *level, LaplaceSensitivity::L1)?;
    let coeffs = coefficient_average(data, k, |i, v, z| {
        channel.privatize_into(v, rng, z).map_err(at_record(i))
    })?;
    Ok(DensityEstimate { k, coeffs, beta, orth_bound: TRIG_SUP_BOUND })
}

/// Classical projection estimator θ̂_j = (1/n) Σ φ_j(X_i).
pub fn classical_density_estimate(data: &[f64], k: usize, beta: f64) -> Result<DensityEstimate> {
    check_beta(beta)?;
    check_data(data)?;
    if k == 0 {
        return Err(Error::param("basis order must be at least 1"));
    }
    let coeffs = coefficient_average(data, k, |_, v, z| {
        z.copy_from_slice(v);
        Ok(())
    })?;
    Ok(DensityEstimate { k, coeffs, beta, orth_bound: TRIG_SUP_BOUND })
}
