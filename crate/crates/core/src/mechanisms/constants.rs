//! Output-magnitude constants of the halfspace samplers.
//!
//! Both samplers emit a point of norm B on the side of a random hyperplane
//! through the (rounded) input. A uniform draw from the half-sphere or
//! half-cube has mean `m_d · x̃` for a dimension-dependent factor `m_d`, so
//! choosing B = r · φ_ε / m_d makes the output unbiased.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::numeric::{binomial, ln_binomial};
use crate::privacy::PrivacyLevel;

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::param("dimension must be at least 1"))
    } else {
        Ok(())
    }
}

/// Mean length of a uniform point on the unit half-sphere in R^d, along the
/// pole: c_d = 2Γ(d/2 + 1) / (√π · d · Γ((d-1)/2 + 1)).
///
/// Evaluated through log-Γ so it stays finite for any d.
pub fn sphere_halfspace_factor(d: usize) -> Result<f64> {
    check_dim(d)?;
    let d = d as f64;
    let log_ratio = ln_gamma(d / 2.0 + 1.0) - ln_gamma((d - 1.0) / 2.0 + 1.0);
    Ok(2.0 / (std::f64::consts::PI.sqrt() * d) * log_ratio.exp())
}

/// Factor C_d⁻¹ with E[Z | ⟨Z, x⟩ ≥ 0] = C_d⁻¹ · x for Z uniform on
/// {-1, 1}^d and x a vertex.
///
/// Odd d: C(d-1, (d-1)/2) / 2^(d-1). Even d: b / (2^(d-1) + b) with
/// b = C(d-1, d/2) = C(d, d/2)/2, the extra b counting the tie vertices.
pub fn cube_halfspace_factor(d: usize) -> Result<f64> {
    check_dim(d)?;
    let n = (d - 1) as u64;
    if d <= 64 {
        let pow = 1u128 << n;
        let f = if d % 2 == 1 {
            let b = binomial(n, n / 2).expect("fits u128 for d <= 64");
            b as f64 / pow as f64
        } else {
            let b = binomial(n, (d / 2) as u64).expect("fits u128 for d <= 64");
            b as f64 / (pow + b) as f64
        };
        return Ok(f);
    }
    let ln2 = std::f64::consts::LN_2;
    Ok(if d % 2 == 1 {
        (ln_binomial(n, n / 2) - n as f64 * ln2).exp()
    } else {
        let t = (ln_binomial(n, (d / 2) as u64) - n as f64 * ln2).exp();
        t / (1.0 + t)
    })
}

/// Fraction of cube vertices z with ⟨z, x⟩ = 0 for a vertex x:
/// C(d, d/2) / 2^d for even d, zero for odd d.
pub fn cube_tie_fraction(d: usize) -> Result<f64> {
    check_dim(d)?;
    if d % 2 == 1 {
        return Ok(0.0);
    }
    let half = (d / 2) as u64;
    if d < 128 {
        if let Some(b) = binomial(d as u64, half) {
            return Ok(b as f64 / 2f64.powi(d as i32));
        }
    }
    Ok((ln_binomial(d as u64, half) - d as f64 * std::f64::consts::LN_2).exp())
}

/// Output norm B of the ℓ2-ball sampler: B = r · φ_ε / c_d.
pub fn l2_bound(d: usize, radius: f64, level: &PrivacyLevel) -> Result<f64> {
    check_radius(radius)?;
    Ok(radius * level.phi() / sphere_halfspace_factor(d)?)
}

/// Per-coordinate output magnitude B of the ℓ∞-ball sampler: B = r · φ_ε · C_d.
pub fn linf_bound(d: usize, radius: f64, level: &PrivacyLevel) -> Result<f64> {
    check_radius(radius)?;
    Ok(radius * level.phi() / cube_halfspace_factor(d)?)
}

pub(crate) fn check_radius(radius: f64) -> Result<()> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!(
            "radius must be positive and finite, got {radius}"
        )))
    }
}
