use crate::error::{Error, Result};
use crate::mechanisms::{LaplaceSensitivity, DOMAIN_SLACK};
use crate::numeric::{clamp, norm2, norm_inf};
use crate::privacy::PrivacyLevel;
use crate::random::{bernoulli_pi, laplace, Rng};

pub(super) fn truncated_laplace(x: f64, t: f64, inv_scale: f64, rng: &mut Rng) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("input is NaN"));
    }
    Ok(clamp(x, t) + laplace(rng, inv_scale))
}

pub(super) fn sign_rr(s: f64, level: &PrivacyLevel, rng: &mut Rng) -> Result<f64> {
    if s != 1.0 && s != -1.0 {
        return Err(Error::domain(format!("sign input must be -1 or +1, got {s}")));
    }
    let keep = bernoulli_pi(rng, level);
    Ok(if keep { level.phi() * s } else { -level.phi() * s })
}

pub(super) fn laplace_vector(
    x: &[f64],
    radius: f64,
    sensitivity: LaplaceSensitivity,
    inv_scale: f64,
    rng: &mut Rng,
    out: &mut [f64],
) -> Result<()> {
    let (norm, name) = match sensitivity {
        LaplaceSensitivity::L1 => (norm_inf(x), "ℓ∞"),
        LaplaceSensitivity::L2Paper => (norm2(x), "ℓ2"),
    };
    if !(norm <= radius * (1.0 + DOMAIN_SLACK)) {
        return Err(Error::domain(format!(
            "{name} norm {norm} exceeds radius {radius}"
        )));
    }
    for (o, &v) in out.iter_mut().zip(x) {
        *o = v + laplace(rng, inv_scale);
    }
    Ok(())
}
