//! Halfspace samplers for the ℓ2 and ℓ∞ balls.
//!
//! Both first round the input to a random extreme point x̃ of the ball whose
//! mean is x, flip a Bernoulli(π_ε) coin T, and then draw a uniform output on
//! the side of the hyperplane ⟨z, x̃⟩ = 0 selected by T.
//!
//! For even d the cube has vertices on the hyperplane. Counting them on both
//! sides would give a tie vertex probability 1/N against q/N elsewhere, a
//! likelihood ratio of 1 + e^ε. Instead a tie vertex gets the average of the
//! two sides' probabilities: with probability λ = 2^(d-1) / N₊ (N₊ the size
//! of {⟨z, x̃⟩ ≥ 0}) the halfspace draw assigns ties to either side by a fair
//! coin, and otherwise the output is a uniform vertex. The mean is then
//! λ (2π - 1) b / 2^(d-1) · x̃ = C_d⁻¹ x̃ / φ_ε, the same as with the
//! double-counted rule, so the bound B = r φ_ε C_d is unchanged.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::mechanisms::{DOMAIN_SLACK, MAX_REJECTION_ATTEMPTS};
use crate::numeric::{dot, norm2, norm_inf};
use crate::privacy::PrivacyLevel;
use crate::random::{bernoulli_pi, fill_uniform_sphere, Rng};

pub(super) fn l2_ball(
    x: &[f64],
    radius: f64,
    bound: f64,
    level: &PrivacyLevel,
    rng: &mut Rng,
    out: &mut [f64],
) -> Result<()> {
    let norm = norm2(x);
    if !(norm <= radius * (1.0 + DOMAIN_SLACK)) {
        return Err(Error::domain(format!(
            "ℓ2 norm {norm} exceeds radius {radius}"
        )));
    }
    let d = x.len();

    // Direction of x̃ (its length r plays no role in the halfspace test).
    let mut dir = vec![0.0; d];
    if norm > 0.0 {
        let p_plus = (0.5 + norm / (2.0 * radius)).min(1.0);
        let sign = if rng.uniform() < p_plus { 1.0 } else { -1.0 };
        for (v, &xi) in dir.iter_mut().zip(x) {
            *v = sign * xi / norm;
        }
    } else {
        fill_uniform_sphere(rng, &mut dir);
        let sign = rng.fair_sign();
        dir.iter_mut().for_each(|v| *v *= sign);
    }

    let upper = bernoulli_pi(rng, level);
    for _ in 0..MAX_REJECTION_ATTEMPTS {
        fill_uniform_sphere(rng, out);
        let side = dot(out, &dir);
        if (upper && side > 0.0) || (!upper && side <= 0.0) {
            out.iter_mut().for_each(|v| *v *= bound);
            return Ok(());
        }
    }
    Err(Error::Internal(format!(
        "ℓ2 sampler rejected {MAX_REJECTION_ATTEMPTS} proposals"
    )))
}

#[allow(clippy::too_many_arguments)]
pub(super) fn linf_ball(
    x: &[f64],
    radius: f64,
    bound: f64,
    halfspace_prob: f64,
    level: &PrivacyLevel,
    rng: &mut Rng,
    out: &mut [f64],
) -> Result<()> {
    let norm = norm_inf(x);
    if !(norm <= radius * (1.0 + DOMAIN_SLACK)) {
        return Err(Error::domain(format!(
            "ℓ∞ norm {norm} exceeds radius {radius}"
        )));
    }
    let d = x.len();
    let words = d.div_ceil(64);
    let tail_mask = if d % 64 == 0 {
        u64::MAX
    } else {
        (1u64 << (d % 64)) - 1
    };

    // Rounded vertex x̃ as a bit set: bit j set means x̃_j = +r.
    let mut rounded = vec![0u64; words];
    for (j, &xj) in x.iter().enumerate() {
        let p_plus = 0.5 + xj / (2.0 * radius);
        if rng.uniform() < p_plus {
            rounded[j / 64] |= 1 << (j % 64);
        }
    }

    let mut z = vec![0u64; words];
    let draw = |z: &mut [u64], rng: &mut Rng| {
        let mut disagree = 0i64;
        for (w, (zw, rw)) in z.iter_mut().zip(&rounded).enumerate() {
            *zw = rng.next_u64();
            if w + 1 == words {
                *zw &= tail_mask;
            }
            disagree += (*zw ^ rw).count_ones() as i64;
        }
        disagree
    };
    let emit = |z: &[u64], out: &mut [f64]| {
        for (j, o) in out.iter_mut().enumerate() {
            *o = if (z[j / 64] >> (j % 64)) & 1 == 1 {
                bound
            } else {
                -bound
            };
        }
    };

    if halfspace_prob < 1.0 && rng.uniform() >= halfspace_prob {
        draw(&mut z, rng);
        emit(&z, out);
        return Ok(());
    }
    let upper = bernoulli_pi(rng, level);
    let d_i = d as i64;
    for _ in 0..MAX_REJECTION_ATTEMPTS {
        // ⟨z, x̃⟩ in units of r: agreements minus disagreements.
        let side = d_i - 2 * draw(&mut z, rng);
        let accept = match side.cmp(&0) {
            std::cmp::Ordering::Greater => upper,
            std::cmp::Ordering::Less => !upper,
            std::cmp::Ordering::Equal => rng.next_u64() & 1 == 1,
        };
        if accept {
            emit(&z, out);
            return Ok(());
        }
    }
    Err(Error::Internal(format!(
        "ℓ∞ sampler rejected {MAX_REJECTION_ATTEMPTS} proposals"
    )))
}
