//! Reproducible randomness and the elementary samplers every channel uses.
//!
//! The Laplace sampler is parameterized by its **inverse scale** α: the
//! density is (α/2)·exp(-α|y|) and the variance is 2/α². Most libraries take
//! the scale 1/α instead; passing a scale here silently changes the variance
//! by a factor α⁴.

use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::privacy::PrivacyLevel;

/// Seeded ChaCha8 stream. Equal seeds give bit-identical draw sequences on
/// every platform.
///
/// Independent per-replicate streams come from [`Rng::derive`], which hashes
/// the base seed together with a path of indices.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Stream for `(seed, path[0], path[1], ...)`, e.g. `(seed, replicate, cell)`.
    pub fn derive(seed: u64, path: &[u64]) -> Self {
        let mut h = splitmix64(seed ^ 0x6a09_e667_f3bc_c908);
        for &p in path {
            h = splitmix64(h ^ splitmix64(p.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        }
        Self::new(h)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw on [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    #[inline]
    pub fn fair_sign(&mut self) -> f64 {
        if self.inner.next_u32() & 1 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }
}

impl RngCore for Rng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    #[inline]
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Draw from Laplace(α) with density (α/2)·exp(-α|y|).
pub fn laplace_sample(rng: &mut Rng, inv_scale: f64) -> Result<f64> {
    if !(inv_scale.is_finite() && inv_scale > 0.0) {
        return Err(Error::param(format!(
            "Laplace inverse scale must be positive and finite, got {inv_scale}"
        )));
    }
    Ok(laplace(rng, inv_scale))
}

#[inline]
pub(crate) fn laplace(rng: &mut Rng, inv_scale: f64) -> f64 {
    let e: f64 = Exp1.sample(&mut rng.inner);
    rng.fair_sign() * e / inv_scale
}

/// CDF of Laplace(α) at `y`.
pub fn laplace_cdf(y: f64, inv_scale: f64) -> f64 {
    if y < 0.0 {
        0.5 * (inv_scale * y).exp()
    } else {
        1.0 - 0.5 * (-inv_scale * y).exp()
    }
}

/// One Bernoulli(π_ε) bit: `true` with probability e^ε / (1 + e^ε).
#[inline]
pub fn bernoulli_pi(rng: &mut Rng, level: &PrivacyLevel) -> bool {
    rng.uniform() < level.pi()
}

/// Uniform point on the unit sphere in R^d, by normalizing a standard
/// Gaussian vector.
pub fn uniform_sphere(rng: &mut Rng, d: usize) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::param("sphere dimension must be at least 1"));
    }
    let mut out = vec![0.0; d];
    fill_uniform_sphere(rng, &mut out);
    Ok(out)
}

pub(crate) fn fill_uniform_sphere(rng: &mut Rng, out: &mut [f64]) {
    if let [v] = out {
        *v = rng.fair_sign();
        return;
    }
    loop {
        let mut sq = 0.0;
        for v in out.iter_mut() {
            *v = rng.standard_normal();
            sq += *v * *v;
        }
        // An all-zero Gaussian vector has probability zero; redraw anyway.
        if sq > 0.0 {
            let inv = 1.0 / sq.sqrt();
            out.iter_mut().for_each(|v| *v *= inv);
            return;
        }
    }
}
