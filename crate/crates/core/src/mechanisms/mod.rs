//! ε-locally private channels.
//!
//! A [`Channel`] maps one raw record to one privatized record. The
//! minimax-optimal channels are the truncated Laplace scalar channel, the
//! ℓ2- and ℓ∞-ball halfspace samplers and sign randomized response; the
//! additive-Laplace vector channel and the clamp-and-noise median channel are
//! the baselines they are compared against.
//!
//! Every channel except the clamp-and-noise median channel is unbiased:
//! E[Z | X = x] = x on its input domain.

mod additive;
pub mod constants;
mod halfspace;

use std::cell::Cell;

use serde::{Deserialize, Serialize};

pub use constants::{
    cube_halfspace_factor, cube_tie_fraction, l2_bound, linf_bound, sphere_halfspace_factor,
};

use crate::error::{Error, Result};
use crate::privacy::PrivacyLevel;
use crate::random::Rng;

/// Attempt cap for the halfspace rejection samplers. Each attempt accepts
/// with probability at least 1/2.
pub const MAX_REJECTION_ATTEMPTS: usize = 10_000;

/// Relative slack allowed on the domain check of the ball channels.
pub const DOMAIN_SLACK: f64 = 1e-9;

thread_local! {
    static INVOCATIONS: Cell<u64> = const { Cell::new(0) };
}

/// Number of `privatize` calls made on this thread since the last reset.
pub fn invocation_count() -> u64 {
    INVOCATIONS.with(Cell::get)
}

pub fn reset_invocation_count() {
    INVOCATIONS.with(|c| c.set(0));
}

#[inline]
fn record_invocation() {
    INVOCATIONS.with(|c| c.set(c.get() + 1));
}

/// How the additive-Laplace baseline calibrates its noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplaceSensitivity {
    /// Inputs in the box ‖x‖∞ ≤ r, per-coordinate range 2r, ℓ1 sensitivity
    /// 2rd: inverse scale ε / (2rd).
    L1,
    /// Inputs in the ball ‖x‖₂ ≤ r: inverse scale ε / (2r√d).
    L2Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    TruncatedLaplaceScalar,
    L2Ball,
    LinfBall,
    SignRr,
    LaplaceVectorBaseline(LaplaceSensitivity),
    NaiveMedianBaseline,
}

impl ChannelKind {
    /// Whether the output takes finitely many values.
    pub fn is_discrete(&self) -> bool {
        matches!(self, ChannelKind::LinfBall | ChannelKind::SignRr)
    }
}

/// Assumed moment bound E[|X|^k]^(1/k) ≤ radius_k for scalar mean estimation.
/// `k = f64::INFINITY` means |X| ≤ radius_k almost surely.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentAssumption {
    k: f64,
    radius_k: f64,
}

impl MomentAssumption {
    pub fn new(k: f64, radius_k: f64) -> Result<Self> {
        if k.is_nan() || k <= 1.0 {
            return Err(Error::param(format!("moment order must exceed 1, got {k}")));
        }
        constants::check_radius(radius_k)?;
        Ok(Self { k, radius_k })
    }

    pub fn bounded(radius: f64) -> Result<Self> {
        Self::new(f64::INFINITY, radius)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn radius_k(&self) -> f64 {
        self.radius_k
    }

    /// T = radius_k · (n ε²)^(1/(2k)).
    pub fn truncation_level(&self, n: usize, level: &PrivacyLevel) -> Result<f64> {
        if n == 0 {
            return Err(Error::param("sample size must be at least 1"));
        }
        let eff = n as f64 * level.epsilon() * level.epsilon();
        Ok(self.radius_k * eff.powf(1.0 / (2.0 * self.k)))
    }
}

/// A configured privatizer. Immutable after construction; every call to
/// [`Channel::privatize`] takes its own exclusive [`Rng`].
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    kind: ChannelKind,
    level: PrivacyLevel,
    radius: f64,
    dim: usize,
    bound: f64,
    rounding: f64,
    /// ℓ∞ sampler only: probability of the halfspace branch (below 1 for
    /// even d, where the rest of the mass goes to a uniform vertex).
    halfspace_prob: f64,
}

impl Channel {
    /// Scalar channel clamp(x, T) + Laplace(ε / 2T), with T from the moment
    /// assumption and the sample size.
    pub fn truncated_laplace(
        assumption: &MomentAssumption,
        n: usize,
        level: PrivacyLevel,
    ) -> Result<Self> {
        let t = assumption.truncation_level(n, &level)?;
        Ok(Self {
            kind: ChannelKind::TruncatedLaplaceScalar,
            level,
            radius: t,
            dim: 1,
            bound: level.epsilon() / (2.0 * t),
            rounding: t,
            halfspace_prob: 1.0,
        })
    }

    /// Halfspace sampler on the sphere of radius B for inputs with ‖x‖₂ ≤ r.
    pub fn l2_ball(dim: usize, radius: f64, level: PrivacyLevel) -> Result<Self> {
        let bound = l2_bound(dim, radius, &level)?;
        Ok(Self {
            kind: ChannelKind::L2Ball,
            level,
            radius,
            dim,
            bound,
            rounding: radius,
            halfspace_prob: 1.0,
        })
    }

    /// Halfspace sampler on {-B, B}^d for inputs with ‖x‖∞ ≤ r.
    pub fn linf_ball(dim: usize, radius: f64, level: PrivacyLevel) -> Result<Self> {
        let bound = linf_bound(dim, radius, &level)?;
        Ok(Self {
            kind: ChannelKind::LinfBall,
            level,
            radius,
            dim,
            bound,
            rounding: radius,
            halfspace_prob: 1.0 / (1.0 + constants::cube_tie_fraction(dim)?),
        })
    }

    /// Randomized response on a sign, rescaled by φ_ε so that E[Z | s] = s.
    pub fn sign_rr(level: PrivacyLevel) -> Self {
        Self {
            kind: ChannelKind::SignRr,
            level,
            radius: 1.0,
            dim: 1,
            bound: level.phi(),
            rounding: 1.0,
            halfspace_prob: 1.0,
        }
    }

    pub fn laplace_vector(
        dim: usize,
        radius: f64,
        level: PrivacyLevel,
        sensitivity: LaplaceSensitivity,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dimension must be at least 1"));
        }
        constants::check_radius(radius)?;
        let d = dim as f64;
        let inv_scale = match sensitivity {
            LaplaceSensitivity::L1 => level.epsilon() / (2.0 * radius * d),
            LaplaceSensitivity::L2Paper => level.epsilon() / (2.0 * radius * d.sqrt()),
        };
        Ok(Self {
            kind: ChannelKind::LaplaceVectorBaseline(sensitivity),
            level,
            radius,
            dim,
            bound: inv_scale,
            rounding: radius,
            halfspace_prob: 1.0,
        })
    }

    /// clamp(x, r) + Laplace(ε / 2r). Preserves the median of the clamped
    /// law but not the mean.
    pub fn naive_median(radius: f64, level: PrivacyLevel) -> Result<Self> {
        constants::check_radius(radius)?;
        Ok(Self {
            kind: ChannelKind::NaiveMedianBaseline,
            level,
            radius,
            dim: 1,
            bound: level.epsilon() / (2.0 * radius),
            rounding: radius,
            halfspace_prob: 1.0,
        })
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn level(&self) -> &PrivacyLevel {
        &self.level
    }

    /// Input-domain radius (the truncation level T for the truncated
    /// Laplace channel).
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Output magnitude: ‖Z‖₂ for L2Ball, |Z_j| for LinfBall, φ_ε for SignRr.
    /// `None` for the additive channels, whose output is unbounded.
    pub fn output_bound(&self) -> Option<f64> {
        match self.kind {
            ChannelKind::L2Ball | ChannelKind::LinfBall | ChannelKind::SignRr => Some(self.bound),
            _ => None,
        }
    }

    /// Inverse scale α of the Laplace noise for the additive channels.
    pub fn noise_inv_scale(&self) -> Option<f64> {
        match self.kind {
            ChannelKind::TruncatedLaplaceScalar
            | ChannelKind::LaplaceVectorBaseline(_)
            | ChannelKind::NaiveMedianBaseline => Some(self.bound),
            _ => None,
        }
    }

    /// Privatize one record. The output has length [`Channel::dim`].
    pub fn privatize(&self, x: &[f64], rng: &mut Rng) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.privatize_into(x, rng, &mut out)?;
        Ok(out)
    }

    pub fn privatize_into(&self, x: &[f64], rng: &mut Rng, out: &mut [f64]) -> Result<()> {
        if x.len() != self.dim || out.len() != self.dim {
            return Err(Error::param(format!(
                "channel expects dimension {}, got input {} / output {}",
                self.dim,
                x.len(),
                out.len()
            )));
        }
        if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite input coordinate {bad}")));
        }
        record_invocation();
        match self.kind {
            ChannelKind::TruncatedLaplaceScalar => {
                out[0] = additive::truncated_laplace(x[0], self.rounding, self.bound, rng)?;
            }
            ChannelKind::NaiveMedianBaseline => {
                out[0] = additive::truncated_laplace(x[0], self.radius, self.bound, rng)?;
            }
            ChannelKind::SignRr => {
                out[0] = additive::sign_rr(x[0], &self.level, rng)?;
            }
            ChannelKind::LaplaceVectorBaseline(sens) => {
                additive::laplace_vector(x, self.radius, sens, self.bound, rng, out)?;
            }
            ChannelKind::L2Ball => {
                halfspace::l2_ball(x, self.radius, self.bound, &self.level, rng, out)?;
            }
            ChannelKind::LinfBall => {
                halfspace::linf_ball(
                    x,
                    self.radius,
                    self.bound,
                    self.halfspace_prob,
                    &self.level,
                    rng,
                    out,
                )?;
            }
        }
        Ok(())
    }

    /// Convenience for the scalar kinds.
    pub fn privatize_scalar(&self, x: f64, rng: &mut Rng) -> Result<f64> {
        let mut out = [0.0];
        self.privatize_into(&[x], rng, &mut out)?;
        Ok(out[0])
    }
}

/// clamp(x, T) + Laplace(ε / 2T) with T = radius_k · (n ε²)^(1/(2k)).
pub fn truncated_laplace_mean_channel(
    x: f64,
    assumption: &MomentAssumption,
    n: usize,
    level: &PrivacyLevel,
    rng: &mut Rng,
) -> Result<f64> {
    Channel::truncated_laplace(assumption, n, *level)?.privatize_scalar(x, rng)
}

pub fn l2_ball_channel(
    x: &[f64],
    radius: f64,
    level: &PrivacyLevel,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    Channel::l2_ball(x.len(), radius, *level)?.privatize(x, rng)
}

pub fn linf_ball_channel(
    x: &[f64],
    radius: f64,
    level: &PrivacyLevel,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    Channel::linf_ball(x.len(), radius, *level)?.privatize(x, rng)
}

/// `s` must be exactly -1 or +1.
pub fn sign_rr_channel(s: f64, level: &PrivacyLevel, rng: &mut Rng) -> Result<f64> {
    Channel::sign_rr(*level).privatize_scalar(s, rng)
}

pub fn laplace_vector_channel(
    x: &[f64],
    radius: f64,
    level: &PrivacyLevel,
    sensitivity: LaplaceSensitivity,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    Channel::laplace_vector(x.len(), radius, *level, sensitivity)?.privatize(x, rng)
}

pub fn naive_median_channel(
    x: f64,
    radius: f64,
    level: &PrivacyLevel,
    rng: &mut Rng,
) -> Result<f64> {
    Channel::naive_median(radius, *level)?.privatize_scalar(x, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_levels() {
        let level = PrivacyLevel::new(1.0).unwrap();
        let a = MomentAssumption::new(2.0, 1.0).unwrap();
        assert!((a.truncation_level(10_000, &level).unwrap() - 10.0).abs() < 1e-12);
        let b = MomentAssumption::bounded(1.0).unwrap();
        for n in [1, 100, 1_000_000] {
            for eps in [0.1, 1.0, 4.0] {
                let l = PrivacyLevel::new(eps).unwrap();
                assert_eq!(b.truncation_level(n, &l).unwrap(), 1.0);
            }
        }
        assert!(MomentAssumption::new(1.0, 1.0).is_err());
        assert!(MomentAssumption::new(2.0, 0.0).is_err());
        assert!(a.truncation_level(0, &level).is_err());
    }

    #[test]
    fn laplace_vector_l1_variance_formula() {
        // Δ∞ = 2r = 1, d = 27, ε = 0.5: per-coordinate variance 2·(27/0.5)².
        let level = PrivacyLevel::new(0.5).unwrap();
        let ch = Channel::laplace_vector(27, 0.5, level, LaplaceSensitivity::L1).unwrap();
        let a = ch.noise_inv_scale().unwrap();
        assert!((2.0 / (a * a) - 5832.0).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch_is_parameter_error() {
        let level = PrivacyLevel::new(1.0).unwrap();
        let ch = Channel::l2_ball(3, 1.0, level).unwrap();
        let mut rng = Rng::new(0);
        assert!(matches!(
            ch.privatize(&[0.1, 0.2], &mut rng),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn invocation_counter_counts_calls() {
        reset_invocation_count();
        let level = PrivacyLevel::new(1.0).unwrap();
        let ch = Channel::sign_rr(level);
        let mut rng = Rng::new(3);
        for _ in 0..17 {
            ch.privatize_scalar(1.0, &mut rng).unwrap();
        }
        assert_eq!(invocation_count(), 17);
    }
}
