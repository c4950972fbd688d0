use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::sgd::{Projection, SgdState, StepSchedule};
use crate::estimators::{at_record, require_nonempty};
use crate::mechanisms::{constants::check_radius, Channel};
use crate::privacy::PrivacyLevel;
use crate::random::Rng;

/// Interval the median is known to lie in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MedianInterval {
    /// [-r, r]
    #[default]
    Symmetric,
    /// [0, r], for data known to have a nonnegative median.
    NonNegative,
}

/// Private median by projected SGD on E|X - θ| with randomized-response
/// subgradients Z_i = φ_ε · W_i · sign(θ_i - X_i), steps γ_i = ε·r/√i, and
/// the Polyak average as output. θ₀ is uniform on the interval.
///
/// For ε ≤ 1 the excess risk E|X - θ̂| - E|X - med| is at most 6r/√(nε²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MedianSgd {
    radius: f64,
    interval: MedianInterval,
}

impl MedianSgd {
    pub fn new(radius: f64, interval: MedianInterval) -> Result<Self> {
        check_radius(radius)?;
        Ok(Self { radius, interval })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn bounds(&self) -> (f64, f64) {
        match self.interval {
            MedianInterval::Symmetric => (-self.radius, self.radius),
            MedianInterval::NonNegative => (0.0, self.radius),
        }
    }

    pub fn fit(&self, stream: &[f64], level: &PrivacyLevel, rng: &mut Rng) -> Result<f64> {
        Ok(self.run(stream, level, rng, |_| {})?.average()[0])
    }

    /// Like [`MedianSgd::fit`], also returning every iterate θ_1..θ_n at
    /// which a subgradient was taken.
    pub fn fit_with_trace(
        &self,
        stream: &[f64],
        level: &PrivacyLevel,
        rng: &mut Rng,
    ) -> Result<(f64, Vec<f64>)> {
        let mut trace = Vec::with_capacity(stream.len());
        let state = self.run(stream, level, rng, |theta| trace.push(theta))?;
        Ok((state.average()[0], trace))
    }

    fn run(
        &self,
        stream: &[f64],
        level: &PrivacyLevel,
        rng: &mut Rng,
        mut observe: impl FnMut(f64),
    ) -> Result<SgdState> {
        require_nonempty(stream, "stream")?;
        let (lo, hi) = self.bounds();
        let theta0 = lo + (hi - lo) * rng.uniform();
        let mut state = SgdState::new(
            vec![theta0],
            StepSchedule::Median {
                eps: level.epsilon(),
                radius: self.radius,
            },
            Projection::Interval { lo, hi },
        );
        let channel = Channel::sign_rr(*level);
        for (i, &x) in stream.iter().enumerate() {
            if x.is_nan() {
                return Err(Error::domain(format!("record {i}: NaN observation")));
            }
            let theta = state.theta()[0];
            observe(theta);
            let s = if theta > x {
                1.0
            } else if theta < x {
                -1.0
            } else {
                // Any point of [-1, 1] is a subgradient at a tie.
                rng.fair_sign()
            };
            let z = channel.privatize_scalar(s, rng).map_err(at_record(i))?;
            state.step(&[z]);
        }
        Ok(state)
    }
}

/// Private median over the symmetric interval [-r, r].
pub fn private_median_sgd(
    stream: &[f64],
    radius: f64,
    level: &PrivacyLevel,
    rng: &mut Rng,
) -> Result<f64> {
    MedianSgd::new(radius, MedianInterval::Symmetric)?.fit(stream, level, rng)
}

/// Baseline: median of clamp(X_i, r) + Laplace(ε / 2r).
pub fn naive_private_median(
    data: &[f64],
    radius: f64,
    level: &PrivacyLevel,
    rng: &mut Rng,
) -> Result<f64> {
    require_nonempty(data, "data")?;
    let channel = Channel::naive_median(radius, *level)?;
    let views = data
        .iter()
        .enumerate()
        .map(|(i, &x)| channel.privatize_scalar(x, rng).map_err(at_record(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(sample_median(views))
}

/// Midpoint median of a sample.
pub fn sample_median(mut xs: Vec<f64>) -> f64 {
    assert!(!xs.is_empty(), "median of an empty sample");
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}
