//! Logistic regression by privatized stochastic gradients.
//!
//! Each (x_i, y_i) is touched exactly once: its loss gradient at the current
//! iterate goes through one halfspace-sampler call whose output is the
//! stochastic gradient for step i. The channel radius is 2r, the bound on
//! ‖x T(y) - ∇A(θ, x)‖ for records with ‖x‖ ≤ r.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::sgd::{Projection, SgdState, StepSchedule};
use crate::estimators::{at_record, require_nonempty, Geometry};
use crate::mechanisms::{constants::check_radius, Channel, LaplaceSensitivity};
use crate::numeric::dot;
use crate::privacy::PrivacyLevel;
use crate::random::Rng;

#[inline]
fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Gradient of log(1 + exp(-y⟨θ, x⟩)) in θ: -y · x · σ(-y⟨θ, x⟩).
pub fn logistic_gradient(theta: &[f64], x: &[f64], y: f64) -> Result<Vec<f64>> {
    if theta.len() != x.len() {
        return Err(Error::param(format!(
            "parameter has dimension {}, features {}",
            theta.len(),
            x.len()
        )));
    }
    if y != 1.0 && y != -1.0 {
        return Err(Error::domain(format!("label must be -1 or +1, got {y}")));
    }
    let mut g = vec![0.0; x.len()];
    gradient_into(theta, x, y, &mut g);
    Ok(g)
}

#[inline]
fn gradient_into(theta: &[f64], x: &[f64], y: f64, out: &mut [f64]) {
    let w = -y * sigmoid(-y * dot(theta, x));
    out.iter_mut().zip(x).for_each(|(o, xi)| *o = w * xi);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub theta: Vec<f64>,
    /// Bound on the norm of every privatized gradient input (2r).
    pub grad_bound: f64,
    pub geometry: Geometry,
}

impl LogisticModel {
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(dot(&self.theta, x))
    }

    /// Fraction of misclassified examples.
    pub fn error_rate<R: AsRef<[f64]>>(&self, data: &[(R, f64)]) -> f64 {
        if data.is_empty() {
            return 0.0;
        }
        let wrong = data
            .iter()
            .filter(|(x, y)| {
                let s = dot(&self.theta, x.as_ref());
                (s >= 0.0) != (*y > 0.0)
            })
            .count();
        wrong as f64 / data.len() as f64
    }
}

/// Configuration for logistic SGD with Polyak averaging.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticSgd {
    pub geometry: Geometry,
    /// Bound r on ‖x‖ in the chosen geometry.
    pub radius: f64,
    pub gamma0: f64,
    pub decay: f64,
    /// Optional ℓ2 projection of the iterates.
    pub projection_radius: Option<f64>,
}

impl LogisticSgd {
    pub fn new(geometry: Geometry, radius: f64) -> Self {
        Self {
            geometry,
            radius,
            gamma0: 1.0,
            decay: 0.6,
            projection_radius: None,
        }
    }

    fn state(&self, d: usize) -> Result<SgdState> {
        check_radius(self.radius)?;
        let schedule = StepSchedule::polyak(self.gamma0, self.decay)?;
        let projection = match self.projection_radius {
            Some(radius) => {
                check_radius(radius)?;
                Projection::L2Ball { radius }
            }
            None => Projection::None,
        };
        Ok(SgdState::new(vec![0.0; d], schedule, projection))
    }

    fn check_record(&self, i: usize, x: &[f64], y: f64, d: usize) -> Result<()> {
        if x.len() != d {
            return Err(Error::param(format!(
                "record {i} has dimension {}, expected {d}",
                x.len()
            )));
        }
        if y != 1.0 && y != -1.0 {
            return Err(Error::domain(format!("record {i}: label must be -1 or +1, got {y}")));
        }
        let n = self.geometry.norm(x);
        if !(n <= self.radius * (1.0 + crate::mechanisms::DOMAIN_SLACK)) {
            return Err(Error::domain(format!(
                "record {i}: feature norm {n} exceeds radius {}",
                self.radius
            )));
        }
        Ok(())
    }

    fn run<R: AsRef<[f64]>>(
        &self,
        stream: &[(R, f64)],
        mut privatize: impl FnMut(usize, &[f64], &mut [f64]) -> Result<()>,
    ) -> Result<LogisticModel> {
        require_nonempty(stream, "stream")?;
        let d = stream[0].0.as_ref().len();
        let mut state = self.state(d)?;
        let mut grad = vec![0.0; d];
        let mut noisy = vec![0.0; d];
        for (i, (x, y)) in stream.iter().enumerate() {
            let x = x.as_ref();
            self.check_record(i, x, *y, d)?;
            gradient_into(state.theta(), x, *y, &mut grad);
            privatize(i, &grad, &mut noisy)?;
            state.step(&noisy);
        }
        Ok(LogisticModel {
            theta: state.average(),
            grad_bound: 2.0 * self.radius,
            geometry: self.geometry,
        })
    }

    /// Private fit with the halfspace sampler matching the geometry.
    pub fn fit_private<R: AsRef<[f64]>>(
        &self,
        stream: &[(R, f64)],
        level: &PrivacyLevel,
        rng: &mut Rng,
    ) -> Result<LogisticModel> {
        let d = stream.first().map(|(x, _)| x.as_ref().len()).unwrap_or(1).max(1);
        let channel = match self.geometry {
            Geometry::L2 => Channel::l2_ball(d, 2.0 * self.radius, *level)?,
            Geometry::Linf => Channel::linf_ball(d, 2.0 * self.radius, *level)?,
        };
        self.run(stream, |i, g, out| {
            channel.privatize_into(g, rng, out).map_err(at_record(i))
        })
    }

    /// Baseline fit with additive Laplace noise on each gradient.
    pub fn fit_laplace<R: AsRef<[f64]>>(
        &self,
        stream: &[(R, f64)],
        level: &PrivacyLevel,
        rng: &mut Rng,
    ) -> Result<LogisticModel> {
        let d = stream.first().map(|(x, _)| x.as_ref().len()).unwrap_or(1).max(1);
        let sens = match self.geometry {
            Geometry::L2 => LaplaceSensitivity::L2Paper,
            Geometry::Linf => LaplaceSensitivity::L1,
        };
        let channel = Channel::laplace_vector(d, 2.0 * self.radius, *level, sens)?;
        self.run(stream, |i, g, out| {
            channel.privatize_into(g, rng, out).map_err(at_record(i))
        })
    }

    /// Same SGD on the raw gradients.
    pub fn fit_nonprivate<R: AsRef<[f64]>>(&self, stream: &[(R, f64)]) -> Result<LogisticModel> {
        self.run(stream, |_, g, out| {
            out.copy_from_slice(g);
            Ok(())
        })
    }
}

/// Private logistic SGD from step parameters γ₀ and decay exponent β.
pub fn private_logistic_sgd<R: AsRef<[f64]>>(
    stream: &[(R, f64)],
    geometry: Geometry,
    radius: f64,
    level: &PrivacyLevel,
    gamma0: f64,
    beta_exp: f64,
    rng: &mut Rng,
) -> Result<LogisticModel> {
    LogisticSgd {
        gamma0,
        decay: beta_exp,
        ..LogisticSgd::new(geometry, radius)
    }
    .fit_private(stream, level, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::{invocation_count, reset_invocation_count};

    #[test]
    fn gradient_at_zero_is_half() {
        let g = logistic_gradient(&[0.0, 0.0], &[0.4, -1.0], 1.0).unwrap();
        assert_eq!(g, vec![-0.2, 0.5]);
        let g = logistic_gradient(&[0.0], &[0.4], -1.0).unwrap();
        assert_eq!(g, vec![0.2]);
    }

    #[test]
    fn gradient_saturates() {
        let g = logistic_gradient(&[1e3], &[1.0], 1.0).unwrap();
        assert!(g[0].abs() < 1e-300);
    }

    #[test]
    fn gradient_errors() {
        assert!(matches!(
            logistic_gradient(&[0.0], &[1.0, 2.0], 1.0),
            Err(Error::Parameter(_))
        ));
        assert!(logistic_gradient(&[0.0], &[1.0], 0.0).is_err());
    }

    #[test]
    fn radius_violation_is_domain_error() {
        let level = PrivacyLevel::new(1.0).unwrap();
        let data = vec![(vec![0.5, 0.5], 1.0), (vec![2.0, 0.0], -1.0)];
        let err = LogisticSgd::new(Geometry::Linf, 1.0)
            .fit_private(&data, &level, &mut Rng::new(0))
            .unwrap_err();
        assert!(matches!(err, Error::Domain(ref m) if m.contains("record 1")), "{err}");
    }

    #[test]
    fn one_channel_call_per_example() {
        let level = PrivacyLevel::new(1.0).unwrap();
        let data: Vec<(Vec<f64>, f64)> = (0..300)
            .map(|i| (vec![if i % 3 == 0 { 1.0 } else { -1.0 }; 4], if i % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
        let mut rng = Rng::new(2);
        for g in [Geometry::L2, Geometry::Linf] {
            let cfg = LogisticSgd::new(g, 2.0);
            reset_invocation_count();
            cfg.fit_private(&data, &level, &mut rng).unwrap();
            assert_eq!(invocation_count(), 300);
        }
    }

    #[test]
    fn projection_keeps_iterates_bounded() {
        let level = PrivacyLevel::new(0.5).unwrap();
        let data: Vec<(Vec<f64>, f64)> = (0..2000).map(|i| (vec![1.0, -1.0, 1.0], if i % 5 == 0 { -1.0 } else { 1.0 })).collect();
        let cfg = LogisticSgd {
            gamma0: 5.0,
            projection_radius: Some(5.0),
            ..LogisticSgd::new(Geometry::Linf, 1.0)
        };
        let m = cfg.fit_private(&data, &level, &mut Rng::new(4)).unwrap();
        assert!(m.theta.iter().all(|t| t.is_finite()));
        assert!(crate::numeric::norm2(&m.theta) <= 5.0 + 1e-9);
    }
}
