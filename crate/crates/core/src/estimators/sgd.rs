use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{norm2, CompensatedSum};

/// Step-size rule γ_i, with i counted from 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSchedule {
    /// γ_i = ε · r / √i, the private median rule.
    Median { eps: f64, radius: f64 },
    /// γ_i = γ₀ · i^(-decay) with decay in (1/2, 1).
    Polyak { gamma0: f64, decay: f64 },
}

impl StepSchedule {
    pub fn polyak(gamma0: f64, decay: f64) -> Result<Self> {
        if !(gamma0.is_finite() && gamma0 > 0.0) {
            return Err(Error::param(format!("gamma0 must be positive, got {gamma0}")));
        }
        if !(decay > 0.5 && decay < 1.0) {
            return Err(Error::param(format!(
                "step decay exponent must lie in (1/2, 1), got {decay}"
            )));
        }
        Ok(StepSchedule::Polyak { gamma0, decay })
    }

    #[inline]
    pub fn step(&self, i: u64) -> f64 {
        let i = i.max(1) as f64;
        match *self {
            StepSchedule::Median { eps, radius } => eps * radius / i.sqrt(),
            StepSchedule::Polyak { gamma0, decay } => gamma0 * i.powf(-decay),
        }
    }
}

/// Feasible set the iterates are projected onto after every step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    None,
    /// Coordinatewise box [lo, hi].
    Interval { lo: f64, hi: f64 },
    L2Ball { radius: f64 },
}

impl Projection {
    pub fn apply(&self, theta: &mut [f64]) {
        match *self {
            Projection::None => {}
            Projection::Interval { lo, hi } => {
                theta.iter_mut().for_each(|t| *t = t.max(lo).min(hi));
            }
            Projection::L2Ball { radius } => {
                let n = norm2(theta);
                if n > radius {
                    let s = radius / n;
                    theta.iter_mut().for_each(|t| *t *= s);
                }
            }
        }
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        match *self {
            Projection::None => true,
            Projection::Interval { lo, hi } => theta.iter().all(|t| (lo..=hi).contains(t)),
            Projection::L2Ball { radius } => norm2(theta) <= radius * (1.0 + 1e-12),
        }
    }
}

/// Projected SGD with a running Polyak average.
///
/// The average covers the iterates at which gradients were evaluated:
/// after n calls to [`SgdState::step`] it is (θ_1 + ... + θ_n) / n, where θ_1
/// is the initial point.
#[derive(Debug, Clone)]
pub struct SgdState {
    theta: Vec<f64>,
    step_index: u64,
    projection: Projection,
    theta_sum: Vec<CompensatedSum>,
    schedule: StepSchedule,
}

impl SgdState {
    pub fn new(mut theta0: Vec<f64>, schedule: StepSchedule, projection: Projection) -> Self {
        projection.apply(&mut theta0);
        let dim = theta0.len();
        Self {
            theta: theta0,
            step_index: 0,
            projection,
            theta_sum: vec![CompensatedSum::new(); dim],
            schedule,
        }
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Number of gradient steps taken so far.
    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    pub fn projection(&self) -> &Projection {
        &self.projection
    }

    pub fn schedule(&self) -> &StepSchedule {
        &self.schedule
    }

    /// θ ← Π(θ - γ_i g), recording the pre-step θ in the average.
    pub fn step(&mut self, grad: &[f64]) {
        debug_assert_eq!(grad.len(), self.theta.len());
        let i = self.step_index + 1;
        let gamma = self.schedule.step(i);
        for ((t, s), g) in self.theta.iter_mut().zip(&mut self.theta_sum).zip(grad) {
            s.add(*t);
            *t -= gamma * g;
        }
        self.projection.apply(&mut self.theta);
        self.step_index = i;
    }

    /// Polyak average; the current iterate before any step has been taken.
    pub fn average(&self) -> Vec<f64> {
        if self.step_index == 0 {
            return self.theta.clone();
        }
        let n = self.step_index as f64;
        self.theta_sum.iter().map(|s| s.value() / n).collect()
    }
}
