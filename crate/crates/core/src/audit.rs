//! Verification oracles: exact enumeration of small discrete channels,
//! Monte Carlo unbiasedness checks, likelihood-ratio certification and
//! log-log slope fitting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanisms::{Channel, ChannelKind, DOMAIN_SLACK};
use crate::numeric::{norm_inf, CompensatedSum, RunningMoments};
use crate::random::Rng;

/// Largest dimension [`channel_pmf`] and [`verify_dp`] will enumerate.
pub const MAX_PMF_DIM: usize = 8;
/// Largest dimension [`halfspace_expectation_cube`] will enumerate.
pub const MAX_VERTEX_DIM: usize = 20;

/// Exact output law of a discrete channel at one input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumeratedPmf {
    pub support: Vec<Vec<f64>>,
    pub probs: Vec<f64>,
}

impl EnumeratedPmf {
    pub fn total(&self) -> f64 {
        self.probs.iter().copied().collect::<CompensatedSum>().value()
    }

    /// Σ_z z · p(z), summed with compensation.
    pub fn mean(&self) -> Vec<f64> {
        let d = self.support.first().map_or(0, Vec::len);
        (0..d)
            .map(|j| {
                self.support
                    .iter()
                    .zip(&self.probs)
                    .map(|(z, p)| z[j] * p)
                    .collect::<CompensatedSum>()
                    .value()
            })
            .collect()
    }

    pub fn prob_of(&self, z: &[f64]) -> f64 {
        self.support
            .iter()
            .position(|s| s.as_slice() == z)
            .map_or(0.0, |i| self.probs[i])
    }
}

/// Mean of the cube vertices z ∈ {-1, 1}^d with ⟨z, x⟩ ≥ 0, by enumeration.
pub fn halfspace_expectation_cube(x_vertex: &[f64]) -> Result<Vec<f64>> {
    let d = x_vertex.len();
    if d == 0 {
        return Err(Error::param("vertex must have at least one coordinate"));
    }
    if d > MAX_VERTEX_DIM {
        return Err(Error::Size(format!(
            "vertex enumeration is capped at d = {MAX_VERTEX_DIM}, got {d}"
        )));
    }
    if x_vertex.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::domain("vertex coordinates must be -1 or +1"));
    }
    let x_bits = vertex_bits(x_vertex);
    let d_i = d as i64;
    let mut sums = vec![0i64; d];
    let mut accepted = 0i64;
    for z in 0u32..(1u32 << d) {
        let disagree = (z ^ x_bits).count_ones() as i64;
        if d_i - 2 * disagree >= 0 {
            accepted += 1;
            for (j, s) in sums.iter_mut().enumerate() {
                *s += if (z >> j) & 1 == 1 { 1 } else { -1 };
            }
        }
    }
    Ok(sums.iter().map(|&s| s as f64 / accepted as f64).collect())
}

fn vertex_bits(v: &[f64]) -> u32 {
    v.iter()
        .enumerate()
        .filter(|(_, &x)| x > 0.0)
        .fold(0, |acc, (j, _)| acc | (1 << j))
}

/// Exact pmf of a discrete-output channel at input `x`.
///
/// For the ℓ∞ sampler this sums over all 2^d roundings x̃ and all 2^d output
/// vertices, so it is limited to d ≤ [`MAX_PMF_DIM`].
pub fn channel_pmf(channel: &Channel, x: &[f64]) -> Result<EnumeratedPmf> {
    if x.len() != channel.dim() {
        return Err(Error::param(format!(
            "input has dimension {}, channel expects {}",
            x.len(),
            channel.dim()
        )));
    }
    let level = channel.level();
    let pi = level.pi();
    let q = 1.0 / (1.0 + level.exp_eps());
    match channel.kind() {
        ChannelKind::SignRr => {
            let s = x[0];
            if s != 1.0 && s != -1.0 {
                return Err(Error::domain(format!("sign must be -1 or +1, got {s}")));
            }
            let phi = level.phi();
            Ok(EnumeratedPmf {
                support: vec![vec![phi], vec![-phi]],
                probs: if s > 0.0 { vec![pi, q] } else { vec![q, pi] },
            })
        }
        ChannelKind::LinfBall => linf_pmf(channel, x, pi, q),
        other => Err(Error::Unsupported(format!(
            "no exact pmf for continuous-output channel {other:?}"
        ))),
    }
}

fn linf_pmf(channel: &Channel, x: &[f64], pi: f64, q: f64) -> Result<EnumeratedPmf> {
    let d = x.len();
    if d > MAX_PMF_DIM {
        return Err(Error::Size(format!(
            "pmf enumeration is capped at d = {MAX_PMF_DIM}, got {d}"
        )));
    }
    let r = channel.radius();
    let bound = channel.output_bound().expect("ℓ∞ channel has an output bound");
    let norm = norm_inf(x);
    if !(norm <= r * (1.0 + DOMAIN_SLACK)) {
        return Err(Error::domain(format!("ℓ∞ norm {norm} exceeds radius {r}")));
    }
    let p_plus: Vec<f64> = x.iter().map(|&xj| (0.5 + xj / (2.0 * r)).clamp(0.0, 1.0)).collect();
    let n_vertices = 1u32 << d;

    // Law given a vertex x̃, as a function of the disagreement count k
    // (side s = d - 2k). Ties take the average of the two sides: with
    // probability λ = 2^(d-1) / N₊ a halfspace draw splitting ties evenly,
    // otherwise a uniform vertex. N₊ = #{z : ⟨z, x̃⟩ ≥ 0} is counted at
    // x̃ = (+1, ..., +1).
    let d_i = d as i64;
    let side = |disagree: u32| d_i - 2 * disagree as i64;
    let n_upper = (0..n_vertices).filter(|z| side(z.count_ones()) >= 0).count() as f64;
    let half = n_vertices as f64 / 2.0;
    let lambda = half / n_upper;
    let uniform = (1.0 - lambda) / n_vertices as f64;
    let weight: Vec<f64> = (0..=d as u32)
        .map(|k| {
            let s = side(k);
            let halfspace = if s > 0 {
                pi / half
            } else if s < 0 {
                q / half
            } else {
                0.5 * (pi + q) / half
            };
            lambda * halfspace + uniform
        })
        .collect();

    let rounding: Vec<f64> = (0..n_vertices)
        .map(|t| {
            (0..d)
                .map(|j| if (t >> j) & 1 == 1 { p_plus[j] } else { 1.0 - p_plus[j] })
                .product()
        })
        .collect();

    let mut support = Vec::with_capacity(n_vertices as usize);
    let mut probs = Vec::with_capacity(n_vertices as usize);
    for z in 0..n_vertices {
        let mut acc = CompensatedSum::new();
        for (t, &pt) in rounding.iter().enumerate() {
            if pt > 0.0 {
                acc.add(pt * weight[(z ^ t as u32).count_ones() as usize]);
            }
        }
        support.push(
            (0..d)
                .map(|j| if (z >> j) & 1 == 1 { bound } else { -bound })
                .collect(),
        );
        probs.push(acc.value());
    }
    Ok(EnumeratedPmf { support, probs })
}

/// max over outputs z and inputs x, x′ in the grid of log p(z|x) / p(z|x′).
pub fn verify_dp<R: AsRef<[f64]>>(channel: &Channel, grid: &[R]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::param("input grid must not be empty"));
    }
    // Running min and max of each output's probability over the grid.
    let mut lo: Vec<f64> = Vec::new();
    let mut hi: Vec<f64> = Vec::new();
    let mut support = Vec::new();
    for x in grid {
        let pmf = channel_pmf(channel, x.as_ref())?;
        if lo.is_empty() {
            lo = pmf.probs.clone();
            hi = pmf.probs;
            support = pmf.support;
            continue;
        }
        for ((l, h), &p) in lo.iter_mut().zip(hi.iter_mut()).zip(&pmf.probs) {
            *l = l.min(p);
            *h = h.max(p);
        }
    }
    let mut worst = 0.0f64;
    for (k, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
        if l <= 0.0 {
            if h > 0.0 {
                return Err(Error::Support(format!(
                    "output {:?} has zero probability under some inputs only",
                    support[k]
                )));
            }
            continue;
        }
        worst = worst.max(h.ln() - l.ln());
    }
    Ok(worst)
}

/// Sample mean and per-coordinate standard error of `samples` channel draws.
pub fn monte_carlo_unbias(
    channel: &Channel,
    x: &[f64],
    samples: usize,
    rng: &mut Rng,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if samples < 1000 {
        return Err(Error::param(format!("need at least 1000 samples, got {samples}")));
    }
    let mut moments = RunningMoments::new(channel.dim());
    let mut z = vec![0.0; channel.dim()];
    for _ in 0..samples {
        channel.privatize_into(x, rng, &mut z)?;
        moments.push(&z);
    }
    Ok((moments.mean().to_vec(), moments.std_error()))
}

/// Log-ratio of truncated-Laplace channel densities at output z:
/// log p(z | x) - log p(z | x′).
pub fn truncated_laplace_log_ratio(channel: &Channel, x: f64, x_prime: f64, z: f64) -> Result<f64> {
    if channel.kind() != ChannelKind::TruncatedLaplaceScalar {
        return Err(Error::Unsupported(format!(
            "expected a truncated Laplace channel, got {:?}",
            channel.kind()
        )));
    }
    let t = channel.radius();
    let a = channel.noise_inv_scale().expect("Laplace channel has a noise scale");
    let c = |v: f64| v.clamp(-t, t);
    Ok(a * ((z - c(x_prime)).abs() - (z - c(x)).abs()))
}

/// E[⟨z, e₁⟩ | ⟨z, e₁⟩ > 0] for z uniform on the unit sphere in R^d, by
/// composite Simpson quadrature of
/// ∫ cos^{d-2}(φ) sin(φ) dφ / ∫ cos^{d-2}(φ) dφ over φ ∈ [0, π/2].
pub fn hemisphere_mean_quadrature(d: usize, intervals: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::param(format!("quadrature needs d >= 2, got {d}")));
    }
    let m = intervals.max(2) + intervals % 2;
    let h = std::f64::consts::FRAC_PI_2 / m as f64;
    let p = (d - 2) as i32;
    let (mut num, mut den) = (CompensatedSum::new(), CompensatedSum::new());
    for i in 0..=m {
        let phi = i as f64 * h;
        let w = if i == 0 || i == m {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let c = phi.cos().max(0.0).powi(p);
        num.add(w * c * phi.sin());
        den.add(w * c);
    }
    Ok(num.value() / den.value())
}

/// Ordinary least squares of log(error) on log(n).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn slope_fit(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::Data(format!(
            "slope fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some((n, e)) = points.iter().find(|(n, e)| !(*n > 0.0 && *e > 0.0)) {
        return Err(Error::Data(format!("nonpositive point ({n}, {e}) in log-log fit")));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Data("all sample sizes are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(SlopeFit { slope, intercept, r_squared })
}
