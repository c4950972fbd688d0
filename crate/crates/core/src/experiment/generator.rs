use std::f64::consts::{PI, SQRT_2};

use rand_distr::{Distribution, LogNormal, Pareto};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::Geometry;
use crate::random::{uniform_sphere, Rng};

/// Cells in the inverse-CDF table of the trigonometric density sampler.
pub const TRIG_CDF_CELLS: usize = 1 << 14;

/// Synthetic data source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// Coordinates i.i.d. uniform on [lo, hi].
    BoundedUniform {
        lo: f64,
        hi: f64,
        #[serde(default = "one")]
        dim: usize,
    },
    /// Uniform on the ℓ2 ball of the given radius.
    L2Ball { radius: f64, dim: usize },
    /// Symmetric scalar law with E|X|^k = radius_k^k: zero with probability
    /// 1 - p, otherwise ±radius_k·P with P Pareto(1, 2k+1) and p = (k+1)/(2k+1).
    HeavyTailK {
        k: f64,
        #[serde(default = "one_f")]
        radius_k: f64,
    },
    Lognormal { mu: f64, sigma: f64 },
    /// Independent Bernoulli(freqs_j) coordinates. Without explicit
    /// frequencies, `dim` of them are drawn once, uniformly from `freq_range`.
    BernoulliProduct {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        freqs: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        freq_range: Option<[f64; 2]>,
    },
    /// x uniform on {-s, s}^d with s = feature_scale, P(y = 1 | x) = σ(⟨θ, x⟩).
    LogisticModel {
        theta: Vec<f64>,
        #[serde(default = "one_f")]
        feature_scale: f64,
    },
    /// Density 1 + Σ_j √2 (cos_j cos(2πjt) + sin_j sin(2πjt)) on [0, 1].
    TrigDensity {
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

fn one() -> usize {
    1
}

fn one_f() -> f64 {
    1.0
}

/// A drawn dataset.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Scalars(Vec<f64>),
    Vectors(Vec<Vec<f64>>),
    Labeled(Vec<(Vec<f64>, f64)>),
}

impl Dataset {
    pub fn len(&self) -> usize {
        match self {
            Dataset::Scalars(v) => v.len(),
            Dataset::Vectors(v) => v.len(),
            Dataset::Labeled(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// What kind of records a generator emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordShape {
    Scalar,
    Vector,
    Labeled,
    UnitInterval,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl GeneratorSpec {
    pub fn shape(&self) -> RecordShape {
        match self {
            GeneratorSpec::BoundedUniform { dim: 1, .. }
            | GeneratorSpec::HeavyTailK { .. }
            | GeneratorSpec::Lognormal { .. } => RecordShape::Scalar,
            GeneratorSpec::BoundedUniform { .. }
            | GeneratorSpec::L2Ball { .. }
            | GeneratorSpec::BernoulliProduct { .. } => RecordShape::Vector,
            GeneratorSpec::LogisticModel { .. } => RecordShape::Labeled,
            GeneratorSpec::TrigDensity { .. } => RecordShape::UnitInterval,
        }
    }

    /// Fix every random or derived parameter. Unspecified Bernoulli
    /// frequencies are drawn from `rng`.
    pub fn resolve(&self, rng: &mut Rng) -> Result<Generator> {
        let trig_cdf = match self {
            GeneratorSpec::BoundedUniform { lo, hi, dim } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::config(format!("need finite lo < hi, got [{lo}, {hi}]")));
                }
                if *dim == 0 {
                    return Err(Error::config("dim must be at least 1"));
                }
                None
            }
            GeneratorSpec::L2Ball { radius, dim } => {
                positive("radius", *radius)?;
                if *dim == 0 {
                    return Err(Error::config("dim must be at least 1"));
                }
                None
            }
            GeneratorSpec::HeavyTailK { k, radius_k } => {
                if !(*k > 1.0 && k.is_finite()) {
                    return Err(Error::config(format!("heavy-tail order k must be finite and > 1, got {k}")));
                }
                positive("radius_k", *radius_k)?;
                None
            }
            GeneratorSpec::Lognormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(Error::config(format!("mu must be finite, got {mu}")));
                }
                positive("sigma", *sigma)?;
                None
            }
            GeneratorSpec::BernoulliProduct { freqs, dim, freq_range } => {
                let freqs = match (freqs, dim, freq_range) {
                    (Some(f), d, _) => {
                        if d.is_some_and(|d| d != f.len()) {
                            return Err(Error::config("dim disagrees with the frequency vector length"));
                        }
                        f.clone()
                    }
                    (None, Some(d), Some([a, b])) => {
                        if !(0.0 <= *a && a <= b && *b <= 1.0) {
                            return Err(Error::config(format!("frequency range [{a}, {b}] not inside [0, 1]")));
                        }
                        (0..*d).map(|_| a + (b - a) * rng.uniform()).collect()
                    }
                    _ => {
                        return Err(Error::config(
                            "bernoulli_product needs freqs, or dim together with freq_range",
                        ))
                    }
                };
                if freqs.is_empty() {
                    return Err(Error::config("bernoulli_product needs at least one coordinate"));
                }
                if let Some(f) = freqs.iter().find(|f| !(0.0..=1.0).contains(*f)) {
                    return Err(Error::config(format!("frequency {f} outside [0, 1]")));
                }
                return Ok(Generator {
                    spec: GeneratorSpec::BernoulliProduct {
                        dim: Some(freqs.len()),
                        freqs: Some(freqs),
                        freq_range: *freq_range,
                    },
                    trig_cdf: None,
                });
            }
            GeneratorSpec::LogisticModel { theta, feature_scale } => {
                if theta.is_empty() || theta.iter().any(|t| !t.is_finite()) {
                    return Err(Error::config("logistic theta must be a nonempty finite vector"));
                }
                positive("feature_scale", *feature_scale)?;
                None
            }
            GeneratorSpec::TrigDensity { cos, sin } => Some(trig_cdf_table(cos, sin)?),
        };
        Ok(Generator { spec: self.clone(), trig_cdf })
    }
}

fn trig_density_value(cos: &[f64], sin: &[f64], t: f64) -> f64 {
    let mut f = 1.0;
    for (j, c) in cos.iter().enumerate() {
        f += SQRT_2 * c * (2.0 * PI * (j + 1) as f64 * t).cos();
    }
    for (j, s) in sin.iter().enumerate() {
        f += SQRT_2 * s * (2.0 * PI * (j + 1) as f64 * t).sin();
    }
    f
}

fn trig_cdf_value(cos: &[f64], sin: &[f64], t: f64) -> f64 {
    let mut v = t;
    for (j, c) in cos.iter().enumerate() {
        let w = 2.0 * PI * (j + 1) as f64;
        v += SQRT_2 * c * (w * t).sin() / w;
    }
    for (j, s) in sin.iter().enumerate() {
        let w = 2.0 * PI * (j + 1) as f64;
        v += SQRT_2 * s * (1.0 - (w * t).cos()) / w;
    }
    v
}

fn trig_cdf_table(cos: &[f64], sin: &[f64]) -> Result<Vec<f64>> {
    if cos.iter().chain(sin).any(|c| !c.is_finite()) {
        return Err(Error::config("trig density coefficients must be finite"));
    }
    let m = TRIG_CDF_CELLS;
    let h = 1.0 / m as f64;
    if let Some(i) = (0..=m).find(|&i| trig_density_value(cos, sin, i as f64 * h) < 0.0) {
        return Err(Error::config(format!(
            "trig density is negative at t = {}",
            i as f64 * h
        )));
    }
    let mut table: Vec<f64> = (0..=m).map(|i| trig_cdf_value(cos, sin, i as f64 * h)).collect();
    table[0] = 0.0;
    table[m] = 1.0;
    Ok(table)
}

/// A generator with all parameters fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    spec: GeneratorSpec,
    trig_cdf: Option<Vec<f64>>,
}

impl Generator {
    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn shape(&self) -> RecordShape {
        self.spec.shape()
    }

    pub fn dim(&self) -> usize {
        match &self.spec {
            GeneratorSpec::BoundedUniform { dim, .. } | GeneratorSpec::L2Ball { dim, .. } => *dim,
            GeneratorSpec::BernoulliProduct { freqs, .. } => freqs.as_ref().map_or(0, Vec::len),
            GeneratorSpec::LogisticModel { theta, .. } => theta.len(),
            _ => 1,
        }
    }

    /// Center c of the coordinate box the records are recentred to before
    /// privatization.
    pub fn center(&self) -> f64 {
        match &self.spec {
            GeneratorSpec::BoundedUniform { lo, hi, .. } => 0.5 * (lo + hi),
            GeneratorSpec::BernoulliProduct { .. } => 0.5,
            _ => 0.0,
        }
    }

    /// Smallest radius r such that every recentred record x - c lies in the
    /// ball of the given geometry.
    pub fn radius(&self, geometry: Geometry) -> Option<f64> {
        let d = self.dim() as f64;
        let scale = match geometry {
            Geometry::Linf => 1.0,
            Geometry::L2 => d.sqrt(),
        };
        match &self.spec {
            GeneratorSpec::BoundedUniform { lo, hi, .. } => Some(0.5 * (hi - lo) * scale),
            GeneratorSpec::BernoulliProduct { .. } => Some(0.5 * scale),
            GeneratorSpec::L2Ball { radius, .. } => Some(*radius),
            GeneratorSpec::LogisticModel { feature_scale, .. } => Some(feature_scale * scale),
            _ => None,
        }
    }

    /// Population mean of a record.
    pub fn mean(&self) -> Option<Vec<f64>> {
        match &self.spec {
            GeneratorSpec::BoundedUniform { lo, hi, dim } => Some(vec![0.5 * (lo + hi); *dim]),
            GeneratorSpec::L2Ball { dim, .. } => Some(vec![0.0; *dim]),
            GeneratorSpec::HeavyTailK { .. } => Some(vec![0.0]),
            GeneratorSpec::Lognormal { mu, sigma } => Some(vec![(mu + 0.5 * sigma * sigma).exp()]),
            GeneratorSpec::BernoulliProduct { freqs, .. } => freqs.clone(),
            GeneratorSpec::TrigDensity { .. } | GeneratorSpec::LogisticModel { .. } => None,
        }
    }

    pub fn median(&self) -> Option<f64> {
        match &self.spec {
            GeneratorSpec::BoundedUniform { lo, hi, dim: 1 } => Some(0.5 * (lo + hi)),
            GeneratorSpec::HeavyTailK { .. } => Some(0.0),
            GeneratorSpec::Lognormal { mu, .. } => Some(mu.exp()),
            _ => None,
        }
    }

    /// E|X - θ| for scalar generators where it has a closed form.
    pub fn abs_risk(&self, theta: f64) -> Option<f64> {
        match &self.spec {
            GeneratorSpec::BoundedUniform { lo, hi, dim: 1 } => {
                let w = hi - lo;
                let r = if theta <= *lo {
                    0.5 * (lo + hi) - theta
                } else if theta >= *hi {
                    theta - 0.5 * (lo + hi)
                } else {
                    ((theta - lo).powi(2) + (hi - theta).powi(2)) / (2.0 * w)
                };
                Some(r)
            }
            GeneratorSpec::Lognormal { mu, sigma } => {
                let mean = (mu + 0.5 * sigma * sigma).exp();
                if theta <= 0.0 {
                    return Some(mean - theta);
                }
                let z = (theta.ln() - mu) / sigma;
                // E(θ - X)₊ = θ Φ(z) - E[X] Φ(z - σ).
                let below = theta * std_normal_cdf(z) - mean * std_normal_cdf(z - sigma);
                Some(mean - theta + 2.0 * below)
            }
            _ => None,
        }
    }

    /// Excess absolute risk E|X - θ| - E|X - med|, floored at 0.
    pub fn excess_risk(&self, theta: f64) -> Option<f64> {
        let med = self.median()?;
        Some((self.abs_risk(theta)? - self.abs_risk(med)?).max(0.0))
    }

    /// Density at t ∈ [0, 1] for the trigonometric generator.
    pub fn density(&self, t: f64) -> Option<f64> {
        match &self.spec {
            GeneratorSpec::TrigDensity { cos, sin } => Some(trig_density_value(cos, sin, t)),
            _ => None,
        }
    }

    /// True parameter vector of the logistic model.
    pub fn logistic_theta(&self) -> Option<&[f64]> {
        match &self.spec {
            GeneratorSpec::LogisticModel { theta, .. } => Some(theta),
            _ => None,
        }
    }

    pub fn sample(&self, n: usize, rng: &mut Rng) -> Result<Dataset> {
        Ok(match &self.spec {
            GeneratorSpec::BoundedUniform { lo, hi, dim } => {
                let draw = |rng: &mut Rng| lo + (hi - lo) * rng.uniform();
                if *dim == 1 {
                    Dataset::Scalars((0..n).map(|_| draw(rng)).collect())
                } else {
                    Dataset::Vectors((0..n).map(|_| (0..*dim).map(|_| draw(rng)).collect()).collect())
                }
            }
            GeneratorSpec::L2Ball { radius, dim } => {
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    let mut v = uniform_sphere(rng, *dim)?;
                    let len = radius * rng.uniform().powf(1.0 / *dim as f64);
                    v.iter_mut().for_each(|c| *c *= len);
                    out.push(v);
                }
                Dataset::Vectors(out)
            }
            GeneratorSpec::HeavyTailK { k, radius_k } => {
                let a = 2.0 * k + 1.0;
                let p = (a - k) / a;
                let pareto = Pareto::new(1.0, a).map_err(|e| Error::config(e.to_string()))?;
                Dataset::Scalars(
                    (0..n)
                        .map(|_| {
                            if rng.uniform() < p {
                                rng.fair_sign() * radius_k * pareto.sample(rng)
                            } else {
                                0.0
                            }
                        })
                        .collect(),
                )
            }
            GeneratorSpec::Lognormal { mu, sigma } => {
                let ln = LogNormal::new(*mu, *sigma).map_err(|e| Error::config(e.to_string()))?;
                Dataset::Scalars((0..n).map(|_| ln.sample(rng)).collect())
            }
            GeneratorSpec::BernoulliProduct { freqs, .. } => {
                let freqs = freqs.as_ref().ok_or_else(|| Error::Internal("unresolved frequencies".into()))?;
                Dataset::Vectors(
                    (0..n)
                        .map(|_| {
                            freqs
                                .iter()
                                .map(|&f| if rng.uniform() < f { 1.0 } else { 0.0 })
                                .collect()
                        })
                        .collect(),
                )
            }
            GeneratorSpec::LogisticModel { theta, feature_scale } => Dataset::Labeled(
                (0..n)
                    .map(|_| {
                        let x: Vec<f64> = theta.iter().map(|_| feature_scale * rng.fair_sign()).collect();
                        let s: f64 = x.iter().zip(theta).map(|(a, b)| a * b).sum();
                        let p = 1.0 / (1.0 + (-s).exp());
                        let y = if rng.uniform() < p { 1.0 } else { -1.0 };
                        (x, y)
                    })
                    .collect(),
            ),
            GeneratorSpec::TrigDensity { .. } => {
                let table = self.trig_cdf.as_ref().ok_or_else(|| Error::Internal("missing CDF table".into()))?;
                Dataset::Scalars((0..n).map(|_| inverse_cdf(table, rng.uniform())).collect())
            }
        })
    }
}

/// Linear interpolation of the inverse of a CDF tabulated on a uniform grid.
fn inverse_cdf(table: &[f64], u: f64) -> f64 {
    let m = table.len() - 1;
    let i = table.partition_point(|&f| f <= u).clamp(1, m) - 1;
    let (a, b) = (table[i], table[i + 1]);
    let frac = if b > a { ((u - a) / (b - a)).clamp(0.0, 1.0) } else { 0.5 };
    (i as f64 + frac) / m as f64
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / SQRT_2)
}

/// Draw `n` records, resolving random generator parameters from `rng` first.
pub fn generate(spec: &GeneratorSpec, n: usize, rng: &mut Rng) -> Result<Dataset> {
    spec.resolve(rng)?.sample(n, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heavy_tail_second_moment() {
        let spec = GeneratorSpec::HeavyTailK { k: 2.0, radius_k: 1.0 };
        let Dataset::Scalars(x) = generate(&spec, 1_000_000, &mut Rng::new(7)).unwrap() else {
            panic!()
        };
        let m2 = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        assert!(m2 <= 1.1, "E|X|^2 = {m2}");
        assert!(m2 > 0.8, "E|X|^2 = {m2}");
    }

    #[test]
    fn bernoulli_marginals() {
        let spec = GeneratorSpec::BernoulliProduct { freqs: Some(vec![0.5, 0.1, 0.9]), dim: None, freq_range: None };
        let Dataset::Vectors(x) = generate(&spec, 100_000, &mut Rng::new(1)).unwrap() else { panic!() };
        for (j, f) in [0.5, 0.1, 0.9].iter().enumerate() {
            let m = x.iter().map(|r| r[j]).sum::<f64>() / x.len() as f64;
            let se = (f * (1.0 - f) / x.len() as f64).sqrt();
            assert!((m - f).abs() < 5.0 * se);
        }
    }

    #[test]
    fn frequencies_drawn_in_range() {
        let spec = GeneratorSpec::BernoulliProduct { freqs: None, dim: Some(27), freq_range: Some([0.05, 0.5]) };
        let g = spec.resolve(&mut Rng::new(3)).unwrap();
        assert_eq!(g.dim(), 27);
        assert!(g.mean().unwrap().iter().all(|f| (0.05..=0.5).contains(f)));
        let bad = GeneratorSpec::BernoulliProduct { freqs: None, dim: None, freq_range: None };
        assert!(matches!(bad.resolve(&mut Rng::new(3)), Err(Error::Config(_))));
    }

    #[test]
    fn trig_density_first_cosine_coefficient() {
        let spec = GeneratorSpec::TrigDensity { cos: vec![0.5], sin: vec![] };
        let Dataset::Scalars(t) = generate(&spec, 200_000, &mut Rng::new(2)).unwrap() else { panic!() };
        let vals: Vec<f64> = t.iter().map(|&x| SQRT_2 * (2.0 * PI * x).cos()).collect();
        let n = vals.len() as f64;
        let m = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((m - 0.5).abs() < 5.0 * (var / n).sqrt(), "{m}");
        assert!(t.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn negative_trig_density_rejected() {
        let spec = GeneratorSpec::TrigDensity { cos: vec![0.9], sin: vec![] };
        assert!(matches!(spec.resolve(&mut Rng::new(0)), Err(Error::Config(_))));
    }

    #[test]
    fn lognormal_risk_minimized_at_median() {
        let g = GeneratorSpec::Lognormal { mu: 0.0, sigma: 1.0 }.resolve(&mut Rng::new(0)).unwrap();
        let at = |t: f64| g.abs_risk(t).unwrap();
        assert!(at(1.0) < at(0.9) && at(1.0) < at(1.1));
        // Monte Carlo check of the closed form at θ = 2.
        let Dataset::Scalars(x) = g.sample(400_000, &mut Rng::new(5)).unwrap() else { panic!() };
        let mc = x.iter().map(|v| (v - 2.0).abs()).sum::<f64>() / x.len() as f64;
        assert!((mc - at(2.0)).abs() < 0.01, "{mc} vs {}", at(2.0));
    }

    #[test]
    fn uniform_excess_risk() {
        let g = GeneratorSpec::BoundedUniform { lo: -1.0, hi: 1.0, dim: 1 }.resolve(&mut Rng::new(0)).unwrap();
        assert!((g.excess_risk(0.5).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn l2_ball_records_inside() {
        let spec = GeneratorSpec::L2Ball { radius: 2.0, dim: 5 };
        let Dataset::Vectors(x) = generate(&spec, 1000, &mut Rng::new(4)).unwrap() else { panic!() };
        assert!(x.iter().all(|v| crate::numeric::norm2(v) <= 2.0));
    }
}
