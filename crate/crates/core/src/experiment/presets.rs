use crate::bounds::{
    density_rate, logistic_lower, mean_rate, median_rate, sparse_mean_lower,
    sparse_mean_lower_with, RateCurve, RateForm,
};
use crate::error::{Error, Result};
use crate::estimators::Geometry;
use crate::experiment::generator::GeneratorSpec;
use crate::experiment::spec::{EstimatorKind, EstimatorOptions, ExperimentSpec, MechanismKind};

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 7] = [
    "drug-use",
    "median-salary",
    "mean-rates",
    "density",
    "sparse",
    "logistic",
    "l2-dimension",
];

/// A set of experiments plus the reference rate curves they are read against.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: String,
    pub specs: Vec<ExperimentSpec>,
    pub references: Vec<RateCurve>,
}

use MechanismKind::{LaplaceBaseline, Nonprivate, Optimal};

fn expand(base: ExperimentSpec, mechanisms: &[MechanismKind]) -> Vec<ExperimentSpec> {
    mechanisms
        .iter()
        .map(|&m| ExperimentSpec { mechanism: m, ..base.clone() })
        .collect()
}

fn dyadic(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|k| 1usize << k).collect()
}

/// Build a preset. Desk scale by default; `full` switches to the larger
/// grids and replicate counts.
pub fn preset(name: &str, full: bool, seed: u64) -> Result<Preset> {
    let pick = |desk: usize, big: usize| if full { big } else { desk };
    let mut specs = Vec::new();
    let mut references = Vec::new();
    match name {
        "drug-use" => {
            let n_grid: Vec<usize> = if full {
                vec![1_000, 2_000, 5_000, 10_000, 20_000, 50_000, 100_000, 200_000, 600_000]
            } else {
                vec![1_000, 2_000, 5_000, 10_000, 20_000, 50_000, 100_000]
            };
            let eps = 0.5;
            references.push(RateCurve::evaluate("sparse_mean_lower", &n_grid, |n| {
                sparse_mean_lower(27, n, eps)
            })?);
            specs = expand(
                ExperimentSpec {
                    name: name.into(),
                    estimator: EstimatorKind::MeanVector,
                    mechanism: Optimal,
                    eps,
                    n_grid,
                    d: 27,
                    replicates: pick(20, 100),
                    generator: GeneratorSpec::BernoulliProduct {
                        freqs: None,
                        dim: Some(27),
                        freq_range: Some([0.05, 0.5]),
                    },
                    seed,
                    options: EstimatorOptions::default(),
                },
                &[Optimal, LaplaceBaseline, Nonprivate],
            );
        }
        "median-salary" => {
            let (mu, sigma) = (10.0, 1.2);
            let median = f64::exp(mu);
            let n_grid = vec![10_000, 100_000];
            for mult in [1.5, 2.0, 4.0, 8.0, 16.0] {
                let radius = mult * median;
                references.push(RateCurve::evaluate(format!("median_rate_r{mult}"), &n_grid, |n| {
                    median_rate(radius, n, 1.0)
                })?);
                specs.extend(expand(
                    ExperimentSpec {
                        name: format!("{name}-r{mult}"),
                        estimator: EstimatorKind::Median,
                        mechanism: Optimal,
                        eps: 1.0,
                        n_grid: n_grid.clone(),
                        d: 1,
                        replicates: pick(50, 400),
                        generator: GeneratorSpec::Lognormal { mu, sigma },
                        seed,
                        options: EstimatorOptions { radius: Some(radius), ..Default::default() },
                    },
                    &[Optimal, LaplaceBaseline, Nonprivate],
                ));
            }
        }
        "mean-rates" => {
            let n_grid = dyadic(10, 17);
            for (label, generator, k) in [
                ("bounded", GeneratorSpec::BoundedUniform { lo: -1.0, hi: 1.0, dim: 1 }, f64::INFINITY),
                ("heavy-k2", GeneratorSpec::HeavyTailK { k: 2.0, radius_k: 1.0 }, 2.0),
            ] {
                references.push(RateCurve::evaluate(format!("mean_rate_{label}"), &n_grid, |n| {
                    mean_rate(k, n, 1.0)
                })?);
                specs.extend(expand(
                    ExperimentSpec {
                        name: format!("{name}-{label}"),
                        estimator: EstimatorKind::MeanScalar,
                        mechanism: Optimal,
                        eps: 1.0,
                        n_grid: n_grid.clone(),
                        d: 1,
                        replicates: pick(50, 200),
                        generator,
                        seed,
                        options: EstimatorOptions::default(),
                    },
                    &[Optimal, Nonprivate],
                ));
            }
        }
        "density" => {
            let n_grid = if full { dyadic(12, 18) } else { dyadic(12, 16) };
            references.push(RateCurve::evaluate("density_rate_beta1", &n_grid, |n| {
                density_rate(1.0, n, 1.0)
            })?);
            specs = expand(
                ExperimentSpec {
                    name: name.into(),
                    estimator: EstimatorKind::Density,
                    mechanism: Optimal,
                    eps: 1.0,
                    n_grid,
                    d: 1,
                    replicates: pick(20, 100),
                    generator: GeneratorSpec::TrigDensity { cos: vec![0.25, 0.1], sin: vec![0.15, 0.05] },
                    seed,
                    options: EstimatorOptions::default(),
                },
                &[Optimal, LaplaceBaseline, Nonprivate],
            );
        }
        "sparse" => {
            let d = 32;
            let n_grid = vec![10_000, 30_000, 100_000];
            let r: f64 = 0.5;
            references.push(RateCurve::evaluate("sparse_rate_sq", &n_grid, |n| {
                Ok(r * r * sparse_mean_lower_with(RateForm::EpsSquared, d, n, 1.0)?.powi(2))
            })?);
            let mut freqs = vec![0.5; d];
            freqs[0] = 1.0;
            specs = expand(
                ExperimentSpec {
                    name: name.into(),
                    estimator: EstimatorKind::Sparse,
                    mechanism: Optimal,
                    eps: 1.0,
                    n_grid,
                    d,
                    replicates: pick(20, 100),
                    generator: GeneratorSpec::BernoulliProduct { freqs: Some(freqs), dim: None, freq_range: None },
                    seed,
                    options: EstimatorOptions::default(),
                },
                &[Optimal, Nonprivate],
            );
        }
        "logistic" => {
            let theta = vec![0.5, -0.5, 0.25, -0.25, 0.0, 0.0, 0.0, 0.0];
            let n_grid = vec![10_000, 100_000];
            references.push(RateCurve::evaluate("logistic_lower", &n_grid, |n| {
                logistic_lower(theta.len(), n, 1.0)
            })?);
            specs = expand(
                ExperimentSpec {
                    name: name.into(),
                    estimator: EstimatorKind::Logistic,
                    mechanism: Optimal,
                    eps: 1.0,
                    n_grid,
                    d: theta.len(),
                    replicates: pick(10, 50),
                    generator: GeneratorSpec::LogisticModel { theta, feature_scale: 1.0 },
                    seed,
                    options: EstimatorOptions { projection_radius: Some(5.0), ..Default::default() },
                },
                &[Optimal, LaplaceBaseline, Nonprivate],
            );
        }
        "l2-dimension" => {
            for d in [4, 16, 64] {
                specs.extend(expand(
                    ExperimentSpec {
                        name: format!("{name}-d{d}"),
                        estimator: EstimatorKind::MeanVector,
                        mechanism: Optimal,
                        eps: 1.0,
                        n_grid: vec![100_000],
                        d,
                        replicates: pick(20, 100),
                        generator: GeneratorSpec::L2Ball { radius: 1.0, dim: d },
                        seed,
                        options: EstimatorOptions { geometry: Geometry::L2, ..Default::default() },
                    },
                    &[Optimal, LaplaceBaseline, Nonprivate],
                ));
            }
        }
        other => {
            return Err(Error::config(format!(
                "unknown preset {other:?}; available: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    }
    Ok(Preset { name: name.into(), specs, references })
}
