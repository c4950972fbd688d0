use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{
    classical_density_estimate, classical_density_order, density_estimate, density_order,
    laplace_density_estimate, laplace_mean_vector, naive_private_median, private_mean_scalar,
    private_mean_vector, sample_mean_vector, sample_median, sparse_mean, Geometry, LogisticSgd,
    MedianInterval, MedianSgd,
};
use crate::experiment::generator::{Dataset, Generator, GeneratorSpec};
use crate::experiment::output::RunRecord;
use crate::experiment::spec::{EstimatorKind, ExperimentSpec, MechanismKind};
use crate::mechanisms::MomentAssumption;
use crate::numeric::{linf_dist, sq_dist};
use crate::privacy::PrivacyLevel;
use crate::random::Rng;

/// Midpoint cells used for the L² density error.
pub const DENSITY_QUADRATURE_POINTS: usize = 1 << 12;

const PARAM_STREAM: u64 = 0x5041_5241;
const DATA_STREAM: u64 = 0x4441_5441;
const NOISE_STREAM: u64 = 0x4e4f_4953;

/// Run every (replicate, n) cell of `spec`, in parallel, and return the
/// records sorted by (replicate, n).
///
/// Cell (r, n) draws its data from a stream keyed by (seed, r, n) only, so
/// specs differing in mechanism see identical datasets; the privatization
/// noise comes from a separate stream keyed by the mechanism as well.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<RunRecord>> {
    spec.validate()?;
    let generator = spec.generator.resolve(&mut Rng::derive(spec.seed, &[PARAM_STREAM]))?;
    if generator.dim() != spec.d {
        return Err(Error::config(format!(
            "spec dimension d = {} disagrees with generator dimension {}",
            spec.d,
            generator.dim()
        )));
    }
    let level = PrivacyLevel::new(spec.eps)?;
    let cells: Vec<(usize, usize)> = (0..spec.replicates)
        .flat_map(|r| spec.n_grid.iter().map(move |&n| (r, n)))
        .collect();
    let mut records = cells
        .par_iter()
        .map(|&(rep, n)| run_cell(spec, &generator, &level, rep, n))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| (r.replicate, r.n));
    Ok(records)
}

fn run_cell(
    spec: &ExperimentSpec,
    generator: &Generator,
    level: &PrivacyLevel,
    replicate: usize,
    n: usize,
) -> Result<RunRecord> {
    let start = spec.options.timing.then(Instant::now);
    let data = generator.sample(
        n,
        &mut Rng::derive(spec.seed, &[DATA_STREAM, replicate as u64, n as u64]),
    )?;
    let mut rng = Rng::derive(
        spec.seed,
        &[NOISE_STREAM, replicate as u64, n as u64, spec.mechanism.stream_id()],
    );
    let (metric_name, value) = evaluate(spec, generator, level, data, &mut rng)?;
    Ok(RunRecord {
        experiment: spec.name.clone(),
        mechanism: spec.mechanism.to_string(),
        n,
        eps: spec.eps,
        replicate,
        metric_name: metric_name.to_string(),
        value,
        wall_ms: start.map_or(0.0, |s| s.elapsed().as_secs_f64() * 1e3),
    })
}

fn scalars(data: Dataset) -> Result<Vec<f64>> {
    match data {
        Dataset::Scalars(v) => Ok(v),
        _ => Err(Error::Internal("expected scalar records".into())),
    }
}

fn vectors(data: Dataset) -> Result<Vec<Vec<f64>>> {
    match data {
        Dataset::Vectors(v) => Ok(v),
        Dataset::Scalars(v) => Ok(v.into_iter().map(|x| vec![x]).collect()),
        _ => Err(Error::Internal("expected vector records".into())),
    }
}

fn recentre(mut data: Vec<Vec<f64>>, c: f64) -> Vec<Vec<f64>> {
    if c != 0.0 {
        data.iter_mut().flatten().for_each(|x| *x -= c);
    }
    data
}

fn channel_radius(spec: &ExperimentSpec, generator: &Generator, geometry: Geometry) -> Result<f64> {
    spec.options
        .radius
        .or_else(|| generator.radius(geometry))
        .ok_or_else(|| Error::config("options.radius is required for this generator"))
}

fn moment_assumption(spec: &ExperimentSpec, generator: &Generator) -> Result<MomentAssumption> {
    let o = &spec.options;
    let (k, rk) = match generator.spec() {
        GeneratorSpec::HeavyTailK { k, radius_k } => (o.moment_k.unwrap_or(*k), o.radius_k.unwrap_or(*radius_k)),
        GeneratorSpec::BoundedUniform { lo, hi, .. } => (
            o.moment_k.unwrap_or(f64::INFINITY),
            o.radius_k.unwrap_or(lo.abs().max(hi.abs())),
        ),
        _ => match (o.moment_k, o.radius_k) {
            (Some(k), Some(rk)) => (k, rk),
            _ => return Err(Error::config("options.moment_k and options.radius_k are required")),
        },
    };
    MomentAssumption::new(k, rk)
}

fn evaluate(
    spec: &ExperimentSpec,
    generator: &Generator,
    level: &PrivacyLevel,
    data: Dataset,
    rng: &mut Rng,
) -> Result<(&'static str, f64)> {
    let o = &spec.options;
    let mech = spec.mechanism;
    match spec.estimator {
        EstimatorKind::MeanScalar => {
            let truth = generator.mean().ok_or_else(|| Error::config("generator has no known mean"))?[0];
            let x = scalars(data)?;
            let est = match mech {
                MechanismKind::Optimal => private_mean_scalar(&x, &moment_assumption(spec, generator)?, level, rng)?,
                _ => x.iter().sum::<f64>() / x.len() as f64,
            };
            Ok(("sq_error", (est - truth).powi(2)))
        }
        EstimatorKind::MeanVector => {
            let truth = generator.mean().ok_or_else(|| Error::config("generator has no known mean"))?;
            let r = channel_radius(spec, generator, o.geometry)?;
            let c = generator.center();
            let x = recentre(vectors(data)?, c);
            let mut est = match mech {
                MechanismKind::Optimal => private_mean_vector(&x, o.geometry, r, level, rng)?,
                MechanismKind::LaplaceBaseline => laplace_mean_vector(&x, o.geometry, r, level, rng)?,
                MechanismKind::Nonprivate => sample_mean_vector(&x)?,
            };
            est.iter_mut().for_each(|v| *v += c);
            Ok(match o.geometry {
                Geometry::Linf => ("linf_error", linf_dist(&est, &truth)),
                Geometry::L2 => ("l2_error_sq", sq_dist(&est, &truth)),
            })
        }
        EstimatorKind::Median => {
            let med = generator.median().ok_or_else(|| Error::config("generator has no known median"))?;
            let is_lognormal = matches!(generator.spec(), GeneratorSpec::Lognormal { .. });
            let r = match (o.radius, generator.spec()) {
                (Some(r), _) => r,
                (None, GeneratorSpec::BoundedUniform { lo, hi, .. }) => lo.abs().max(hi.abs()),
                (None, GeneratorSpec::Lognormal { .. }) => 2.0 * med,
                _ => return Err(Error::config("options.radius is required for this generator")),
            };
            let interval = o.median_interval.unwrap_or(if is_lognormal {
                MedianInterval::NonNegative
            } else {
                MedianInterval::Symmetric
            });
            let x = scalars(data)?;
            let est = match mech {
                MechanismKind::Optimal => MedianSgd::new(r, interval)?.fit(&x, level, rng)?,
                MechanismKind::LaplaceBaseline => naive_private_median(&x, r, level, rng)?,
                MechanismKind::Nonprivate => sample_median(x),
            };
            let risk = generator
                .excess_risk(est)
                .ok_or_else(|| Error::config("generator has no closed-form absolute risk"))?;
            Ok(("excess_risk", risk))
        }
        EstimatorKind::Sparse => {
            let truth = generator.mean().ok_or_else(|| Error::config("generator has no known mean"))?;
            let r = channel_radius(spec, generator, Geometry::Linf)?;
            let c = generator.center();
            let x = recentre(vectors(data)?, c);
            let mut est = match mech {
                MechanismKind::Optimal => {
                    let lambda = o.lambda.unwrap_or_else(|| o.lambda_rule.lambda(spec.d, x.len(), r, level));
                    sparse_mean(&x, r, level, Some(lambda), rng)?
                }
                _ => sample_mean_vector(&x)?,
            };
            est.iter_mut().for_each(|v| *v += c);
            Ok(("l2_error_sq", sq_dist(&est, &truth)))
        }
        EstimatorKind::Logistic => {
            let truth = generator
                .logistic_theta()
                .ok_or_else(|| Error::config("generator has no logistic parameter"))?
                .to_vec();
            let Dataset::Labeled(stream) = data else {
                return Err(Error::Internal("expected labeled records".into()));
            };
            let cfg = LogisticSgd {
                geometry: o.geometry,
                radius: channel_radius(spec, generator, o.geometry)?,
                gamma0: o.gamma0,
                decay: o.decay,
                projection_radius: o.projection_radius,
            };
            let model = match mech {
                MechanismKind::Optimal => cfg.fit_private(&stream, level, rng)?,
                MechanismKind::LaplaceBaseline => cfg.fit_laplace(&stream, level, rng)?,
                MechanismKind::Nonprivate => cfg.fit_nonprivate(&stream)?,
            };
            Ok(("l2_error_sq", sq_dist(&model.theta, &truth)))
        }
        EstimatorKind::Density => {
            let x = scalars(data)?;
            let n = x.len();
            let est = match mech {
                MechanismKind::Optimal => density_estimate(&x, o.beta, level, rng)?,
                MechanismKind::LaplaceBaseline => {
                    laplace_density_estimate(&x, density_order(n, o.beta, level)?, o.beta, level, rng)?
                }
                MechanismKind::Nonprivate => {
                    classical_density_estimate(&x, classical_density_order(n, o.beta)?, o.beta)?
                }
            };
            let err = est.l2_error_sq(
                |t| generator.density(t).unwrap_or(f64::NAN),
                DENSITY_QUADRATURE_POINTS,
            );
            Ok(("l2_density_error", err))
        }
    }
}
