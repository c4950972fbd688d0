use crate::error::{Error, Result};
use crate::estimators::{at_record, require_nonempty, Geometry};
use crate::mechanisms::{Channel, LaplaceSensitivity, MomentAssumption};
use crate::privacy::PrivacyLevel;
use crate::random::Rng;

/// Mean of truncated-Laplace views of each record.
///
/// Unbiased for E[clamp(X, T)]; under the k-th moment assumption the
/// truncation bias is of the same order as the noise.
pub fn private_mean_scalar(
    data: &[f64],
    assumption: &MomentAssumption,
    level: &PrivacyLevel,
    rng: &mut Rng,
) -> Result<f64> {
    require_nonempty(data, "data")?;
    let channel = Channel::truncated_laplace(assumption, data.len(), *level)?;
    let mut sum = 0.0;
    for (i, &x) in data.iter().enumerate() {
        sum += channel.privatize_scalar(x, rng).map_err(at_record(i))?;
    }
    Ok(sum / data.len() as f64)
}

/// Mean of halfspace-sampler views; unbiased for the population mean.
pub fn private_mean_vector<R: AsRef<[f64]>>(
    data: &[R],
    geometry: Geometry,
    radius: f64,
    level: &PrivacyLevel,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    let d = record_dim(data)?;
    let channel = match geometry {
        Geometry::L2 => Channel::l2_ball(d, radius, *level)?,
        Geometry::Linf => Channel::linf_ball(d, radius, *level)?,
    };
    average_views(data, &channel, rng)
}

/// Additive-Laplace baseline: ℓ1-calibrated noise for the ℓ∞ box, the
/// √d-calibrated noise for the ℓ2 ball.
pub fn laplace_mean_vector<R: AsRef<[f64]>>(
    data: &[R],
    geometry: Geometry,
    radius: f64,
    level: &PrivacyLevel,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    let d = record_dim(data)?;
    let sens = match geometry {
        Geometry::L2 => LaplaceSensitivity::L2Paper,
        Geometry::Linf => LaplaceSensitivity::L1,
    };
    let channel = Channel::laplace_vector(d, radius, *level, sens)?;
    average_views(data, &channel, rng)
}

pub fn sample_mean_vector<R: AsRef<[f64]>>(data: &[R]) -> Result<Vec<f64>> {
    let d = record_dim(data)?;
    let mut acc = vec![0.0; d];
    for r in data {
        acc.iter_mut().zip(r.as_ref()).for_each(|(a, x)| *a += x);
    }
    let n = data.len() as f64;
    Ok(acc.into_iter().map(|a| a / n).collect())
}

fn average_views<R: AsRef<[f64]>>(data: &[R], channel: &Channel, rng: &mut Rng) -> Result<Vec<f64>> {
    let d = channel.dim();
    let mut acc = vec![0.0; d];
    let mut z = vec![0.0; d];
    for (i, r) in data.iter().enumerate() {
        channel
            .privatize_into(r.as_ref(), rng, &mut z)
            .map_err(at_record(i))?;
        acc.iter_mut().zip(&z).for_each(|(a, v)| *a += v);
    }
    let n = data.len() as f64;
    Ok(acc.into_iter().map(|a| a / n).collect())
}

pub(crate) fn record_dim<R: AsRef<[f64]>>(data: &[R]) -> Result<usize> {
    require_nonempty(data, "data")?;
    let d = data[0].as_ref().len();
    if d == 0 {
        return Err(Error::param("records must have at least one coordinate"));
    }
    if let Some(i) = data.iter().position(|r| r.as_ref().len() != d) {
        return Err(Error::param(format!(
            "record {i} has dimension {}, expected {d}",
            data[i].as_ref().len()
        )));
    }
    Ok(d)
}
