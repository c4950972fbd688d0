//! C ABI over `ldp-core`.
//!
//! Conventions:
//! - every fallible function returns an [`LdpStatus`]; results go through
//!   out-pointers that are written only on `LDP_STATUS_OK`;
//! - on failure a message is kept per thread, see [`ldp_last_error_message`];
//! - [`LdpRng`] and [`LdpChannel`] are opaque; create them with the
//!   `*_new` functions and release them with the matching `*_free`;
//! - record matrices are row-major `n × d` arrays of `double`;
//! - panics are caught at the boundary and reported as `LDP_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ldp_core::bounds;
use ldp_core::estimators::{self, MedianInterval, MedianSgd};
use ldp_core::mechanisms::{constants, MomentAssumption};
use ldp_core::{Channel, Error, Geometry, LaplaceSensitivity, PrivacyLevel, Rng};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdpStatus {
    Ok = 0,
    NullPointer = 1,
    Parameter = 2,
    Domain = 3,
    Size = 4,
    Unsupported = 5,
    Support = 6,
    Data = 7,
    Config = 8,
    Io = 9,
    Internal = 10,
    /// Output buffer shorter than the result.
    BufferTooSmall = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdpGeometry {
    L2 = 0,
    Linf = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdpLaplaceSensitivity {
    L1 = 0,
    L2 = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdpMedianInterval {
    Symmetric = 0,
    NonNegative = 1,
}

impl From<LdpGeometry> for Geometry {
    fn from(g: LdpGeometry) -> Self {
        match g {
            LdpGeometry::L2 => Geometry::L2,
            LdpGeometry::Linf => Geometry::Linf,
        }
    }
}

/// Seeded random stream.
pub struct LdpRng(Rng);

/// A configured privatization channel.
pub struct LdpChannel(Channel);

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

struct Failure(LdpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parameter(_) => LdpStatus::Parameter,
            Error::Domain(_) => LdpStatus::Domain,
            Error::Size(_) => LdpStatus::Size,
            Error::Unsupported(_) => LdpStatus::Unsupported,
            Error::Support(_) => LdpStatus::Support,
            Error::Data(_) => LdpStatus::Data,
            Error::Config(_) => LdpStatus::Config,
            Error::Io { .. } => LdpStatus::Io,
            _ => LdpStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(LdpStatus::NullPointer, format!("{what} is null"))
}

fn set_last_error(msg: Option<String>) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

/// Run `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LdpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            LdpStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(Some(msg));
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(Some(format!("panic: {msg}")));
            LdpStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn rng_mut<'a>(rng: *mut LdpRng) -> Result<&'a mut Rng, Failure> {
    rng.as_mut().map(|r| &mut r.0).ok_or_else(|| null("rng"))
}

unsafe fn rows<'a>(data: *const f64, n: usize, d: usize) -> Result<Vec<&'a [f64]>, Failure> {
    if d == 0 {
        return Err(Failure(LdpStatus::Parameter, "d must be at least 1".into()));
    }
    let len = n
        .checked_mul(d)
        .ok_or_else(|| Failure(LdpStatus::Parameter, "n * d overflows".into()))?;
    Ok(slice(data, len, "data")?.chunks_exact(d).collect())
}

fn level(eps: f64) -> Result<PrivacyLevel, Failure> {
    Ok(PrivacyLevel::new(eps)?)
}

fn copy_out(src: &[f64], out: &mut [f64]) -> Result<(), Failure> {
    if out.len() < src.len() {
        return Err(Failure(
            LdpStatus::BufferTooSmall,
            format!("output holds {} values, result has {}", out.len(), src.len()),
        ));
    }
    out[..src.len()].copy_from_slice(src);
    Ok(())
}

// ---- errors -------------------------------------------------------------

/// Length in bytes of the calling thread's last error message, excluding the
/// terminating NUL; 0 when the last call succeeded.
#[no_mangle]
pub extern "C" fn ldp_last_error_length() -> usize {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(0, |s| s.len()))
}

/// Copy the last error message, NUL-terminated and truncated to fit, into
/// `buf`. Returns the number of bytes written excluding the NUL, or -1 if
/// `buf` is null or `len` is 0.
///
/// # Safety
/// `buf` must point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ldp_last_error_message(buf: *mut c_char, len: usize) -> c_int {
    if buf.is_null() || len == 0 {
        return -1;
    }
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let msg = slot.as_deref().unwrap_or("").as_bytes();
        let n = msg.len().min(len - 1);
        ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
        *buf.add(n) = 0;
        n as c_int
    })
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn ldp_status_name(status: LdpStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        LdpStatus::Ok => b"ok\0",
        LdpStatus::NullPointer => b"null pointer\0",
        LdpStatus::Parameter => b"invalid parameter\0",
        LdpStatus::Domain => b"domain violation\0",
        LdpStatus::Size => b"size limit exceeded\0",
        LdpStatus::Unsupported => b"unsupported\0",
        LdpStatus::Support => b"support mismatch\0",
        LdpStatus::Data => b"invalid data\0",
        LdpStatus::Config => b"configuration error\0",
        LdpStatus::Io => b"I/O error\0",
        LdpStatus::Internal => b"internal error\0",
        LdpStatus::BufferTooSmall => b"buffer too small\0",
        LdpStatus::Panic => b"panic\0",
    };
    s.as_ptr().cast()
}

// ---- rng ----------------------------------------------------------------

/// New random stream; never null.
#[no_mangle]
pub extern "C" fn ldp_rng_new(seed: u64) -> *mut LdpRng {
    Box::into_raw(Box::new(LdpRng(Rng::new(seed))))
}

/// # Safety
/// `rng` must come from [`ldp_rng_new`] and not be used afterwards. Null is
/// accepted.
#[no_mangle]
pub unsafe extern "C" fn ldp_rng_free(rng: *mut LdpRng) {
    if !rng.is_null() {
        drop(Box::from_raw(rng));
    }
}

/// Uniform draw on [0, 1).
///
/// # Safety
/// `rng` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_rng_uniform(rng: *mut LdpRng, out: *mut f64) -> LdpStatus {
    guard(|| {
        let u = rng_mut(rng)?.uniform();
        write(out, u, "out")
    })
}

// ---- channels -----------------------------------------------------------

unsafe fn emit_channel(ch: Result<Channel, Error>, out: *mut *mut LdpChannel) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let ch = ch?;
    out.write(Box::into_raw(Box::new(LdpChannel(ch))));
    Ok(())
}

/// ℓ∞-ball sampler for records with ‖x‖∞ ≤ `radius`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_channel_linf_ball(
    dim: usize,
    radius: f64,
    eps: f64,
    out: *mut *mut LdpChannel,
) -> LdpStatus {
    guard(|| emit_channel(Channel::linf_ball(dim, radius, level(eps)?), out))
}

/// ℓ2-ball sampler for records with ‖x‖₂ ≤ `radius`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_channel_l2_ball(
    dim: usize,
    radius: f64,
    eps: f64,
    out: *mut *mut LdpChannel,
) -> LdpStatus {
    guard(|| emit_channel(Channel::l2_ball(dim, radius, level(eps)?), out))
}

/// Debiased randomized response on a sign in {-1, +1}.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_channel_sign_rr(eps: f64, out: *mut *mut LdpChannel) -> LdpStatus {
    guard(|| emit_channel(Ok(Channel::sign_rr(level(eps)?)), out))
}

/// Truncated Laplace scalar channel for data with E|X|^k ≤ radius_k^k, tuned
/// for `n` samples. Pass `k = INFINITY` for data bounded by `radius_k`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_channel_truncated_laplace(
    k: f64,
    radius_k: f64,
    n: usize,
    eps: f64,
    out: *mut *mut LdpChannel,
) -> LdpStatus {
    guard(|| {
        let a = MomentAssumption::new(k, radius_k)?;
        emit_channel(Channel::truncated_laplace(&a, n, level(eps)?), out)
    })
}

/// Coordinatewise Laplace baseline.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_channel_laplace(
    dim: usize,
    radius: f64,
    eps: f64,
    sensitivity: LdpLaplaceSensitivity,
    out: *mut *mut LdpChannel,
) -> LdpStatus {
    let s = match sensitivity {
        LdpLaplaceSensitivity::L1 => LaplaceSensitivity::L1,
        LdpLaplaceSensitivity::L2 => LaplaceSensitivity::L2Paper,
    };
    guard(|| emit_channel(Channel::laplace_vector(dim, radius, level(eps)?, s), out))
}

/// # Safety
/// `ch` must come from an `ldp_channel_*` constructor and not be used
/// afterwards. Null is accepted.
#[no_mangle]
pub unsafe extern "C" fn ldp_channel_free(ch: *mut LdpChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// Input dimension, or 0 for a null handle.
///
/// # Safety
/// `ch` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ldp_channel_dim(ch: *const LdpChannel) -> usize {
    ch.as_ref().map_or(0, |c| c.0.dim())
}

/// Magnitude B of the outputs for sampler and randomized-response channels.
/// Returns `LDP_STATUS_UNSUPPORTED` for Laplace channels.
///
/// # Safety
/// `ch` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_channel_output_bound(ch: *const LdpChannel, out: *mut f64) -> LdpStatus {
    guard(|| {
        let ch = &ch.as_ref().ok_or_else(|| null("channel"))?.0;
        let b = ch.output_bound().ok_or_else(|| {
            Failure(LdpStatus::Unsupported, format!("{:?} has unbounded output", ch.kind()))
        })?;
        write(out, b, "out")
    })
}

/// Privatize one record `x[0..dim]` into `out[0..dim]`.
///
/// # Safety
/// `ch` and `rng` must be live handles; `x` and `out` must hold `dim`
/// doubles each.
#[no_mangle]
pub unsafe extern "C" fn ldp_channel_privatize(
    ch: *const LdpChannel,
    rng: *mut LdpRng,
    x: *const f64,
    out: *mut f64,
    dim: usize,
) -> LdpStatus {
    guard(|| {
        let ch = &ch.as_ref().ok_or_else(|| null("channel"))?.0;
        if dim != ch.dim() {
            return Err(Failure(
                LdpStatus::Parameter,
                format!("dim {dim} does not match channel dimension {}", ch.dim()),
            ));
        }
        let x = slice(x, dim, "x")?;
        let out = slice_mut(out, dim, "out")?;
        ch.privatize_into(x, rng_mut(rng)?, out)?;
        Ok(())
    })
}

// ---- estimators ---------------------------------------------------------

/// Private mean of `n` records of dimension `d` in the given norm ball;
/// writes `d` values to `out`.
///
/// # Safety
/// `data` must hold `n * d` doubles, `out` at least `out_len`; `rng` live.
#[no_mangle]
pub unsafe extern "C" fn ldp_private_mean_vector(
    data: *const f64,
    n: usize,
    d: usize,
    geometry: LdpGeometry,
    radius: f64,
    eps: f64,
    rng: *mut LdpRng,
    out: *mut f64,
    out_len: usize,
) -> LdpStatus {
    guard(|| {
        let rows = rows(data, n, d)?;
        let est = estimators::private_mean_vector(&rows, geometry.into(), radius, &level(eps)?, rng_mut(rng)?)?;
        copy_out(&est, slice_mut(out, out_len, "out")?)
    })
}

/// Private mean of scalars with E|X|^k ≤ radius_k^k.
///
/// # Safety
/// `data` must hold `n` doubles; `rng` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_private_mean_scalar(
    data: *const f64,
    n: usize,
    k: f64,
    radius_k: f64,
    eps: f64,
    rng: *mut LdpRng,
    out: *mut f64,
) -> LdpStatus {
    guard(|| {
        let x = slice(data, n, "data")?;
        let a = MomentAssumption::new(k, radius_k)?;
        let est = estimators::private_mean_scalar(x, &a, &level(eps)?, rng_mut(rng)?)?;
        write(out, est, "out")
    })
}

/// Private median by SGD over the interval selected by `interval`.
///
/// # Safety
/// `data` must hold `n` doubles; `rng` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_private_median(
    data: *const f64,
    n: usize,
    radius: f64,
    interval: LdpMedianInterval,
    eps: f64,
    rng: *mut LdpRng,
    out: *mut f64,
) -> LdpStatus {
    guard(|| {
        let x = slice(data, n, "data")?;
        let interval = match interval {
            LdpMedianInterval::Symmetric => MedianInterval::Symmetric,
            LdpMedianInterval::NonNegative => MedianInterval::NonNegative,
        };
        let est = MedianSgd::new(radius, interval)?.fit(x, &level(eps)?, rng_mut(rng)?)?;
        write(out, est, "out")
    })
}

/// Sparse mean: ℓ∞ privatization followed by soft thresholding at `lambda`.
/// A negative or NaN `lambda` selects the default threshold.
///
/// # Safety
/// `data` must hold `n * d` doubles, `out` at least `out_len`; `rng` live.
#[no_mangle]
pub unsafe extern "C" fn ldp_sparse_mean(
    data: *const f64,
    n: usize,
    d: usize,
    radius: f64,
    eps: f64,
    lambda: f64,
    rng: *mut LdpRng,
    out: *mut f64,
    out_len: usize,
) -> LdpStatus {
    guard(|| {
        let rows = rows(data, n, d)?;
        let lambda = (lambda >= 0.0).then_some(lambda);
        let est = estimators::sparse_mean(&rows, radius, &level(eps)?, lambda, rng_mut(rng)?)?;
        copy_out(&est, slice_mut(out, out_len, "out")?)
    })
}

/// sign(v)·max(|v| - lambda, 0), elementwise, in place.
///
/// # Safety
/// `v` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ldp_soft_threshold(v: *mut f64, len: usize, lambda: f64) -> LdpStatus {
    guard(|| {
        let v = slice_mut(v, len, "v")?;
        let t = estimators::soft_threshold(v, lambda)?;
        v.copy_from_slice(&t);
        Ok(())
    })
}

/// Private logistic regression by SGD on `n` labeled records. `labels` are
/// ±1; features satisfy ‖x‖ ≤ `radius` in `geometry`. Writes `d` values.
///
/// # Safety
/// `features` must hold `n * d` doubles, `labels` `n`, `out` at least
/// `out_len`; `rng` live.
#[no_mangle]
pub unsafe extern "C" fn ldp_private_logistic(
    features: *const f64,
    labels: *const f64,
    n: usize,
    d: usize,
    geometry: LdpGeometry,
    radius: f64,
    eps: f64,
    rng: *mut LdpRng,
    out: *mut f64,
    out_len: usize,
) -> LdpStatus {
    guard(|| {
        let rows = rows(features, n, d)?;
        let labels = slice(labels, n, "labels")?;
        let stream: Vec<(&[f64], f64)> = rows.into_iter().zip(labels.iter().copied()).collect();
        let model = estimators::LogisticSgd::new(geometry.into(), radius).fit_private(
            &stream,
            &level(eps)?,
            rng_mut(rng)?,
        )?;
        copy_out(&model.theta, slice_mut(out, out_len, "out")?)
    })
}

/// Private trigonometric-series density estimate for data in [0, 1],
/// evaluated at `points[0..m]` into `out[0..m]`. The basis order is written
/// to `order` when it is non-null.
///
/// # Safety
/// `data` must hold `n` doubles, `points` and `out` `m` each; `rng` live;
/// `order` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_density_estimate(
    data: *const f64,
    n: usize,
    beta: f64,
    eps: f64,
    rng: *mut LdpRng,
    points: *const f64,
    out: *mut f64,
    m: usize,
    order: *mut usize,
) -> LdpStatus {
    guard(|| {
        let x = slice(data, n, "data")?;
        let est = estimators::density_estimate(x, beta, &level(eps)?, rng_mut(rng)?)?;
        let pts = slice(points, m, "points")?;
        let out = slice_mut(out, m, "out")?;
        for (o, &t) in out.iter_mut().zip(pts) {
            *o = est.eval(t)?;
        }
        if !order.is_null() {
            order.write(est.k);
        }
        Ok(())
    })
}

// ---- constants and bounds -----------------------------------------------

/// Output magnitude of the ℓ∞ sampler.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_linf_bound(d: usize, radius: f64, eps: f64, out: *mut f64) -> LdpStatus {
    guard(|| write(out, constants::linf_bound(d, radius, &level(eps)?)?, "out"))
}

/// Output magnitude of the ℓ2 sampler.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_l2_bound(d: usize, radius: f64, eps: f64, out: *mut f64) -> LdpStatus {
    guard(|| write(out, constants::l2_bound(d, radius, &level(eps)?)?, "out"))
}

/// Minimax rate of the scalar mean under a k-th moment bound.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_mean_rate(k: f64, n: usize, eps: f64, out: *mut f64) -> LdpStatus {
    guard(|| write(out, bounds::mean_rate(k, n, eps)?, "out"))
}

/// Lower bound for the 1-sparse mean.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_sparse_mean_lower(d: usize, n: usize, eps: f64, out: *mut f64) -> LdpStatus {
    guard(|| write(out, bounds::sparse_mean_lower(d, n, eps)?, "out"))
}

/// Minimax rate of density estimation over a Sobolev class of order β.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_density_rate(beta: f64, n: usize, eps: f64, out: *mut f64) -> LdpStatus {
    guard(|| write(out, bounds::density_rate(beta, n, eps)?, "out"))
}

/// Lower bound for logistic regression parameter estimation.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_logistic_lower(d: usize, n: usize, eps: f64, out: *mut f64) -> LdpStatus {
    guard(|| write(out, bounds::logistic_lower(d, n, eps)?, "out"))
}

/// Excess-risk bound of the private median.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldp_median_rate(radius: f64, n: usize, eps: f64, out: *mut f64) -> LdpStatus {
    guard(|| write(out, bounds::median_rate(radius, n, eps)?, "out"))
}
