//! Property tests for the invariants of every module.

use ldp_core::audit::{channel_pmf, halfspace_expectation_cube, truncated_laplace_log_ratio, verify_dp};
use ldp_core::bounds::{density_rate, logistic_lower, mean_rate, median_rate, sparse_mean_lower};
use ldp_core::estimators::{
    density_estimate, logistic_gradient, soft_threshold, MedianInterval, MedianSgd, Projection,
    SgdState, StepSchedule,
};
use ldp_core::experiment::{read_csv, write_csv, RunRecord};
use ldp_core::mechanisms::constants::{l2_bound, linf_bound};
use ldp_core::numeric::clamp;
use ldp_core::{Channel, MomentAssumption, PrivacyLevel, Rng};
use proptest::prelude::*;

fn lvl(eps: f64) -> PrivacyLevel {
    PrivacyLevel::new(eps).unwrap()
}

/// argmin_t ½(t - v)² + λ|t| by golden-section search on a bracket that
/// must contain the minimizer.
fn prox_oracle(v: f64, lambda: f64) -> f64 {
    let f = |t: f64| 0.5 * (t - v).powi(2) + lambda * t.abs();
    let (mut a, mut b) = (-v.abs() - 1.0, v.abs() + 1.0);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) <= f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

fn softplus(m: f64) -> f64 {
    if m > 0.0 {
        m + (-m).exp().ln_1p()
    } else {
        m.exp().ln_1p()
    }
}

fn logistic_loss(theta: &[f64], x: &[f64], y: f64) -> f64 {
    let m: f64 = theta.iter().zip(x).map(|(a, b)| a * b).sum();
    softplus(-y * m)
}

/// Mean of the vertices z of {-1, 1}^d with ⟨z, x⟩ ≥ 0, by plain loops.
fn accepted_vertex_mean(x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let mut sum = vec![0.0; d];
    let mut count = 0.0;
    for mask in 0u32..(1 << d) {
        let z: Vec<f64> = (0..d).map(|j| if mask >> j & 1 == 1 { 1.0 } else { -1.0 }).collect();
        if z.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() >= 0.0 {
            sum.iter_mut().zip(&z).for_each(|(s, v)| *s += v);
            count += 1.0;
        }
    }
    sum.into_iter().map(|s| s / count).collect()
}

fn record() -> impl Strategy<Value = RunRecord> {
    (
        "[a-z][a-z0-9_-]{0,12}",
        prop::sample::select(vec!["optimal", "laplace_baseline", "nonprivate"]),
        1usize..10_000_000,
        1e-3f64..50.0,
        0usize..1000,
        prop::sample::select(vec!["sq_error", "linf_error", "l2_error_sq"]),
        prop::num::f64::POSITIVE | prop::num::f64::ZERO,
        0.0f64..1e6,
    )
        .prop_map(|(experiment, mechanism, n, eps, replicate, metric, value, wall_ms)| RunRecord {
            experiment,
            mechanism: mechanism.into(),
            n,
            eps,
            replicate,
            metric_name: metric.into(),
            value,
            wall_ms,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn privacy_level_invariants(eps in 1e-6f64..10.0) {
        let l = lvl(eps);
        prop_assert!(l.pi() > 0.5 && l.pi() < 1.0);
        prop_assert!(l.phi() > 1.0);
        let odds = l.pi() / (1.0 - l.pi());
        prop_assert!((odds / l.exp_eps() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn clamp_is_projection(x in -1e6f64..1e6, t in 1e-6f64..1e6) {
        let c = clamp(x, t);
        prop_assert!(c.abs() <= t);
        prop_assert_eq!(c, x.min(t).max(-t));
        prop_assert_eq!(clamp(c, t), c);
    }

    #[test]
    fn equal_seeds_equal_draws(seed in any::<u64>(), path in prop::collection::vec(any::<u64>(), 0..4)) {
        let (mut a, mut b) = (Rng::derive(seed, &path), Rng::derive(seed, &path));
        for _ in 0..16 {
            prop_assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
    }

    #[test]
    fn soft_threshold_is_prox(v in prop::collection::vec(-10.0f64..10.0, 1..8), lambda in 0.0f64..5.0) {
        let got = soft_threshold(&v, lambda).unwrap();
        for (g, &vi) in got.iter().zip(&v) {
            prop_assert!((g - prox_oracle(vi, lambda)).abs() < 1e-6, "v={} λ={}", vi, lambda);
        }
    }

    #[test]
    fn logistic_gradient_matches_finite_differences(
        theta in prop::collection::vec(-3.0f64..3.0, 1..8),
        seed in any::<u64>(),
        positive in any::<bool>(),
    ) {
        let d = theta.len();
        let mut rng = Rng::new(seed);
        let x: Vec<f64> = (0..d).map(|_| 2.0 * rng.uniform() - 1.0).collect();
        let y = if positive { 1.0 } else { -1.0 };
        let g = logistic_gradient(&theta, &x, y).unwrap();
        let h = 1e-6;
        let mut err = 0.0f64;
        let mut norm = 0.0f64;
        for j in 0..d {
            let (mut up, mut dn) = (theta.clone(), theta.clone());
            up[j] += h;
            dn[j] -= h;
            let fd = (logistic_loss(&up, &x, y) - logistic_loss(&dn, &x, y)) / (2.0 * h);
            err = err.max((fd - g[j]).abs());
            norm = norm.max(g[j].abs());
        }
        prop_assert!(err <= 1e-6 * norm.max(1e-3), "err={} norm={}", err, norm);
    }

    #[test]
    fn sgd_average_and_projection(
        grads in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 1..60),
        radius in 0.1f64..3.0,
        ball in any::<bool>(),
    ) {
        let projection = if ball {
            Projection::L2Ball { radius }
        } else {
            Projection::Interval { lo: -radius, hi: radius }
        };
        let mut s = SgdState::new(vec![0.0; 3], StepSchedule::polyak(1.0, 0.6).unwrap(), projection);
        let mut iterates = vec![s.theta().to_vec()];
        for g in &grads {
            s.step(g);
            prop_assert!(projection.contains(s.theta()));
            iterates.push(s.theta().to_vec());
        }
        let n = grads.len() as f64;
        let avg = s.average();
        for j in 0..3 {
            let direct: f64 = iterates[..grads.len()].iter().map(|t| t[j]).sum::<f64>() / n;
            prop_assert!((avg[j] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn median_iterates_stay_in_interval(
        data in prop::collection::vec(-1.0f64..1.0, 1..300),
        eps in 0.1f64..2.0,
        seed in any::<u64>(),
        half in any::<bool>(),
    ) {
        let interval = if half { MedianInterval::NonNegative } else { MedianInterval::Symmetric };
        let lo = if half { 0.0 } else { -1.0 };
        let sgd = MedianSgd::new(1.0, interval).unwrap();
        let (est, trace) = sgd.fit_with_trace(&data, &lvl(eps), &mut Rng::new(seed)).unwrap();
        prop_assert!(trace.iter().all(|t| (lo..=1.0).contains(t)));
        prop_assert!((lo..=1.0).contains(&est));
    }

    #[test]
    fn density_integrates_to_one(
        data in prop::collection::vec(0.0f64..=1.0, 2..400),
        eps in 0.2f64..4.0,
        seed in any::<u64>(),
    ) {
        let est = density_estimate(&data, 1.0, &lvl(eps), &mut Rng::new(seed)).unwrap();
        prop_assert!(est.k >= 1);
        prop_assert_eq!(est.coeffs.len(), est.k);
        let m = 4096;
        let integral: f64 = (0..m).map(|i| est.eval((i as f64 + 0.5) / m as f64).unwrap()).sum::<f64>() / m as f64;
        prop_assert!((integral - 1.0).abs() < 1e-9, "∫f̂ = {}", integral);
    }

    #[test]
    fn channel_support(
        d in 1usize..12,
        eps in 0.1f64..5.0,
        seed in any::<u64>(),
    ) {
        let mut rng = Rng::new(seed);
        let level = lvl(eps);
        let x: Vec<f64> = (0..d).map(|_| 2.0 * rng.uniform() - 1.0).collect();
        let linf = Channel::linf_ball(d, 1.0, level).unwrap();
        let b = linf.output_bound().unwrap();
        prop_assert!(linf.privatize(&x, &mut rng).unwrap().iter().all(|z| z.abs() == b));

        let scale = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        let x2: Vec<f64> = x.iter().map(|v| v / scale).collect();
        let l2 = Channel::l2_ball(d, 1.0, level).unwrap();
        let b2 = l2.output_bound().unwrap();
        let z = l2.privatize(&x2, &mut rng).unwrap();
        prop_assert!((z.iter().map(|v| v * v).sum::<f64>().sqrt() / b2 - 1.0).abs() < 1e-12);

        let s = if rng.uniform() < 0.5 { 1.0 } else { -1.0 };
        let rr = Channel::sign_rr(level).privatize_scalar(s, &mut rng).unwrap();
        prop_assert_eq!(rr.abs(), level.phi());
    }

    #[test]
    fn l2_bound_stirling(d in 1usize..=64, eps in 0.1f64..3.0, r in 0.1f64..10.0) {
        let level = lvl(eps);
        let b = l2_bound(d, r, &level).unwrap();
        let cap = r * level.phi() * 3.0 * std::f64::consts::PI.sqrt() / 4.0 * (d as f64).sqrt();
        prop_assert!(b <= cap * (1.0 + 1e-12));
    }

    #[test]
    fn cube_mean_matches_linf_constant(d in 1usize..=10, mask in any::<u32>()) {
        let x: Vec<f64> = (0..d).map(|j| if mask >> j & 1 == 1 { 1.0 } else { -1.0 }).collect();
        let got = halfspace_expectation_cube(&x).unwrap();
        let oracle = accepted_vertex_mean(&x);
        // B = r·φ·C_d, so C_d⁻¹ = r·φ / B.
        let level = lvl(1.0);
        let c_inv = level.phi() / linf_bound(d, 1.0, &level).unwrap();
        for j in 0..d {
            prop_assert!((got[j] - oracle[j]).abs() < 1e-12);
            prop_assert!((got[j] - c_inv * x[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn linf_pmf_is_unbiased_law(d in 1usize..=5, eps in 0.05f64..4.0, seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let x: Vec<f64> = (0..d).map(|_| 2.0 * rng.uniform() - 1.0).collect();
        let ch = Channel::linf_ball(d, 1.0, lvl(eps)).unwrap();
        let pmf = channel_pmf(&ch, &x).unwrap();
        prop_assert!(pmf.probs.iter().all(|&p| p >= 0.0));
        prop_assert!((pmf.total() - 1.0).abs() < 1e-12);
        let mean = pmf.mean();
        for j in 0..d {
            prop_assert!((mean[j] - x[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn linf_channel_is_private(d in 1usize..=5, eps in 0.05f64..4.0, seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let grid: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..d).map(|_| 2.0 * rng.uniform() - 1.0).collect())
            .collect();
        let ch = Channel::linf_ball(d, 1.0, lvl(eps)).unwrap();
        prop_assert!(verify_dp(&ch, &grid).unwrap() <= eps + 1e-9);
        let rr = Channel::sign_rr(lvl(eps));
        let ratio = verify_dp(&rr, &[[1.0], [-1.0]]).unwrap();
        prop_assert!((ratio - eps).abs() < 1e-9);
    }

    #[test]
    fn truncated_laplace_ratio_bounded(
        x in -100.0f64..100.0,
        xp in -100.0f64..100.0,
        z in -200.0f64..200.0,
        k in prop::sample::select(vec![1.5, 2.0, 4.0, f64::INFINITY]),
        n in 1usize..100_000,
        eps in 0.05f64..5.0,
    ) {
        let a = MomentAssumption::new(k, 1.0).unwrap();
        let ch = Channel::truncated_laplace(&a, n, lvl(eps)).unwrap();
        prop_assert!(truncated_laplace_log_ratio(&ch, x, xp, z).unwrap() <= eps + 1e-9);
    }

    #[test]
    fn rates_positive_and_monotone(n in 1usize..1_000_000, eps in 0.01f64..1.0, d in 2usize..100) {
        let n2 = n * 2;
        let e2 = (eps * 1.5).min(1.0);
        let pairs = [
            (mean_rate(2.0, n, eps).unwrap(), mean_rate(2.0, n2, eps).unwrap(), mean_rate(2.0, n, e2).unwrap()),
            (sparse_mean_lower(d, n, eps).unwrap(), sparse_mean_lower(d, n2, eps).unwrap(), sparse_mean_lower(d, n, e2).unwrap()),
            (density_rate(1.0, n, eps).unwrap(), density_rate(1.0, n2, eps).unwrap(), density_rate(1.0, n, e2).unwrap()),
            (logistic_lower(d, n, eps).unwrap(), logistic_lower(d, n2, eps).unwrap(), logistic_lower(d, n, e2).unwrap()),
            (median_rate(1.0, n, eps).unwrap(), median_rate(1.0, n2, eps).unwrap(), median_rate(1.0, n, e2).unwrap()),
        ];
        for (base, more_n, more_eps) in pairs {
            prop_assert!(base > 0.0);
            prop_assert!(more_n <= base && more_eps <= base);
        }
        let exact = (1.0 / (n as f64 * eps * eps)).min(1.0);
        prop_assert!((mean_rate(f64::INFINITY, n, eps).unwrap() / exact - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip(records in prop::collection::vec(record(), 0..20)) {
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        prop_assert!(!buf.contains(&b'\r'));
        prop_assert_eq!(buf.iter().filter(|&&c| c == b'\n').count(), records.len() + 1);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        std::fs::write(&path, &buf).unwrap();
        prop_assert_eq!(read_csv(&path).unwrap(), records);
    }
}
