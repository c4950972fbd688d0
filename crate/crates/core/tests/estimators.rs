//! Statistical checks of the estimators against their stated guarantees.

use ldp_core::estimators::{
    density_estimate_with_order, private_mean_scalar, private_mean_vector, sparse_mean,
    LogisticSgd, MedianInterval, MedianSgd,
};
use ldp_core::experiment::{generate, run_experiment, Dataset, EstimatorKind, EstimatorOptions, ExperimentSpec, GeneratorSpec, MechanismKind};
use ldp_core::mechanisms::constants::{l2_bound, linf_bound};
use ldp_core::{Geometry, MomentAssumption, PrivacyLevel, Rng};
use rayon::prelude::*;

fn lvl(eps: f64) -> PrivacyLevel {
    PrivacyLevel::new(eps).unwrap()
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn scalar_mean_of_zeros_is_centred() {
    let a = MomentAssumption::new(2.0, 1.0).unwrap();
    let data = vec![0.0; 500];
    let ests: Vec<f64> = (0..1000u64)
        .map(|r| private_mean_scalar(&data, &a, &lvl(1.0), &mut Rng::derive(1, &[r])).unwrap())
        .collect();
    let (m, se) = mean_se(&ests);
    assert!(m.abs() <= 5.0 * se, "mean={m} se={se}");
    assert!(private_mean_scalar(&[], &a, &lvl(1.0), &mut Rng::new(0)).is_err());
}

#[test]
fn vector_mean_single_record_unbiased() {
    let x = vec![vec![0.4, -0.9, 0.0]];
    let mut rng = Rng::new(2);
    let draws = 1_000_000;
    let mut sums = [0.0; 3];
    let mut sq = [0.0; 3];
    for _ in 0..draws {
        let z = private_mean_vector(&x, Geometry::Linf, 1.0, &lvl(1.0), &mut rng).unwrap();
        for j in 0..3 {
            sums[j] += z[j];
            sq[j] += z[j] * z[j];
        }
    }
    let n = draws as f64;
    for j in 0..3 {
        let m = sums[j] / n;
        let se = ((sq[j] / n - m * m) / n).sqrt();
        assert!((m - x[0][j]).abs() <= 5.0 * se, "coord {j}: {m}");
    }
    let err = private_mean_vector(&[vec![0.0, 0.0], vec![0.0, 2.0]], Geometry::Linf, 1.0, &lvl(1.0), &mut rng)
        .unwrap_err()
        .to_string();
    assert!(err.contains("record 1"), "{err}");
}

#[test]
fn l2_mean_error_linear_in_dimension() {
    let (n, reps) = (1000, 300);
    let per_d: Vec<f64> = [4usize, 16, 64]
        .iter()
        .map(|&d| {
            let data = vec![vec![0.0; d]; n];
            let mse = (0..reps as u64)
                .into_par_iter()
                .map(|r| {
                    let est = private_mean_vector(&data, Geometry::L2, 1.0, &lvl(1.0), &mut Rng::derive(3, &[d as u64, r])).unwrap();
                    est.iter().map(|v| v * v).sum::<f64>()
                })
                .sum::<f64>()
                / reps as f64;
            mse / d as f64
        })
        .collect();
    let (lo, hi) = per_d.iter().fold((f64::MAX, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi / lo <= 1.5, "MSE/d across d: {per_d:?}");
}

fn median_hits(data: &[f64], target: f64, reps: u64, seed: u64) -> f64 {
    let bound = 6.0 / (data.len() as f64).sqrt();
    let sgd = MedianSgd::new(1.0, MedianInterval::Symmetric).unwrap();
    let hits = (0..reps)
        .into_par_iter()
        .filter(|&r| {
            let est = sgd.fit(data, &lvl(1.0), &mut Rng::derive(seed, &[r])).unwrap();
            (est - target).abs() <= bound
        })
        .count();
    hits as f64 / reps as f64
}

#[test]
fn median_within_bound_for_constant_and_symmetric_data() {
    let n = 100_000;
    let c = 0.3;
    let frac = median_hits(&vec![c; n], c, 200, 4);
    assert!(frac >= 0.9, "constant data: {frac}");
    // Uniform on [-1, 1] in shuffled order; a two-point law would leave the
    // whole gap between its atoms as minimizers.
    let mut sym: Vec<f64> = (0..n).map(|i| 2.0 * (i as f64 + 0.5) / n as f64 - 1.0).collect();
    let mut rng = Rng::new(12);
    for i in (1..n).rev() {
        sym.swap(i, (rng.uniform() * (i + 1) as f64) as usize);
    }
    let frac = median_hits(&sym, 0.0, 200, 5);
    assert!(frac >= 0.9, "symmetric data: {frac}");
    let sgd = MedianSgd::new(1.0, MedianInterval::Symmetric).unwrap();
    assert!(sgd.fit(&[], &lvl(1.0), &mut Rng::new(0)).is_err());
}

#[test]
fn median_sgd_beats_naive_on_salaries() {
    let base = ExperimentSpec {
        name: "salary".into(),
        estimator: EstimatorKind::Median,
        mechanism: MechanismKind::Optimal,
        eps: 1.0,
        n_grid: vec![100_000],
        d: 1,
        replicates: 100,
        generator: GeneratorSpec::Lognormal { mu: 10.0, sigma: 1.2 },
        seed: 6,
        options: EstimatorOptions::default(),
    };
    let sgd = run_experiment(&base).unwrap();
    let naive = run_experiment(&ExperimentSpec { mechanism: MechanismKind::LaplaceBaseline, ..base }).unwrap();
    let wins = sgd.iter().zip(&naive).filter(|(a, b)| a.value < b.value).count();
    assert!(wins as f64 >= 0.95 * sgd.len() as f64, "{wins}/{}", sgd.len());
}

#[test]
fn sparse_mean_threshold_extremes() {
    let data: Vec<Vec<f64>> = (0..500).map(|i| vec![0.5, if i % 3 == 0 { 0.2 } else { -0.1 }, 0.0, 0.0]).collect();
    let zbar = private_mean_vector(&data, Geometry::Linf, 1.0, &lvl(1.0), &mut Rng::new(7)).unwrap();
    assert_eq!(sparse_mean(&data, 1.0, &lvl(1.0), Some(0.0), &mut Rng::new(7)).unwrap(), zbar);
    let big = zbar.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let zero = sparse_mean(&data, 1.0, &lvl(1.0), Some(big), &mut Rng::new(7)).unwrap();
    assert!(zero.iter().all(|&v| v == 0.0));
    assert!(sparse_mean(&[vec![0.1]], 1.0, &lvl(1.0), None, &mut Rng::new(7)).is_err());
}

fn zero_signal_stream(n: usize, d: usize, scale: f64, seed: u64) -> Vec<(Vec<f64>, f64)> {
    let mut rng = Rng::new(seed);
    (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.fair_sign() * scale).collect();
            (x, rng.fair_sign())
        })
        .collect()
}

/// Zero-signal logistic SGD (labels independent of features) against the
/// asymptotic Polyak variance tr(H⁻¹ Σ H⁻¹)/n at θ = 0. With features on
/// the cube vertices scaled by s, H = (s²/4)·I; the channel at radius 2r
/// has Σ ≈ B²·I (ℓ∞) or (B²/d)·I (ℓ2).
#[test]
fn logistic_zero_signal_shrinks() {
    let (n, d, reps) = (100_000, 8, 10u64);
    let level = lvl(1.0);
    let df = d as f64;
    let b_inf = linf_bound(d, 2.0, &level).unwrap();
    let b_2 = l2_bound(d, 2.0, &level).unwrap();
    let cases = [
        (Geometry::Linf, 1.0, df * 16.0 * b_inf * b_inf),
        (Geometry::L2, 1.0 / df.sqrt(), df * (4.0 * df).powi(2) * b_2 * b_2 / df),
    ];
    for (geometry, s, numer) in cases {
        let msq = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let stream = zero_signal_stream(n, d, s, 100 + rep);
                let mut cfg = LogisticSgd::new(geometry, 1.0);
                cfg.projection_radius = Some(5.0);
                let theta = cfg.fit_private(&stream, &level, &mut Rng::derive(8, &[rep])).unwrap().theta;
                theta.iter().map(|v| v * v).sum::<f64>()
            })
            .sum::<f64>()
            / reps as f64;
        let predicted = numer / n as f64;
        eprintln!("{geometry:?}: E‖θ̂‖² = {msq:.4}, asymptotic {predicted:.4}");
        assert!(msq < 4.0 * predicted, "{geometry:?}: E‖θ̂‖² = {msq} vs asymptotic {predicted}");
    }
}

#[test]
fn logistic_projection_keeps_iterates_bounded() {
    let spec = GeneratorSpec::LogisticModel { theta: vec![3.0, -3.0, 2.0, 0.0], feature_scale: 1.0 };
    let Dataset::Labeled(stream) = generate(&spec, 20_000, &mut Rng::new(9)).unwrap() else { panic!() };
    let mut cfg = LogisticSgd::new(Geometry::Linf, 1.0);
    cfg.projection_radius = Some(5.0);
    let model = cfg.fit_private(&stream, &lvl(0.5), &mut Rng::new(10)).unwrap();
    let norm = model.theta.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(norm.is_finite() && norm <= 5.0 + 1e-9, "{norm}");
}

#[test]
fn density_coefficients_unbiased() {
    let (n, reps, k) = (200, 1000u64, 4);
    for (cos, target) in [(vec![], [0.0; 4]), (vec![0.5], [0.0, 0.5, 0.0, 0.0])] {
        let gen = GeneratorSpec::TrigDensity { cos: cos.clone(), sin: vec![] };
        let coeffs: Vec<Vec<f64>> = (0..reps)
            .into_par_iter()
            .map(|r| {
                let mut rng = Rng::derive(11, &[r]);
                let Dataset::Scalars(x) = generate(&gen, n, &mut rng).unwrap() else { panic!() };
                density_estimate_with_order(&x, k, 1.0, &lvl(1.0), &mut rng).unwrap().coeffs
            })
            .collect();
        for j in 0..k {
            let col: Vec<f64> = coeffs.iter().map(|c| c[j]).collect();
            let (m, se) = mean_se(&col);
            assert!((m - target[j]).abs() <= 5.0 * se, "cos={cos:?} coeff {j}: {m} ± {se}");
        }
    }
}
