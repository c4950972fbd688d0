use std::collections::BTreeMap;

use ldp_core::experiment::{
    nearest_rank, preset, read_csv, run_experiment, summarize, write_csv, ExperimentSpec, MechanismKind,
    RunRecord, PRESET_NAMES,
};

fn record(mechanism: &str, n: usize, replicate: usize, value: f64) -> RunRecord {
    RunRecord {
        experiment: "e".into(),
        mechanism: mechanism.into(),
        n,
        eps: 1.0,
        replicate,
        metric_name: "sq_error".into(),
        value,
        wall_ms: 0.0,
    }
}

#[test]
fn nonprivate_is_lowest_in_every_preset() {
    for name in PRESET_NAMES {
        let p = preset(name, false, 1).unwrap();
        let mut means: BTreeMap<(String, usize), BTreeMap<MechanismKind, f64>> = BTreeMap::new();
        for spec in p.specs {
            let spec = ExperimentSpec { replicates: spec.replicates.min(20), ..spec };
            let recs = run_experiment(&spec).unwrap();
            for n in &spec.n_grid {
                let vals: Vec<f64> = recs.iter().filter(|r| r.n == *n).map(|r| r.value).collect();
                let m = vals.iter().sum::<f64>() / vals.len() as f64;
                let group = spec.name.clone();
                means.entry((group, *n)).or_default().insert(spec.mechanism, m);
            }
        }
        for ((group, n), by_mech) in means {
            let np = by_mech[&MechanismKind::Nonprivate];
            for (m, v) in &by_mech {
                assert!(np <= *v, "{name}/{group} n={n}: nonprivate {np} > {m} {v}");
            }
        }
    }
}

#[test]
fn records_sorted_and_wall_ms_zero() {
    let p = preset("mean-rates", false, 3).unwrap();
    let spec = ExperimentSpec { replicates: 3, n_grid: vec![1024, 2048, 4096], ..p.specs[0].clone() };
    let recs = run_experiment(&spec).unwrap();
    assert_eq!(recs.len(), 9);
    let keys: Vec<(usize, usize)> = recs.iter().map(|r| (r.replicate, r.n)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(recs.iter().all(|r| r.wall_ms == 0.0));
}

#[test]
fn million_row_csv() {
    let recs: Vec<RunRecord> = (0..1_000_000).map(|i| record("optimal", 100, i, i as f64 * 1e-3)).collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.csv");
    let mut buf = Vec::new();
    write_csv(&recs, &mut buf).unwrap();
    assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), 1_000_001);
    std::fs::write(&path, &buf).unwrap();
    let back = read_csv(&path).unwrap();
    assert_eq!(back.len(), 1_000_000);
    assert_eq!(back[999_999], recs[999_999]);
}

#[test]
fn summary_of_constant_cell() {
    let recs: Vec<RunRecord> = (0..10).map(|i| record("optimal", 50, i, 0.25)).collect();
    let rows = summarize(&recs);
    assert_eq!(rows.len(), 1);
    let s = &rows[0];
    assert_eq!((s.count, s.mean, s.p5, s.p95), (10, 0.25, 0.25, 0.25));
}

#[test]
fn summary_groups_and_percentiles() {
    let mut recs: Vec<RunRecord> = (0..20).map(|i| record("optimal", 10, i, (i + 1) as f64)).collect();
    recs.extend((0..4).map(|i| record("nonprivate", 10, i, 1.0)));
    let rows = summarize(&recs);
    assert_eq!(rows.len(), 2);
    let opt = rows.iter().find(|r| r.mechanism == "optimal").unwrap();
    assert_eq!(opt.count, 20);
    assert!((opt.mean - 10.5).abs() < 1e-12);
    // Nearest rank: ⌈0.05·20⌉ = 1st and ⌈0.95·20⌉ = 19th smallest.
    assert_eq!((opt.p5, opt.p95), (1.0, 19.0));
    let v: Vec<f64> = (1..=100).map(f64::from).collect();
    assert_eq!(nearest_rank(&v, 50), 50.0);
    assert_eq!(nearest_rank(&v, 100), 100.0);
}
