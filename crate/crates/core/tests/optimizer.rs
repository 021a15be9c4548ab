use abfold::harness::{run_experiment, summarize};
use abfold::model::{energy, lookup};
use abfold::optimizer::{run, Ablation, OptimizerConfig, Stopping};
use proptest::prelude::*;

fn cfg(limit: u64, seed: u64) -> OptimizerConfig {
    OptimizerConfig::default().with_stopping(Stopping::nse(limit)).with_seed(seed)
}

#[test]
fn ablations_run_and_stay_consistent() {
    let seq = lookup("1BXP").unwrap();
    for ablation in [
        Ablation::default(),
        Ablation::without_local_search(),
        Ablation::without_component_reinit(),
        Ablation { temporal_locality: false, ..Ablation::default() },
    ] {
        let out = run(&seq, &OptimizerConfig { ablation, ..cfg(50_000, 3) }).unwrap();
        assert_eq!(out.nse, 50_000);
        assert!((energy(&seq, &out.best).unwrap() - out.best_raw).abs() < 1e-9);
    }
}

#[test]
fn short_budget_finds_a_decent_fold() {
    let seq = lookup("1BXP").unwrap();
    let (_, s) = run_experiment(&seq, &cfg(300_000, 8), 3, 1, None).unwrap();
    assert!(s.e_best > 4.0, "{}", s.e_best);
}

#[test]
fn summary_of_target_runs() {
    let seq = lookup("F13").unwrap();
    let config = cfg(200_000, 1).with_stopping(Stopping::nse(200_000).with_target(3.0));
    let (records, s) = run_experiment(&seq, &config, 3, 2, None).unwrap();
    assert_eq!(summarize(&records, Some(3.0)).unwrap().hits, s.hits);
    for r in &records {
        assert_eq!(r.hit, Some(r.e >= 3.0 - 5e-5));
        if r.hit == Some(true) {
            assert!(r.nse < 200_000);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn budget_is_never_exceeded(seed in 0u64..1000, limit in 20u64..5000) {
        let seq = lookup("F13").unwrap();
        let out = run(&seq, &cfg(limit, seed)).unwrap();
        prop_assert_eq!(out.nse, limit.max(20));
        prop_assert!(out.best.angles().iter().all(|a| a.abs() <= std::f64::consts::PI));
    }
}
