use super::*;
use crate::model::lookup;

fn cfg(limit: u64, seed: u64) -> OptimizerConfig {
    OptimizerConfig::default().with_stopping(Stopping::nse(limit)).with_seed(seed)
}

#[test]
fn wrap_boundaries() {
    assert_eq!(wrap_angle(-PI), PI);
    assert_eq!(wrap_angle(PI), PI);
    assert!((wrap_angle(3.5) - (3.5 - 2.0 * PI)).abs() < 1e-15);
    assert!((wrap_angle(-3.5) - (-3.5 + 2.0 * PI)).abs() < 1e-15);
    assert_eq!(wrap_angle(0.25), 0.25);
}

#[test]
fn jde_keeps_ranges() {
    let mut rng = Rng64::seed_from_u64(1);
    let ind = Individual { x: vec![], f: 0.5, cr: 0.9, e: 0.0 };
    let (mut f_changed, mut cr_changed) = (0, 0);
    for _ in 0..10_000 {
        let (f, cr) = jde_sample(&ind, &mut rng);
        assert!((0.1..=1.0).contains(&f));
        assert!((0.0..1.0).contains(&cr) || cr == 0.9);
        f_changed += (f != 0.5) as u32;
        cr_changed += (cr != 0.9) as u32;
    }
    assert!((800..1200).contains(&f_changed), "{f_changed}");
    assert!((800..1200).contains(&cr_changed), "{cr_changed}");
}

#[test]
fn trial_differs_from_target_somewhere() {
    let seq = lookup("1BXP").unwrap();
    let mut opt = Optimizer::new(&seq, cfg(1000, 3)).unwrap();
    let mut trial = Vec::new();
    for i in 0..opt.population().len() {
        opt.mutate_crossover(i, 0.5, 0.0, &mut trial);
        let xi = &opt.population()[i].x;
        let diff = trial.iter().zip(xi).filter(|(a, b)| a != b).count();
        assert!(diff >= 1);
        assert!(trial.iter().all(|u| *u > -PI && *u <= PI));
    }
}

#[test]
fn same_seed_same_run() {
    let seq = lookup("F13").unwrap();
    let a = run(&seq, &cfg(20_000, 7)).unwrap();
    let b = run(&seq, &cfg(20_000, 7)).unwrap();
    assert_eq!(a.best_raw, b.best_raw);
    assert_eq!(a.best, b.best);
    assert_eq!(a.nse, b.nse);
}

#[test]
fn respects_nse_limit_and_reports_consistent_energy() {
    let seq = lookup("1BXP").unwrap();
    let out = run(&seq, &cfg(5_000, 11)).unwrap();
    assert_eq!(out.nse, 5_000);
    assert_eq!(out.stop, StopReason::NseLimit);
    let e = crate::model::energy(&seq, &out.best).unwrap();
    assert!((e - out.best_raw).abs() < 1e-9);
    assert_eq!(out.best_reported, -out.best_raw);
    assert!(out.best_reported > 0.0);
}

#[test]
fn target_stops_early() {
    let seq = lookup("1BXP").unwrap();
    let conf = cfg(2_000_000, 5).with_stopping(Stopping::nse(2_000_000).with_target(2.0));
    let out = run(&seq, &conf).unwrap();
    assert_eq!(out.stop, StopReason::Target);
    assert_eq!(out.hit, Some(true));
    assert!(out.nse < 2_000_000);
}

#[test]
fn best_population_chain_tracks_its_angles() {
    let seq = lookup("1CB3").unwrap();
    let mut opt = Optimizer::new(&seq, cfg(30_000, 2)).unwrap();
    let mut model = EnergyModel::new(&seq);
    while opt.step_generation() {
        let bp = opt.best_population();
        let chain = opt.best_chain();
        assert_eq!(bp.x.as_slice(), chain.angles());
        let scratch = model.evaluate(&bp.x);
        assert!((scratch - bp.e).abs() < 1e-8 * scratch.abs().max(1.0), "{scratch} {}", bp.e);
        assert!(opt.global_best().1 <= bp.e);
    }
}

#[test]
fn restarts_fire_under_stagnation() {
    let seq = lookup("1BXP").unwrap();
    let conf = OptimizerConfig { pb: Some(1), lb: Some(1), ..cfg(200_000, 9) };
    let out = Optimizer::new(&seq, conf).unwrap().run();
    assert!(out.restarts.component > 0);

    let conf = OptimizerConfig { pb: Some(1), ablation: Ablation::without_component_reinit(), ..cfg(100_000, 9) };
    let out = Optimizer::new(&seq, conf).unwrap().run();
    assert_eq!(out.restarts.component, 0);
    assert!(out.restarts.random > 0);
}

#[test]
fn trace_is_monotone() {
    let seq = lookup("F13").unwrap();
    let conf = OptimizerConfig { trace: true, ..cfg(10_000, 4) };
    let out = run(&seq, &conf).unwrap();
    assert!(!out.trace.is_empty());
    for w in out.trace.windows(2) {
        assert!(w[1].nse > w[0].nse);
        assert!(w[1].best > w[0].best);
    }
    assert_eq!(out.trace.last().unwrap().best, out.best_reported);
}

#[test]
fn stalled_local_best_triggers_random_restart() {
    let seq = lookup("1BXP").unwrap();
    let mut opt = Optimizer::new(&seq, cfg(1_000_000, 1)).unwrap();
    let p = opt.restart_params();
    let d = seq.dimension() as u64;
    opt.nse = p.pb * d + 100;
    opt.best_improved_at = 0;
    opt.local_best.e = f64::NEG_INFINITY;

    opt.local_stall = p.lb * d - 2;
    opt.reinitialize();
    assert_eq!(opt.restarts, RestartCounts { component: 1, random: 0 });
    assert_eq!(opt.local_stall, p.lb * d - 1);
    // Every member is the local best with exactly c components redrawn.
    for ind in opt.population() {
        let same = ind.x.iter().zip(&opt.local_best.x).filter(|(a, b)| a == b).count();
        assert_eq!(same, seq.dimension() - p.c);
    }

    opt.nse += p.pb * d;
    opt.reinitialize();
    assert_eq!(opt.restarts, RestartCounts { component: 1, random: 1 });
    assert_eq!(opt.local_stall, 0);
    assert_eq!(opt.local_best.e, opt.best_population().e);
}

#[test]
fn no_restart_before_stagnation_threshold() {
    let seq = lookup("1BXP").unwrap();
    let mut opt = Optimizer::new(&seq, cfg(1_000_000, 1)).unwrap();
    let before = opt.nse();
    opt.reinitialize();
    assert_eq!(opt.restarts, RestartCounts::default());
    assert_eq!(opt.nse(), before);
}
