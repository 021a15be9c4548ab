mod common;

use abfold::analysis::{mirror, SolutionArchive};
use abfold::model::{best_known, builtin_sequences, compute_positions, energy, lookup, reported_energy};
use abfold::{Conformation, Error, Sequence};
use proptest::prelude::*;

#[test]
fn published_solutions_reevaluate() {
    let archive = SolutionArchive::published();
    for e in &archive.entries {
        let seq = lookup(&e.label).unwrap();
        let ours = reported_energy(energy(&seq, &e.conformation).unwrap());
        let oracle = -common::energy(&seq.to_string(), e.conformation.angles());
        assert!((ours - oracle).abs() < 1e-9 * oracle.abs().max(1.0), "{}", e.label);
        let tol = if seq.len() <= 25 { 1e-2 } else { 1e-1 };
        assert!((ours - best_known(&e.label).unwrap()).abs() < tol, "{} {ours}", e.label);
    }
}

#[test]
fn tiny_chains_by_hand() {
    let aaa = Sequence::parse("", "AAA").unwrap();
    assert_eq!(energy(&aaa, &Conformation::zeros(3).unwrap()).unwrap(), -0.4375);
    let abb = Sequence::parse("", "ABB").unwrap();
    assert_eq!(energy(&abb, &Conformation::zeros(3).unwrap()).unwrap(), 0.3125);
}

#[test]
fn dimension_mismatch() {
    let seq = lookup("1BXP").unwrap();
    let conf = Conformation::zeros(12).unwrap();
    assert!(matches!(energy(&seq, &conf), Err(Error::Dimension { expected: 21, actual: 19 })));
}

#[test]
fn every_builtin_has_a_best_known_energy() {
    for (label, seq) in builtin_sequences() {
        assert!(best_known(&label).is_some());
        assert_eq!(seq.dimension(), 2 * seq.len() - 5);
    }
}

fn residues(max: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('A'), Just('B')], 3..max).prop_map(|v| v.into_iter().collect())
}

fn seq_and_angles() -> impl Strategy<Value = (String, Vec<f64>)> {
    residues(30).prop_flat_map(|r| {
        let d = 2 * r.len() - 5;
        (Just(r), proptest::collection::vec(-std::f64::consts::PI..std::f64::consts::PI, d))
    })
}

proptest! {
    #[test]
    fn bonds_have_unit_length((r, angles) in seq_and_angles()) {
        let conf = Conformation::new(r.len(), angles).unwrap();
        let pos = compute_positions(&conf);
        for w in pos.windows(2) {
            prop_assert!(((w[1] - w[0]).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_reference_energy((r, angles) in seq_and_angles()) {
        let seq = Sequence::parse("", &r).unwrap();
        let conf = Conformation::new(r.len(), angles.clone()).unwrap();
        let ours = energy(&seq, &conf).unwrap();
        let oracle = common::energy(&r, &angles);
        prop_assume!(oracle.is_finite() && oracle.abs() < 1e12);
        prop_assert!((ours - oracle).abs() <= 1e-9 * oracle.abs().max(1.0));
    }

    #[test]
    fn mirror_preserves_energy((r, angles) in seq_and_angles()) {
        let seq = Sequence::parse("", &r).unwrap();
        let conf = Conformation::new(r.len(), angles).unwrap();
        let m = mirror(&conf);
        prop_assert_eq!(&mirror(&m), &conf);
        let (a, b) = (energy(&seq, &conf).unwrap(), energy(&seq, &m).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }
}
