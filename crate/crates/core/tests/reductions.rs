use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tfnp_core::problems::{
    IterInstance, IterWithSourceInstance, SodInstance, SodWithSourceInstance,
};
use tfnp_core::reductions::{add_source, drop_source, iter_to_sod, sod_to_iter, ReductionResult};
use tfnp_core::solvers::all_solutions;
use tfnp_core::synth::{circuit_from_table, random_table};
use tfnp_core::{BitString, ProblemInstance};

/// Every target solution pulls back to a source solution.
fn check(r: &ReductionResult) -> usize {
    assert!(r.target.well_formed(), "{:?}", r.target.kind());
    let sols = all_solutions(&r.target).unwrap();
    assert!(!sols.is_empty());
    for w in &sols {
        let v = r.pull_back(w).unwrap();
        assert!(r.source.verify_solution(&v).unwrap());
    }
    sols.len()
}

fn table_of(code: u64, n: usize, width: usize) -> Vec<BitString> {
    (0..1u64 << n)
        .map(|x| BitString::from_u64(code >> (x as usize * width), width))
        .collect()
}

/// Runs every applicable reduction from the ITER and Sink-of-DAG variants
/// built on successor table `succ`.
fn all_reductions(succ: &[BitString], vals: &[Vec<BitString>], n: usize) -> usize {
    let c = circuit_from_table(n, succ).unwrap();
    let mut checked = 0;
    if let Ok(i) = IterInstance::new(c.clone()) {
        let inst: ProblemInstance = i.clone().into();
        if inst.well_formed() {
            check(&iter_to_sod(&i).unwrap());
            check(&add_source(&inst).unwrap());
            checked += 2;
        }
    }
    for s in BitString::all(n) {
        let inst: ProblemInstance = IterWithSourceInstance::new(c.clone(), s).unwrap().into();
        if inst.well_formed() {
            check(&drop_source(&inst).unwrap());
            checked += 1;
        }
    }
    for v in vals {
        let combined: Vec<BitString> = succ.iter().zip(v).map(|(s, v)| s.concat(v)).collect();
        let dag = SodInstance::from_combined(circuit_from_table(n, &combined).unwrap()).unwrap();
        let inst: ProblemInstance = dag.clone().into();
        if inst.well_formed() {
            check(&sod_to_iter(&dag).unwrap());
            check(&add_source(&inst).unwrap());
            checked += 2;
        }
        for s in BitString::all(n) {
            let inst: ProblemInstance = SodWithSourceInstance::new(dag.clone(), s).unwrap().into();
            if inst.well_formed() {
                check(&drop_source(&inst).unwrap());
                checked += 1;
            }
        }
    }
    checked
}

#[test]
fn every_successor_on_two_bits() {
    // Valuations: identity, constant, and two scrambled 2-bit tables.
    let vals: Vec<Vec<BitString>> = [
        0b11_10_01_00u64,
        0b01_01_01_01,
        0b00_11_01_10,
        0b10_00_11_01,
    ]
    .iter()
    .map(|&code| table_of(code, 2, 2))
    .collect();
    let mut checked = 0;
    for code in 0..256u64 {
        checked += all_reductions(&table_of(code, 2, 2), &vals, 2);
    }
    assert!(checked > 1000, "{checked}");
}

#[test]
fn random_successors_on_three_bits() {
    let mut rng = ChaCha8Rng::seed_from_u64(28);
    let mut checked = 0;
    for _ in 0..1000 {
        let succ = random_table(&mut rng, 3, 3);
        let m = rng.gen_range(1..=3);
        let vals = vec![random_table(&mut rng, 3, m)];
        checked += all_reductions(&succ, &vals, 3);
    }
    assert!(checked > 1000, "{checked}");
}

#[test]
fn iter_to_sod_keeps_the_solution_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let Ok(i) =
            IterInstance::new(circuit_from_table(3, &random_table(&mut rng, 3, 3)).unwrap())
        else {
            continue;
        };
        if !ProblemInstance::from(i.clone()).well_formed() {
            continue;
        }
        let r = iter_to_sod(&i).unwrap();
        assert_eq!(
            all_solutions(&r.source).unwrap(),
            all_solutions(&r.target).unwrap()
        );
    }
}

#[test]
fn pullback_rejects_non_solutions() {
    let succ = table_of(0b11_11_10_01, 2, 2);
    let i = IterInstance::new(circuit_from_table(2, &succ).unwrap()).unwrap();
    let r = iter_to_sod(&i).unwrap();
    let bad = BitString::all(2)
        .find(|w| !r.target.verify_solution(w).unwrap())
        .unwrap();
    assert!(r.pull_back(&bad).is_err());
}
