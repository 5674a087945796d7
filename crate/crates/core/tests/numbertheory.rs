use proptest::prelude::*;

use tfnp_core::numbertheory::{
    all_factors, all_factors_via_factor, factor, factor_via_all_factors, FactorAnswer, OracleTrace,
};
use tfnp_core::Error;

/// Nontrivial divisors of every `N <= limit`, by marking multiples.
fn divisor_table(limit: usize) -> Vec<Vec<u64>> {
    let mut t = vec![Vec::new(); limit + 1];
    for d in 2..=limit / 2 {
        for k in (2 * d..=limit).step_by(d) {
            t[k].push(d as u64);
        }
    }
    t
}

fn honest_list(divs: &[u64]) -> FactorAnswer {
    if divs.is_empty() {
        FactorAnswer::Prime
    } else {
        FactorAnswer::FactorList(divs.to_vec())
    }
}

fn honest_factor(divs: &[u64]) -> FactorAnswer {
    divs.first()
        .map_or(FactorAnswer::Prime, |&d| FactorAnswer::Factor(d))
}

#[test]
fn direct_answers_match_enumeration() {
    let limit = 20_000;
    let table = divisor_table(limit);
    for (n, divs) in table.iter().enumerate().skip(2) {
        assert_eq!(factor(n as u64).unwrap(), honest_factor(divs), "N={n}");
        assert_eq!(all_factors(n as u64).unwrap(), honest_list(divs), "N={n}");
    }
}

#[test]
fn both_reductions_query_only_smaller_numbers() {
    let limit = 10_000;
    let table = divisor_table(limit);
    for n in 2..=limit as u64 {
        let mut trace = OracleTrace::default();
        let got = all_factors_via_factor(n, &mut |m| factor(m), &mut trace).unwrap();
        assert_eq!(got, honest_list(&table[n as usize]), "N={n}");
        assert!(trace.queries.iter().all(|&q| q < n && n % q == 0), "N={n}");

        let mut trace = OracleTrace::default();
        let got = factor_via_all_factors(n, &mut |m| all_factors(m), &mut trace).unwrap();
        assert_eq!(got, honest_factor(&table[n as usize]), "N={n}");
        assert!(trace.queries.len() <= 1);
        assert!(trace.queries.iter().all(|&q| q < n));
        if got == FactorAnswer::Prime {
            assert!(trace.queries.is_empty());
        }
    }
}

#[test]
fn any_valid_factor_answer_suffices() {
    // An oracle that returns the largest nontrivial factor instead of the smallest.
    let mut largest = |m: u64| -> tfnp_core::Result<FactorAnswer> {
        Ok(match all_factors(m)? {
            FactorAnswer::FactorList(v) => FactorAnswer::Factor(*v.last().unwrap()),
            other => other,
        })
    };
    let table = divisor_table(3000);
    for n in 2..=3000u64 {
        let mut trace = OracleTrace::default();
        let got = all_factors_via_factor(n, &mut largest, &mut trace).unwrap();
        assert_eq!(got, honest_list(&table[n as usize]));
    }
}

#[test]
fn dishonest_oracles_are_refused() {
    let mut trace = OracleTrace::default();
    let err = factor_via_all_factors(
        12,
        &mut |_| Ok(FactorAnswer::FactorList(vec![5])),
        &mut trace,
    );
    assert!(matches!(err, Err(Error::OracleContract(_))));
    let err = all_factors_via_factor(12, &mut |_| Ok(FactorAnswer::Factor(1)), &mut trace);
    assert!(matches!(err, Err(Error::OracleContract(_))));
}

#[test]
fn examples() {
    assert_eq!(factor(91).unwrap(), FactorAnswer::Factor(7));
    assert_eq!(factor(97).unwrap(), FactorAnswer::Prime);
    assert_eq!(
        all_factors(12).unwrap(),
        FactorAnswer::FactorList(vec![2, 3, 4, 6])
    );
    assert!(matches!(factor(0), Err(Error::Domain(_))));
    assert!(matches!(all_factors(1), Err(Error::Domain(_))));
}

proptest! {
    #[test]
    fn large_inputs_round_trip(a in 2u64..50_000, b in 2u64..50_000) {
        let n = a * b;
        let FactorAnswer::FactorList(list) = all_factors(n).unwrap() else {
            panic!("{n} is composite");
        };
        prop_assert!(list.contains(&a) && list.contains(&b));
        prop_assert!(list.windows(2).all(|w| w[0] < w[1]));
        let mut trace = OracleTrace::default();
        let via = all_factors_via_factor(n, &mut |m| factor(m), &mut trace).unwrap();
        prop_assert_eq!(via, FactorAnswer::FactorList(list.clone()));
        let mut trace = OracleTrace::default();
        prop_assert_eq!(
            factor_via_all_factors(n, &mut |m| all_factors(m), &mut trace).unwrap(),
            FactorAnswer::Factor(list[0])
        );
    }
}
