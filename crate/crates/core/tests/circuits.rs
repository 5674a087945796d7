use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tfnp_core::netlist::{emit_netlist, parse_netlist};
use tfnp_core::synth::random_circuit;
use tfnp_core::{BitString, Circuit, Error};

fn circuit(seed: u64, n: usize, m: usize, logic: usize) -> Circuit {
    random_circuit(&mut ChaCha8Rng::seed_from_u64(seed), n, m, logic)
}

fn arb_circuit() -> impl Strategy<Value = Circuit> {
    (any::<u64>(), 1usize..=8, 1usize..=4, 0usize..=40).prop_map(|(s, n, m, l)| circuit(s, n, m, l))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn input_restriction_matches_splice(c in arb_circuit(), pick in any::<usize>(), b in any::<bool>()) {
        prop_assume!(c.n() >= 2);
        let i = pick % c.n();
        let r = c.restrict_input(i, b).unwrap();
        prop_assert_eq!(r.n(), c.n() - 1);
        prop_assert!(r.size() < c.size());
        for x in BitString::all(c.n() - 1) {
            prop_assert_eq!(r.evaluate(&x).unwrap(), c.evaluate(&x.splice(i, b)).unwrap());
        }
    }

    #[test]
    fn output_restriction_matches_projection(c in arb_circuit(), pick in any::<usize>()) {
        prop_assume!(c.m() >= 2);
        let j = pick % c.m();
        let r = c.restrict_output(j).unwrap();
        prop_assert_eq!(r.m(), c.m() - 1);
        prop_assert!(r.size() < c.size());
        for x in BitString::all(c.n()) {
            prop_assert_eq!(r.evaluate(&x).unwrap(), c.evaluate(&x).unwrap().remove(j));
        }
    }

    #[test]
    fn layers_increase_along_wires(c in arb_circuit()) {
        let layers = c.layers();
        for (g, gate) in c.gates().iter().enumerate() {
            for a in gate.operands() {
                prop_assert!(layers[g] > layers[a]);
            }
        }
    }

    #[test]
    fn netlist_round_trip(c in arb_circuit()) {
        let back = parse_netlist(&emit_netlist(&c, "c")).unwrap();
        prop_assert_eq!(back, c);
    }
}

#[test]
fn every_restriction_of_small_circuits() {
    for seed in 0..50 {
        let c = circuit(seed, 3, 3, 12);
        for i in 0..3 {
            for b in [false, true] {
                let r = c.restrict_input(i, b).unwrap();
                for x in BitString::all(2) {
                    assert_eq!(
                        r.evaluate(&x).unwrap(),
                        c.evaluate(&x.splice(i, b)).unwrap()
                    );
                }
            }
        }
        for j in 0..3 {
            let r = c.restrict_output(j).unwrap();
            for x in BitString::all(3) {
                assert_eq!(r.evaluate(&x).unwrap(), c.evaluate(&x).unwrap().remove(j));
            }
        }
    }
}

#[test]
fn out_of_range_and_last_output() {
    let c = circuit(1, 2, 1, 4);
    assert!(matches!(
        c.restrict_input(2, true),
        Err(Error::IndexOutOfRange { .. })
    ));
    assert!(matches!(c.restrict_output(0), Err(Error::LastOutput)));
    assert!(matches!(
        c.evaluate(&BitString::zeros(3)),
        Err(Error::Arity { .. })
    ));
}
