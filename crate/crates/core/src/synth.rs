//! Truth-table synthesis and seeded random generators for circuits and
//! well-formed instances.

use rand::Rng;

use crate::bits::BitString;
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::gadgets::{CircuitBuilder, Wire};
use crate::problems::{
    EolInstance, IterInstance, IterWithSourceInstance, ProblemInstance, ProblemKind, SodInstance,
    SodWithSourceInstance,
};

/// Largest input width accepted by table synthesis.
pub const MAX_TABLE_BITS: usize = 12;

/// Builds a circuit whose value on input `v` (as an integer) is `table[v]`,
/// using a multiplexer tree per output bit with shared subtrees.
pub fn circuit_from_table(n: usize, table: &[BitString]) -> Result<Circuit> {
    if n > MAX_TABLE_BITS {
        return Err(Error::Domain(format!(
            "table synthesis limited to {MAX_TABLE_BITS} inputs"
        )));
    }
    if table.len() != 1 << n {
        return Err(Error::Domain(format!(
            "table has {} rows, expected {}",
            table.len(),
            1usize << n
        )));
    }
    let m = table.first().map_or(0, BitString::len);
    if table.iter().any(|r| r.len() != m) {
        return Err(Error::Domain("ragged truth table".into()));
    }
    let mut b = CircuitBuilder::new(n);
    let x = b.inputs();
    let outs = (0..m)
        .map(|bit| shannon(&mut b, &x, table, bit, 0, 0))
        .collect();
    b.build(outs)
}

fn shannon(
    b: &mut CircuitBuilder,
    x: &[Wire],
    table: &[BitString],
    bit: usize,
    var: usize,
    prefix: usize,
) -> Wire {
    if var == x.len() {
        return b.constant(table[prefix].get(bit));
    }
    let lo = shannon(b, x, table, bit, var + 1, prefix << 1);
    let hi = shannon(b, x, table, bit, var + 1, (prefix << 1) | 1);
    b.mux(x[var], hi, lo)
}

/// Truth table of a circuit, indexed by input value.
pub fn truth_table(c: &Circuit) -> Vec<BitString> {
    BitString::all(c.n())
        .map(|x| c.evaluate(&x).expect("arity matches"))
        .collect()
}

pub fn random_table<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<BitString> {
    (0..1usize << n)
        .map(|_| (0..m).map(|_| rng.gen::<bool>()).collect::<Vec<_>>().into())
        .collect()
}

/// A random circuit with `logic` NOT/AND/OR gates over `n` inputs, with the
/// occasional constant.
pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, m: usize, logic: usize) -> Circuit {
    let mut gates: Vec<Gate> = (0..n).map(Gate::Input).collect();
    if n == 0 || rng.gen_bool(0.1) {
        gates.push(Gate::Const(rng.gen()));
    }
    for _ in 0..logic {
        let len = gates.len();
        let a = rng.gen_range(0..len);
        let c = rng.gen_range(0..len);
        gates.push(match rng.gen_range(0..5) {
            0 => Gate::Not(a),
            1 | 2 => Gate::And(a, c),
            _ => Gate::Or(a, c),
        });
    }
    let len = gates.len();
    // Favour late gates so outputs have deep cones.
    let outputs = (0..m)
        .map(|_| {
            let lo = len.saturating_sub(logic.max(1));
            rng.gen_range(lo..len)
        })
        .collect();
    Circuit::new(n, gates, outputs).expect("generated in topological order")
}

fn tables_until<R: Rng>(
    rng: &mut R,
    mut make: impl FnMut(&mut R) -> Result<ProblemInstance>,
) -> Result<ProblemInstance> {
    for _ in 0..10_000 {
        let inst = make(rng)?;
        if inst.well_formed() {
            return Ok(inst);
        }
    }
    Err(Error::Domain(
        "rejection sampling did not find a well-formed instance".into(),
    ))
}

/// A random well-formed instance of `kind`. `m` is the valuation width for
/// Sink-of-DAG kinds and ignored otherwise.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    kind: ProblemKind,
    n: usize,
    m: usize,
) -> Result<ProblemInstance> {
    if n == 0 || n > MAX_TABLE_BITS {
        return Err(Error::Domain(format!("n must be in 1..={MAX_TABLE_BITS}")));
    }
    match kind {
        ProblemKind::Iter => tables_until(rng, |r| {
            Ok(IterInstance::new(circuit_from_table(n, &random_table(r, n, n))?)?.into())
        }),
        ProblemKind::IterWithSource => tables_until(rng, |r| {
            let t = random_table(r, n, n);
            let s = BitString::from_u64(r.gen_range(0..1u64 << n), n);
            Ok(IterWithSourceInstance::new(circuit_from_table(n, &t)?, s)?.into())
        }),
        ProblemKind::Sod => tables_until(rng, |r| {
            Ok(
                SodInstance::from_combined(circuit_from_table(n, &random_table(r, n, n + m))?)?
                    .into(),
            )
        }),
        ProblemKind::SodWithSource => tables_until(rng, |r| {
            let dag =
                SodInstance::from_combined(circuit_from_table(n, &random_table(r, n, n + m))?)?;
            let s = BitString::from_u64(r.gen_range(0..1u64 << n), n);
            Ok(SodWithSourceInstance::new(dag, s)?.into())
        }),
        ProblemKind::Eol => tables_until(rng, |r| {
            // Random partial matching so that paths exist.
            let mut succ: Vec<u64> = (0..1u64 << n).collect();
            let mut pred = succ.clone();
            for v in 0..1u64 << n {
                if r.gen_bool(0.5) {
                    let w = r.gen_range(0..1u64 << n);
                    if w != v && w != 0 && succ[v as usize] == v && pred[w as usize] == w {
                        succ[v as usize] = w;
                        pred[w as usize] = v;
                    }
                }
            }
            if succ[0] == 0 {
                let w = r.gen_range(1..1u64 << n);
                if pred[w as usize] == w {
                    succ[0] = w;
                    pred[w as usize] = 0;
                }
            }
            let to_table = |t: &[u64]| {
                t.iter()
                    .map(|&v| BitString::from_u64(v, n))
                    .collect::<Vec<_>>()
            };
            Ok(EolInstance::new(
                circuit_from_table(n, &to_table(&succ))?,
                circuit_from_table(n, &to_table(&pred))?,
            )?
            .into())
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn table_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=5 {
            let t = random_table(&mut rng, n, 3);
            let c = circuit_from_table(n, &t).unwrap();
            assert_eq!(truth_table(&c), t);
        }
    }

    #[test]
    fn random_instances_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in ProblemKind::ALL {
            for n in 1..=4 {
                let inst = random_instance(&mut rng, kind, n, 2).unwrap();
                assert!(inst.well_formed(), "{kind} n={n}");
            }
        }
    }
}
