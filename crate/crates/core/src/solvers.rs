//! Reference solvers: path following from the source, and exhaustive scan.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problems::ProblemInstance;

/// Default bound on candidate width for [`solve_exhaustive`].
pub const DEFAULT_EXHAUSTIVE_BOUND: usize = 16;

/// Follows the successor from the instance's source until a candidate
/// verifies. At most `2^n` steps.
pub fn solve_path(inst: &ProblemInstance) -> Result<BitString> {
    if !inst.well_formed() {
        return Err(Error::MalformedInstance(format!(
            "{} instance violates its guarantee",
            inst.kind()
        )));
    }
    let n = inst.n();
    let budget: u128 = 1u128 << n.min(100);
    let mut v = inst.start();
    let mut steps: u128 = 0;
    loop {
        if inst.verify_solution(&v)? {
            return Ok(v);
        }
        if steps >= budget {
            return Err(Error::MalformedInstance(format!(
                "no solution within {budget} successor steps"
            )));
        }
        v = inst.successor(&v)?;
        steps += 1;
    }
}

/// Lexicographically smallest verifying candidate.
pub fn solve_exhaustive(inst: &ProblemInstance) -> Result<BitString> {
    solve_exhaustive_bounded(inst, DEFAULT_EXHAUSTIVE_BOUND)
}

pub fn solve_exhaustive_bounded(inst: &ProblemInstance, bound: usize) -> Result<BitString> {
    let n = inst.n();
    if n > bound {
        return Err(Error::SearchBound { n, bound });
    }
    for v in BitString::all(n) {
        if inst.verify_solution(&v)? {
            return Ok(v);
        }
    }
    Err(Error::MalformedInstance(format!(
        "{} instance has no solution",
        inst.kind()
    )))
}

/// Every verifying candidate, in increasing order.
pub fn all_solutions(inst: &ProblemInstance) -> Result<Vec<BitString>> {
    let n = inst.n();
    if n > DEFAULT_EXHAUSTIVE_BOUND {
        return Err(Error::SearchBound {
            n,
            bound: DEFAULT_EXHAUSTIVE_BOUND,
        });
    }
    let mut out = Vec::new();
    for v in BitString::all(n) {
        if inst.verify_solution(&v)? {
            out.push(v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{EolInstance, IterInstance, SodInstance};
    use crate::synth::circuit_from_table;

    fn table(values: &[u64], n: usize) -> crate::circuit::Circuit {
        let outs: Vec<BitString> = values.iter().map(|&v| BitString::from_u64(v, n)).collect();
        circuit_from_table(n, &outs).unwrap()
    }

    #[test]
    fn iter_path_and_exhaustive() {
        let inst: ProblemInstance = IterInstance::new(table(&[1, 1, 2, 3], 2)).unwrap().into();
        assert_eq!(solve_path(&inst).unwrap().to_string(), "00");
        assert_eq!(solve_exhaustive(&inst).unwrap().to_string(), "00");
    }

    #[test]
    fn sod_path_stops_before_sink() {
        // 00 -> 01 -> 10 -> 10, V = S.
        let s = table(&[1, 2, 2, 3], 2);
        let inst: ProblemInstance = SodInstance::from_parts(&s, &s).unwrap().into();
        assert_eq!(solve_path(&inst).unwrap().to_string(), "01");
    }

    #[test]
    fn eol_path_reaches_sink() {
        for n in 1..=4 {
            let top = 1u64 << (n - 1);
            let s: Vec<u64> = (0..1u64 << n)
                .map(|v| if v == 0 { top } else { v })
                .collect();
            let p: Vec<u64> = (0..1u64 << n)
                .map(|v| if v == top { 0 } else { v })
                .collect();
            let inst: ProblemInstance =
                EolInstance::new(table(&s, n), table(&p, n)).unwrap().into();
            assert_eq!(solve_path(&inst).unwrap(), BitString::from_u64(top, n));
        }
    }

    #[test]
    fn exhaustive_prefers_smallest() {
        // Solutions of S = 00->01, 01->11, 10->11, 11->11 are 01 and 10.
        let inst: ProblemInstance = IterInstance::new(table(&[1, 3, 3, 3], 2)).unwrap().into();
        assert_eq!(all_solutions(&inst).unwrap().len(), 2);
        assert_eq!(solve_exhaustive(&inst).unwrap().to_string(), "01");
    }

    #[test]
    fn malformed_is_rejected() {
        let inst: ProblemInstance = IterInstance::new(table(&[0, 1, 2, 3], 2)).unwrap().into();
        assert!(matches!(
            solve_path(&inst),
            Err(Error::MalformedInstance(_))
        ));
        assert!(matches!(
            solve_exhaustive_bounded(&inst, 1),
            Err(Error::SearchBound { n: 2, bound: 1 })
        ));
    }
}
