//! Inter-reductions among ITER and Sink-of-DAG, with and without source.
//!
//! Each reduction returns the target instance together with a [`Pullback`]
//! that maps target solutions back to source solutions.

use crate::bits::BitString;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gadgets::{redirect_output_at_zero, CircuitBuilder};
use crate::problems::{
    IterInstance, IterWithSourceInstance, ProblemInstance, SodInstance, SodWithSourceInstance,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pullback {
    Identity,
    /// Target candidates are `y || x` with `x` the trailing `n` bits; the
    /// answer is `x` or `S(x)`, whichever verifies.
    ValuationPair {
        n: usize,
    },
    /// The source has a solution known at reduction time.
    Constant(BitString),
}

#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub source: ProblemInstance,
    pub target: ProblemInstance,
    pub pullback: Pullback,
}

impl ReductionResult {
    /// Maps a target solution to a source solution, checking both ends.
    pub fn pull_back(&self, w: &BitString) -> Result<BitString> {
        if !self.target.verify_solution(w)? {
            return Err(Error::Contract(format!(
                "{w} is not a solution of the {} target",
                self.target.kind()
            )));
        }
        let v = match &self.pullback {
            Pullback::Identity => w.clone(),
            Pullback::Constant(v) => v.clone(),
            Pullback::ValuationPair { n } => {
                let x = w.slice(w.len() - n..w.len());
                if self.source.verify_solution(&x)? {
                    x
                } else {
                    self.source.successor(&x)?
                }
            }
        };
        if !self.source.verify_solution(&v)? {
            return Err(Error::Contract(format!(
                "pullback of {w} gave {v}, which does not solve the source"
            )));
        }
        Ok(v)
    }
}

fn require_well_formed(inst: &ProblemInstance) -> Result<()> {
    if inst.well_formed() {
        Ok(())
    } else {
        Err(Error::MalformedInstance(format!(
            "{} instance violates its guarantee",
            inst.kind()
        )))
    }
}

/// ITER to Sink-of-DAG. The target successor keeps only the increasing
/// edges of `S` (`S'(x) = S(x)` if `S(x) > x`, else `x`) and `V' = S`, so the
/// two solution sets coincide.
pub fn iter_to_sod(inst: &IterInstance) -> Result<ReductionResult> {
    let source: ProblemInstance = inst.clone().into();
    require_well_formed(&source)?;
    let s = &inst.successor;
    let mut b = CircuitBuilder::new(s.n());
    let x = b.inputs();
    let sx = b.inline(s, &x);
    let up = b.greater_than(&sx, &x);
    let mut outs = b.mux_many(up, &sx, &x);
    outs.extend(sx);
    let target = SodInstance::from_combined(b.build(outs)?)?.into();
    Ok(ReductionResult {
        source,
        target,
        pullback: Pullback::Identity,
    })
}

/// Sink-of-DAG to ITER-with-source on `m + n` bits:
/// `S'(y || x) = V(S(x)) || S(x)` when `y = V(x)`, otherwise `y || x`;
/// source `V(0^n) || 0^n`.
///
/// When `V` already drops on the first edge, `0^n` solves the source and the
/// target is a fixed trivial instance with a constant pullback.
pub fn sod_to_iter(inst: &SodInstance) -> Result<ReductionResult> {
    let source: ProblemInstance = inst.clone().into();
    require_well_formed(&source)?;
    let (n, m) = (inst.n(), inst.m());
    let zero = BitString::zeros(n);
    let src = inst.valuation(&zero)?.concat(&zero);

    let mut b = CircuitBuilder::new(m + n);
    let all = b.inputs();
    let (y, x) = all.split_at(m);
    let at_x = b.inline(inst.combined(), x);
    let (sx, vx) = at_x.split_at(n);
    let at_sx = b.inline(inst.combined(), sx);
    let vsx = &at_sx[n..];
    let on_path = b.equal(y, vx);
    let mut moved = vsx.to_vec();
    moved.extend_from_slice(sx);
    let outs = b.mux_many(on_path, &moved, &all);
    let succ = b.build(outs)?;

    let target: ProblemInstance = IterWithSourceInstance::new(succ, src)?.into();
    if target.well_formed() {
        return Ok(ReductionResult {
            source,
            target,
            pullback: Pullback::ValuationPair { n },
        });
    }
    // S(0) != 0 and V(S(0)) || S(0) <= V(0) || 0 force V(S(0)) < V(0).
    let w = m + n;
    let mut b = CircuitBuilder::new(w);
    let one = b.constant(true);
    let trivial = b.build(vec![one; w])?;
    Ok(ReductionResult {
        source,
        target: IterWithSourceInstance::new(trivial, BitString::zeros(w))?.into(),
        pullback: Pullback::Constant(zero),
    })
}

/// X to X-with-source with `s = 0^n`.
pub fn add_source(inst: &ProblemInstance) -> Result<ReductionResult> {
    require_well_formed(inst)?;
    let target: ProblemInstance = match inst {
        ProblemInstance::Iter(i) => {
            IterWithSourceInstance::new(i.successor.clone(), BitString::zeros(i.n()))?.into()
        }
        ProblemInstance::Sod(i) => {
            SodWithSourceInstance::new(i.clone(), BitString::zeros(i.n()))?.into()
        }
        other => {
            return Err(Error::Domain(format!(
                "add_source expects ITER or Sink-of-DAG, got {}",
                other.kind()
            )))
        }
    };
    Ok(ReductionResult {
        source: inst.clone(),
        target,
        pullback: Pullback::Identity,
    })
}

/// X-with-source to X by sending `0^n` to `s`.
///
/// For ITER, `S'(0^n) = s`. `0^n` never solves the target because `S(s) > s`.
/// For Sink-of-DAG the solutions ignore the source, so the dag is reused
/// unless `S(0^n) = 0^n`. Then `S'(0^n) = s` and a leading valuation bit
/// `[x != 0^n]` keeps `0^n` from being a solution.
pub fn drop_source(inst: &ProblemInstance) -> Result<ReductionResult> {
    require_well_formed(inst)?;
    let target: ProblemInstance = match inst {
        ProblemInstance::IterWithSource(i) => {
            let succ = if i.source.is_zero() {
                i.successor.clone()
            } else {
                redirect_output_at_zero(&i.successor, &i.source)?
            };
            IterInstance::new(succ)?.into()
        }
        ProblemInstance::SodWithSource(i) => {
            let zero = BitString::zeros(i.dag.n());
            if i.dag.successor(&zero)? != zero {
                i.dag.clone().into()
            } else {
                SodInstance::from_combined(flag_redirect(&i.dag, &i.source)?)?.into()
            }
        }
        other => {
            return Err(Error::Domain(format!(
                "drop_source expects a with-source instance, got {}",
                other.kind()
            )))
        }
    };
    Ok(ReductionResult {
        source: inst.clone(),
        target,
        pullback: Pullback::Identity,
    })
}

fn flag_redirect(dag: &SodInstance, s: &BitString) -> Result<Circuit> {
    let n = dag.n();
    let mut b = CircuitBuilder::new(n);
    let x = b.inputs();
    let is_zero = b.equals_const(&x, &BitString::zeros(n));
    let out = b.inline(dag.combined(), &x);
    let consts: Vec<_> = s.bits().iter().map(|&bit| b.constant(bit)).collect();
    let mut outs = b.mux_many(is_zero, &consts, &out[..n]);
    outs.push(b.not(is_zero));
    outs.extend_from_slice(&out[n..]);
    b.build(outs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::all_solutions;
    use crate::synth::circuit_from_table;

    fn table(values: &[u64], n: usize) -> Circuit {
        let outs: Vec<BitString> = values.iter().map(|&v| BitString::from_u64(v, n)).collect();
        circuit_from_table(n, &outs).unwrap()
    }

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn check_all(r: &ReductionResult) {
        assert!(r.target.well_formed());
        let sols = all_solutions(&r.target).unwrap();
        assert!(!sols.is_empty());
        for w in sols {
            r.pull_back(&w).unwrap();
        }
    }

    #[test]
    fn iter_to_sod_chain() {
        // 00 -> 01 -> 10 -> 11 -> 11
        let inst = IterInstance::new(table(&[1, 2, 3, 3], 2)).unwrap();
        let r = iter_to_sod(&inst).unwrap();
        assert_eq!(all_solutions(&r.target).unwrap(), vec![b("10")]);
        assert_eq!(r.pull_back(&b("10")).unwrap(), b("10"));
    }

    #[test]
    fn iter_to_sod_drops_backward_edges() {
        // 11 would be a sink of S itself (S(11) = 01 then 01 fixed).
        let inst = IterInstance::new(table(&[3, 1, 2, 1], 2)).unwrap();
        let r = iter_to_sod(&inst).unwrap();
        let src: ProblemInstance = inst.into();
        assert_eq!(
            all_solutions(&r.target).unwrap(),
            all_solutions(&src).unwrap()
        );
        check_all(&r);
    }

    #[test]
    fn sod_to_iter_one_bit() {
        // S: 0 -> 1 -> 1, V = identity.
        let s = table(&[1, 1], 1);
        let inst = SodInstance::from_parts(&s, &table(&[0, 1], 1)).unwrap();
        let r = sod_to_iter(&inst).unwrap();
        assert_eq!(r.target.start(), b("00"));
        assert_eq!(r.target.successor(&b("00")).unwrap(), b("11"));
        assert_eq!(r.target.successor(&b("10")).unwrap(), b("10"));
        check_all(&r);
    }

    #[test]
    fn sod_to_iter_degenerate() {
        // V(S(0)) < V(0): 0 solves directly.
        let s = table(&[1, 1], 1);
        let inst = SodInstance::from_parts(&s, &table(&[1, 0], 1)).unwrap();
        let r = sod_to_iter(&inst).unwrap();
        assert_eq!(r.pullback, Pullback::Constant(b("0")));
        check_all(&r);
    }

    #[test]
    fn drop_source_example() {
        // n=2, s=10, S: 10 -> 11 -> 11, others fixed.
        let inst: ProblemInstance = IterWithSourceInstance::new(table(&[0, 1, 3, 3], 2), b("10"))
            .unwrap()
            .into();
        let r = drop_source(&inst).unwrap();
        assert_eq!(r.target.successor(&b("00")).unwrap(), b("10"));
        assert_eq!(all_solutions(&r.target).unwrap(), vec![b("10")]);
        check_all(&r);
    }

    #[test]
    fn drop_source_zero_is_identity() {
        let inst: ProblemInstance = IterWithSourceInstance::new(table(&[2, 1, 3, 3], 2), b("00"))
            .unwrap()
            .into();
        let r = drop_source(&inst).unwrap();
        match (&r.target, &inst) {
            (ProblemInstance::Iter(t), ProblemInstance::IterWithSource(s)) => {
                assert_eq!(t.successor, s.successor)
            }
            _ => panic!("unexpected kinds"),
        }
    }

    #[test]
    fn drop_source_sod_fixed_zero() {
        // S(0) = 0; s = 01 -> 10 -> 00. Target must not call 0 a solution.
        let s = table(&[0, 2, 0, 3], 2);
        let dag = SodInstance::from_parts(&s, &table(&[0, 1, 2, 3], 2)).unwrap();
        let inst: ProblemInstance = SodWithSourceInstance::new(dag, b("01")).unwrap().into();
        let r = drop_source(&inst).unwrap();
        let sols = all_solutions(&r.target).unwrap();
        assert!(!sols.contains(&b("00")));
        check_all(&r);
    }

    #[test]
    fn add_source_keeps_solutions() {
        let inst: ProblemInstance = IterInstance::new(table(&[1, 3, 3, 3], 2)).unwrap().into();
        let r = add_source(&inst).unwrap();
        assert_eq!(
            all_solutions(&r.target).unwrap(),
            all_solutions(&inst).unwrap()
        );
    }

    #[test]
    fn pullback_rejects_non_solutions() {
        let inst = IterInstance::new(table(&[1, 2, 3, 3], 2)).unwrap();
        let r = iter_to_sod(&inst).unwrap();
        assert!(matches!(r.pull_back(&b("00")), Err(Error::Contract(_))));
    }
}
