//! Instance types, well-formedness guarantees and solution verifiers for
//! ITER, ITER-with-source, Sink-of-DAG, Sink-of-DAG-with-source and
//! End-of-Line.
//!
//! Sink-of-DAG instances keep the successor and the valuation in a single
//! circuit on shared inputs: outputs `0..n` are `S(x)`, outputs `n..n+m`
//! are `V(x)`. Gadgets that need `V` inside `S` can then reuse its gates.

use std::fmt;
use std::str::FromStr;

use crate::bits::BitString;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gadgets::CircuitBuilder;

/// A deterministic, length-preserving successor function.
pub trait SuccessorOracle {
    fn width(&self) -> usize;
    fn next(&self, x: &BitString) -> Result<BitString>;
}

impl<T: SuccessorOracle + ?Sized> SuccessorOracle for std::rc::Rc<T> {
    fn width(&self) -> usize {
        (**self).width()
    }

    fn next(&self, x: &BitString) -> Result<BitString> {
        (**self).next(x)
    }
}

impl SuccessorOracle for Circuit {
    fn width(&self) -> usize {
        self.n()
    }

    fn next(&self, x: &BitString) -> Result<BitString> {
        self.evaluate(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Iter,
    IterWithSource,
    Sod,
    SodWithSource,
    Eol,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Iter => "iter",
            ProblemKind::IterWithSource => "iter-with-source",
            ProblemKind::Sod => "sink-of-dag",
            ProblemKind::SodWithSource => "sink-of-dag-with-source",
            ProblemKind::Eol => "end-of-line",
        }
    }

    pub const ALL: [ProblemKind; 5] = [
        ProblemKind::Iter,
        ProblemKind::IterWithSource,
        ProblemKind::Sod,
        ProblemKind::SodWithSource,
        ProblemKind::Eol,
    ];
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown problem kind {s:?}")))
    }
}

fn shape(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::MalformedInstance(msg()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterInstance {
    pub successor: Circuit,
}

impl IterInstance {
    pub fn new(successor: Circuit) -> Result<Self> {
        shape(successor.n() == successor.m() && successor.n() > 0, || {
            format!(
                "ITER needs S: n -> n, got {} -> {}",
                successor.n(),
                successor.m()
            )
        })?;
        Ok(IterInstance { successor })
    }

    pub fn n(&self) -> usize {
        self.successor.n()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterWithSourceInstance {
    pub successor: Circuit,
    pub source: BitString,
}

impl IterWithSourceInstance {
    pub fn new(successor: Circuit, source: BitString) -> Result<Self> {
        shape(successor.n() == successor.m() && successor.n() > 0, || {
            format!(
                "ITER needs S: n -> n, got {} -> {}",
                successor.n(),
                successor.m()
            )
        })?;
        shape(source.len() == successor.n(), || {
            format!(
                "source has {} bits, expected {}",
                source.len(),
                successor.n()
            )
        })?;
        Ok(IterWithSourceInstance { successor, source })
    }

    pub fn n(&self) -> usize {
        self.successor.n()
    }
}

/// Sink-of-DAG over a combined successor/valuation circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SodInstance {
    combined: Circuit,
}

impl SodInstance {
    /// `combined` maps `n` bits to `n + m` bits: successor first, valuation after.
    pub fn from_combined(combined: Circuit) -> Result<Self> {
        shape(combined.m() > combined.n() && combined.n() > 0, || {
            format!(
                "combined circuit {} -> {} leaves no valuation bits",
                combined.n(),
                combined.m()
            )
        })?;
        Ok(SodInstance { combined })
    }

    pub fn from_parts(successor: &Circuit, valuation: &Circuit) -> Result<Self> {
        shape(successor.n() == successor.m(), || {
            "successor must be n -> n".into()
        })?;
        shape(valuation.n() == successor.n() && valuation.m() > 0, || {
            "valuation must read the successor's inputs and have outputs".into()
        })?;
        let mut b = CircuitBuilder::new(successor.n());
        let x = b.inputs();
        let mut outs = b.inline(successor, &x);
        outs.extend(b.inline(valuation, &x));
        SodInstance::from_combined(b.build(outs)?)
    }

    pub fn n(&self) -> usize {
        self.combined.n()
    }

    pub fn m(&self) -> usize {
        self.combined.m() - self.combined.n()
    }

    pub fn combined(&self) -> &Circuit {
        &self.combined
    }

    /// `(S(x), V(x))`.
    pub fn eval(&self, x: &BitString) -> Result<(BitString, BitString)> {
        let out = self.combined.evaluate(x)?;
        let n = self.n();
        Ok((out.slice(0..n), out.slice(n..out.len())))
    }

    pub fn successor(&self, x: &BitString) -> Result<BitString> {
        Ok(self.eval(x)?.0)
    }

    pub fn valuation(&self, x: &BitString) -> Result<BitString> {
        Ok(self.eval(x)?.1)
    }

    /// Successor as a standalone circuit.
    pub fn successor_circuit(&self) -> Circuit {
        let keep: Vec<usize> = (0..self.n()).collect();
        self.combined
            .project_outputs(&keep)
            .expect("indices in range")
    }

    /// Valuation as a standalone circuit.
    pub fn valuation_circuit(&self) -> Circuit {
        let keep: Vec<usize> = (self.n()..self.combined.m()).collect();
        self.combined
            .project_outputs(&keep)
            .expect("indices in range")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SodWithSourceInstance {
    pub dag: SodInstance,
    pub source: BitString,
}

impl SodWithSourceInstance {
    pub fn new(dag: SodInstance, source: BitString) -> Result<Self> {
        shape(source.len() == dag.n(), || {
            format!("source has {} bits, expected {}", source.len(), dag.n())
        })?;
        Ok(SodWithSourceInstance { dag, source })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EolInstance {
    pub successor: Circuit,
    pub predecessor: Circuit,
}

impl EolInstance {
    pub fn new(successor: Circuit, predecessor: Circuit) -> Result<Self> {
        let n = successor.n();
        shape(
            successor.m() == n && predecessor.n() == n && predecessor.m() == n && n > 0,
            || "End-of-Line needs S, P: n -> n".into(),
        )?;
        Ok(EolInstance {
            successor,
            predecessor,
        })
    }

    /// Consistent edge `v -> S(v)`.
    fn has_out(&self, v: &BitString) -> Result<bool> {
        let s = self.successor.evaluate(v)?;
        Ok(s != *v && self.predecessor.evaluate(&s)? == *v)
    }

    /// Consistent edge `P(v) -> v`.
    fn has_in(&self, v: &BitString) -> Result<bool> {
        let p = self.predecessor.evaluate(v)?;
        Ok(p != *v && self.successor.evaluate(&p)? == *v)
    }
}

/// Dimensions used by the query-size monitors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceDims {
    /// Input bits of the (combined) circuit.
    pub inputs: usize,
    /// Output bits of the (combined) circuit.
    pub outputs: usize,
    /// Canonical circuit size.
    pub size: usize,
    /// Circuit size plus explicit source bits.
    pub encoded: usize,
}

impl fmt::Display for InstanceDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} m={} size={} encoded={}",
            self.inputs, self.outputs, self.size, self.encoded
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemInstance {
    Iter(IterInstance),
    IterWithSource(IterWithSourceInstance),
    Sod(SodInstance),
    SodWithSource(SodWithSourceInstance),
    Eol(EolInstance),
}

/// Sink-of-DAG solution predicate. A solution must leave itself:
/// `S(v) != v`, and then either `S(S(v)) = S(v)` or `V(S(v)) <= V(v)`.
pub fn sod_predicate(
    v: &BitString,
    succ: impl Fn(&BitString) -> Result<BitString>,
    val: impl Fn(&BitString) -> Result<BitString>,
) -> Result<bool> {
    let sv = succ(v)?;
    if sv == *v {
        return Ok(false);
    }
    if succ(&sv)? == sv {
        return Ok(true);
    }
    Ok(val(&sv)? <= val(v)?)
}

/// ITER solution predicate: `S(v) > v` and `S(S(v)) <= S(v)`.
pub fn iter_predicate(v: &BitString, s: &Circuit) -> Result<bool> {
    let sv = s.evaluate(v)?;
    if sv <= *v {
        return Ok(false);
    }
    Ok(s.evaluate(&sv)? <= sv)
}

impl ProblemInstance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            ProblemInstance::Iter(_) => ProblemKind::Iter,
            ProblemInstance::IterWithSource(_) => ProblemKind::IterWithSource,
            ProblemInstance::Sod(_) => ProblemKind::Sod,
            ProblemInstance::SodWithSource(_) => ProblemKind::SodWithSource,
            ProblemInstance::Eol(_) => ProblemKind::Eol,
        }
    }

    /// Bits per candidate solution.
    pub fn n(&self) -> usize {
        match self {
            ProblemInstance::Iter(i) => i.n(),
            ProblemInstance::IterWithSource(i) => i.n(),
            ProblemInstance::Sod(i) => i.n(),
            ProblemInstance::SodWithSource(i) => i.dag.n(),
            ProblemInstance::Eol(i) => i.successor.n(),
        }
    }

    /// Valuation bits for Sink-of-DAG variants.
    pub fn valuation_bits(&self) -> Option<usize> {
        match self {
            ProblemInstance::Sod(i) => Some(i.m()),
            ProblemInstance::SodWithSource(i) => Some(i.dag.m()),
            _ => None,
        }
    }

    /// Where a path walk starts.
    pub fn start(&self) -> BitString {
        match self {
            ProblemInstance::IterWithSource(i) => i.source.clone(),
            ProblemInstance::SodWithSource(i) => i.source.clone(),
            other => BitString::zeros(other.n()),
        }
    }

    pub fn successor(&self, x: &BitString) -> Result<BitString> {
        match self {
            ProblemInstance::Iter(i) => i.successor.evaluate(x),
            ProblemInstance::IterWithSource(i) => i.successor.evaluate(x),
            ProblemInstance::Sod(i) => i.successor(x),
            ProblemInstance::SodWithSource(i) => i.dag.successor(x),
            ProblemInstance::Eol(i) => i.successor.evaluate(x),
        }
    }

    pub fn dims(&self) -> InstanceDims {
        let (inputs, outputs, size, extra) = match self {
            ProblemInstance::Iter(i) => (i.n(), i.n(), i.successor.size(), 0),
            ProblemInstance::IterWithSource(i) => (i.n(), i.n(), i.successor.size(), i.n()),
            ProblemInstance::Sod(i) => (i.n(), i.combined.m(), i.combined.size(), 0),
            ProblemInstance::SodWithSource(i) => {
                let c = &i.dag.combined;
                (c.n(), c.m(), c.size(), c.n())
            }
            ProblemInstance::Eol(i) => {
                let n = i.successor.n();
                (n, 2 * n, i.successor.size() + i.predecessor.size() - n, 0)
            }
        };
        InstanceDims {
            inputs,
            outputs,
            size,
            encoded: size + extra,
        }
    }

    /// The instance's guarantee, checked by direct evaluation.
    pub fn well_formed(&self) -> bool {
        self.check_guarantee().unwrap_or(false)
    }

    fn check_guarantee(&self) -> Result<bool> {
        Ok(match self {
            ProblemInstance::Iter(i) => {
                let z = BitString::zeros(i.n());
                i.successor.evaluate(&z)? > z
            }
            ProblemInstance::IterWithSource(i) => i.successor.evaluate(&i.source)? > i.source,
            ProblemInstance::Sod(i) => {
                let z = BitString::zeros(i.n());
                i.successor(&z)? != z
            }
            ProblemInstance::SodWithSource(i) => i.dag.successor(&i.source)? != i.source,
            ProblemInstance::Eol(i) => {
                let z = BitString::zeros(i.successor.n());
                i.successor.evaluate(&z)? != z && i.predecessor.evaluate(&z)? == z
            }
        })
    }

    /// Whether `cand` solves the instance.
    ///
    /// End-of-Line uses consistent edges (`u -> v` iff `S(u) = v`, `P(v) = u`):
    /// `v` solves if it is a sink, a source other than `0^n`, or `0^n` without
    /// an outgoing edge.
    pub fn verify_solution(&self, cand: &BitString) -> Result<bool> {
        if cand.len() != self.n() {
            return Err(Error::Arity {
                expected: self.n(),
                got: cand.len(),
            });
        }
        match self {
            ProblemInstance::Iter(i) => iter_predicate(cand, &i.successor),
            ProblemInstance::IterWithSource(i) => iter_predicate(cand, &i.successor),
            ProblemInstance::Sod(i) => sod_predicate(cand, |x| i.successor(x), |x| i.valuation(x)),
            ProblemInstance::SodWithSource(i) => {
                sod_predicate(cand, |x| i.dag.successor(x), |x| i.dag.valuation(x))
            }
            ProblemInstance::Eol(i) => {
                let out = i.has_out(cand)?;
                let inc = i.has_in(cand)?;
                if cand.is_zero() {
                    Ok(!out)
                } else {
                    Ok(inc != out)
                }
            }
        }
    }
}

impl From<IterInstance> for ProblemInstance {
    fn from(i: IterInstance) -> Self {
        ProblemInstance::Iter(i)
    }
}

impl From<IterWithSourceInstance> for ProblemInstance {
    fn from(i: IterWithSourceInstance) -> Self {
        ProblemInstance::IterWithSource(i)
    }
}

impl From<SodInstance> for ProblemInstance {
    fn from(i: SodInstance) -> Self {
        ProblemInstance::Sod(i)
    }
}

impl From<SodWithSourceInstance> for ProblemInstance {
    fn from(i: SodWithSourceInstance) -> Self {
        ProblemInstance::SodWithSource(i)
    }
}

impl From<EolInstance> for ProblemInstance {
    fn from(i: EolInstance) -> Self {
        ProblemInstance::Eol(i)
    }
}
