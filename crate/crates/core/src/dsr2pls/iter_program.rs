//! The ITER-with-source reduction as a [`DsrProgram`], so that it can be
//! compiled into its own state graph.
//!
//! Instances are circuits serialized into fixed-width fields: three 16-bit
//! header fields (inputs, outputs, gates), then per gate a 3-bit opcode and
//! two 16-bit operands, then 16 bits per output, then the source. The gate
//! field is sized from a per-rank budget and zero-padded. Calls are padded
//! to exactly two with a fixed trivial sub-instance.

use crate::bits::BitString;
use crate::circuit::{Circuit, Gate};
use crate::dsr::{dsr_iter_with_source, DsrOracle};
use crate::error::{Error, Result};
use crate::problems::{IterWithSourceInstance, ProblemInstance};

use super::DsrProgram;

const FIELD: usize = 16;
const OP: usize = 3;
const GATE_BITS: usize = OP + 2 * FIELD;
const HEADER_BITS: usize = 3 * FIELD;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterProgram {
    top: usize,
    top_gates: usize,
}

impl IterProgram {
    /// Program sized for `inst`, together with the encoded top instance.
    pub fn for_instance(inst: &IterWithSourceInstance) -> Result<(Self, BitString)> {
        let prog = IterProgram {
            top: inst.n(),
            top_gates: inst.successor.gate_count(),
        };
        let x = prog.encode(inst)?;
        Ok((prog, x))
    }

    /// Gate budget at rank `r`. Each level may add a constant, the upper-half
    /// freeze and builder overhead, all linear in the rank.
    pub fn gate_budget(&self, rank: usize) -> usize {
        self.top_gates + (self.top - rank) * (2 * self.top + 4)
    }

    pub fn encode(&self, inst: &IterWithSourceInstance) -> Result<BitString> {
        let rank = inst.n();
        let c = &inst.successor;
        let budget = self.gate_budget(rank);
        if c.gate_count() > budget {
            return Err(Error::Sizing(format!(
                "rank-{rank} circuit has {} gates, budget is {budget}",
                c.gate_count()
            )));
        }
        let field = |v: usize| -> Result<BitString> {
            if v >= 1 << FIELD {
                return Err(Error::Sizing(format!(
                    "value {v} exceeds a {FIELD}-bit field"
                )));
            }
            Ok(BitString::from_u64(v as u64, FIELD))
        };
        let mut out = BitString::new(Vec::with_capacity(self.instance_width(rank)));
        for v in [c.n(), c.m(), c.gate_count()] {
            out.extend_from(&field(v)?);
        }
        for g in c.gates() {
            let (op, a, b) = match *g {
                Gate::Input(k) => (0, k, 0),
                Gate::Const(v) => (1, v as usize, 0),
                Gate::Not(a) => (2, a, 0),
                Gate::And(a, b) => (3, a, b),
                Gate::Or(a, b) => (4, a, b),
            };
            out.extend_from(&BitString::from_u64(op, OP));
            out.extend_from(&field(a)?);
            out.extend_from(&field(b)?);
        }
        out.extend_from(&BitString::zeros((budget - c.gate_count()) * GATE_BITS));
        for &o in c.outputs() {
            out.extend_from(&field(o)?);
        }
        out.extend_from(&inst.source);
        Ok(out)
    }

    pub fn decode(&self, bits: &BitString, rank: usize) -> Result<IterWithSourceInstance> {
        let bad = |why: &str| Error::MalformedInstance(format!("rank-{rank} encoding: {why}"));
        if rank == 0 || bits.len() != self.instance_width(rank) {
            return Err(bad("wrong length"));
        }
        let mut cur = Cursor { bits, pos: 0 };
        let (n, m, g) = (cur.field(FIELD), cur.field(FIELD), cur.field(FIELD));
        let budget = self.gate_budget(rank);
        if n != rank || m != rank || g > budget {
            return Err(bad("header does not match rank"));
        }
        let mut gates = Vec::with_capacity(g);
        for _ in 0..g {
            let (op, a, b) = (cur.field(OP), cur.field(FIELD), cur.field(FIELD));
            gates.push(match op {
                0 if b == 0 => Gate::Input(a),
                1 if a <= 1 && b == 0 => Gate::Const(a == 1),
                2 if b == 0 => Gate::Not(a),
                3 => Gate::And(a, b),
                4 => Gate::Or(a, b),
                _ => return Err(bad("bad gate")),
            });
        }
        if !cur.take((budget - g) * GATE_BITS).is_zero() {
            return Err(bad("nonzero padding"));
        }
        let outputs: Vec<usize> = (0..m).map(|_| cur.field(FIELD)).collect();
        let source = cur.take(rank);
        let circuit = Circuit::new(n, gates, outputs).map_err(|e| bad(&e.to_string()))?;
        IterWithSourceInstance::new(circuit, source)
    }

    /// Constant-ones circuit with source `0^r`, used to pad calls.
    pub fn trivial(rank: usize) -> IterWithSourceInstance {
        let mut gates: Vec<Gate> = (0..rank).map(Gate::Input).collect();
        gates.push(Gate::Const(true));
        let c = Circuit::new(rank, gates, vec![rank; rank]).expect("well-formed");
        IterWithSourceInstance::new(c, BitString::zeros(rank)).expect("shapes match")
    }

    fn replay(
        &self,
        rank: usize,
        x: &BitString,
        answered: &[(BitString, BitString)],
    ) -> Result<Replayed> {
        let inst = self.decode(x, rank)?;
        let mut oracle = Replay {
            answers: answered.iter().map(|(_, y)| y.clone()).collect(),
            used: 0,
            pending: None,
        };
        let result = dsr_iter_with_source(&inst, &mut oracle);
        if let Some(q) = oracle.pending {
            return Ok(Replayed::Query(q));
        }
        Ok(Replayed::Done(result?))
    }

    /// State-size bound for circuit-d.s.r. with polynomial blowup, in units
    /// of the circuit size: `|C| + n + Σ_{i=1}^{n+m-1} p(|C|+i(nm)^c)·(|C|+i(nm)^c)·n`
    /// with `p ≡ 2`.
    pub fn circuit_state_bound(size: usize, n: usize, m: usize, c: u32) -> u128 {
        let (size, n, m) = (size as u128, n as u128, m as u128);
        let blow = (n * m).pow(c);
        size + n + (1..n + m).map(|i| 2 * (size + i * blow) * n).sum::<u128>()
    }
}

struct Cursor<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, k: usize) -> BitString {
        let v = self.bits.slice(self.pos..self.pos + k);
        self.pos += k;
        v
    }

    fn field(&mut self, k: usize) -> usize {
        self.take(k).to_u64() as usize
    }
}

enum Replayed {
    Query(IterWithSourceInstance),
    Done(BitString),
}

/// Answers from a recorded prefix, then suspends on the first new query.
struct Replay {
    answers: Vec<BitString>,
    used: usize,
    pending: Option<IterWithSourceInstance>,
}

impl DsrOracle for Replay {
    fn solve(&mut self, _parent: &ProblemInstance, query: &ProblemInstance) -> Result<BitString> {
        if let Some(a) = self.answers.get(self.used) {
            self.used += 1;
            return Ok(a.clone());
        }
        match query {
            ProblemInstance::IterWithSource(q) => self.pending = Some(q.clone()),
            other => {
                return Err(Error::Contract(format!(
                    "unexpected {} query",
                    other.kind()
                )))
            }
        }
        Err(Error::Contract("suspended at an unanswered query".into()))
    }
}

impl DsrProgram for IterProgram {
    fn name(&self) -> String {
        "iter-with-source".into()
    }

    fn rank_of(&self, x: &BitString) -> Result<usize> {
        self.decode(x, self.top)?;
        Ok(self.top)
    }

    fn instance_width(&self, rank: usize) -> usize {
        HEADER_BITS + self.gate_budget(rank) * GATE_BITS + rank * FIELD + rank
    }

    fn solution_width(&self, rank: usize) -> usize {
        rank
    }

    fn calls(&self, rank: usize) -> usize {
        if rank >= 2 {
            2
        } else {
            0
        }
    }

    fn next_query(
        &self,
        rank: usize,
        x: &BitString,
        answered: &[(BitString, BitString)],
    ) -> Result<BitString> {
        match self.replay(rank, x, answered)? {
            Replayed::Query(q) => self.encode(&q),
            Replayed::Done(_) => self.encode(&Self::trivial(rank - 1)),
        }
    }

    fn finalize(
        &self,
        rank: usize,
        x: &BitString,
        answered: &[(BitString, BitString)],
    ) -> Result<BitString> {
        match self.replay(rank, x, answered)? {
            Replayed::Done(y) => Ok(y),
            Replayed::Query(_) => Err(Error::Contract(format!(
                "rank-{rank} run needs more than {} answers",
                answered.len()
            ))),
        }
    }

    fn verify(&self, rank: usize, x: &BitString, y: &BitString) -> Result<bool> {
        let Ok(inst) = self.decode(x, rank) else {
            return Ok(false);
        };
        if y.len() != rank {
            return Ok(false);
        }
        ProblemInstance::from(inst).verify_solution(y)
    }
}
