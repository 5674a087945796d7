//! Circuit builder with constant folding and structural sharing, and the
//! small gadgets the reductions splice into circuits: constant comparison,
//! input redirection, threshold freezing and multiplexing.

use std::collections::HashMap;

use crate::bits::BitString;
use crate::circuit::{Circuit, Gate};
use crate::error::Result;

/// Handle to a gate inside a [`CircuitBuilder`].
pub type Wire = usize;

#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    n: usize,
    gates: Vec<Gate>,
    dedup: HashMap<Gate, Wire>,
}

impl CircuitBuilder {
    pub fn new(n: usize) -> Self {
        CircuitBuilder {
            n,
            gates: Vec::new(),
            dedup: HashMap::new(),
        }
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    fn push(&mut self, gate: Gate) -> Wire {
        if let Some(&w) = self.dedup.get(&gate) {
            return w;
        }
        self.gates.push(gate);
        let w = self.gates.len() - 1;
        self.dedup.insert(gate, w);
        w
    }

    fn constant_of(&self, w: Wire) -> Option<bool> {
        match self.gates[w] {
            Gate::Const(b) => Some(b),
            _ => None,
        }
    }

    pub fn input(&mut self, k: usize) -> Wire {
        assert!(k < self.n, "input {k} out of range");
        self.push(Gate::Input(k))
    }

    pub fn inputs(&mut self) -> Vec<Wire> {
        (0..self.n).map(|k| self.input(k)).collect()
    }

    pub fn constant(&mut self, b: bool) -> Wire {
        self.push(Gate::Const(b))
    }

    pub fn not(&mut self, a: Wire) -> Wire {
        match (self.constant_of(a), self.gates[a]) {
            (Some(c), _) => self.constant(!c),
            (None, Gate::Not(inner)) => inner,
            _ => self.push(Gate::Not(a)),
        }
    }

    pub fn and(&mut self, a: Wire, b: Wire) -> Wire {
        match (self.constant_of(a), self.constant_of(b)) {
            (Some(false), _) | (_, Some(false)) => self.constant(false),
            (Some(true), _) => b,
            (_, Some(true)) => a,
            _ if a == b => a,
            _ => self.push(Gate::And(a.min(b), a.max(b))),
        }
    }

    pub fn or(&mut self, a: Wire, b: Wire) -> Wire {
        match (self.constant_of(a), self.constant_of(b)) {
            (Some(true), _) | (_, Some(true)) => self.constant(true),
            (Some(false), _) => b,
            (_, Some(false)) => a,
            _ if a == b => a,
            _ => self.push(Gate::Or(a.min(b), a.max(b))),
        }
    }

    pub fn xor(&mut self, a: Wire, b: Wire) -> Wire {
        let na = self.not(a);
        let nb = self.not(b);
        let l = self.and(a, nb);
        let r = self.and(na, b);
        self.or(l, r)
    }

    /// `sel ? hi : lo`
    pub fn mux(&mut self, sel: Wire, hi: Wire, lo: Wire) -> Wire {
        if hi == lo {
            return hi;
        }
        let nsel = self.not(sel);
        let h = self.and(sel, hi);
        let l = self.and(nsel, lo);
        self.or(h, l)
    }

    pub fn mux_many(&mut self, sel: Wire, hi: &[Wire], lo: &[Wire]) -> Vec<Wire> {
        assert_eq!(hi.len(), lo.len());
        hi.iter()
            .zip(lo)
            .map(|(&h, &l)| self.mux(sel, h, l))
            .collect()
    }

    pub fn and_all(&mut self, ws: &[Wire]) -> Wire {
        let t = self.constant(true);
        ws.iter().fold(t, |acc, &w| self.and(acc, w))
    }

    pub fn or_all(&mut self, ws: &[Wire]) -> Wire {
        let f = self.constant(false);
        ws.iter().fold(f, |acc, &w| self.or(acc, w))
    }

    /// Equality of two equal-width buses.
    pub fn equal(&mut self, a: &[Wire], b: &[Wire]) -> Wire {
        assert_eq!(a.len(), b.len());
        let diffs: Vec<Wire> = a.iter().zip(b).map(|(&x, &y)| self.xor(x, y)).collect();
        let any = self.or_all(&diffs);
        self.not(any)
    }

    /// Equality of a bus with a hard-coded constant.
    pub fn equals_const(&mut self, a: &[Wire], c: &BitString) -> Wire {
        assert_eq!(a.len(), c.len());
        let lits: Vec<Wire> = a
            .iter()
            .zip(c.bits())
            .map(|(&w, &bit)| if bit { w } else { self.not(w) })
            .collect();
        self.and_all(&lits)
    }

    /// `a < c` for a bus `a` (most significant first) and a constant `c`.
    pub fn less_than_const(&mut self, a: &[Wire], c: &BitString) -> Wire {
        assert_eq!(a.len(), c.len());
        // Scan from the least significant bit: lt_k = a_k < c_k or (a_k == c_k and lt_{k+1}).
        let mut lt = self.constant(false);
        for (&w, &bit) in a.iter().zip(c.bits()).rev() {
            lt = if bit {
                let nw = self.not(w);
                self.or(nw, lt)
            } else {
                let nw = self.not(w);
                self.and(nw, lt)
            };
        }
        lt
    }

    /// `a > b` for equal-width buses.
    pub fn greater_than(&mut self, a: &[Wire], b: &[Wire]) -> Wire {
        assert_eq!(a.len(), b.len());
        let mut gt = self.constant(false);
        for (&x, &y) in a.iter().zip(b).rev() {
            let ny = self.not(y);
            let here = self.and(x, ny);
            let eq = {
                let d = self.xor(x, y);
                self.not(d)
            };
            let carry = self.and(eq, gt);
            gt = self.or(here, carry);
        }
        gt
    }

    /// Copies `c` into the builder with its inputs driven by `inputs`;
    /// returns the wires carrying its outputs.
    pub fn inline(&mut self, c: &Circuit, inputs: &[Wire]) -> Vec<Wire> {
        assert_eq!(inputs.len(), c.n());
        let mut map = Vec::with_capacity(c.gate_count());
        for gate in c.gates() {
            let w = match *gate {
                Gate::Input(k) => inputs[k],
                Gate::Const(b) => self.constant(b),
                Gate::Not(a) => self.not(map[a]),
                Gate::And(a, b) => self.and(map[a], map[b]),
                Gate::Or(a, b) => self.or(map[a], map[b]),
            };
            map.push(w);
        }
        c.outputs().iter().map(|&o| map[o]).collect()
    }

    pub fn build(self, outputs: Vec<Wire>) -> Result<Circuit> {
        Circuit::new(self.n, self.gates, outputs)
    }
}

/// Bus that equals `target` when `x` is all zeros and `x` otherwise.
/// Costs O(|x|) gates.
pub fn redirect_zero(b: &mut CircuitBuilder, x: &[Wire], target: &BitString) -> Vec<Wire> {
    let zero = BitString::zeros(x.len());
    let is_zero = b.equals_const(x, &zero);
    let consts: Vec<Wire> = target.bits().iter().map(|&bit| b.constant(bit)).collect();
    b.mux_many(is_zero, &consts, x)
}

/// A copy of `c` whose input `0^n` is replaced by `target` before evaluation.
pub fn redirect_circuit(c: &Circuit, target: &BitString) -> Result<Circuit> {
    let mut b = CircuitBuilder::new(c.n());
    let x = b.inputs();
    let xr = redirect_zero(&mut b, &x, target);
    let outs = b.inline(c, &xr);
    b.build(outs)
}

/// Circuit computing `S(0^n) = s`, `S(x) = base(x)` otherwise.
pub fn redirect_output_at_zero(base: &Circuit, s: &BitString) -> Result<Circuit> {
    let mut b = CircuitBuilder::new(base.n());
    let x = b.inputs();
    let zero = BitString::zeros(x.len());
    let is_zero = b.equals_const(&x, &zero);
    let out = b.inline(base, &x);
    let consts: Vec<Wire> = s.bits().iter().map(|&bit| b.constant(bit)).collect();
    let outs = b.mux_many(is_zero, &consts, &out);
    b.build(outs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparators_match_integers() {
        for c in 0..16u64 {
            let cb = BitString::from_u64(c, 4);
            let mut b = CircuitBuilder::new(4);
            let x = b.inputs();
            let lt = b.less_than_const(&x, &cb);
            let eq = b.equals_const(&x, &cb);
            let circ = b.build(vec![lt, eq]).unwrap();
            for v in 0..16u64 {
                let out = circ.evaluate(&BitString::from_u64(v, 4)).unwrap();
                assert_eq!(out.get(0), v < c, "{v} < {c}");
                assert_eq!(out.get(1), v == c);
            }
        }
    }

    #[test]
    fn greater_than_bus() {
        let mut b = CircuitBuilder::new(6);
        let x = b.inputs();
        let gt = b.greater_than(&x[..3], &x[3..]);
        let circ = b.build(vec![gt]).unwrap();
        for v in BitString::all(6) {
            let want = v.slice(0..3) > v.slice(3..6);
            assert_eq!(circ.evaluate(&v).unwrap().get(0), want);
        }
    }

    #[test]
    fn redirect_gadget_is_linear() {
        for n in 1..=8 {
            let target = BitString::ones(n);
            let mut b = CircuitBuilder::new(n);
            let x = b.inputs();
            let before = b.gate_count();
            let out = redirect_zero(&mut b, &x, &target);
            assert!(b.gate_count() - before <= 6 * n);
            let c = b.build(out).unwrap();
            for v in BitString::all(n) {
                let want = if v.is_zero() {
                    target.clone()
                } else {
                    v.clone()
                };
                assert_eq!(c.evaluate(&v).unwrap(), want);
            }
        }
    }
}
