//! Boolean circuit IR: evaluation, layering, and the input/output
//! restriction passes with constant propagation.

use crate::bits::BitString;
use crate::error::{Error, Result};

/// A gate record. Operands are indices of strictly earlier gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(usize),
    Const(bool),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
}

impl Gate {
    pub fn operands(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            Gate::Input(_) | Gate::Const(_) => (None, None),
            Gate::Not(a) => (Some(a), None),
            Gate::And(a, b) | Gate::Or(a, b) => (Some(a), Some(b)),
        };
        a.into_iter().chain(b)
    }

    fn is_logic(&self) -> bool {
        matches!(self, Gate::Not(_) | Gate::And(..) | Gate::Or(..))
    }
}

/// An acyclic circuit `{0,1}^n -> {0,1}^m` whose gates are stored in
/// topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
    outputs: Vec<usize>,
}

/// Result of propagating a restriction through one gate.
#[derive(Clone, Copy)]
enum Wire {
    Gate(usize),
    Const(bool),
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>, outputs: Vec<usize>) -> Result<Self> {
        for (idx, gate) in gates.iter().enumerate() {
            if let Gate::Input(k) = *gate {
                if k >= n {
                    return Err(Error::InvalidCircuit(format!(
                        "gate {idx} reads input {k} of a {n}-input circuit"
                    )));
                }
            }
            if let Some(bad) = gate.operands().find(|&a| a >= idx) {
                return Err(Error::InvalidCircuit(format!(
                    "gate {idx} references gate {bad} which is not earlier"
                )));
            }
        }
        if let Some(&bad) = outputs.iter().find(|&&o| o >= gates.len()) {
            return Err(Error::InvalidCircuit(format!(
                "output references missing gate {bad}"
            )));
        }
        Ok(Circuit { n, gates, outputs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.outputs.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Wires: gate fan-ins plus output connections.
    pub fn wire_count(&self) -> usize {
        self.gates
            .iter()
            .map(|g| g.operands().count())
            .sum::<usize>()
            + self.outputs.len()
    }

    /// Canonical size: input count, plus logic gates (NOT/AND/OR), plus wires.
    /// Both restriction kinds strictly decrease it.
    pub fn size(&self) -> usize {
        self.n + self.gates.iter().filter(|g| g.is_logic()).count() + self.wire_count()
    }

    pub fn evaluate(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.n {
            return Err(Error::Arity {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut val: Vec<bool> = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let v = match *gate {
                Gate::Input(k) => x.get(k),
                Gate::Const(b) => b,
                Gate::Not(a) => !val[a],
                Gate::And(a, b) => val[a] && val[b],
                Gate::Or(a, b) => val[a] || val[b],
            };
            val.push(v);
        }
        Ok(self
            .outputs
            .iter()
            .map(|&o| val[o])
            .collect::<Vec<_>>()
            .into())
    }

    /// Layer of every gate: inputs and constants sit in layer 1, every other
    /// gate one above its highest operand.
    pub fn layers(&self) -> Vec<usize> {
        let mut layer = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let l = gate.operands().map(|a| layer[a] + 1).max().unwrap_or(1);
            layer.push(l);
        }
        layer
    }

    /// `C^{i -> b}`: fixes input `i` (0-based) to `b` and propagates the
    /// constant. Inputs above `i` are renumbered down by one.
    ///
    /// Gates are visited in storage order, which is a linear extension of
    /// the layering, so a single forward pass sees every operand settled.
    pub fn restrict_input(&self, i: usize, b: bool) -> Result<Circuit> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                limit: self.n,
            });
        }
        let mut gates = Vec::with_capacity(self.gates.len());
        let mut wire = Vec::with_capacity(self.gates.len());
        let emit = |g: Gate, gates: &mut Vec<Gate>| {
            gates.push(g);
            Wire::Gate(gates.len() - 1)
        };
        for gate in &self.gates {
            let w = match *gate {
                Gate::Input(k) if k == i => Wire::Const(b),
                Gate::Input(k) => emit(Gate::Input(if k > i { k - 1 } else { k }), &mut gates),
                Gate::Const(c) => emit(Gate::Const(c), &mut gates),
                Gate::Not(a) => match wire[a] {
                    Wire::Const(c) => Wire::Const(!c),
                    Wire::Gate(ga) => emit(Gate::Not(ga), &mut gates),
                },
                Gate::And(a, c) => match (wire[a], wire[c]) {
                    (Wire::Const(false), _) | (_, Wire::Const(false)) => Wire::Const(false),
                    (Wire::Const(true), other) | (other, Wire::Const(true)) => other,
                    (Wire::Gate(ga), Wire::Gate(gc)) => emit(Gate::And(ga, gc), &mut gates),
                },
                Gate::Or(a, c) => match (wire[a], wire[c]) {
                    (Wire::Const(true), _) | (_, Wire::Const(true)) => Wire::Const(true),
                    (Wire::Const(false), other) | (other, Wire::Const(false)) => other,
                    (Wire::Gate(ga), Wire::Gate(gc)) => emit(Gate::Or(ga, gc), &mut gates),
                },
            };
            wire.push(w);
        }
        // Constants only need materialising where an output still reads them.
        let mut const_gate: [Option<usize>; 2] = [None, None];
        let outputs = self
            .outputs
            .iter()
            .map(|&o| match wire[o] {
                Wire::Gate(g) => g,
                Wire::Const(c) => *const_gate[c as usize].get_or_insert_with(|| {
                    gates.push(Gate::Const(c));
                    gates.len() - 1
                }),
            })
            .collect();
        Ok(Circuit {
            n: self.n - 1,
            gates,
            outputs,
        })
    }

    /// `C_{\j}`: drops output `j` (0-based) and deletes, back to front, every
    /// gate whose consumers have all been removed.
    pub fn restrict_output(&self, j: usize) -> Result<Circuit> {
        if j >= self.m() {
            return Err(Error::IndexOutOfRange {
                index: j,
                limit: self.m(),
            });
        }
        if self.m() == 1 {
            return Err(Error::LastOutput);
        }
        let mut outputs = self.outputs.clone();
        outputs.remove(j);
        Ok(self.prune_after(&outputs))
    }

    /// Keeps only the listed outputs (in the given order), then removes the
    /// gates that fed exclusively into dropped outputs.
    pub fn project_outputs(&self, keep: &[usize]) -> Result<Circuit> {
        if let Some(&bad) = keep.iter().find(|&&j| j >= self.m()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                limit: self.m(),
            });
        }
        let outputs: Vec<usize> = keep.iter().map(|&j| self.outputs[j]).collect();
        Ok(self.prune_after(&outputs))
    }

    fn prune_after(&self, outputs: &[usize]) -> Circuit {
        let len = self.gates.len();
        let mut before = vec![0usize; len];
        for g in &self.gates {
            for a in g.operands() {
                before[a] += 1;
            }
        }
        let mut after = before.clone();
        for &o in &self.outputs {
            before[o] += 1;
        }
        for &o in outputs {
            after[o] += 1;
        }
        let mut removed = vec![false; len];
        for idx in (0..len).rev() {
            let gate = self.gates[idx];
            if matches!(gate, Gate::Input(_)) {
                continue;
            }
            if before[idx] > 0 && after[idx] == 0 {
                removed[idx] = true;
                for a in gate.operands() {
                    after[a] -= 1;
                }
            }
        }
        let mut remap = vec![usize::MAX; len];
        let mut gates = Vec::with_capacity(len);
        for (idx, gate) in self.gates.iter().enumerate() {
            if removed[idx] {
                continue;
            }
            remap[idx] = gates.len();
            gates.push(match *gate {
                Gate::Not(a) => Gate::Not(remap[a]),
                Gate::And(a, b) => Gate::And(remap[a], remap[b]),
                Gate::Or(a, b) => Gate::Or(remap[a], remap[b]),
                other => other,
            });
        }
        Circuit {
            n: self.n,
            gates,
            outputs: outputs.iter().map(|&o| remap[o]).collect(),
        }
    }

    /// The output gate `j` when it is a constant.
    pub fn constant_output(&self, j: usize) -> Option<bool> {
        match self.gates[self.outputs[j]] {
            Gate::Const(b) => Some(b),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn and2() -> Circuit {
        Circuit::new(
            2,
            vec![Gate::Input(0), Gate::Input(1), Gate::And(0, 1)],
            vec![2],
        )
        .unwrap()
    }

    #[test]
    fn identity_and_not() {
        let id = Circuit::new(2, vec![Gate::Input(0), Gate::Input(1)], vec![0, 1]).unwrap();
        assert_eq!(id.evaluate(&bits("10")).unwrap(), bits("10"));
        let not = Circuit::new(1, vec![Gate::Input(0), Gate::Not(0)], vec![1]).unwrap();
        assert_eq!(not.evaluate(&bits("0")).unwrap(), bits("1"));
        assert!(matches!(
            not.evaluate(&bits("01")),
            Err(Error::Arity {
                expected: 1,
                got: 2
            })
        ));
    }

    #[test]
    fn rejects_forward_references() {
        assert!(Circuit::new(1, vec![Gate::Not(0)], vec![0]).is_err());
        assert!(Circuit::new(1, vec![Gate::Input(1)], vec![0]).is_err());
        assert!(Circuit::new(1, vec![Gate::Input(0)], vec![3]).is_err());
    }

    #[test]
    fn and_pass_through_on_one() {
        let r = and2().restrict_input(0, true).unwrap();
        assert_eq!(r.n(), 1);
        assert_eq!(r.gates(), &[Gate::Input(0)]);
        assert_eq!(r.outputs(), &[0]);
        assert!(r.size() < and2().size());
    }

    #[test]
    fn and_short_circuit_on_zero() {
        let r = and2().restrict_input(0, false).unwrap();
        assert_eq!(r.constant_output(0), Some(false));
        for y in BitString::all(1) {
            assert_eq!(r.evaluate(&y).unwrap(), bits("0"));
        }
    }

    #[test]
    fn or_rules() {
        let or = Circuit::new(
            2,
            vec![Gate::Input(0), Gate::Input(1), Gate::Or(0, 1)],
            vec![2],
        )
        .unwrap();
        assert_eq!(
            or.restrict_input(1, true).unwrap().constant_output(0),
            Some(true)
        );
        let pass = or.restrict_input(1, false).unwrap();
        assert_eq!(pass.gates(), &[Gate::Input(0)]);
    }

    #[test]
    fn restrict_input_out_of_range() {
        assert!(matches!(
            and2().restrict_input(2, true),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn output_restriction_drops_exclusive_cone() {
        let c = Circuit::new(1, vec![Gate::Input(0), Gate::Not(0)], vec![0, 1]).unwrap();
        let r = c.restrict_output(1).unwrap();
        assert_eq!(r.gates(), &[Gate::Input(0)]);
        assert_eq!(r.outputs(), &[0]);
        assert!(r.size() < c.size());
    }

    #[test]
    fn output_restriction_shared_cone() {
        let c = Circuit::new(
            2,
            vec![Gate::Input(0), Gate::Input(1), Gate::And(0, 1)],
            vec![2, 2],
        )
        .unwrap();
        let r = c.restrict_output(0).unwrap();
        assert_eq!(r.gates(), c.gates());
        assert_eq!(r.wire_count() + 1, c.wire_count());
    }

    #[test]
    fn cannot_remove_last_output() {
        assert_eq!(and2().restrict_output(0), Err(Error::LastOutput));
    }

    #[test]
    fn layers_increase_along_edges() {
        let c = Circuit::new(
            2,
            vec![
                Gate::Input(0),
                Gate::Input(1),
                Gate::Not(0),
                Gate::And(2, 1),
                Gate::Or(3, 0),
            ],
            vec![4],
        )
        .unwrap();
        assert_eq!(c.layers(), vec![1, 1, 2, 3, 4]);
    }
}
