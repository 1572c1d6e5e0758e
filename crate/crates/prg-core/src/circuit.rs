//! Layered AND/OR circuits with negations absorbed into input literals.
//!
//! Gates are stored in topological order; along every gate-to-gate wire the
//! kinds alternate, so depth equals the number of gate layers and NOT gates
//! never appear (and contribute no wires). Size is counted in wires: every
//! gate input contributes one wire, and a bare literal feeding a non-bottom
//! gate also contributes its own input wire.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{BitString, VarSet};
use crate::formula::{BooleanFn, CnfFormula, DnfFormula, Literal, Measures};
use crate::restriction::{Cell, Restriction};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("gate {gate} references gate {input} which is not earlier in the list")]
    NotTopological { gate: usize, input: usize },
    #[error("gate {gate} feeds gate {parent} of the same kind; layers must alternate")]
    NonAlternating { gate: usize, parent: usize },
    #[error("variable {var} out of range for dimension {dim}")]
    VariableOutOfRange { var: usize, dim: usize },
    #[error("output gate {output} out of range ({gates} gates)")]
    OutputOutOfRange { output: usize, gates: usize },
    #[error("circuit has no gates")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateKind {
    And,
    Or,
}

impl GateKind {
    fn identity(self) -> bool {
        matches!(self, GateKind::And)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateInput {
    Lit(Literal),
    Gate(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<GateInput>,
}

/// A bounded-depth circuit over AND/OR gates with literal inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ac0Circuit {
    n: usize,
    gates: Vec<Gate>,
    output: usize,
}

impl Ac0Circuit {
    pub fn new(n: usize, gates: Vec<Gate>, output: usize) -> Result<Self, CircuitError> {
        if gates.is_empty() {
            return Err(CircuitError::Empty);
        }
        if output >= gates.len() {
            return Err(CircuitError::OutputOutOfRange { output, gates: gates.len() });
        }
        for (g, gate) in gates.iter().enumerate() {
            for input in &gate.inputs {
                match *input {
                    GateInput::Gate(i) => {
                        if i >= g {
                            return Err(CircuitError::NotTopological { gate: g, input: i });
                        }
                        if gates[i].kind == gate.kind {
                            return Err(CircuitError::NonAlternating { gate: i, parent: g });
                        }
                    }
                    GateInput::Lit(l) => {
                        if l.var >= n {
                            return Err(CircuitError::VariableOutOfRange { var: l.var, dim: n });
                        }
                    }
                }
            }
        }
        Ok(Ac0Circuit { n, gates, output })
    }

    /// A constant circuit: an empty AND (1) or an empty OR (0).
    pub fn constant(n: usize, value: bool) -> Self {
        let kind = if value { GateKind::And } else { GateKind::Or };
        Ac0Circuit { n, gates: vec![Gate { kind, inputs: Vec::new() }], output: 0 }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    /// Per-gate layer: 1 + the maximum layer of its gate inputs.
    fn gate_depths(&self) -> Vec<usize> {
        let mut depths = vec![1usize; self.gates.len()];
        for (g, gate) in self.gates.iter().enumerate() {
            for input in &gate.inputs {
                if let GateInput::Gate(i) = *input {
                    depths[g] = depths[g].max(depths[i] + 1);
                }
            }
        }
        depths
    }

    pub fn depth(&self) -> usize {
        self.gate_depths()[self.output]
    }

    pub fn measures(&self) -> Measures {
        let depths = self.gate_depths();
        let mut wires = 0usize;
        let mut width = 0usize;
        for (g, gate) in self.gates.iter().enumerate() {
            if depths[g] == 1 {
                width = width.max(gate.inputs.len());
            }
            for input in &gate.inputs {
                wires += match input {
                    GateInput::Gate(_) => 1,
                    // A literal into a bottom gate is a single input wire; a
                    // bare literal higher up also pays for its input wire.
                    GateInput::Lit(_) => {
                        if depths[g] == 1 {
                            1
                        } else {
                            width = width.max(1);
                            2
                        }
                    }
                };
            }
        }
        Measures { size_wires: wires, width, depth: depths[self.output] }
    }

    pub fn size_wires(&self) -> usize {
        self.measures().size_wires
    }

    pub fn support(&self) -> VarSet {
        let mut s = VarSet::empty(self.n);
        for gate in &self.gates {
            for input in &gate.inputs {
                if let GateInput::Lit(l) = input {
                    s.insert(l.var);
                }
            }
        }
        s
    }

    /// Evaluates the circuit on a partial assignment with three-valued logic;
    /// `None` means the output is not determined by the fixed coordinates.
    pub fn eval_partial(&self, rho: &Restriction) -> Option<bool> {
        let mut values: Vec<Option<bool>> = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let mut acc = Some(gate.kind.identity());
            for input in &gate.inputs {
                let v = match *input {
                    GateInput::Lit(l) => match rho.get(l.var) {
                        Cell::Star => None,
                        Cell::Zero => Some(l.satisfied_by(false)),
                        Cell::One => Some(l.satisfied_by(true)),
                    },
                    GateInput::Gate(i) => values[i],
                };
                acc = match (gate.kind, acc, v) {
                    (GateKind::And, Some(false), _) | (GateKind::And, _, Some(false)) => {
                        Some(false)
                    }
                    (GateKind::Or, Some(true), _) | (GateKind::Or, _, Some(true)) => Some(true),
                    (_, Some(a), Some(b)) => Some(match gate.kind {
                        GateKind::And => a && b,
                        GateKind::Or => a || b,
                    }),
                    _ => None,
                };
            }
            values.push(acc);
        }
        values[self.output]
    }
}

impl BooleanFn for Ac0Circuit {
    fn dimension(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &BitString) -> bool {
        let mut values: Vec<bool> = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let mut acc = gate.kind.identity();
            for input in &gate.inputs {
                let v = match *input {
                    GateInput::Lit(l) => l.satisfied_by(x.get(l.var)),
                    GateInput::Gate(i) => values[i],
                };
                acc = match gate.kind {
                    GateKind::And => acc && v,
                    GateKind::Or => acc || v,
                };
            }
            values.push(acc);
        }
        values[self.output]
    }

    fn eval_block(&self, cols: &[u64]) -> u64 {
        let mut values: Vec<u64> = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let mut acc = if gate.kind.identity() { u64::MAX } else { 0 };
            for input in &gate.inputs {
                let v = match *input {
                    GateInput::Lit(l) => {
                        if l.negated {
                            !cols[l.var]
                        } else {
                            cols[l.var]
                        }
                    }
                    GateInput::Gate(i) => values[i],
                };
                acc = match gate.kind {
                    GateKind::And => acc & v,
                    GateKind::Or => acc | v,
                };
            }
            values.push(acc);
        }
        values[self.output]
    }
}

impl From<&DnfFormula> for Ac0Circuit {
    fn from(f: &DnfFormula) -> Self {
        let n = f.dimension();
        let mut gates = Vec::new();
        let mut top_inputs = Vec::new();
        for term in f.terms() {
            if term.len() == 1 {
                top_inputs.push(GateInput::Lit(term.literals()[0]));
            } else {
                gates.push(Gate {
                    kind: GateKind::And,
                    inputs: term.literals().iter().map(|&l| GateInput::Lit(l)).collect(),
                });
                top_inputs.push(GateInput::Gate(gates.len() - 1));
            }
        }
        gates.push(Gate { kind: GateKind::Or, inputs: top_inputs });
        let output = gates.len() - 1;
        Ac0Circuit { n, gates, output }
    }
}

impl From<&CnfFormula> for Ac0Circuit {
    fn from(f: &CnfFormula) -> Self {
        let n = f.dimension();
        let mut gates = Vec::new();
        let mut top_inputs = Vec::new();
        for clause in f.clauses() {
            if clause.len() == 1 {
                top_inputs.push(GateInput::Lit(clause.literals()[0]));
            } else {
                gates.push(Gate {
                    kind: GateKind::Or,
                    inputs: clause.literals().iter().map(|&l| GateInput::Lit(l)).collect(),
                });
                top_inputs.push(GateInput::Gate(gates.len() - 1));
            }
        }
        gates.push(Gate { kind: GateKind::And, inputs: top_inputs });
        let output = gates.len() - 1;
        Ac0Circuit { n, gates, output }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Term;

    fn dnf(n: usize, terms: &[&[(usize, bool)]]) -> DnfFormula {
        let terms = terms
            .iter()
            .map(|lits| {
                Term::new(lits.iter().map(|&(v, neg)| Literal { var: v, negated: neg }).collect())
                    .unwrap()
            })
            .collect();
        DnfFormula::new(n, terms).unwrap()
    }

    #[test]
    fn constant_circuit() {
        let one = Ac0Circuit::constant(4, true);
        let zero = Ac0Circuit::constant(4, false);
        for v in 0..16u64 {
            let x = BitString::from_u64(4, v);
            assert!(one.eval(&x));
            assert!(!zero.eval(&x));
        }
    }

    #[test]
    fn dnf_conversion_matches_and_counts_wires() {
        let f = dnf(3, &[&[(0, false), (1, false)], &[(2, false)]]);
        let c = Ac0Circuit::from(&f);
        assert_eq!(c.size_wires(), 5);
        assert_eq!(c.depth(), 2);
        assert_eq!(c.measures().size_wires, f.size_wires());
        for v in 0..8u64 {
            let x = BitString::from_u64(3, v);
            assert_eq!(c.eval(&x), f.eval(&x));
        }
    }

    #[test]
    fn alternation_enforced() {
        let gates = vec![
            Gate { kind: GateKind::And, inputs: vec![GateInput::Lit(Literal::pos(0))] },
            Gate { kind: GateKind::And, inputs: vec![GateInput::Gate(0)] },
        ];
        assert_eq!(
            Ac0Circuit::new(1, gates, 1),
            Err(CircuitError::NonAlternating { gate: 0, parent: 1 })
        );
    }

    #[test]
    fn depth_three_circuit() {
        // AND( OR(x0, x1), OR(¬x2 ∧ x3 ... ) ) shaped: OR of ANDs feeding an AND.
        let gates = vec![
            Gate {
                kind: GateKind::And,
                inputs: vec![GateInput::Lit(Literal::pos(0)), GateInput::Lit(Literal::pos(1))],
            },
            Gate {
                kind: GateKind::Or,
                inputs: vec![GateInput::Gate(0), GateInput::Lit(Literal::neg(2))],
            },
            Gate {
                kind: GateKind::And,
                inputs: vec![GateInput::Gate(1), GateInput::Lit(Literal::pos(3))],
            },
        ];
        let c = Ac0Circuit::new(4, gates, 2).unwrap();
        assert_eq!(c.depth(), 3);
        // wires: gate0: 2; gate1: 1 (gate) + 2 (bare literal) = 3; gate2: 1 + 2 = 3.
        assert_eq!(c.size_wires(), 8);
        let x = BitString::parse_binary("1101").unwrap();
        assert!(c.eval(&x));
        let x = BitString::parse_binary("0110").unwrap();
        assert!(!c.eval(&x));
    }

    #[test]
    fn eval_block_matches_scalar() {
        let gates = vec![
            Gate {
                kind: GateKind::And,
                inputs: vec![GateInput::Lit(Literal::pos(0)), GateInput::Lit(Literal::neg(4))],
            },
            Gate {
                kind: GateKind::Or,
                inputs: vec![GateInput::Gate(0), GateInput::Lit(Literal::pos(2))],
            },
        ];
        let c = Ac0Circuit::new(6, gates, 1).unwrap();
        let support: Vec<usize> = (0..6).collect();
        let cols = crate::formula::enumeration_columns(6, &support, None, 0);
        let block = c.eval_block(&cols);
        for lane in 0..64u64 {
            let x = BitString::from_fn(6, |v| (lane >> v) & 1 == 1);
            assert_eq!((block >> lane) & 1 == 1, c.eval(&x));
        }
    }
}
