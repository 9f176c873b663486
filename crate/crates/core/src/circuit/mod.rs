//! Circuit descriptions: validated gate lists, the three fixed ansatz
//! families with per-layer data re-uploading, and GA chromosome decoding.

mod ansatz;
pub(crate) mod chromosome;

pub use ansatz::{build_ansatz, AnsatzFamily, AnsatzKind};
pub use chromosome::{decode_chromosome, random_chromosome, Chromosome};

use serde::{Deserialize, Serialize};

use crate::sim::{AngleSource, GateKind, GateOp};
use crate::{Error, Result};

/// An ordered gate list over `n_qubits` wires.
///
/// Trainable slots are numbered `0..n_trainable` in gate order; this is
/// checked on construction so a spec can always be evaluated against a
/// parameter vector of length [`CircuitSpec::n_trainable`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit", into = "RawCircuit")]
pub struct CircuitSpec {
    n_qubits: usize,
    gates: Vec<GateOp>,
    n_trainable: usize,
}

#[derive(Serialize, Deserialize)]
struct RawCircuit {
    n_qubits: usize,
    gates: Vec<GateOp>,
}

impl TryFrom<RawCircuit> for CircuitSpec {
    type Error = Error;

    fn try_from(raw: RawCircuit) -> Result<Self> {
        CircuitSpec::new(raw.n_qubits, raw.gates)
    }
}

impl From<CircuitSpec> for RawCircuit {
    fn from(c: CircuitSpec) -> Self {
        RawCircuit {
            n_qubits: c.n_qubits,
            gates: c.gates,
        }
    }
}

impl CircuitSpec {
    pub fn new(n_qubits: usize, gates: Vec<GateOp>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::invalid("a circuit needs at least one qubit"));
        }
        let mut next = 0;
        for (pos, g) in gates.iter().enumerate() {
            g.check_wires(n_qubits)?;
            if g.angles.len() != g.kind.arity() {
                return Err(Error::invalid(format!("gate {pos}: wrong angle count")));
            }
            if g.wires.len() != g.kind.n_wires()
                || (g.kind.is_controlled() && g.wires[0] == g.wires[1])
            {
                return Err(Error::invalid(format!("gate {pos}: bad wire list")));
            }
            for a in &g.angles {
                if let AngleSource::Trainable(i) = *a {
                    if i != next {
                        return Err(Error::invalid(format!(
                            "gate {pos}: trainable index {i} out of order (expected {next})"
                        )));
                    }
                    next += 1;
                }
            }
        }
        Ok(Self {
            n_qubits,
            gates,
            n_trainable: next,
        })
    }

    pub fn empty(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, Vec::new())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn n_trainable(&self) -> usize {
        self.n_trainable
    }

    /// Number of gates reading a feature angle.
    pub fn n_feature_gates(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| g.angles.iter().any(|a| matches!(a, AngleSource::Feature(_))))
            .count()
    }

    pub fn n_two_qubit_gates(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Compact one-line rendering, e.g. `RY(θ0) q0; CNOT q0,q1`.
    pub fn describe(&self) -> String {
        self.gates
            .iter()
            .map(|g| {
                let name = format!("{:?}", g.kind).to_uppercase();
                let args: Vec<String> = g
                    .angles
                    .iter()
                    .map(|a| match a {
                        AngleSource::Trainable(i) => format!("θ{i}"),
                        AngleSource::Feature(i) => format!("x{i}"),
                        AngleSource::Constant(v) => format!("{v}"),
                    })
                    .collect();
                let wires: Vec<String> = g.wires.iter().map(|w| format!("q{w}")).collect();
                if args.is_empty() {
                    format!("{name} {}", wires.join(","))
                } else {
                    format!("{name}({}) {}", args.join(","), wires.join(","))
                }
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

pub fn count_params(circuit: &CircuitSpec) -> usize {
    circuit.n_trainable()
}

/// Appends gates while numbering trainable and feature slots sequentially.
#[derive(Debug)]
pub struct CircuitBuilder {
    n_qubits: usize,
    gates: Vec<GateOp>,
    next_param: usize,
    next_feature: usize,
}

impl CircuitBuilder {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
            next_param: 0,
            next_feature: 0,
        }
    }

    pub fn fixed(&mut self, kind: GateKind, wires: &[usize]) -> Result<&mut Self> {
        self.gates.push(GateOp::fixed(kind, wires)?);
        Ok(self)
    }

    /// Append a gate whose angles are all fresh trainable parameters.
    pub fn trainable(&mut self, kind: GateKind, wires: &[usize]) -> Result<&mut Self> {
        let angles = (0..kind.arity())
            .map(|k| AngleSource::Trainable(self.next_param + k))
            .collect();
        self.gates.push(GateOp::new(kind, wires.to_vec(), angles)?);
        self.next_param += kind.arity();
        Ok(self)
    }

    /// Append a one-angle gate reading the next feature in sequence.
    pub fn next_feature(&mut self, kind: GateKind, wires: &[usize]) -> Result<&mut Self> {
        let idx = self.next_feature;
        self.feature(kind, wires, idx)?;
        self.next_feature += 1;
        Ok(self)
    }

    /// Append a one-angle gate reading a specific feature index.
    pub fn feature(&mut self, kind: GateKind, wires: &[usize], index: usize) -> Result<&mut Self> {
        self.gates
            .push(GateOp::new(kind, wires.to_vec(), vec![AngleSource::Feature(index)])?);
        Ok(self)
    }

    pub fn build(self) -> Result<CircuitSpec> {
        CircuitSpec::new(self.n_qubits, self.gates)
    }
}
