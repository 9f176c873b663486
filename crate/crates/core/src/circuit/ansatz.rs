use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CircuitBuilder, CircuitSpec};
use crate::sim::GateKind;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AnsatzKind {
    StronglyEntangling,
    BasicEntangler,
    SimplifiedTwoDesign,
}

impl AnsatzKind {
    pub const ALL: [AnsatzKind; 3] = [
        AnsatzKind::StronglyEntangling,
        AnsatzKind::BasicEntangler,
        AnsatzKind::SimplifiedTwoDesign,
    ];

    /// Template name as used in result tables.
    pub fn name(self) -> &'static str {
        match self {
            AnsatzKind::StronglyEntangling => "StronglyEntanglingLayers",
            AnsatzKind::BasicEntangler => "BasicEntanglerLayers",
            AnsatzKind::SimplifiedTwoDesign => "SimplifiedTwoDesign",
        }
    }

    pub fn abbrev(self) -> &'static str {
        match self {
            AnsatzKind::StronglyEntangling => "SEL",
            AnsatzKind::BasicEntangler => "BEL",
            AnsatzKind::SimplifiedTwoDesign => "STD",
        }
    }

    pub fn param_count(self, layers: usize, qubits: usize) -> usize {
        match self {
            AnsatzKind::StronglyEntangling => 3 * layers * qubits,
            AnsatzKind::BasicEntangler => layers * qubits,
            AnsatzKind::SimplifiedTwoDesign => qubits + 2 * layers * (qubits - 1),
        }
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnsatzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AnsatzKind::ALL
            .into_iter()
            .find(|k| s.eq_ignore_ascii_case(k.name()) || s.eq_ignore_ascii_case(k.abbrev()))
            .ok_or_else(|| Error::invalid(format!("unknown ansatz `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnsatzFamily {
    pub kind: AnsatzKind,
    pub layers: usize,
    pub qubits: usize,
}

impl AnsatzFamily {
    pub fn new(kind: AnsatzKind, layers: usize, qubits: usize) -> Result<Self> {
        if layers < 1 || qubits < 1 {
            return Err(Error::invalid(format!(
                "ansatz needs L ≥ 1 and M ≥ 1 (got L={layers}, M={qubits})"
            )));
        }
        Ok(Self {
            kind,
            layers,
            qubits,
        })
    }

    pub fn param_count(&self) -> usize {
        self.kind.param_count(self.layers, self.qubits)
    }

    /// e.g. `StronglyEntanglingLayers-10`.
    pub fn name(&self) -> String {
        format!("{}-{}", self.kind.name(), self.layers)
    }

    pub fn build(&self, feature_dim: usize) -> Result<CircuitSpec> {
        build_ansatz(self, feature_dim)
    }
}

/// `L` repetitions of [RZ(x_j) on every qubit j] followed by one template layer.
///
/// Feature `j mod feature_dim` is loaded on qubit `j`. The simplified
/// two-design's initial RY layer precedes the first encoding block.
pub fn build_ansatz(family: &AnsatzFamily, feature_dim: usize) -> Result<CircuitSpec> {
    let AnsatzFamily {
        kind,
        layers,
        qubits: m,
    } = AnsatzFamily::new(family.kind, family.layers, family.qubits)?;
    if feature_dim == 0 {
        return Err(Error::invalid("feature dimension must be at least 1"));
    }
    let mut b = CircuitBuilder::new(m);

    if kind == AnsatzKind::SimplifiedTwoDesign {
        for q in 0..m {
            b.trainable(GateKind::Ry, &[q])?;
        }
    }

    for l in 0..layers {
        for q in 0..m {
            b.feature(GateKind::Rz, &[q], q % feature_dim)?;
        }
        match kind {
            AnsatzKind::StronglyEntangling => {
                for q in 0..m {
                    b.trainable(GateKind::Rot3, &[q])?;
                }
                if m >= 2 {
                    let r = (l % (m - 1)) + 1;
                    for q in 0..m {
                        b.fixed(GateKind::Cnot, &[q, (q + r) % m])?;
                    }
                }
            }
            AnsatzKind::BasicEntangler => {
                for q in 0..m {
                    b.trainable(GateKind::Rx, &[q])?;
                }
                match m {
                    1 => {}
                    2 => {
                        b.fixed(GateKind::Cnot, &[0, 1])?;
                    }
                    _ => {
                        for q in 0..m {
                            b.fixed(GateKind::Cnot, &[q, (q + 1) % m])?;
                        }
                    }
                }
            }
            AnsatzKind::SimplifiedTwoDesign => {
                for start in [0, 1] {
                    for a in (start..m.saturating_sub(1)).step_by(2) {
                        b.fixed(GateKind::Cz, &[a, a + 1])?;
                        b.trainable(GateKind::Ry, &[a])?;
                        b.trainable(GateKind::Ry, &[a + 1])?;
                    }
                }
            }
        }
    }
    let circuit = b.build()?;
    debug_assert_eq!(circuit.n_trainable(), family.param_count());
    Ok(circuit)
}
