use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CircuitBuilder, CircuitSpec};
use crate::rng;
use crate::sim::GateKind;
use crate::{Error, Result};

/// Integer encoding of a circuit: gate IDs ‖ control wires ‖ target wires,
/// each segment `n_gates` long.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawChromosome", into = "RawChromosome")]
pub struct Chromosome {
    n_gates: usize,
    n_qubits: usize,
    genes: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct RawChromosome {
    n_gates: usize,
    n_qubits: usize,
    genes: Vec<u32>,
}

impl TryFrom<RawChromosome> for Chromosome {
    type Error = Error;

    fn try_from(r: RawChromosome) -> Result<Self> {
        Chromosome::new(r.n_gates, r.n_qubits, r.genes)
    }
}

impl From<Chromosome> for RawChromosome {
    fn from(c: Chromosome) -> Self {
        RawChromosome {
            n_gates: c.n_gates,
            n_qubits: c.n_qubits,
            genes: c.genes,
        }
    }
}

impl Chromosome {
    pub fn new(n_gates: usize, n_qubits: usize, genes: Vec<u32>) -> Result<Self> {
        if n_gates == 0 || n_qubits == 0 {
            return Err(Error::invalid("chromosome needs n_gates ≥ 1 and n_qubits ≥ 1"));
        }
        if genes.len() != 3 * n_gates {
            return Err(Error::invalid(format!(
                "expected {} genes for {n_gates} gates, got {}",
                3 * n_gates,
                genes.len()
            )));
        }
        let limit = Self::gate_alphabet(n_qubits);
        if let Some((i, g)) = genes[..n_gates].iter().enumerate().find(|(_, &g)| g >= limit) {
            return Err(Error::invalid(format!(
                "gate id {g} at position {i} outside alphabet 0..{limit}"
            )));
        }
        Ok(Self {
            n_gates,
            n_qubits,
            genes,
        })
    }

    /// Build from the gate-ID segment alone; wire segments are zero.
    pub fn from_gate_ids(n_qubits: usize, ids: &[u32]) -> Result<Self> {
        let mut genes = ids.to_vec();
        genes.resize(3 * ids.len(), 0);
        Self::new(ids.len(), n_qubits, genes)
    }

    /// Number of gate symbols: 7 for one qubit, 14 otherwise.
    pub fn gate_alphabet(n_qubits: usize) -> u32 {
        if n_qubits == 1 {
            7
        } else {
            14
        }
    }

    /// Exclusive upper bound of the values drawn at `position`.
    pub fn alphabet_at(&self, position: usize) -> u32 {
        if position < self.n_gates {
            Self::gate_alphabet(self.n_qubits)
        } else {
            self.n_qubits as u32
        }
    }

    pub fn n_gates(&self) -> usize {
        self.n_gates
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn genes(&self) -> &[u32] {
        &self.genes
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn gate_ids(&self) -> &[u32] {
        &self.genes[..self.n_gates]
    }

    /// Same layout and alphabets as `self`.
    pub(crate) fn with_genes(&self, genes: Vec<u32>) -> Result<Self> {
        Self::new(self.n_gates, self.n_qubits, genes)
    }

    pub fn decode(&self) -> Result<CircuitSpec> {
        decode_chromosome(self)
    }
}

pub fn random_chromosome(n_gates: usize, n_qubits: usize, seed: u64) -> Result<Chromosome> {
    random_chromosome_with(n_gates, n_qubits, &mut rng::rng(seed))
}

pub(crate) fn random_chromosome_with<R: Rng>(
    n_gates: usize,
    n_qubits: usize,
    rng: &mut R,
) -> Result<Chromosome> {
    if n_gates == 0 || n_qubits == 0 {
        return Err(Error::invalid("chromosome needs n_gates ≥ 1 and n_qubits ≥ 1"));
    }
    let gate_limit = Chromosome::gate_alphabet(n_qubits);
    let genes = (0..3 * n_gates)
        .map(|i| {
            let limit = if i < n_gates { gate_limit } else { n_qubits as u32 };
            rng.gen_range(0..limit)
        })
        .collect();
    Chromosome::new(n_gates, n_qubits, genes)
}

/// Decode a chromosome into a circuit. Trainable and feature indices are
/// assigned in gate order.
pub fn decode_chromosome(c: &Chromosome) -> Result<CircuitSpec> {
    let n = c.n_gates;
    let q = c.n_qubits;
    let limit = Chromosome::gate_alphabet(q);
    let mut b = CircuitBuilder::new(q);
    for i in 0..n {
        let g = c.genes[i];
        if g >= limit {
            return Err(Error::invalid(format!("gate id {g} outside alphabet 0..{limit}")));
        }
        if q == 1 {
            match g {
                0 => {}
                1 => _ = b.trainable(GateKind::Rx, &[0])?,
                2 => _ = b.trainable(GateKind::Ry, &[0])?,
                3 => _ = b.trainable(GateKind::Rz, &[0])?,
                4 => _ = b.next_feature(GateKind::Rx, &[0])?,
                5 => _ = b.next_feature(GateKind::Ry, &[0])?,
                6 => _ = b.next_feature(GateKind::Rz, &[0])?,
                _ => unreachable!(),
            }
            continue;
        }
        let ctl = c.genes[n + i] as usize % q;
        let tgt = c.genes[2 * n + i] as usize % q;
        let distinct = ctl != tgt;
        let rot = |k: u32| match k {
            0 => (GateKind::Rx, GateKind::Crx),
            1 => (GateKind::Ry, GateKind::Cry),
            _ => (GateKind::Rz, GateKind::Crz),
        };
        match g {
            0 => {}
            1..=3 => _ = b.trainable(rot(g - 1).0, &[tgt])?,
            // CNOT with control == target is undefined; skip it.
            4 if distinct => _ = b.fixed(GateKind::Cnot, &[ctl, tgt])?,
            4 => {}
            5..=7 if distinct => _ = b.trainable(rot(g - 5).1, &[ctl, tgt])?,
            5..=7 => _ = b.trainable(rot(g - 5).0, &[tgt])?,
            8..=10 => _ = b.next_feature(rot(g - 8).0, &[tgt])?,
            11..=13 if distinct => _ = b.next_feature(rot(g - 11).1, &[ctl, tgt])?,
            11..=13 => _ = b.next_feature(rot(g - 11).0, &[tgt])?,
            _ => unreachable!(),
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::AngleSource::{Feature as X, Trainable as T};

    fn kinds_and_angles(c: &CircuitSpec) -> Vec<(GateKind, Vec<crate::sim::AngleSource>)> {
        c.gates().iter().map(|g| (g.kind, g.angles.clone())).collect()
    }

    #[test]
    fn single_qubit_worked_example() {
        let chrom = Chromosome::from_gate_ids(1, &[2, 4, 1, 6, 5]).unwrap();
        let c = chrom.decode().unwrap();
        assert_eq!(
            kinds_and_angles(&c),
            vec![
                (GateKind::Ry, vec![T(0)]),
                (GateKind::Rx, vec![X(0)]),
                (GateKind::Rx, vec![T(1)]),
                (GateKind::Rz, vec![X(1)]),
                (GateKind::Ry, vec![X(2)]),
            ]
        );
        assert_eq!(c.n_trainable(), 2);
    }

    #[test]
    fn zero_gene_is_no_op() {
        let c = Chromosome::new(1, 2, vec![0, 0, 1]).unwrap().decode().unwrap();
        assert!(c.gates().is_empty());
    }

    #[test]
    fn cnot_with_equal_wires_is_skipped() {
        let c = Chromosome::new(1, 2, vec![4, 1, 1]).unwrap().decode().unwrap();
        assert!(c.gates().is_empty());
        let c = Chromosome::new(1, 2, vec![4, 1, 0]).unwrap().decode().unwrap();
        assert_eq!(c.gates()[0].kind, GateKind::Cnot);
        assert_eq!(c.gates()[0].wires, vec![1, 0]);
    }

    #[test]
    fn two_qubit_rule_table() {
        // (gate, control, target) → expected kind and wires
        let cases = [
            (1, 0, 1, GateKind::Rx, vec![1]),
            (2, 1, 0, GateKind::Ry, vec![0]),
            (3, 0, 0, GateKind::Rz, vec![0]),
            (5, 0, 1, GateKind::Crx, vec![0, 1]),
            (6, 1, 0, GateKind::Cry, vec![1, 0]),
            (7, 0, 1, GateKind::Crz, vec![0, 1]),
            (5, 1, 1, GateKind::Rx, vec![1]),
            (6, 0, 0, GateKind::Ry, vec![0]),
            (7, 1, 1, GateKind::Rz, vec![1]),
            (8, 0, 1, GateKind::Rx, vec![1]),
            (9, 0, 1, GateKind::Ry, vec![1]),
            (10, 1, 0, GateKind::Rz, vec![0]),
            (11, 0, 1, GateKind::Crx, vec![0, 1]),
            (12, 1, 0, GateKind::Cry, vec![1, 0]),
            (13, 0, 1, GateKind::Crz, vec![0, 1]),
            (11, 0, 0, GateKind::Rx, vec![0]),
            (12, 1, 1, GateKind::Ry, vec![1]),
            (13, 0, 0, GateKind::Rz, vec![0]),
        ];
        for (g, ctl, tgt, kind, wires) in cases {
            let c = Chromosome::new(1, 2, vec![g, ctl, tgt]).unwrap().decode().unwrap();
            assert_eq!(c.gates().len(), 1, "gene {g}");
            assert_eq!(c.gates()[0].kind, kind, "gene {g}");
            assert_eq!(c.gates()[0].wires, wires, "gene {g}");
            let is_feature = g >= 8;
            assert_eq!(c.n_trainable(), usize::from(!is_feature), "gene {g}");
        }
    }

    #[test]
    fn wire_genes_reduce_modulo_width() {
        let c = Chromosome::new(1, 2, vec![5, 4, 7]).unwrap().decode().unwrap();
        assert_eq!(c.gates()[0].kind, GateKind::Crx);
        assert_eq!(c.gates()[0].wires, vec![0, 1]);
    }

    #[test]
    fn alphabet_is_enforced() {
        assert!(Chromosome::from_gate_ids(1, &[7]).is_err());
        assert!(Chromosome::from_gate_ids(2, &[13]).is_ok());
        assert!(Chromosome::from_gate_ids(2, &[14]).is_err());
        assert!(Chromosome::new(2, 1, vec![0; 5]).is_err());
        assert!(serde_json::from_str::<Chromosome>(r#"{"n_gates":1,"n_qubits":1,"genes":[9,0,0]}"#).is_err());
    }

    #[test]
    fn random_chromosomes_respect_alphabet_and_seed() {
        let a = random_chromosome(5, 1, 3).unwrap();
        assert!(a.gate_ids().iter().all(|&g| g <= 6));
        assert_eq!(a, random_chromosome(5, 1, 3).unwrap());
        let b = random_chromosome(120, 2, 9).unwrap();
        assert_eq!(b.len(), 360);
        assert!(b.genes()[120..].iter().all(|&w| w < 2));
        assert!(b.gate_ids().iter().all(|&g| g < 14));
    }

    #[test]
    fn json_shape() {
        let c = Chromosome::from_gate_ids(1, &[2, 4]).unwrap();
        let v: serde_json::Value = serde_json::to_value(&c).unwrap();
        assert_eq!(v["n_gates"], 2);
        assert_eq!(v["n_qubits"], 1);
        assert_eq!(v["genes"], serde_json::json!([2, 4, 0, 0, 0, 0]));
    }
}
