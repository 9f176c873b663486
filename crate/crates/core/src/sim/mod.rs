//! Dense statevector simulation of parametrized circuits.
//!
//! Basis-index convention: wire 0 is the most significant bit, so the ket
//! `|q0 q1⟩` reads left to right as the binary index.

mod adjoint;
mod kernel;

pub use adjoint::{expectation_and_gradient, gradient_adjoint, run_circuit, Tape};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};
use kernel::{apply_mat2, gate_prims};

/// Tolerance used when validating externally supplied amplitudes.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` wires.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state with the given index.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::invalid("a state needs at least one qubit"));
        }
        if n_qubits >= usize::BITS as usize - 1 {
            return Err(Error::invalid(format!("{n_qubits} qubits cannot be addressed")));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::invalid(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wrap raw amplitudes, checking the length and normalization.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 || amps.len() != 1usize << n_qubits {
            return Err(Error::invalid(format!(
                "{} amplitudes do not describe {n_qubits} qubits",
                amps.len()
            )));
        }
        let s = Self { n_qubits, amps };
        if (s.norm_sqr() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(format!(
                "amplitudes are not normalized (|ψ|² = {})",
                s.norm_sqr()
            )));
        }
        Ok(s)
    }

    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// ⟨Z⟩ on `wire`: Σ_b ±|a_b|², + when bit `wire` of `b` is 0.
    pub fn expectation_z(&self, wire: usize) -> Result<f64> {
        if wire >= self.n_qubits {
            return Err(Error::invalid(format!(
                "wire {wire} out of range for {} qubits",
                self.n_qubits
            )));
        }
        Ok(kernel::expectation_z(&self.amps, self.n_qubits, wire))
    }

    /// Apply one gate with already-resolved angles and return the new state.
    pub fn apply_gate(&self, gate: &GateOp, angles: &[f64]) -> Result<StateVector> {
        gate.check_wires(self.n_qubits)?;
        if angles.len() != gate.kind.arity() {
            return Err(Error::invalid(format!(
                "{:?} takes {} angle(s), got {}",
                gate.kind,
                gate.kind.arity(),
                angles.len()
            )));
        }
        let mut out = self.clone();
        for (target, control, m) in gate_prims(gate, angles) {
            apply_mat2(&mut out.amps, self.n_qubits, target, control, &m);
        }
        Ok(out)
    }
}

pub fn zero_state(n_qubits: usize) -> Result<StateVector> {
    StateVector::zero_state(n_qubits)
}

pub fn apply_gate(state: &StateVector, gate: &GateOp, angles: &[f64]) -> Result<StateVector> {
    state.apply_gate(gate, angles)
}

pub fn expectation_z(state: &StateVector, wire: usize) -> Result<f64> {
    state.expectation_z(wire)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GateKind {
    Identity,
    PauliX,
    Hadamard,
    Rx,
    Ry,
    Rz,
    /// RZ(α), then RY(β), then RZ(γ), applied in that order.
    Rot3,
    Cnot,
    Cz,
    Crx,
    Cry,
    Crz,
}

impl GateKind {
    /// Number of angles the gate consumes.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Rx
            | GateKind::Ry
            | GateKind::Rz
            | GateKind::Crx
            | GateKind::Cry
            | GateKind::Crz => 1,
            GateKind::Rot3 => 3,
            GateKind::Identity
            | GateKind::PauliX
            | GateKind::Hadamard
            | GateKind::Cnot
            | GateKind::Cz => 0,
        }
    }

    pub fn n_wires(self) -> usize {
        if self.is_controlled() {
            2
        } else {
            1
        }
    }

    pub fn is_controlled(self) -> bool {
        matches!(
            self,
            GateKind::Cnot | GateKind::Cz | GateKind::Crx | GateKind::Cry | GateKind::Crz
        )
    }
}

/// Where a gate angle comes from at evaluation time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleSource {
    Trainable(usize),
    /// Resolved as `features[index % d]`.
    Feature(usize),
    Constant(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    /// Control first for controlled gates.
    pub wires: Vec<usize>,
    pub angles: Vec<AngleSource>,
}

impl GateOp {
    pub fn new(kind: GateKind, wires: Vec<usize>, angles: Vec<AngleSource>) -> Result<Self> {
        if angles.len() != kind.arity() {
            return Err(Error::invalid(format!(
                "{kind:?} takes {} angle(s), got {}",
                kind.arity(),
                angles.len()
            )));
        }
        if wires.len() != kind.n_wires() {
            return Err(Error::invalid(format!(
                "{kind:?} acts on {} wire(s), got {}",
                kind.n_wires(),
                wires.len()
            )));
        }
        if kind.is_controlled() && wires[0] == wires[1] {
            return Err(Error::invalid(format!(
                "{kind:?} needs distinct control and target wires"
            )));
        }
        Ok(Self {
            kind,
            wires,
            angles,
        })
    }

    /// Shorthand for a gate without angles.
    pub fn fixed(kind: GateKind, wires: &[usize]) -> Result<Self> {
        Self::new(kind, wires.to_vec(), Vec::new())
    }

    pub(crate) fn check_wires(&self, n_qubits: usize) -> Result<()> {
        if let Some(&w) = self.wires.iter().find(|&&w| w >= n_qubits) {
            return Err(Error::invalid(format!(
                "wire {w} out of range for {n_qubits} qubits"
            )));
        }
        Ok(())
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.is_controlled()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn zero_state_layout() {
        assert_eq!(zero_state(1).unwrap().amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let z2 = zero_state(2).unwrap();
        assert_eq!(z2.amplitudes().len(), 4);
        assert_eq!(z2.amplitudes()[0], c(1.0, 0.0));
        assert!(z2.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
        assert!(matches!(zero_state(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn hadamard_on_zero() {
        let h = GateOp::fixed(GateKind::Hadamard, &[0]).unwrap();
        let s = zero_state(1).unwrap().apply_gate(&h, &[]).unwrap();
        assert!(close(
            s.amplitudes(),
            &[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
            1e-12
        ));
        assert!(s.expectation_z(0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn cnot_truth_table() {
        let cnot = GateOp::fixed(GateKind::Cnot, &[0, 1]).unwrap();
        // |00>→|00>, |01>→|01>, |10>→|11>, |11>→|10>
        for (input, expected) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            let s = StateVector::basis(2, input).unwrap();
            let out = s.apply_gate(&cnot, &[]).unwrap();
            assert_eq!(out, StateVector::basis(2, expected).unwrap());
        }
    }

    #[test]
    fn rx_zero_is_identity() {
        let h = GateOp::fixed(GateKind::Hadamard, &[0]).unwrap();
        let rx = GateOp::new(GateKind::Rx, vec![0], vec![AngleSource::Constant(0.0)]).unwrap();
        let s = zero_state(1).unwrap().apply_gate(&h, &[]).unwrap();
        assert_eq!(s.apply_gate(&rx, &[0.0]).unwrap(), s);
    }

    #[test]
    fn rx_pi_flips_with_phase() {
        let rx = GateOp::new(GateKind::Rx, vec![0], vec![AngleSource::Trainable(0)]).unwrap();
        let s = zero_state(1).unwrap().apply_gate(&rx, &[PI]).unwrap();
        assert!(close(s.amplitudes(), &[c(0.0, 0.0), c(0.0, -1.0)], 1e-15));
    }

    #[test]
    fn expectation_of_basis_states() {
        assert_eq!(zero_state(1).unwrap().expectation_z(0).unwrap(), 1.0);
        assert_eq!(StateVector::basis(1, 1).unwrap().expectation_z(0).unwrap(), -1.0);
        // |10>: wire 0 is flipped, wire 1 is not
        let s = StateVector::basis(2, 2).unwrap();
        assert_eq!(s.expectation_z(0).unwrap(), -1.0);
        assert_eq!(s.expectation_z(1).unwrap(), 1.0);
        assert!(s.expectation_z(2).is_err());
    }

    #[test]
    fn arity_and_wire_errors() {
        assert!(GateOp::new(GateKind::Rx, vec![0], vec![]).is_err());
        assert!(GateOp::new(GateKind::Rot3, vec![0], vec![AngleSource::Constant(0.0)]).is_err());
        assert!(GateOp::fixed(GateKind::Cnot, &[1, 1]).is_err());
        assert!(GateOp::fixed(GateKind::Cnot, &[0]).is_err());
        let x = GateOp::fixed(GateKind::PauliX, &[3]).unwrap();
        assert!(zero_state(2).unwrap().apply_gate(&x, &[]).is_err());
        let rx = GateOp::new(GateKind::Rx, vec![0], vec![AngleSource::Constant(0.0)]).unwrap();
        assert!(zero_state(1).unwrap().apply_gate(&rx, &[]).is_err());
    }

    #[test]
    fn controlled_rotation_inactive_on_control_zero() {
        for kind in [GateKind::Crx, GateKind::Cry, GateKind::Crz] {
            let g = GateOp::new(kind, vec![0, 1], vec![AngleSource::Constant(0.0)]).unwrap();
            // control |0>, target in superposition
            let h = GateOp::fixed(GateKind::Hadamard, &[1]).unwrap();
            let s = zero_state(2).unwrap().apply_gate(&h, &[]).unwrap();
            let out = s.apply_gate(&g, &[1.234]).unwrap();
            assert!(close(out.amplitudes(), s.amplitudes(), 1e-15), "{kind:?}");
        }
    }

    #[test]
    fn cz_phases_only_11() {
        let cz = GateOp::fixed(GateKind::Cz, &[0, 1]).unwrap();
        let s = StateVector::basis(2, 3).unwrap().apply_gate(&cz, &[]).unwrap();
        assert_eq!(s.amplitudes()[3], c(-1.0, 0.0));
        let s = StateVector::basis(2, 2).unwrap().apply_gate(&cz, &[]).unwrap();
        assert_eq!(s.amplitudes()[2], c(1.0, 0.0));
    }

    #[test]
    fn rot3_matches_sequence() {
        let rot = GateOp::new(
            GateKind::Rot3,
            vec![0],
            vec![AngleSource::Constant(0.0); 3],
        )
        .unwrap();
        let rz = GateOp::new(GateKind::Rz, vec![0], vec![AngleSource::Constant(0.0)]).unwrap();
        let ry = GateOp::new(GateKind::Ry, vec![0], vec![AngleSource::Constant(0.0)]).unwrap();
        let h = GateOp::fixed(GateKind::Hadamard, &[0]).unwrap();
        let s = zero_state(1).unwrap().apply_gate(&h, &[]).unwrap();
        let (a, b, g) = (0.3, -1.1, 2.4);
        let direct = s.apply_gate(&rot, &[a, b, g]).unwrap();
        let seq = s
            .apply_gate(&rz, &[a])
            .unwrap()
            .apply_gate(&ry, &[b])
            .unwrap()
            .apply_gate(&rz, &[g])
            .unwrap();
        assert!(close(direct.amplitudes(), seq.amplitudes(), 1e-14));
    }

    #[test]
    fn from_amplitudes_validates() {
        assert!(StateVector::from_amplitudes(1, vec![c(1.0, 0.0)]).is_err());
        assert!(StateVector::from_amplitudes(1, vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        let s = StateVector::from_amplitudes(1, vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert!((s.expectation_z(0).unwrap() - (0.36 - 0.64)).abs() < 1e-15);
    }
}
