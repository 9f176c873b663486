//! Circuit execution and exact reverse-sweep (adjoint) gradients.

use num_complex::Complex64;

use super::kernel::{apply_derivative, apply_mat2, expectation_z, wire_mask, Axis, Mat2};
use super::{AngleSource, GateKind, StateVector};
use crate::circuit::CircuitSpec;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
enum Action {
    Fixed(Mat2),
    Rotate(Axis, AngleSource),
}

#[derive(Clone, Copy, Debug)]
struct Step {
    target: usize,
    control: Option<usize>,
    action: Action,
}

/// A circuit lowered to single-target steps (ROT3 split into three
/// rotations), ready for repeated evaluation over many samples.
#[derive(Clone, Debug)]
pub struct Tape {
    n_qubits: usize,
    n_params: usize,
    uses_features: bool,
    steps: Vec<Step>,
}

impl Tape {
    pub fn compile(circuit: &CircuitSpec) -> Tape {
        let mut steps = Vec::with_capacity(circuit.gates().len());
        for g in circuit.gates() {
            let w = &g.wires;
            let a = &g.angles;
            let mut push = |target, control, action| {
                steps.push(Step {
                    target,
                    control,
                    action,
                })
            };
            match g.kind {
                GateKind::Identity => {}
                GateKind::PauliX => push(w[0], None, Action::Fixed(Mat2::X)),
                GateKind::Hadamard => push(w[0], None, Action::Fixed(Mat2::hadamard())),
                GateKind::Rx => push(w[0], None, Action::Rotate(Axis::X, a[0])),
                GateKind::Ry => push(w[0], None, Action::Rotate(Axis::Y, a[0])),
                GateKind::Rz => push(w[0], None, Action::Rotate(Axis::Z, a[0])),
                GateKind::Rot3 => {
                    push(w[0], None, Action::Rotate(Axis::Z, a[0]));
                    push(w[0], None, Action::Rotate(Axis::Y, a[1]));
                    push(w[0], None, Action::Rotate(Axis::Z, a[2]));
                }
                GateKind::Cnot => push(w[1], Some(w[0]), Action::Fixed(Mat2::X)),
                GateKind::Cz => push(w[1], Some(w[0]), Action::Fixed(Mat2::Z)),
                GateKind::Crx => push(w[1], Some(w[0]), Action::Rotate(Axis::X, a[0])),
                GateKind::Cry => push(w[1], Some(w[0]), Action::Rotate(Axis::Y, a[0])),
                GateKind::Crz => push(w[1], Some(w[0]), Action::Rotate(Axis::Z, a[0])),
            }
        }
        let uses_features = steps
            .iter()
            .any(|s| matches!(s.action, Action::Rotate(_, AngleSource::Feature(_))));
        Tape {
            n_qubits: circuit.n_qubits(),
            n_params: circuit.n_trainable(),
            uses_features,
            steps,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn check_inputs(&self, params: &[f64], features: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::invalid(format!(
                "circuit has {} trainable parameter(s), got {}",
                self.n_params,
                params.len()
            )));
        }
        if self.uses_features && features.is_empty() {
            return Err(Error::invalid(
                "circuit loads features but the feature vector is empty",
            ));
        }
        Ok(())
    }

    fn check_wire(&self, wire: usize) -> Result<()> {
        if wire >= self.n_qubits {
            return Err(Error::invalid(format!(
                "measurement wire {wire} out of range for {} qubits",
                self.n_qubits
            )));
        }
        Ok(())
    }

    #[inline]
    fn matrix(step: &Step, params: &[f64], features: &[f64]) -> Mat2 {
        match step.action {
            Action::Fixed(m) => m,
            Action::Rotate(axis, src) => Mat2::rotation(axis, resolve(src, params, features)),
        }
    }

    fn run_raw(&self, params: &[f64], features: &[f64]) -> Vec<Complex64> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        for s in &self.steps {
            let m = Self::matrix(s, params, features);
            apply_mat2(&mut amps, self.n_qubits, s.target, s.control, &m);
        }
        amps
    }

    pub fn run(&self, params: &[f64], features: &[f64]) -> Result<StateVector> {
        self.check_inputs(params, features)?;
        Ok(StateVector::from_raw(self.n_qubits, self.run_raw(params, features)))
    }

    pub fn expectation(&self, params: &[f64], features: &[f64], wire: usize) -> Result<f64> {
        self.check_inputs(params, features)?;
        self.check_wire(wire)?;
        Ok(self.expectation_unchecked(params, features, wire))
    }

    pub(crate) fn expectation_unchecked(&self, params: &[f64], features: &[f64], wire: usize) -> f64 {
        expectation_z(&self.run_raw(params, features), self.n_qubits, wire)
    }

    /// ⟨Z_wire⟩ and its gradient with respect to every trainable parameter.
    pub fn expectation_and_gradient(
        &self,
        params: &[f64],
        features: &[f64],
        wire: usize,
    ) -> Result<(f64, Vec<f64>)> {
        self.check_inputs(params, features)?;
        self.check_wire(wire)?;
        let mut grad = vec![0.0; self.n_params];
        let value = self.value_and_grad_unchecked(params, features, wire, 1.0, &mut grad);
        Ok((value, grad))
    }

    /// Adjoint sweep. Adds `weight · ∂⟨Z⟩/∂θ` into `grad` and returns ⟨Z⟩.
    pub(crate) fn value_and_grad_unchecked(
        &self,
        params: &[f64],
        features: &[f64],
        wire: usize,
        weight: f64,
        grad: &mut [f64],
    ) -> f64 {
        let n = self.n_qubits;
        let mats: Vec<Mat2> = self
            .steps
            .iter()
            .map(|s| Self::matrix(s, params, features))
            .collect();

        let mut phi = vec![Complex64::new(0.0, 0.0); 1 << n];
        phi[0] = Complex64::new(1.0, 0.0);
        for (s, m) in self.steps.iter().zip(&mats) {
            apply_mat2(&mut phi, n, s.target, s.control, m);
        }
        let value = expectation_z(&phi, n, wire);

        // λ = Z ψ
        let zmask = wire_mask(n, wire);
        let mut lambda = phi.clone();
        for (i, a) in lambda.iter_mut().enumerate() {
            if i & zmask != 0 {
                *a = -*a;
            }
        }

        let mut mu = vec![Complex64::new(0.0, 0.0); 1 << n];
        for (k, (s, m)) in self.steps.iter().zip(&mats).enumerate().rev() {
            let inv = m.dagger();
            apply_mat2(&mut phi, n, s.target, s.control, &inv);
            if let Action::Rotate(axis, AngleSource::Trainable(p)) = s.action {
                mu.copy_from_slice(&phi);
                let dm = Mat2::rotation_derivative(axis, params[p]);
                apply_derivative(&mut mu, n, s.target, s.control, &dm);
                let overlap: f64 = lambda
                    .iter()
                    .zip(&mu)
                    .map(|(l, u)| l.re * u.re + l.im * u.im)
                    .sum();
                grad[p] += weight * 2.0 * overlap;
            }
            if k > 0 {
                apply_mat2(&mut lambda, n, s.target, s.control, &inv);
            }
        }
        value
    }
}

#[inline]
fn resolve(src: AngleSource, params: &[f64], features: &[f64]) -> f64 {
    match src {
        AngleSource::Trainable(i) => params[i],
        AngleSource::Feature(i) => features[i % features.len()],
        AngleSource::Constant(v) => v,
    }
}

/// Run `circuit` from |0…0⟩ with the given parameters and features.
pub fn run_circuit(circuit: &CircuitSpec, params: &[f64], features: &[f64]) -> Result<StateVector> {
    Tape::compile(circuit).run(params, features)
}

/// Exact ∂⟨Z_wire⟩/∂params.
pub fn gradient_adjoint(
    circuit: &CircuitSpec,
    params: &[f64],
    features: &[f64],
    wire: usize,
) -> Result<Vec<f64>> {
    Ok(expectation_and_gradient(circuit, params, features, wire)?.1)
}

pub fn expectation_and_gradient(
    circuit: &CircuitSpec,
    params: &[f64],
    features: &[f64],
    wire: usize,
) -> Result<(f64, Vec<f64>)> {
    Tape::compile(circuit).expectation_and_gradient(params, features, wire)
}
