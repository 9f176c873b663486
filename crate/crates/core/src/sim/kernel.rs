use num_complex::Complex64;

use super::{GateKind, GateOp};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Axis {
    X,
    Y,
    Z,
}

/// Row-major 2×2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Mat2(pub [Complex64; 4]);

impl Mat2 {
    #[cfg(test)]
    pub const IDENTITY: Mat2 = Mat2([ONE, ZERO, ZERO, ONE]);
    pub const X: Mat2 = Mat2([ZERO, ONE, ONE, ZERO]);
    pub const Z: Mat2 = Mat2([ONE, ZERO, ZERO, Complex64::new(-1.0, 0.0)]);

    pub fn hadamard() -> Mat2 {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Mat2([h, h, h, -h])
    }

    pub fn dagger(&self) -> Mat2 {
        let [a, b, c, d] = self.0;
        Mat2([a.conj(), c.conj(), b.conj(), d.conj()])
    }

    /// exp(−iθσ/2).
    pub fn rotation(axis: Axis, theta: f64) -> Mat2 {
        let (s, c) = (theta * 0.5).sin_cos();
        match axis {
            Axis::X => Mat2([
                Complex64::new(c, 0.0),
                Complex64::new(0.0, -s),
                Complex64::new(0.0, -s),
                Complex64::new(c, 0.0),
            ]),
            Axis::Y => Mat2([
                Complex64::new(c, 0.0),
                Complex64::new(-s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(c, 0.0),
            ]),
            Axis::Z => Mat2([
                Complex64::new(c, -s),
                ZERO,
                ZERO,
                Complex64::new(c, s),
            ]),
        }
    }

    /// d/dθ of [`Mat2::rotation`].
    pub fn rotation_derivative(axis: Axis, theta: f64) -> Mat2 {
        let (s, c) = (theta * 0.5).sin_cos();
        let (hs, hc) = (0.5 * s, 0.5 * c);
        match axis {
            Axis::X => Mat2([
                Complex64::new(-hs, 0.0),
                Complex64::new(0.0, -hc),
                Complex64::new(0.0, -hc),
                Complex64::new(-hs, 0.0),
            ]),
            Axis::Y => Mat2([
                Complex64::new(-hs, 0.0),
                Complex64::new(-hc, 0.0),
                Complex64::new(hc, 0.0),
                Complex64::new(-hs, 0.0),
            ]),
            Axis::Z => Mat2([
                Complex64::new(-hs, -hc),
                ZERO,
                ZERO,
                Complex64::new(-hs, hc),
            ]),
        }
    }
}

#[inline]
pub(crate) fn wire_mask(n_qubits: usize, wire: usize) -> usize {
    1 << (n_qubits - 1 - wire)
}

/// Apply `m` to `target`, optionally conditioned on `control` being |1⟩.
pub(crate) fn apply_mat2(
    amps: &mut [Complex64],
    n_qubits: usize,
    target: usize,
    control: Option<usize>,
    m: &Mat2,
) {
    let tmask = wire_mask(n_qubits, target);
    let cmask = control.map_or(0, |c| wire_mask(n_qubits, c));
    let [m00, m01, m10, m11] = m.0;
    for i in 0..amps.len() {
        if i & tmask != 0 || i & cmask != cmask {
            continue;
        }
        let j = i | tmask;
        let (a, b) = (amps[i], amps[j]);
        amps[i] = m00 * a + m01 * b;
        amps[j] = m10 * a + m11 * b;
    }
}

/// Apply the derivative of a (controlled) gate: like [`apply_mat2`] but the
/// control-|0⟩ subspace, where the gate acts as a constant identity, is zeroed.
pub(crate) fn apply_derivative(
    amps: &mut [Complex64],
    n_qubits: usize,
    target: usize,
    control: Option<usize>,
    dm: &Mat2,
) {
    if let Some(c) = control {
        let cmask = wire_mask(n_qubits, c);
        for (i, a) in amps.iter_mut().enumerate() {
            if i & cmask == 0 {
                *a = ZERO;
            }
        }
    }
    apply_mat2(amps, n_qubits, target, control, dm);
}

pub(crate) fn expectation_z(amps: &[Complex64], n_qubits: usize, wire: usize) -> f64 {
    let mask = wire_mask(n_qubits, wire);
    amps.iter()
        .enumerate()
        .map(|(i, a)| if i & mask == 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum()
}

/// Decompose a gate with resolved angles into (target, control, matrix) steps.
pub(crate) fn gate_prims(gate: &GateOp, angles: &[f64]) -> Vec<(usize, Option<usize>, Mat2)> {
    let w = &gate.wires;
    match gate.kind {
        GateKind::Identity => vec![],
        GateKind::PauliX => vec![(w[0], None, Mat2::X)],
        GateKind::Hadamard => vec![(w[0], None, Mat2::hadamard())],
        GateKind::Rx => vec![(w[0], None, Mat2::rotation(Axis::X, angles[0]))],
        GateKind::Ry => vec![(w[0], None, Mat2::rotation(Axis::Y, angles[0]))],
        GateKind::Rz => vec![(w[0], None, Mat2::rotation(Axis::Z, angles[0]))],
        GateKind::Rot3 => vec![
            (w[0], None, Mat2::rotation(Axis::Z, angles[0])),
            (w[0], None, Mat2::rotation(Axis::Y, angles[1])),
            (w[0], None, Mat2::rotation(Axis::Z, angles[2])),
        ],
        GateKind::Cnot => vec![(w[1], Some(w[0]), Mat2::X)],
        GateKind::Cz => vec![(w[1], Some(w[0]), Mat2::Z)],
        GateKind::Crx => vec![(w[1], Some(w[0]), Mat2::rotation(Axis::X, angles[0]))],
        GateKind::Cry => vec![(w[1], Some(w[0]), Mat2::rotation(Axis::Y, angles[0]))],
        GateKind::Crz => vec![(w[1], Some(w[0]), Mat2::rotation(Axis::Z, angles[0]))],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
        let [a0, a1, a2, a3] = a.0;
        let [b0, b1, b2, b3] = b.0;
        Mat2([
            a0 * b0 + a1 * b2,
            a0 * b1 + a1 * b3,
            a2 * b0 + a3 * b2,
            a2 * b1 + a3 * b3,
        ])
    }

    #[test]
    fn rotations_are_unitary() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            for theta in [-2.7, 0.0, 0.4, 3.1] {
                let m = Mat2::rotation(axis, theta);
                let p = mul(&m, &m.dagger());
                for (x, y) in p.0.iter().zip(Mat2::IDENTITY.0.iter()) {
                    assert!((x - y).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let h = 1e-6;
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let theta = 0.77;
            let d = Mat2::rotation_derivative(axis, theta);
            let p = Mat2::rotation(axis, theta + h);
            let m = Mat2::rotation(axis, theta - h);
            for k in 0..4 {
                let fd = (p.0[k] - m.0[k]) / (2.0 * h);
                assert!((fd - d.0[k]).norm() < 1e-9);
            }
        }
    }
}
