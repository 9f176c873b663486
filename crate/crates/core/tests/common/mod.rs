#![allow(dead_code)]

use qreg_core::circuit::CircuitSpec;
use qreg_core::sim::{AngleSource, GateKind, GateOp, Tape};
use rand::Rng;

const KINDS: [GateKind; 12] = [
    GateKind::Identity,
    GateKind::PauliX,
    GateKind::Hadamard,
    GateKind::Rx,
    GateKind::Ry,
    GateKind::Rz,
    GateKind::Rot3,
    GateKind::Cnot,
    GateKind::Cz,
    GateKind::Crx,
    GateKind::Cry,
    GateKind::Crz,
];

/// Random circuit on `n_qubits` with up to `max_gates` gates mixing
/// trainable, feature and constant angles.
pub fn random_circuit<R: Rng>(rng: &mut R, n_qubits: usize, max_gates: usize, n_features: usize) -> CircuitSpec {
    let n_gates = rng.gen_range(1..=max_gates);
    let mut next = 0;
    let mut gates = Vec::new();
    while gates.len() < n_gates {
        let kind = KINDS[rng.gen_range(0..KINDS.len())];
        if kind.is_controlled() && n_qubits < 2 {
            continue;
        }
        let wires = if kind.is_controlled() {
            let c = rng.gen_range(0..n_qubits);
            let mut t = rng.gen_range(0..n_qubits - 1);
            if t >= c {
                t += 1;
            }
            vec![c, t]
        } else {
            vec![rng.gen_range(0..n_qubits)]
        };
        let angles = (0..kind.arity())
            .map(|_| match rng.gen_range(0..4) {
                0 => AngleSource::Feature(rng.gen_range(0..n_features)),
                1 => AngleSource::Constant(rng.gen_range(-3.0..3.0)),
                _ => {
                    next += 1;
                    AngleSource::Trainable(next - 1)
                }
            })
            .collect();
        gates.push(GateOp::new(kind, wires, angles).unwrap());
    }
    CircuitSpec::new(n_qubits, gates).unwrap()
}

/// Central differences of ⟨Z_wire⟩.
pub fn finite_difference(tape: &Tape, params: &[f64], features: &[f64], wire: usize, h: f64) -> Vec<f64> {
    (0..params.len())
        .map(|i| {
            let mut p = params.to_vec();
            p[i] += h;
            let up = tape.expectation(&p, features, wire).unwrap();
            p[i] -= 2.0 * h;
            let down = tape.expectation(&p, features, wire).unwrap();
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Minimum spanning-tree weight by enumerating every labelled tree through
/// its Prüfer sequence.
pub fn brute_force_mst_weight(points: &[Vec<f64>]) -> f64 {
    let n = points.len();
    assert!(n >= 2);
    if n == 2 {
        return dist(&points[0], &points[1]);
    }
    let mut best = f64::INFINITY;
    let total = n.pow((n - 2) as u32);
    let mut seq = vec![0usize; n - 2];
    for code in 0..total {
        let mut c = code;
        for s in seq.iter_mut() {
            *s = c % n;
            c /= n;
        }
        let mut degree = vec![1usize; n];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut w = 0.0;
        for &s in &seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
            w += dist(&points[leaf], &points[s]);
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        w += dist(&points[rest[0]], &points[rest[1]]);
        best = best.min(w);
    }
    best
}

/// Two-sided exact Wilcoxon p-value by listing all sign assignments.
pub fn wilcoxon_enumerated(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|v| *v != 0.0).collect();
    let m = d.len();
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&i, &j| d[i].abs().total_cmp(&d[j].abs()));
    let mut rank = vec![0.0; m];
    let mut i = 0;
    while i < m {
        let mut j = i;
        while j + 1 < m && d[idx[j + 1]].abs() == d[idx[i]].abs() {
            j += 1;
        }
        for k in i..=j {
            rank[idx[k]] = (i + j) as f64 / 2.0 + 1.0;
        }
        i = j + 1;
    }
    let observed: f64 = (0..m).filter(|&k| d[k] > 0.0).map(|k| rank[k]).sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u64..(1 << m) {
        let w: f64 = (0..m).filter(|&k| mask >> k & 1 == 1).map(|k| rank[k]).sum();
        if w <= observed + 1e-9 {
            le += 1;
        }
        if w >= observed - 1e-9 {
            ge += 1;
        }
    }
    let total = (1u64 << m) as f64;
    (2.0 * (le.min(ge) as f64) / total).min(1.0)
}

/// Spearman ρ for tie-free data: 1 − 6Σd²/(n(n²−1)).
pub fn spearman_formula(a: &[f64], b: &[f64]) -> f64 {
    let rank = |v: &[f64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        for (pos, &i) in idx.iter().enumerate() {
            r[i] = (pos + 1) as f64;
        }
        r
    };
    let (ra, rb) = (rank(a), rank(b));
    let n = a.len() as f64;
    let d2: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}
