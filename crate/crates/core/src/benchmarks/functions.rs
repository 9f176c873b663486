//! Closed-form benchmark functions.

use std::f64::consts::{E, PI};

use crate::{Error, Result};

/// Input dimension of the regression suite.
pub const SUITE_DIM: usize = 2;
pub const SUITE_SIZE: u8 = 22;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchmarkFn {
    pub id: u8,
    pub name: &'static str,
    pub dim: usize,
    /// Per-axis closed interval.
    pub domain: (f64, f64),
}

const NAMES: [&str; 22] = [
    "Sphere",
    "Ellipsoid",
    "Bent Cigar",
    "Discus",
    "Different Powers",
    "Rosenbrock",
    "Schaffer F7",
    "Ackley",
    "Rastrigin",
    "Weierstrass",
    "Griewank",
    "Schwefel",
    "Katsuura",
    "Griewank-Rosenbrock",
    "Expanded Schaffer 6",
    "Step-Rastrigin",
    "HappyCat",
    "HGBat",
    "Different Powers Modified",
    "Zakharov",
    "Levy",
    "Dixon-Price",
];

fn domain_half_width(id: u8) -> f64 {
    match id {
        11 | 15 => 10.0,
        12 | 13 | 21 => 500.0,
        14 => 300.0,
        16 | 18 => 30.0,
        17 => 50.0,
        22 => 1000.0,
        _ => 5.0,
    }
}

pub fn benchmark(id: u8) -> Result<BenchmarkFn> {
    if !(1..=SUITE_SIZE).contains(&id) {
        return Err(Error::invalid(format!("benchmark id {id} outside 1..=22")));
    }
    let h = domain_half_width(id);
    Ok(BenchmarkFn {
        id,
        name: NAMES[id as usize - 1],
        dim: SUITE_DIM,
        domain: (-h, h),
    })
}

pub fn all_benchmarks() -> Vec<BenchmarkFn> {
    (1..=SUITE_SIZE).map(|id| benchmark(id).unwrap()).collect()
}

/// Evaluate suite function `id` at a two-dimensional point.
pub fn eval_function(id: u8, x: &[f64]) -> Result<f64> {
    benchmark(id)?;
    if x.len() != SUITE_DIM {
        return Err(Error::invalid(format!(
            "benchmark functions take {SUITE_DIM} inputs, got {}",
            x.len()
        )));
    }
    Ok(eval_any_dim(id, x))
}

fn sq(v: f64) -> f64 {
    v * v
}

fn sum_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Formulas written for general `d ≥ 2`; `i` is 1-based where it appears.
pub(crate) fn eval_any_dim(id: u8, x: &[f64]) -> f64 {
    let d = x.len() as f64;
    match id {
        1 => sum_sq(x),
        2 => x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v * v).sum(),
        3 => sq(x[0]) + 1e6 * sum_sq(&x[1..]),
        4 => 1e6 * sq(x[0]) + sum_sq(&x[1..]),
        5 => x
            .iter()
            .enumerate()
            .map(|(i, v)| v.abs().powi(i as i32 + 2))
            .sum(),
        // (x_i + 1)² as tabulated, not the textbook (1 − x_i)²
        6 => x
            .windows(2)
            .map(|w| 100.0 * sq(w[1] - w[0] * w[0]) + sq(w[0] + 1.0))
            .sum(),
        7 => {
            let s: f64 = x
                .windows(2)
                .map(|w| {
                    let si = (w[0] * w[0] + w[1] * w[1]).sqrt();
                    si.sqrt() + si.sqrt() * sq((50.0 * si.powf(0.2)).sin())
                })
                .sum();
            sq(s / (d - 1.0))
        }
        8 => {
            let a = (sum_sq(x) / d).sqrt();
            let c = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
            -20.0 * (-0.2 * a).exp() - c.exp() + E + 20.0
        }
        9 => x
            .iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
            + 10.0 * d,
        10 => {
            const A: f64 = 0.5;
            const B: f64 = 3.0;
            const K_MAX: i32 = 20;
            let inner = |v: f64| -> f64 {
                (0..=K_MAX)
                    .map(|k| A.powi(k) * (2.0 * PI * B.powi(k) * (v + 0.5)).cos())
                    .sum()
            };
            let offset: f64 = (0..=K_MAX).map(|k| A.powi(k) * (PI * B.powi(k)).cos()).sum();
            x.iter().map(|&v| inner(v)).sum::<f64>() - d * offset
        }
        11 => {
            let prod: f64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                .product();
            sum_sq(x) / 4000.0 - prod + 1.0
        }
        12 => -x.iter().map(|v| v * v.abs().sqrt().sin()).sum::<f64>() + 418.982_887_272_433_7 * d,
        13 => {
            let scale = 10.0 / (d * d);
            let exponent = 10.0 / d.powf(1.2);
            let prod: f64 = x
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let s: f64 = (1..=32)
                        .map(|j| {
                            let p = 2f64.powi(j);
                            (p * v - (p * v + 0.5).floor()).abs() / p
                        })
                        .sum();
                    (1.0 + (i + 1) as f64 * s).powf(exponent)
                })
                .product();
            scale * prod - scale
        }
        14 => x
            .windows(2)
            .map(|w| {
                let t = 100.0 * sq(w[0] * w[0] - w[1]) + sq(w[0] - 1.0);
                t * t / 4000.0 - t.cos() + 1.0
            })
            .sum(),
        15 => {
            let g = |a: f64, b: f64| {
                let r2 = a * a + b * b;
                0.5 + (sq(r2.sqrt().sin()) - 0.5) / sq(1.0 + 0.001 * r2)
            };
            let n = x.len();
            x.windows(2).map(|w| g(w[0], w[1])).sum::<f64>() + g(x[n - 1], x[0])
        }
        16 => x
            .iter()
            .map(|&z| {
                let zt = if z.abs() > 0.5 {
                    (5.12 / 100.0 * z + 0.5).floor()
                } else {
                    5.12 / 100.0 * z
                };
                zt * zt - 10.0 * (2.0 * PI * zt).cos() + 10.0
            })
            .sum(),
        17 => {
            let s2 = sum_sq(x);
            let s1: f64 = x.iter().sum();
            (s2 - d).abs().powf(0.25) + (0.5 * s2 + s1) / d + 0.5
        }
        18 => {
            let s2 = sum_sq(x);
            let s1: f64 = x.iter().sum();
            (s2 * s2 - s1 * s1).abs().sqrt() + (0.5 * s2 + s1) / d + 0.5
        }
        19 => x
            .iter()
            .enumerate()
            .map(|(i, v)| v.abs().powf(2.0 + 4.0 * i as f64 / (d - 1.0)))
            .sum::<f64>()
            .sqrt(),
        20 => {
            let s: f64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| 0.5 * (i + 1) as f64 * v)
                .sum();
            sum_sq(x) + s * s + s.powi(4)
        }
        21 => {
            let w: Vec<f64> = x.iter().map(|v| 1.0 + (v - 1.0) / 4.0).collect();
            let n = w.len();
            let mid: f64 = w[..n - 1]
                .iter()
                .map(|wi| sq(wi - 1.0) * (1.0 + 10.0 * sq((PI * wi + 1.0).sin())))
                .sum();
            sq((PI * w[0]).sin()) + mid + sq(w[n - 1] - 1.0) * (1.0 + sq((2.0 * PI * w[n - 1]).sin()))
        }
        // (2x_i)² as tabulated
        22 => {
            sq(x[0] - 1.0)
                + x.windows(2)
                    .enumerate()
                    .map(|(k, w)| (k + 2) as f64 * sq(sq(2.0 * w[1]) - w[0]))
                    .sum::<f64>()
        }
        _ => unreachable!("id validated by caller"),
    }
}

/// The four one-dimensional proof-of-concept targets.
pub fn eval_1d_function(fid: u8, x: f64) -> Result<f64> {
    match fid {
        1 => Ok(x * x),
        2 => Ok(x * x * x),
        3 => Ok(2.0 * x.powi(4) - 1.0),
        4 => Ok(0.9 / (1.0 + (-10.0 * x).exp())),
        _ => Err(Error::invalid(format!("1-D function id {fid} outside 1..=4"))),
    }
}

/// Domain used for the one-dimensional targets.
pub const ONE_D_DOMAIN: (f64, f64) = (-1.0, 1.0);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_checked_values() {
        assert_eq!(eval_function(1, &[3.0, 4.0]).unwrap(), 25.0);
        assert!(eval_function(9, &[0.0, 0.0]).unwrap().abs() < 1e-12);
        assert!(eval_function(8, &[0.0, 0.0]).unwrap().abs() < 1e-12);
        assert!(eval_function(1, &[1.0]).is_err());
        assert!(eval_function(23, &[0.0, 0.0]).is_err());
        assert!(eval_function(0, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn minima_at_origin() {
        for id in [1, 2, 3, 4, 8, 9, 11] {
            let v = eval_function(id, &[0.0, 0.0]).unwrap();
            assert!(v.abs() < 1e-9, "f{id}(0) = {v}");
        }
    }

    #[test]
    fn schwefel_near_zero_at_known_optimum() {
        let v = eval_function(12, &[420.968_746, 420.968_746]).unwrap();
        assert!(v.abs() < 1e-4, "{v}");
    }

    #[test]
    fn weierstrass_zero_at_origin() {
        assert!(eval_function(10, &[0.0, 0.0]).unwrap().abs() < 1e-10);
    }

    #[test]
    fn domains_match_table() {
        assert_eq!(benchmark(12).unwrap().domain, (-500.0, 500.0));
        assert_eq!(benchmark(22).unwrap().domain, (-1000.0, 1000.0));
        assert_eq!(benchmark(14).unwrap().domain, (-300.0, 300.0));
        assert_eq!(benchmark(1).unwrap().domain, (-5.0, 5.0));
        assert_eq!(all_benchmarks().len(), 22);
    }

    #[test]
    fn one_d_values() {
        assert_eq!(eval_1d_function(1, 0.5).unwrap(), 0.25);
        assert_eq!(eval_1d_function(2, -0.5).unwrap(), -0.125);
        assert_eq!(eval_1d_function(3, 0.0).unwrap(), -1.0);
        assert!((eval_1d_function(4, 0.0).unwrap() - 0.45).abs() < 1e-15);
        assert!(eval_1d_function(5, 0.0).is_err());
    }
}
