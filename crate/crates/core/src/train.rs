//! Full-batch Adam training of circuit regressors on mean-squared error.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::benchmarks::RegressionDataset;
use crate::circuit::CircuitSpec;
use crate::sim::Tape;
use crate::{par, rng, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    /// Parameters start uniform in `[-init_range, init_range]`.
    pub init_range: f64,
    pub measurement_wire: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            epochs: 200,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            init_range: PI,
            measurement_wire: 0,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: &str| Err(Error::config(field, msg));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate", "must be a positive finite number");
        }
        if !(0.0..1.0).contains(&self.adam_beta1) {
            return bad("adam_beta1", "must lie in [0, 1)");
        }
        if !(0.0..1.0).contains(&self.adam_beta2) {
            return bad("adam_beta2", "must lie in [0, 1)");
        }
        if !(self.adam_eps > 0.0) {
            return bad("adam_eps", "must be positive");
        }
        if !(self.init_range >= 0.0 && self.init_range.is_finite()) {
            return bad("init_range", "must be a non-negative finite number");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub r2: f64,
    pub rmse: f64,
}

fn check_lengths(y: &[f64], y_hat: &[f64]) -> Result<()> {
    if y.len() != y_hat.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} targets vs {} predictions",
            y.len(),
            y_hat.len()
        )));
    }
    if y.is_empty() {
        return Err(Error::invalid("no samples"));
    }
    Ok(())
}

/// Coefficient of determination `1 − SS_res / SS_tot`.
pub fn r2_score(y: &[f64], y_hat: &[f64]) -> Result<f64> {
    check_lengths(y, y_hat)?;
    if y.len() < 2 {
        return Err(Error::invalid("R² needs at least two samples"));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::DegenerateTarget("target has zero variance".into()));
    }
    let ss_res: f64 = y.iter().zip(y_hat).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

pub fn rmse(y: &[f64], y_hat: &[f64]) -> Result<f64> {
    check_lengths(y, y_hat)?;
    let mse = y.iter().zip(y_hat).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / y.len() as f64;
    Ok(mse.sqrt())
}

pub fn metrics(y: &[f64], y_hat: &[f64]) -> Result<Metrics> {
    Ok(Metrics {
        r2: r2_score(y, y_hat)?,
        rmse: rmse(y, y_hat)?,
    })
}

/// Adam with bias-corrected moment estimates.
#[derive(Clone, Debug)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(n_params: usize, config: &TrainConfig) -> Self {
        Self {
            lr: config.learning_rate,
            beta1: config.adam_beta1,
            beta2: config.adam_beta2,
            eps: config.adam_eps,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t);
        let bc2 = 1.0 - self.beta2.powi(self.t);
        for (((p, g), m), v) in params.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    #[serde(rename = "params")]
    pub final_params: Vec<f64>,
    pub loss_history: Vec<f64>,
    #[serde(rename = "train")]
    pub train_metrics: Metrics,
    #[serde(rename = "full")]
    pub full_metrics: Metrics,
}

/// Uniform draws in `[-init_range, init_range]` from the config seed.
pub fn initial_params(n_params: usize, config: &TrainConfig) -> Vec<f64> {
    let mut r = rng::rng(config.seed);
    (0..n_params)
        .map(|_| {
            if config.init_range == 0.0 {
                0.0
            } else {
                r.gen_range(-config.init_range..=config.init_range)
            }
        })
        .collect()
}

/// Circuit predictions ⟨Z_wire⟩ for each row of `x`.
pub fn predict(circuit: &CircuitSpec, params: &[f64], x: &[Vec<f64>], wire: usize) -> Result<Vec<f64>> {
    let tape = Tape::compile(circuit);
    predict_tape(&tape, params, x, wire)
}

pub(crate) fn predict_tape(tape: &Tape, params: &[f64], x: &[Vec<f64>], wire: usize) -> Result<Vec<f64>> {
    if let Some(first) = x.first() {
        tape.expectation(params, first, wire)?;
    }
    for row in x {
        tape.check_inputs(params, row)?;
    }
    Ok(par::map(x, |row| tape.expectation_unchecked(params, row, wire)))
}

/// MSE over `rows` and its gradient.
pub(crate) fn loss_and_grad(
    tape: &Tape,
    params: &[f64],
    x: &[Vec<f64>],
    y: &[f64],
    rows: &[usize],
    wire: usize,
) -> (f64, Vec<f64>) {
    let n_params = tape.n_params();
    let per_row = par::map(rows, |&i| {
        let mut g = vec![0.0; n_params];
        let f = tape.value_and_grad_unchecked(params, &x[i], wire, 1.0, &mut g);
        (f - y[i], g)
    });
    let scale = 1.0 / rows.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; n_params];
    for (resid, g) in &per_row {
        loss += resid * resid;
        let w = 2.0 * resid * scale;
        for (acc, gi) in grad.iter_mut().zip(g) {
            *acc += w * gi;
        }
    }
    (loss * scale, grad)
}

fn mse(tape: &Tape, params: &[f64], x: &[Vec<f64>], y: &[f64], rows: &[usize], wire: usize) -> f64 {
    let preds = par::map(rows, |&i| tape.expectation_unchecked(params, &x[i], wire));
    preds
        .iter()
        .zip(rows)
        .map(|(p, &i)| (p - y[i]).powi(2))
        .sum::<f64>()
        / rows.len() as f64
}

/// Train on the dataset's training split and report metrics on that split
/// and on every sample. The returned parameters are the best-loss iterate.
pub fn train(circuit: &CircuitSpec, data: &RegressionDataset, config: &TrainConfig) -> Result<TrainResult> {
    config.validate()?;
    let wire = config.measurement_wire;
    let tape = Tape::compile(circuit);
    let rows = data.train_idx();
    if rows.len() < 2 {
        return Err(Error::invalid("training split needs at least two samples"));
    }
    let x = data.x();
    let y = data.y();
    let train_y: Vec<f64> = rows.iter().map(|&i| y[i]).collect();
    let first = train_y[0];
    if train_y.iter().all(|&v| v == first) {
        return Err(Error::DegenerateTarget("training targets are constant".into()));
    }

    let mut params = initial_params(tape.n_params(), config);
    // validates parameter count, feature usage and wire once
    tape.expectation(&params, &x[rows[0]], wire)?;

    let mut adam = Adam::new(params.len(), config);
    let mut history = Vec::with_capacity(config.epochs);
    let mut best = (f64::INFINITY, params.clone());
    for _ in 0..config.epochs {
        let (loss, grad) = loss_and_grad(&tape, &params, x, y, rows, wire);
        history.push(loss);
        if loss < best.0 {
            best = (loss, params.clone());
        }
        adam.step(&mut params, &grad);
    }
    if config.epochs > 0 {
        let last = mse(&tape, &params, x, y, rows, wire);
        if last < best.0 {
            best = (last, params);
        }
    } else {
        best.1 = params;
    }
    let final_params = best.1;

    let train_x: Vec<Vec<f64>> = rows.iter().map(|&i| x[i].clone()).collect();
    let train_pred = predict_tape(&tape, &final_params, &train_x, wire)?;
    let full_pred = predict_tape(&tape, &final_params, x, wire)?;
    Ok(TrainResult {
        train_metrics: metrics(&train_y, &train_pred)?,
        full_metrics: metrics(y, &full_pred)?,
        final_params,
        loss_history: history,
    })
}

/// Metrics of a fixed parameter vector over every sample of `data`.
pub fn evaluate(circuit: &CircuitSpec, params: &[f64], data: &RegressionDataset, wire: usize) -> Result<Metrics> {
    let preds = predict(circuit, params, data.x(), wire)?;
    metrics(data.y(), &preds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r2_examples() {
        let y = [0.0, 1.0, 2.0];
        assert_eq!(r2_score(&y, &y).unwrap(), 1.0);
        assert!(r2_score(&y, &[1.0, 1.0, 1.0]).unwrap().abs() < 1e-15);
        assert!((r2_score(&y, &[0.0, 0.0, 0.0]).unwrap() - (-1.5)).abs() < 1e-15);
        assert!(matches!(
            r2_score(&[1.0, 1.0], &[1.0, 2.0]),
            Err(Error::DegenerateTarget(_))
        ));
        assert!(r2_score(&y, &[1.0]).is_err());
    }

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!((rmse(&[0.0, 2.0], &[0.0, 0.0]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn adam_first_step_moves_by_lr() {
        let cfg = TrainConfig::default();
        let mut adam = Adam::new(2, &cfg);
        let mut p = vec![1.0, -1.0];
        adam.step(&mut p, &[0.3, -7.0]);
        // bias-corrected first step is lr·sign(g) up to eps
        assert!((p[0] - (1.0 - 0.05)).abs() < 1e-6);
        assert!((p[1] - (-1.0 + 0.05)).abs() < 1e-6);
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let cfg = TrainConfig { seed: 4, ..Default::default() };
        let a = initial_params(50, &cfg);
        assert_eq!(a, initial_params(50, &cfg));
        assert!(a.iter().all(|v| v.abs() <= PI));
        let other = initial_params(50, &TrainConfig { seed: 5, ..Default::default() });
        assert_ne!(a, other);
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let bad = TrainConfig { learning_rate: 0.0, ..Default::default() };
        assert!(bad.validate().unwrap_err().is_config());
    }

    #[test]
    fn train_result_json_shape() {
        let r = TrainResult {
            final_params: vec![0.5],
            loss_history: vec![1.0, 0.5],
            train_metrics: Metrics { r2: 0.9, rmse: 0.1 },
            full_metrics: Metrics { r2: 0.8, rmse: 0.2 },
        };
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["params"], serde_json::json!([0.5]));
        assert_eq!(v["train"]["r2"], 0.9);
        assert_eq!(v["full"]["rmse"], 0.2);
        let back: TrainResult = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
