use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::functions::{benchmark, eval_1d_function, eval_function, ONE_D_DOMAIN};
use crate::{rng, Error, Result};

pub const TRAIN_FRACTION: f64 = 0.7;

/// A suite function (`f1`…`f22`) or a one-dimensional target (`1d-f1`…`1d-f4`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FunctionId {
    Suite(u8),
    OneD(u8),
}

impl FunctionId {
    pub fn dim(self) -> usize {
        match self {
            FunctionId::Suite(_) => super::SUITE_DIM,
            FunctionId::OneD(_) => 1,
        }
    }

    pub fn domain(self) -> Result<(f64, f64)> {
        match self {
            FunctionId::Suite(id) => Ok(benchmark(id)?.domain),
            FunctionId::OneD(id) if (1..=4).contains(&id) => Ok(ONE_D_DOMAIN),
            FunctionId::OneD(id) => Err(Error::invalid(format!("1-D function id {id} outside 1..=4"))),
        }
    }

    pub fn eval(self, x: &[f64]) -> Result<f64> {
        match self {
            FunctionId::Suite(id) => eval_function(id, x),
            FunctionId::OneD(id) => {
                if x.len() != 1 {
                    return Err(Error::invalid("1-D functions take one input"));
                }
                eval_1d_function(id, x[0])
            }
        }
    }

    pub fn suite() -> impl Iterator<Item = FunctionId> {
        (1..=super::SUITE_SIZE).map(FunctionId::Suite)
    }

    fn tag(self) -> u64 {
        match self {
            FunctionId::Suite(id) => id as u64,
            FunctionId::OneD(id) => 1000 + id as u64,
        }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionId::Suite(id) => write!(f, "f{id}"),
            FunctionId::OneD(id) => write!(f, "1d-f{id}"),
        }
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (one_d, rest) = match s.strip_prefix("1d-") {
            Some(r) => (true, r),
            None => (false, s),
        };
        let digits = rest.strip_prefix('f').unwrap_or(rest);
        let id: u8 = digits
            .parse()
            .map_err(|_| Error::invalid(format!("bad function id `{s}`")))?;
        let fid = if one_d {
            FunctionId::OneD(id)
        } else {
            FunctionId::Suite(id)
        };
        fid.domain()?;
        Ok(fid)
    }
}

impl TryFrom<String> for FunctionId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FunctionId> for String {
    fn from(f: FunctionId) -> String {
        f.to_string()
    }
}

/// Min-max record for one column.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub min: f64,
    pub max: f64,
}

impl Scaling {
    pub fn fit(values: impl Iterator<Item = f64>) -> Scaling {
        let (min, max) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        Scaling { min, max }
    }

    /// Map `[min, max]` onto `[lo, hi]`; a constant column maps to the midpoint.
    pub fn scale(&self, v: f64, lo: f64, hi: f64) -> f64 {
        let span = self.max - self.min;
        if span == 0.0 {
            return 0.5 * (lo + hi);
        }
        lo + (hi - lo) * (v - self.min) / span
    }

    pub fn unscale(&self, s: f64, lo: f64, hi: f64) -> f64 {
        self.min + (self.max - self.min) * (s - lo) / (hi - lo)
    }
}

/// Features scaled per column to `[-π, π]`, targets to `[-1, 1]`, with a
/// seeded 70/30 train/test split. Scaling statistics come from all samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionDataset {
    name: String,
    seed: u64,
    x_raw: Vec<Vec<f64>>,
    x: Vec<Vec<f64>>,
    y_raw: Vec<f64>,
    y: Vec<f64>,
    train_idx: Vec<usize>,
    test_idx: Vec<usize>,
    x_scaling: Vec<Scaling>,
    y_scaling: Scaling,
}

pub const X_RANGE: (f64, f64) = (-PI, PI);
pub const Y_RANGE: (f64, f64) = (-1.0, 1.0);

impl RegressionDataset {
    /// Scale and split raw samples.
    pub fn from_raw(name: impl Into<String>, x_raw: Vec<Vec<f64>>, y_raw: Vec<f64>, seed: u64) -> Result<Self> {
        let n = x_raw.len();
        if n < 2 {
            return Err(Error::invalid("a dataset needs at least two samples"));
        }
        if y_raw.len() != n {
            return Err(Error::invalid(format!("{n} rows but {} targets", y_raw.len())));
        }
        let d = x_raw[0].len();
        if d == 0 || x_raw.iter().any(|r| r.len() != d) {
            return Err(Error::invalid("rows must share a non-zero dimension"));
        }
        if x_raw.iter().flatten().chain(&y_raw).any(|v| !v.is_finite()) {
            return Err(Error::invalid("dataset contains non-finite values"));
        }
        let x_scaling: Vec<Scaling> = (0..d)
            .map(|j| Scaling::fit(x_raw.iter().map(|r| r[j])))
            .collect();
        let y_scaling = Scaling::fit(y_raw.iter().copied());
        let x = x_raw
            .iter()
            .map(|r| {
                r.iter()
                    .zip(&x_scaling)
                    .map(|(&v, s)| s.scale(v, X_RANGE.0, X_RANGE.1))
                    .collect()
            })
            .collect();
        let y = y_raw
            .iter()
            .map(|&v| y_scaling.scale(v, Y_RANGE.0, Y_RANGE.1))
            .collect();

        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng::rng(rng::derive(seed, &[0x5_911_7])));
        let n_train = (TRAIN_FRACTION * n as f64).round() as usize;
        let mut train_idx = order[..n_train].to_vec();
        let mut test_idx = order[n_train..].to_vec();
        train_idx.sort_unstable();
        test_idx.sort_unstable();

        Ok(Self {
            name: name.into(),
            seed,
            x_raw,
            x,
            y_raw,
            y,
            train_idx,
            test_idx,
            x_scaling,
            y_scaling,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn dim(&self) -> usize {
        self.x[0].len()
    }

    pub fn x_raw(&self) -> &[Vec<f64>] {
        &self.x_raw
    }

    /// Scaled features.
    pub fn x(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn y_raw(&self) -> &[f64] {
        &self.y_raw
    }

    /// Scaled targets.
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn train_idx(&self) -> &[usize] {
        &self.train_idx
    }

    pub fn test_idx(&self) -> &[usize] {
        &self.test_idx
    }

    pub fn x_scaling(&self) -> &[Scaling] {
        &self.x_scaling
    }

    pub fn y_scaling(&self) -> Scaling {
        self.y_scaling
    }

    pub fn unscale_y(&self, s: f64) -> f64 {
        self.y_scaling.unscale(s, Y_RANGE.0, Y_RANGE.1)
    }

    pub fn unscale_x(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.x_scaling)
            .map(|(&v, s)| s.unscale(v, X_RANGE.0, X_RANGE.1))
            .collect()
    }

    /// Scaled training rows and targets.
    pub fn train_split(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        (
            self.train_idx.iter().map(|&i| self.x[i].clone()).collect(),
            self.train_idx.iter().map(|&i| self.y[i]).collect(),
        )
    }

    /// CSV with columns `x1..xd, y_raw, y_scaled` (features in raw units).
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (1..=self.dim()).map(|j| format!("x{j}")).collect();
        header.push("y_raw".into());
        header.push("y_scaled".into());
        out.write_record(&header)?;
        for i in 0..self.n() {
            let mut rec: Vec<String> = self.x_raw[i].iter().map(|v| v.to_string()).collect();
            rec.push(self.y_raw[i].to_string());
            rec.push(self.y[i].to_string());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// JSON manifest `{id, n, seed, scaling}` plus split sizes.
    pub fn manifest(&self) -> serde_json::Value {
        serde_json::json!({
            "id": self.name,
            "n": self.n(),
            "seed": self.seed,
            "n_train": self.train_idx.len(),
            "n_test": self.test_idx.len(),
            "scaling": {
                "x": self.x_scaling,
                "y": self.y_scaling,
                "x_range": [X_RANGE.0, X_RANGE.1],
                "y_range": [Y_RANGE.0, Y_RANGE.1],
            },
        })
    }
}

/// Sample `n` points uniformly over the function's domain box and label them.
pub fn generate_dataset(id: FunctionId, n: usize, seed: u64) -> Result<RegressionDataset> {
    if n < 10 {
        return Err(Error::invalid(format!("need at least 10 samples, got {n}")));
    }
    let (lo, hi) = id.domain()?;
    let d = id.dim();
    let mut r = rng::rng(rng::derive(seed, &[id.tag()]));
    let x_raw: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| r.gen_range(lo..=hi)).collect())
        .collect();
    let y_raw = x_raw.iter().map(|row| id.eval(row)).collect::<Result<Vec<_>>>()?;
    RegressionDataset::from_raw(id.to_string(), x_raw, y_raw, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_sizes_and_coverage() {
        let ds = generate_dataset(FunctionId::Suite(1), 900, 3).unwrap();
        assert_eq!(ds.train_idx().len(), 630);
        assert_eq!(ds.test_idx().len(), 270);
        let mut all: Vec<usize> = ds.train_idx().iter().chain(ds.test_idx()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..900).collect::<Vec<_>>());
    }

    #[test]
    fn scaled_ranges() {
        for id in FunctionId::suite() {
            let ds = generate_dataset(id, 200, 1).unwrap();
            let ymax = ds.y().iter().cloned().fold(f64::MIN, f64::max);
            let ymin = ds.y().iter().cloned().fold(f64::MAX, f64::min);
            assert!((ymax - 1.0).abs() < 1e-12 && (ymin + 1.0).abs() < 1e-12, "{id}");
            assert!(ds.x().iter().flatten().all(|v| v.abs() <= PI + 1e-12));
        }
    }

    #[test]
    fn raw_inputs_inside_domain() {
        let ds = generate_dataset(FunctionId::Suite(12), 300, 5).unwrap();
        assert!(ds.x_raw().iter().flatten().all(|v| (-500.0..=500.0).contains(v)));
        let ds = generate_dataset(FunctionId::OneD(1), 50, 5).unwrap();
        assert!(ds.x_raw().iter().flatten().all(|v| (-1.0..=1.0).contains(v)));
        assert_eq!(ds.dim(), 1);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_dataset(FunctionId::Suite(7), 100, 11).unwrap();
        let b = generate_dataset(FunctionId::Suite(7), 100, 11).unwrap();
        assert_eq!(a, b);
        let mut ca = Vec::new();
        let mut cb = Vec::new();
        a.write_csv(&mut ca).unwrap();
        b.write_csv(&mut cb).unwrap();
        assert_eq!(ca, cb);
        let c = generate_dataset(FunctionId::Suite(7), 100, 12).unwrap();
        assert_ne!(a.x_raw(), c.x_raw());
    }

    #[test]
    fn too_few_samples() {
        assert!(generate_dataset(FunctionId::Suite(1), 9, 0).is_err());
    }

    #[test]
    fn function_id_parsing() {
        assert_eq!("f3".parse::<FunctionId>().unwrap(), FunctionId::Suite(3));
        assert_eq!("22".parse::<FunctionId>().unwrap(), FunctionId::Suite(22));
        assert_eq!("1d-f2".parse::<FunctionId>().unwrap(), FunctionId::OneD(2));
        assert!("f23".parse::<FunctionId>().is_err());
        assert!("1d-f5".parse::<FunctionId>().is_err());
        assert_eq!(FunctionId::OneD(4).to_string(), "1d-f4");
        let json = serde_json::to_string(&FunctionId::Suite(9)).unwrap();
        assert_eq!(json, "\"f9\"");
    }

    #[test]
    fn csv_and_manifest() {
        let ds = generate_dataset(FunctionId::Suite(1), 10, 0).unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x1,x2,y_raw,y_scaled\n"));
        assert_eq!(text.lines().count(), 11);
        let m = ds.manifest();
        assert_eq!(m["n"], 10);
        assert_eq!(m["id"], "f1");
        assert_eq!(m["scaling"]["x"].as_array().unwrap().len(), 2);
    }
}
