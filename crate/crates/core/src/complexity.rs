//! Regression complexity measures and their statistical kernels.
//!
//! All measures are computed on the scaled dataset (features in `[-π, π]`,
//! targets in `[-1, 1]`).

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::benchmarks::RegressionDataset;
use crate::{par, rng, Error, Result};

pub const MEASURE_NAMES: [&str; 12] = [
    "c1", "c2", "c3", "c4", "l1", "l2", "l3", "s1", "s2", "s3", "s4", "t2",
];

const C3_THRESHOLD: f64 = 0.9;
const C4_THRESHOLD: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityProfile {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub t2: f64,
}

impl ComplexityProfile {
    /// Values in `MEASURE_NAMES` order.
    pub fn to_array(&self) -> [f64; 12] {
        [
            self.c1, self.c2, self.c3, self.c4, self.l1, self.l2, self.l3, self.s1, self.s2,
            self.s3, self.s4, self.t2,
        ]
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() != 12 {
            return Err(Error::invalid(format!("expected 12 measures, got {}", v.len())));
        }
        Ok(Self {
            c1: v[0],
            c2: v[1],
            c3: v[2],
            c4: v[3],
            l1: v[4],
            l2: v[5],
            l3: v[6],
            s1: v[7],
            s2: v[8],
            s3: v[9],
            s4: v[10],
            t2: v[11],
        })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        MEASURE_NAMES
            .iter()
            .position(|&m| m == name)
            .map(|i| self.to_array()[i])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

impl LinearModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(x).map(|(b, v)| b * v).sum::<f64>()
    }

    pub fn residuals(&self, x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
        x.iter().zip(y).map(|(r, &t)| t - self.predict(r)).collect()
    }
}

/// Fractional ranks (1-based, ties averaged).
pub fn ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman rank correlation with tie-averaged ranks. The sign is kept.
pub fn spearman_rho(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("length mismatch {} vs {}", a.len(), b.len())));
    }
    if a.len() < 3 {
        return Err(Error::invalid("spearman needs at least 3 observations"));
    }
    pearson(&ranks(a), &ranks(b))
        .ok_or_else(|| Error::UndefinedCorrelation("constant input".into()))
}

/// |ρ| with a constant input counted as no association.
fn abs_rho(a: &[f64], b: &[f64]) -> f64 {
    spearman_rho(a, b).map(f64::abs).unwrap_or(0.0)
}

/// Least squares with intercept. Rank-deficient designs get the minimum-norm
/// coefficient vector.
pub fn ols_fit(x: &[Vec<f64>], y: &[f64]) -> Result<LinearModel> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::invalid(format!("{n} rows but {} targets", y.len())));
    }
    let d = x.first().map_or(0, Vec::len);
    if x.iter().any(|r| r.len() != d) {
        return Err(Error::invalid("ragged design matrix"));
    }
    if n < d + 1 {
        return Err(Error::Underdetermined(format!("{n} samples for {d} features plus intercept")));
    }
    let mean_x: Vec<f64> = (0..d)
        .map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let mean_y = y.iter().sum::<f64>() / n as f64;
    if d == 0 {
        return Ok(LinearModel { intercept: mean_y, coefficients: vec![] });
    }
    let a = DMatrix::from_fn(n, d, |i, j| x[i][j] - mean_x[j]);
    let b = DVector::from_iterator(n, y.iter().map(|v| v - mean_y));
    let svd = a.svd(true, true);
    let beta = svd
        .solve(&b, 1e-12 * svd.singular_values.max().max(1.0))
        .map_err(|e| Error::invalid(e.to_string()))?;
    let coefficients: Vec<f64> = beta.iter().copied().collect();
    let intercept = mean_y - coefficients.iter().zip(&mean_x).map(|(b, m)| b * m).sum::<f64>();
    Ok(LinearModel { intercept, coefficients })
}

/// Single-feature least squares on any number of points; a constant feature
/// gets slope 0.
fn simple_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

/// Prim's algorithm on the dense Euclidean graph. Edges are `(min, max)`
/// index pairs; ties go to the lower vertex and lower parent index.
pub fn minimum_spanning_tree(x: &[Vec<f64>]) -> Result<Vec<(usize, usize)>> {
    let n = x.len();
    if n < 2 {
        return Err(Error::invalid("spanning tree needs at least 2 points"));
    }
    let mut in_tree = vec![false; n];
    let mut key = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut edges = Vec::with_capacity(n - 1);
    key[0] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (u == usize::MAX || key[v] < key[u]) {
                u = v;
            }
        }
        in_tree[u] = true;
        if parent[u] != usize::MAX {
            edges.push((parent[u].min(u), parent[u].max(u)));
        }
        for v in 0..n {
            if !in_tree[v] {
                let w = dist2(&x[u], &x[v]);
                if w < key[v] || (w == key[v] && u < parent[v]) {
                    key[v] = w;
                    parent[v] = u;
                }
            }
        }
    }
    Ok(edges)
}

/// Index of the nearest row to `q` (lowest index on ties), skipping `skip`.
fn nearest(x: &[Vec<f64>], q: &[f64], skip: Option<usize>) -> usize {
    let mut best = usize::MAX;
    let mut best_d = f64::INFINITY;
    for (i, r) in x.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        let d = dist2(r, q);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

fn check(x: &[Vec<f64>], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("{} rows but {} targets", x.len(), y.len())));
    }
    if x.len() < 10 {
        return Err(Error::invalid("complexity measures need at least 10 samples"));
    }
    let d = x[0].len();
    if d == 0 || x.iter().any(|r| r.len() != d) {
        return Err(Error::invalid("rows must share a non-zero dimension"));
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::DegenerateTarget("constant target".into()));
    }
    Ok(())
}

fn column(x: &[Vec<f64>], j: usize) -> Vec<f64> {
    x.iter().map(|r| r[j]).collect()
}

/// |ρ(x_j, y)| for every feature.
pub fn feature_correlations(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    (0..x[0].len()).map(|j| abs_rho(&column(x, j), y)).collect()
}

/// Samples removed before |ρ(x_j, y)| exceeds the threshold: repeatedly drop
/// the point with the largest residual from the rank-on-rank line.
pub fn c3_removed(xj: &[f64], y: &[f64]) -> usize {
    let mut keep: Vec<usize> = (0..xj.len()).collect();
    let mut removed = 0;
    loop {
        let a: Vec<f64> = keep.iter().map(|&i| xj[i]).collect();
        let b: Vec<f64> = keep.iter().map(|&i| y[i]).collect();
        let (ra, rb) = (ranks(&a), ranks(&b));
        let rho = pearson(&ra, &rb).map_or(0.0, f64::abs);
        if rho > C3_THRESHOLD || keep.len() < 4 {
            return removed;
        }
        let (c, m) = simple_fit(&ra, &rb);
        let mut worst = 0;
        let mut worst_r = -1.0;
        for k in 0..keep.len() {
            let r = (rb[k] - c - m * ra[k]).abs();
            if r > worst_r {
                worst_r = r;
                worst = k;
            }
        }
        keep.remove(worst);
        removed += 1;
    }
}

pub fn c3(x: &[Vec<f64>], y: &[f64]) -> f64 {
    let n = y.len() as f64;
    par::map_range(x[0].len(), |j| c3_removed(&column(x, j), y))
        .into_iter()
        .map(|r| r as f64 / n)
        .fold(f64::INFINITY, f64::min)
}

/// Fraction of points still unexplained after sequential single-feature fits.
pub fn c4(x: &[Vec<f64>], y: &[f64]) -> f64 {
    let n = y.len();
    let rho = feature_correlations(x, y);
    let mut order: Vec<usize> = (0..rho.len()).collect();
    order.sort_by(|&a, &b| rho[b].total_cmp(&rho[a]).then(a.cmp(&b)));
    let mut keep: Vec<usize> = (0..n).collect();
    for j in order {
        if keep.is_empty() {
            break;
        }
        let a: Vec<f64> = keep.iter().map(|&i| x[i][j]).collect();
        let b: Vec<f64> = keep.iter().map(|&i| y[i]).collect();
        let (c, m) = simple_fit(&a, &b);
        keep = keep
            .iter()
            .zip(a.iter().zip(&b))
            .filter(|(_, (u, v))| (*v - c - m * *u).abs() > C4_THRESHOLD)
            .map(|(&i, _)| i)
            .collect();
    }
    keep.len() as f64 / n as f64
}

/// Targets sorted ascending (ties by index).
fn y_order(y: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&a, &b| y[a].total_cmp(&y[b]).then(a.cmp(&b)));
    order
}

pub fn s1(x: &[Vec<f64>], y: &[f64]) -> Result<f64> {
    let edges = minimum_spanning_tree(x)?;
    Ok(edges.iter().map(|&(i, j)| (y[i] - y[j]).abs()).sum::<f64>() / y.len() as f64)
}

pub fn s2(x: &[Vec<f64>], y: &[f64]) -> f64 {
    let order = y_order(y);
    order
        .windows(2)
        .map(|w| dist2(&x[w[1]], &x[w[0]]).sqrt())
        .sum::<f64>()
        / y.len() as f64
}

/// Leave-one-out 1-NN mean squared error.
pub fn s3(x: &[Vec<f64>], y: &[f64]) -> f64 {
    par::map_range(y.len(), |i| {
        let nn = nearest(x, &x[i], Some(i));
        (y[nn] - y[i]).powi(2)
    })
    .into_iter()
    .sum::<f64>()
        / y.len() as f64
}

/// `n − 1` points interpolated between consecutive y-sorted samples.
pub fn interpolated_points(x: &[Vec<f64>], y: &[f64], seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let order = y_order(y);
    let mut r = rng::rng(rng::derive(seed, &[0xC0_4E]));
    let mut xs = Vec::with_capacity(y.len() - 1);
    let mut ys = Vec::with_capacity(y.len() - 1);
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        let t: f64 = r.gen_range(0.0..=1.0);
        xs.push(x[a].iter().zip(&x[b]).map(|(u, v)| u + t * (v - u)).collect());
        ys.push(y[a] + t * (y[b] - y[a]));
    }
    (xs, ys)
}

/// Compute all twelve measures on explicit (already scaled) data.
pub fn profile_from_xy(x: &[Vec<f64>], y: &[f64], seed: u64) -> Result<ComplexityProfile> {
    check(x, y)?;
    let n = y.len() as f64;
    let d = x[0].len();
    let rho = feature_correlations(x, y);
    let c1 = rho.iter().cloned().fold(0.0, f64::max);
    let c2 = rho.iter().sum::<f64>() / d as f64;

    let model = ols_fit(x, y)?;
    let res = model.residuals(x, y);
    let l1 = res.iter().map(|e| e.abs()).sum::<f64>() / n;
    let l2 = res.iter().map(|e| e * e).sum::<f64>() / n;

    let (xi, yi) = interpolated_points(x, y, seed);
    let l = yi.len() as f64;
    let l3 = xi
        .iter()
        .zip(&yi)
        .map(|(r, t)| (model.predict(r) - t).powi(2))
        .sum::<f64>()
        / l;
    let s4 = par::map_range(yi.len(), |k| (y[nearest(x, &xi[k], None)] - yi[k]).powi(2))
        .into_iter()
        .sum::<f64>()
        / l;

    Ok(ComplexityProfile {
        c1,
        c2,
        c3: c3(x, y),
        c4: c4(x, y),
        l1,
        l2,
        l3,
        s1: s1(x, y)?,
        s2: s2(x, y),
        s3: s3(x, y),
        s4,
        t2: n / d as f64,
    })
}

/// Profile of the full (scaled) dataset.
pub fn compute_profile(data: &RegressionDataset, seed: u64) -> Result<ComplexityProfile> {
    profile_from_xy(data.x(), data.y(), seed)
}

/// One CSV row per dataset: `id, c1..t2`.
pub fn write_profiles_csv<W: Write>(w: W, rows: &[(String, ComplexityProfile)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["id"];
    header.extend(MEASURE_NAMES);
    out.write_record(&header)?;
    for (id, p) in rows {
        let mut rec = vec![id.clone()];
        rec.extend(p.to_array().iter().map(|v| v.to_string()));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_profiles_csv<R: Read>(r: R) -> Result<Vec<(String, ComplexityProfile)>> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    let idx: Vec<usize> = MEASURE_NAMES
        .iter()
        .map(|m| {
            headers
                .iter()
                .position(|h| h == *m)
                .ok_or_else(|| Error::invalid(format!("profiles CSV lacks column `{m}`")))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let vals = idx
            .iter()
            .map(|&i| {
                rec[i]
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad number `{}`", &rec[i])))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((rec[0].to_string(), ComplexityProfile::from_slice(&vals)?));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_examples() {
        assert!((spearman_rho(&[1., 2., 3., 4.], &[2., 5., 7., 9.]).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman_rho(&[1., 2., 3., 4.], &[4., 3., 2., 1.]).unwrap() + 1.0).abs() < 1e-12);
        // 1 - 6*6/(3*8)
        assert!((spearman_rho(&[1., 2., 3.], &[3., 1., 2.]).unwrap() + 0.5).abs() < 1e-12);
        assert!(matches!(
            spearman_rho(&[1., 1., 1.], &[1., 2., 3.]),
            Err(Error::UndefinedCorrelation(_))
        ));
        assert!(spearman_rho(&[1., 2.], &[1., 2.]).is_err());
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(ranks(&[10., 20., 20., 5.]), vec![2.0, 3.5, 3.5, 1.0]);
    }

    #[test]
    fn ols_cases() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, (i * i) as f64 % 7.0]).collect();
        let y: Vec<f64> = x.iter().map(|r| 1.5 - 2.0 * r[0] + 0.25 * r[1]).collect();
        let m = ols_fit(&x, &y).unwrap();
        assert!(m.residuals(&x, &y).iter().all(|e| e.abs() < 1e-9));

        let m = ols_fit(&x, &[3.0; 10]).unwrap();
        assert!(m.coefficients.iter().all(|b| b.abs() < 1e-12));
        assert!((m.intercept - 3.0).abs() < 1e-12);

        // two points (1, 2) and (3, 8): slope 3, intercept -1
        let m = ols_fit(&[vec![1.0], vec![3.0]], &[2.0, 8.0]).unwrap();
        assert!((m.coefficients[0] - 3.0).abs() < 1e-12);
        assert!((m.intercept + 1.0).abs() < 1e-12);

        assert!(matches!(
            ols_fit(&[vec![1.0, 2.0], vec![3.0, 1.0]], &[1.0, 2.0]),
            Err(Error::Underdetermined(_))
        ));
    }

    #[test]
    fn ols_rank_deficient() {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let y: Vec<f64> = (0..8).map(|i| 5.0 * i as f64 + 1.0).collect();
        let m = ols_fit(&x, &y).unwrap();
        // minimum-norm split of slope 5 over (1, 2) directions: (1, 2)
        assert!((m.coefficients[0] - 1.0).abs() < 1e-9);
        assert!((m.coefficients[1] - 2.0).abs() < 1e-9);
        let mean: f64 = m.residuals(&x, &y).iter().sum::<f64>() / 8.0;
        assert!(mean.abs() < 1e-9);
    }

    #[test]
    fn mst_small() {
        let x = vec![vec![0.0], vec![1.0], vec![3.0]];
        assert_eq!(minimum_spanning_tree(&x).unwrap(), vec![(0, 1), (1, 2)]);
        assert_eq!(minimum_spanning_tree(&x[..2]).unwrap(), vec![(0, 1)]);
        assert!(minimum_spanning_tree(&x[..1]).is_err());
    }

    fn line_data(n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..n)
            .map(|i| vec![i as f64 / n as f64, ((i * 37) % n) as f64 / n as f64])
            .collect();
        let y = x.iter().map(|r| r[0]).collect();
        (x, y)
    }

    #[test]
    fn perfect_monotone_feature() {
        let (x, y) = line_data(50);
        let p = profile_from_xy(&x, &y, 0).unwrap();
        assert!((p.c1 - 1.0).abs() < 1e-12);
        assert_eq!(p.c3, 0.0);
        assert_eq!(p.t2, 25.0);
        assert!(p.l1 < 1e-9 && p.l2 < 1e-12 && p.l3 < 1e-12);
        assert_eq!(p.c4, 0.0);
    }

    #[test]
    fn duplicated_rows_zero_s3() {
        let (x, y) = line_data(20);
        let x2: Vec<Vec<f64>> = x.iter().chain(&x).cloned().collect();
        let y2: Vec<f64> = y.iter().chain(&y).copied().collect();
        assert_eq!(s3(&x2, &y2), 0.0);
    }

    #[test]
    fn constant_target_rejected() {
        let (x, _) = line_data(20);
        assert!(matches!(
            profile_from_xy(&x, &[0.5; 20], 0),
            Err(Error::DegenerateTarget(_))
        ));
    }

    #[test]
    fn c3_removes_outliers() {
        let xs: Vec<f64> = (0..20).map(f64::from).collect();
        let mut ys = xs.clone();
        ys.swap(0, 19);
        let removed = c3_removed(&xs, &ys);
        assert!((1..=2).contains(&removed), "{removed}");
    }

    #[test]
    fn csv_round_trip() {
        let (x, y) = line_data(30);
        let p = profile_from_xy(&x, &y, 4).unwrap();
        let mut buf = Vec::new();
        write_profiles_csv(&mut buf, &[("f1".into(), p)]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("id,c1,c2,c3,c4,l1,l2,l3,s1,s2,s3,s4,t2\n"));
        let back = read_profiles_csv(&buf[..]).unwrap();
        assert_eq!(back, vec![("f1".to_string(), p)]);
    }
}
