//! Genetic search over reduced regressor chromosomes.
//!
//! Fitness is −R² on the training split after a short Adam run, so lower is
//! better. Each chromosome trains from an initialization seeded by its own
//! genes, which makes fitness a pure function of the genes and lets results
//! be cached for the whole run.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::benchmarks::RegressionDataset;
use crate::circuit::chromosome::random_chromosome_with;
use crate::circuit::Chromosome;
use crate::train::{train, Metrics, TrainConfig};
use crate::{par, rng, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GAConfig {
    pub population: usize,
    pub generations: usize,
    pub elites: usize,
    pub mutation_genome_fraction: f64,
    pub mutation_individual_prob: f64,
    pub n_gates: usize,
    pub n_qubits: usize,
    pub fitness_epochs: usize,
    pub seed: u64,
}

impl Default for GAConfig {
    fn default() -> Self {
        Self {
            population: 20,
            generations: 15,
            elites: 4,
            mutation_genome_fraction: 0.10,
            mutation_individual_prob: 0.20,
            n_gates: 20,
            n_qubits: 1,
            fitness_epochs: 100,
            seed: 0,
        }
    }
}

impl GAConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: &str| Err(Error::config(field, msg));
        if self.population < 2 {
            return bad("population", "must be at least 2");
        }
        if self.elites == 0 || self.elites >= self.population {
            return bad("elites", "must satisfy 1 <= elites < population");
        }
        if !(0.0..=1.0).contains(&self.mutation_genome_fraction) {
            return bad("mutation_genome_fraction", "must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.mutation_individual_prob) {
            return bad("mutation_individual_prob", "must lie in [0, 1]");
        }
        if self.n_gates == 0 {
            return bad("n_gates", "must be at least 1");
        }
        if self.n_qubits == 0 {
            return bad("n_qubits", "must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GAResult {
    pub best_chromosome: Chromosome,
    pub best_params: Vec<f64>,
    /// Best fitness of the initial population, then after each generation.
    pub best_fitness_history: Vec<f64>,
    pub final_metrics: Metrics,
    pub final_train_metrics: Metrics,
    /// Number of distinct chromosomes trained during the search.
    pub evaluations: usize,
}

fn check_parents(p1: &Chromosome, p2: &Chromosome) -> Result<()> {
    if p1.n_gates() != p2.n_gates() || p1.n_qubits() != p2.n_qubits() {
        return Err(Error::invalid(format!(
            "parents differ in shape: ({}, {}) vs ({}, {})",
            p1.n_gates(),
            p1.n_qubits(),
            p2.n_gates(),
            p2.n_qubits()
        )));
    }
    Ok(())
}

/// Child `p1[..k] ++ p2[k..]` for a fixed cut `k`.
pub fn crossover_at(p1: &Chromosome, p2: &Chromosome, k: usize) -> Result<Chromosome> {
    check_parents(p1, p2)?;
    if k > p1.len() {
        return Err(Error::invalid(format!("cut {k} beyond length {}", p1.len())));
    }
    let genes = p1.genes()[..k].iter().chain(&p2.genes()[k..]).copied().collect();
    p1.with_genes(genes)
}

/// Single-point crossover with a uniform cut in `1..len`.
pub fn crossover_single_point<R: Rng>(p1: &Chromosome, p2: &Chromosome, rng: &mut R) -> Result<Chromosome> {
    check_parents(p1, p2)?;
    let k = rng.gen_range(1..p1.len());
    crossover_at(p1, p2, k)
}

/// Positions that a mutation would redraw, or `None` when the individual is
/// left alone.
pub fn mutation_positions<R: Rng>(len: usize, config: &GAConfig, rng: &mut R) -> Option<Vec<usize>> {
    if !rng.gen_bool(config.mutation_individual_prob) {
        return None;
    }
    let m = ((config.mutation_genome_fraction * len as f64).ceil() as usize).min(len);
    let mut pos = sample(rng, len, m).into_vec();
    pos.sort_unstable();
    Some(pos)
}

/// With probability `mutation_individual_prob`, redraw ⌈fraction·len⌉
/// distinct genes from their own alphabets.
pub fn mutate<R: Rng>(c: &Chromosome, config: &GAConfig, rng: &mut R) -> Chromosome {
    let Some(pos) = mutation_positions(c.len(), config, rng) else {
        return c.clone();
    };
    let mut genes = c.genes().to_vec();
    for p in pos {
        genes[p] = rng.gen_range(0..c.alphabet_at(p));
    }
    c.with_genes(genes).expect("redrawn genes stay inside their alphabets")
}

fn chromosome_seed(seed: u64, c: &Chromosome) -> u64 {
    rng::derive(seed, &[0x6A, rng::hash_slice(c.genes())])
}

fn evaluate(
    c: &Chromosome,
    data: &RegressionDataset,
    train_config: &TrainConfig,
    epochs: usize,
    seed: u64,
) -> Result<f64> {
    let circuit = c.decode()?;
    let cfg = TrainConfig {
        epochs,
        seed: chromosome_seed(seed, c),
        ..train_config.clone()
    };
    let res = train(&circuit, data, &cfg)?;
    Ok(-res.train_metrics.r2)
}

/// Sort key: fitness ascending, then lexicographic genes.
fn rank<'a>(pop: &'a [Chromosome], cache: &HashMap<Chromosome, f64>) -> Vec<&'a Chromosome> {
    let mut v: Vec<&Chromosome> = pop.iter().collect();
    v.sort_by(|a, b| {
        cache[*a]
            .total_cmp(&cache[*b])
            .then_with(|| a.genes().cmp(b.genes()))
    });
    v
}

pub fn run_ga(config: &GAConfig, data: &RegressionDataset, train_config: &TrainConfig) -> Result<GAResult> {
    config.validate()?;
    train_config.validate()?;
    let seed = config.seed;
    let mut cache: HashMap<Chromosome, f64> = HashMap::new();

    let fill = |pop: &[Chromosome], cache: &mut HashMap<Chromosome, f64>| -> Result<()> {
        let mut todo: Vec<Chromosome> = Vec::new();
        for c in pop {
            if !cache.contains_key(c) && !todo.contains(c) {
                todo.push(c.clone());
            }
        }
        let done = par::try_map(&todo, |c| evaluate(c, data, train_config, config.fitness_epochs, seed))?;
        cache.extend(todo.into_iter().zip(done));
        Ok(())
    };

    let mut pop: Vec<Chromosome> = (0..config.population)
        .map(|i| {
            let mut r = rng::rng(rng::derive(seed, &[0, i as u64]));
            random_chromosome_with(config.n_gates, config.n_qubits, &mut r)
        })
        .collect::<Result<_>>()?;
    fill(&pop, &mut cache)?;
    let mut history = vec![cache[rank(&pop, &cache)[0]]];

    for g in 0..config.generations {
        let elites: Vec<Chromosome> = rank(&pop, &cache)
            .into_iter()
            .take(config.elites)
            .cloned()
            .collect();
        let offspring: Vec<Chromosome> = (0..config.population - config.elites)
            .map(|k| {
                let mut r = rng::rng(rng::derive(seed, &[1, g as u64, k as u64]));
                let a = &elites[r.gen_range(0..elites.len())];
                let b = &elites[r.gen_range(0..elites.len())];
                let child = crossover_single_point(a, b, &mut r)?;
                Ok(mutate(&child, config, &mut r))
            })
            .collect::<Result<_>>()?;
        pop = elites.into_iter().chain(offspring).collect();
        fill(&pop, &mut cache)?;
        history.push(cache[rank(&pop, &cache)[0]]);
    }

    let best = rank(&pop, &cache)[0].clone();
    let circuit = best.decode()?;
    let cfg = TrainConfig {
        seed: chromosome_seed(seed, &best),
        ..train_config.clone()
    };
    let res = train(&circuit, data, &cfg)?;
    Ok(GAResult {
        best_chromosome: best,
        best_params: res.final_params,
        best_fitness_history: history,
        final_metrics: res.full_metrics,
        final_train_metrics: res.train_metrics,
        evaluations: cache.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{generate_dataset, FunctionId};
    use crate::circuit::random_chromosome;

    fn chrom(genes: Vec<u32>) -> Chromosome {
        Chromosome::new(genes.len() / 3, 1, genes).unwrap()
    }

    #[test]
    fn crossover_pinned_cut() {
        let a = chrom(vec![0; 6]);
        let b = Chromosome::new(2, 2, vec![1; 6]).unwrap();
        assert!(crossover_at(&a, &b, 3).is_err());
        let b1 = Chromosome::new(2, 1, vec![1, 1, 0, 0, 0, 0]).unwrap();
        let c = crossover_at(&a, &b1, 1).unwrap();
        assert_eq!(c.genes(), &[0, 1, 0, 0, 0, 0]);
        let mut r = rng::rng(0);
        assert_eq!(crossover_single_point(&a, &a, &mut r).unwrap(), a);
    }

    #[test]
    fn mutation_boundaries() {
        let c = random_chromosome(40, 2, 5).unwrap();
        let mut r = rng::rng(1);
        let cfg = GAConfig { mutation_individual_prob: 0.0, ..Default::default() };
        assert_eq!(mutate(&c, &cfg, &mut r), c);
        let cfg = GAConfig { mutation_individual_prob: 1.0, mutation_genome_fraction: 1.0, ..Default::default() };
        let m = mutate(&c, &cfg, &mut r);
        assert_eq!(m.len(), c.len());
        let cfg = GAConfig { mutation_individual_prob: 1.0, mutation_genome_fraction: 0.10, ..Default::default() };
        let pos = mutation_positions(360, &cfg, &mut r).unwrap();
        assert_eq!(pos.len(), 36);
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn config_validation() {
        assert!(GAConfig::default().validate().is_ok());
        let e = GAConfig { elites: 20, ..Default::default() }.validate().unwrap_err();
        assert!(e.is_config());
        assert!(GAConfig { mutation_genome_fraction: 1.5, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn small_run_is_elitist_and_deterministic() {
        let data = generate_dataset(FunctionId::OneD(1), 60, 2).unwrap();
        let cfg = GAConfig {
            population: 6,
            generations: 3,
            elites: 2,
            n_gates: 5,
            n_qubits: 1,
            fitness_epochs: 5,
            seed: 9,
            ..Default::default()
        };
        let tc = TrainConfig { epochs: 10, ..Default::default() };
        let a = run_ga(&cfg, &data, &tc).unwrap();
        assert_eq!(a.best_fitness_history.len(), 4);
        assert!(a.best_fitness_history.windows(2).all(|w| w[1] <= w[0]));
        let b = run_ga(&cfg, &data, &tc).unwrap();
        assert_eq!(a, b);
        let json = serde_json::to_value(&a).unwrap();
        assert!(json["best_chromosome"]["genes"].is_array());
    }

    #[test]
    fn zero_generations() {
        let data = generate_dataset(FunctionId::OneD(2), 40, 1).unwrap();
        let cfg = GAConfig {
            population: 4,
            generations: 0,
            elites: 1,
            n_gates: 3,
            fitness_epochs: 2,
            ..Default::default()
        };
        let r = run_ga(&cfg, &data, &TrainConfig { epochs: 2, ..Default::default() }).unwrap();
        assert_eq!(r.best_fitness_history.len(), 1);
        assert!(r.evaluations <= 4);
    }
}
