//! Random projection rounding.
//!
//! A trial draws a k×d Gaussian matrix G, labels G x'_i with the first
//! labeling and G y'_j with the second, and records every product ε_i δ_j.
//! Trials are grouped in chunks of [`CHUNK_SIZE`]; chunk c draws from stream
//! c of the seed, and chunk results are merged in index order, so a report
//! depends on (inputs, trials, seed) only.

mod partition;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

pub use partition::{Builtin, GridCell, GridLabeling, Labeling, PartitionPair, Side};

use crate::embedding::VectorSolution;
use crate::error::{invalid, Error, Result};
use crate::problems::{ProblemInstance, SignAssignment};
use crate::rng::{chunk_count, chunk_len, derive_seed, GaussianStream, Welford, CHUNK_SIZE};
use crate::series::KrivineScheme;

pub const MIN_TRIALS: usize = 1000;
const ROUND_DOMAIN: u64 = 0x524f_554e;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RoundingConfig {
    pub trials: usize,
    pub seed: u64,
}

/// k×d matrix of standard normals, filled row by row.
pub fn sample_gaussian_matrix(k: usize, d: usize, stream: &mut GaussianStream) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(k, d);
    for r in 0..k {
        for c in 0..d {
            g[(r, c)] = stream.next_normal();
        }
    }
    g
}

/// Reusable buffers for one rounding trial.
struct Rounder<'a> {
    solution: &'a VectorSolution,
    partition: &'a PartitionPair,
    g: DMatrix<f64>,
    point: Vec<f64>,
    eps: Vec<i8>,
    delta: Vec<i8>,
}

impl<'a> Rounder<'a> {
    fn new(solution: &'a VectorSolution, partition: &'a PartitionPair) -> Self {
        Self {
            solution,
            partition,
            g: DMatrix::zeros(partition.k(), solution.dim()),
            point: vec![0.0; partition.k()],
            eps: vec![0; solution.m()],
            delta: vec![0; solution.n()],
        }
    }

    fn label_rows(&mut self, rows: &DMatrix<f64>, side: Side) {
        for i in 0..rows.nrows() {
            for (r, slot) in self.point.iter_mut().enumerate() {
                *slot = (0..rows.ncols())
                    .map(|c| self.g[(r, c)] * rows[(i, c)])
                    .sum();
            }
            let label = self.partition.apply_unchecked(side, &self.point);
            match side {
                Side::First => self.eps[i] = label,
                Side::Second => self.delta[i] = label,
            }
        }
    }

    fn trial(&mut self, stream: &mut GaussianStream) {
        let (k, d) = self.g.shape();
        for r in 0..k {
            for c in 0..d {
                self.g[(r, c)] = stream.next_normal();
            }
        }
        let solution = self.solution;
        self.label_rows(solution.x(), Side::First);
        self.label_rows(solution.y(), Side::Second);
    }
}

/// One draw of G followed by the partition labels.
///
/// The partition dimension need not match the vectors: G is k×d.
pub fn round_once(
    solution: &VectorSolution,
    partition: &PartitionPair,
    stream: &mut GaussianStream,
) -> (Vec<i8>, Vec<i8>) {
    let mut rounder = Rounder::new(solution, partition);
    rounder.trial(stream);
    (rounder.eps, rounder.delta)
}

/// Statistics of one chunk of trials.
struct ChunkStats {
    products: Vec<i64>,
    objective: Welford,
    best: Option<(f64, Vec<i8>, Vec<i8>)>,
}

impl ChunkStats {
    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.products.iter_mut().zip(other.products) {
            *a += b;
        }
        self.objective = self.objective.merge(other.objective);
        if let Some(candidate) = other.best {
            if self.best.as_ref().is_none_or(|b| candidate.0 > b.0) {
                self.best = Some(candidate);
            }
        }
        self
    }
}

fn run_chunk(
    instance: &ProblemInstance,
    solution: &VectorSolution,
    partition: &PartitionPair,
    seed: u64,
    index: usize,
    len: usize,
) -> ChunkStats {
    let (m, n) = (solution.m(), solution.n());
    let mut stream = GaussianStream::new(seed, index as u64);
    let mut rounder = Rounder::new(solution, partition);
    let mut stats = ChunkStats {
        products: vec![0; m * n],
        objective: Welford::default(),
        best: None,
    };
    for _ in 0..len {
        rounder.trial(&mut stream);
        for (i, &e) in rounder.eps.iter().enumerate() {
            for (j, &d) in rounder.delta.iter().enumerate() {
                stats.products[i * n + j] += i64::from(e * d);
            }
        }
        let value = instance.objective_unchecked(&rounder.eps, &rounder.delta);
        stats.objective.push(value);
        if stats.best.as_ref().is_none_or(|b| value > b.0) {
            stats.best = Some((value, rounder.eps.clone(), rounder.delta.clone()));
        }
    }
    stats
}

/// Empirical sign correlations against the scheme's targets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundingReport {
    pub trials: usize,
    pub seed: u64,
    pub chunk_size: usize,
    pub k: usize,
    pub c: f64,
    /// Empirical E[ε_i δ_j].
    pub per_pair_mean: Vec<Vec<f64>>,
    pub per_pair_stderr: Vec<Vec<f64>>,
    /// c·⟨x_i, y_j⟩ for the original vectors.
    pub target_matrix: Vec<Vec<f64>>,
    /// Σ a_ij · per_pair_mean_ij.
    pub objective_mean: f64,
    pub objective_stderr: f64,
    /// c · Σ a_ij ⟨x_i, y_j⟩.
    pub target_objective: f64,
    /// Best sign pattern seen in any trial.
    pub best: SignAssignment,
}

impl RoundingReport {
    /// (mean − target)/stderr per pair. A zero stderr gives 0 when the mean
    /// equals the target to 1e−12 and infinity otherwise.
    pub fn z_scores(&self) -> Vec<Vec<f64>> {
        self.per_pair_mean
            .iter()
            .zip(&self.per_pair_stderr)
            .zip(&self.target_matrix)
            .map(|((means, errs), targets)| {
                means
                    .iter()
                    .zip(errs)
                    .zip(targets)
                    .map(|((mean, err), target)| z_score(*mean, *err, *target))
                    .collect()
            })
            .collect()
    }

    /// (objective_mean − target_objective)/objective_stderr.
    pub fn objective_z(&self) -> f64 {
        z_score(
            self.objective_mean,
            self.objective_stderr,
            self.target_objective,
        )
    }
}

pub(crate) fn z_score(mean: f64, stderr: f64, target: f64) -> f64 {
    let diff = mean - target;
    if stderr > 0.0 {
        diff / stderr
    } else if diff.abs() <= 1e-12 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

fn rows_of(matrix: &DMatrix<f64>) -> Vec<Vec<f64>> {
    matrix
        .row_iter()
        .map(|r| r.iter().copied().collect())
        .collect()
}

/// Runs `trials` independent roundings of `preprocessed` and compares the
/// sign correlations with c·⟨x_i, y_j⟩ computed from `original`.
pub fn rounding_expectation(
    instance: &ProblemInstance,
    original: &VectorSolution,
    preprocessed: &VectorSolution,
    scheme: &KrivineScheme,
    partition: &PartitionPair,
    config: &RoundingConfig,
) -> Result<RoundingReport> {
    if config.trials < MIN_TRIALS {
        return Err(invalid(
            "trials",
            format!("must be at least {MIN_TRIALS}, got {}", config.trials),
        ));
    }
    let (m, n) = (instance.m(), instance.n());
    for (name, s) in [("original", original), ("preprocessed", preprocessed)] {
        if s.m() != m || s.n() != n {
            return Err(Error::DimensionMismatch(format!(
                "{name} vectors are {}+{}, instance is {m}x{n}",
                s.m(),
                s.n()
            )));
        }
    }
    if partition.k() != scheme.k() as usize {
        return Err(Error::DimensionMismatch(format!(
            "partition has k = {}, scheme has k = {}",
            partition.k(),
            scheme.k()
        )));
    }

    let seed = derive_seed(config.seed, ROUND_DOMAIN);
    let stats = (0..chunk_count(config.trials))
        .into_par_iter()
        .map(|c| {
            let len = chunk_len(config.trials, c);
            run_chunk(instance, preprocessed, partition, seed, c, len)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(ChunkStats::merge)
        .expect("at least one chunk");

    let t = config.trials as f64;
    let mean = DMatrix::from_fn(m, n, |i, j| stats.products[i * n + j] as f64 / t);
    let stderr = mean.map(|p| ((1.0 - p * p).max(0.0) / (t - 1.0)).sqrt());
    let c = scheme.c();
    let target = original.cross_gram() * c;
    let (best_value, eps, delta) = stats.best.expect("at least one trial");
    Ok(RoundingReport {
        trials: config.trials,
        seed: config.seed,
        chunk_size: CHUNK_SIZE,
        k: partition.k(),
        c,
        objective_mean: instance.matrix().component_mul(&mean).sum(),
        objective_stderr: stats.objective.stderr(),
        target_objective: instance.matrix().component_mul(&target).sum(),
        per_pair_mean: rows_of(&mean),
        per_pair_stderr: rows_of(&stderr),
        target_matrix: rows_of(&target),
        best: SignAssignment {
            eps,
            delta,
            value: best_value,
        },
    })
}
