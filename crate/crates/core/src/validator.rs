//! Monte Carlo checks of f_k and of the scheme identity, and the c_k trend.

use rayon::prelude::*;
use serde::Serialize;

use crate::embedding::{preprocess, VectorSolution};
use crate::error::{invalid, Result};
use crate::problems::ProblemInstance;
use crate::rng::{chunk_count, chunk_len, derive_seed, GaussianStream, Welford};
use crate::rounding::{rounding_expectation, PartitionPair, RoundingConfig, RoundingReport};
use crate::series::{KrivineScheme, SchemeConfig, MAX_DIMENSION};

pub const MIN_SAMPLES: usize = 10_000;
/// Per-pair pass threshold in standard errors.
pub const Z_LIMIT: f64 = 4.0;
/// Cells between this and [`Z_LIMIT`] are counted for suite-level checks.
pub const Z_WARN: f64 = 3.0;
const NORM_FLOOR: f64 = 1e-300;
const FK_DOMAIN: u64 = 0x464b_4d43;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub k: u32,
    pub t: f64,
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Estimates f_k(t) = E⟨G₁/‖G₁‖, U/‖U‖⟩ with U = tG₁ + √(1−t²)G₂ for
/// independent standard Gaussian G₁, G₂ in R^k. Pairs where either norm is
/// below 1e−300 are redrawn.
pub fn mc_estimate_fk(k: u32, t: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    if k == 0 || k > MAX_DIMENSION {
        return Err(invalid(
            "k",
            format!("must lie in 1..={MAX_DIMENSION}, got {k}"),
        ));
    }
    if !(-1.0..=1.0).contains(&t) {
        return Err(invalid("t", format!("must lie in [-1, 1], got {t}")));
    }
    if samples < MIN_SAMPLES {
        return Err(invalid(
            "samples",
            format!("must be at least {MIN_SAMPLES}, got {samples}"),
        ));
    }
    let dim = k as usize;
    let s = (1.0 - t * t).sqrt();
    let stream_seed = derive_seed(seed, FK_DOMAIN);
    let stats = (0..chunk_count(samples))
        .into_par_iter()
        .map(|c| {
            let mut stream = GaussianStream::new(stream_seed, c as u64);
            let mut g1 = vec![0.0; dim];
            let mut u = vec![0.0; dim];
            let mut acc = Welford::default();
            for _ in 0..chunk_len(samples, c) {
                let value = loop {
                    stream.fill_normal(&mut g1);
                    stream.fill_normal(&mut u);
                    for (ui, gi) in u.iter_mut().zip(&g1) {
                        *ui = t * gi + s * *ui;
                    }
                    let (n1, nu) = (dot(&g1, &g1).sqrt(), dot(&u, &u).sqrt());
                    if n1 >= NORM_FLOOR && nu >= NORM_FLOOR {
                        break dot(&g1, &u) / (n1 * nu);
                    }
                };
                acc.push(value);
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(Welford::merge)
        .expect("at least one chunk");
    Ok(McEstimate {
        k,
        t,
        value: stats.mean,
        stderr: stats.stderr(),
        samples,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub z_scores: Vec<Vec<f64>>,
    pub max_abs_z: f64,
    /// Fraction of cells with |z| > 3.
    pub fraction_above_warn: f64,
    pub constructive: bool,
    /// max |z| ≤ 4; only meaningful for the constructive partition.
    pub pass: Option<bool>,
    pub report: RoundingReport,
}

/// Preprocesses `original`, rounds it, and scores each pair against
/// c·⟨x_i, y_j⟩.
pub fn verify_scheme_identity(
    instance: &ProblemInstance,
    original: &VectorSolution,
    scheme: &KrivineScheme,
    partition: &PartitionPair,
    config: &RoundingConfig,
) -> Result<IdentityCheck> {
    let preprocessed = preprocess(original, scheme)?;
    let report =
        rounding_expectation(instance, original, &preprocessed, scheme, partition, config)?;
    let z_scores = report.z_scores();
    let cells = z_scores.iter().flatten().count();
    let max_abs_z = z_scores
        .iter()
        .flatten()
        .fold(0.0f64, |m, z| m.max(z.abs()));
    let above = z_scores
        .iter()
        .flatten()
        .filter(|z| z.abs() > Z_WARN)
        .count();
    let constructive = partition.is_constructive();
    Ok(IdentityCheck {
        max_abs_z,
        fraction_above_warn: above as f64 / cells as f64,
        constructive,
        pass: constructive.then_some(max_abs_z <= Z_LIMIT),
        z_scores,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendRow {
    pub k: u32,
    pub c_k: Option<f64>,
    pub overhead: Option<f64>,
    /// k·(1 − c_k).
    pub scaled_gap: Option<f64>,
    /// The constant C entering the paper-mode target.
    pub c_used: Option<f64>,
    pub error: Option<String>,
}

/// Builds a scheme for every k in the range; failures become rows with
/// `error` set.
pub fn quality_trend(k_min: u32, k_max: u32, config: &SchemeConfig) -> Result<Vec<TrendRow>> {
    if k_min == 0 || k_min > k_max || k_max > MAX_DIMENSION {
        return Err(invalid(
            "k range",
            format!("need 1 <= k_min <= k_max <= {MAX_DIMENSION}, got {k_min}..={k_max}"),
        ));
    }
    Ok((k_min..=k_max)
        .into_par_iter()
        .map(|k| match KrivineScheme::build(k, config) {
            Ok(s) => TrendRow {
                k,
                c_k: Some(s.c()),
                overhead: Some(s.overhead()),
                scaled_gap: Some(f64::from(k) * (1.0 - s.c())),
                c_used: s.c_const(),
                error: None,
            },
            Err(e) => TrendRow {
                k,
                c_k: None,
                overhead: None,
                scaled_gap: None,
                c_used: None,
                error: Some(e.to_string()),
            },
        })
        .collect())
}
