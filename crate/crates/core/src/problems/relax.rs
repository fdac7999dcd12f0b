//! Low-rank ascent for max Σ a_ij ⟨x_i, y_j⟩ over unit vectors.
//!
//! Rows of X (m×r) and Y (n×r) live on unit spheres. Each iteration takes a
//! Riemannian gradient step (Euclidean gradient A Y, resp. Aᵀ X, with the
//! radial component removed) and retracts by renormalizing rows. The step
//! doubles after an accepted move and halves until the Armijo condition
//! holds.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::ProblemInstance;
use crate::embedding::VectorSolution;
use crate::error::{invalid, Result};
use crate::rng::{derive_seed, GaussianStream};

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-18;
const MAX_STEP: f64 = 1e6;
const RELAX_DOMAIN: u64 = 0x5245_4c41;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxConfig {
    pub rank: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub seed: u64,
}

impl RelaxConfig {
    /// rank = min(m + n, 20), 5 restarts, 5000 iterations, gradient 1e-8.
    pub fn for_instance(instance: &ProblemInstance, seed: u64) -> Self {
        Self {
            rank: (instance.m() + instance.n()).min(20),
            restarts: 5,
            max_iters: 5000,
            grad_tol: 1e-8,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxOutcome {
    pub solution: VectorSolution,
    pub value: f64,
    /// Some restart reached the gradient tolerance.
    pub converged: bool,
    pub grad_norm: f64,
    pub iterations: usize,
    pub best_restart: usize,
}

struct Run {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
    value: f64,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
}

fn normalize_rows(mut m: DMatrix<f64>) -> DMatrix<f64> {
    for mut row in m.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    m
}

/// Removes from each gradient row its component along the matching point.
fn tangent(grad: &DMatrix<f64>, point: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = grad.clone();
    for (mut g, p) in out.row_iter_mut().zip(point.row_iter()) {
        let radial = g.dot(&p);
        g -= p * radial;
    }
    out
}

fn objective(a: &DMatrix<f64>, x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    a.component_mul(&(x * y.transpose())).sum()
}

fn random_sphere_rows(rows: usize, rank: usize, stream: &mut GaussianStream) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(rows, rank, |_, _| stream.next_normal());
        if m.row_iter().all(|r| r.norm() > 1e-12) {
            return normalize_rows(m);
        }
    }
}

fn ascend(a: &DMatrix<f64>, config: &RelaxConfig, restart: usize) -> Run {
    let mut stream = GaussianStream::new(derive_seed(config.seed, RELAX_DOMAIN), restart as u64);
    let mut x = random_sphere_rows(a.nrows(), config.rank, &mut stream);
    let mut y = random_sphere_rows(a.ncols(), config.rank, &mut stream);
    let mut value = objective(a, &x, &y);
    let scale = a.abs().max().max(f64::MIN_POSITIVE);
    let mut step = 1.0 / scale;
    let mut grad_norm = f64::INFINITY;

    for iteration in 0..config.max_iters {
        let gx = tangent(&(a * &y), &x);
        let gy = tangent(&(a.transpose() * &x), &y);
        let sq = gx.norm_squared() + gy.norm_squared();
        grad_norm = sq.sqrt();
        if grad_norm <= config.grad_tol {
            return Run {
                x,
                y,
                value,
                grad_norm,
                iterations: iteration,
                converged: true,
            };
        }
        loop {
            let nx = normalize_rows(&x + &gx * step);
            let ny = normalize_rows(&y + &gy * step);
            let candidate = objective(a, &nx, &ny);
            if candidate >= value + ARMIJO * step * sq {
                x = nx;
                y = ny;
                value = candidate;
                step = (2.0 * step).min(MAX_STEP);
                break;
            }
            step *= 0.5;
            if step < MIN_STEP {
                // no ascent direction left at working precision
                return Run {
                    x,
                    y,
                    value,
                    grad_norm,
                    iterations: iteration,
                    converged: false,
                };
            }
        }
    }
    Run {
        x,
        y,
        value,
        grad_norm,
        iterations: config.max_iters,
        converged: false,
    }
}

/// Best of `restarts` independent ascents, ranked by (value, restart index).
pub fn sdp_relax(instance: &ProblemInstance, config: &RelaxConfig) -> Result<RelaxOutcome> {
    if config.rank < 2 {
        return Err(invalid(
            "rank",
            format!("must be at least 2, got {}", config.rank),
        ));
    }
    if config.restarts == 0 {
        return Err(invalid("restarts", "must be positive"));
    }
    if !(config.grad_tol > 0.0) {
        return Err(invalid("grad_tol", "must be positive"));
    }
    let a = instance.matrix();
    let runs: Vec<Run> = (0..config.restarts)
        .into_par_iter()
        .map(|r| ascend(a, config, r))
        .collect();
    let converged = runs.iter().any(|r| r.converged);
    let (best_restart, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|best, cur| {
            if cur.1.value > best.1.value {
                cur
            } else {
                best
            }
        })
        .expect("at least one restart");
    let solution = VectorSolution::new(best.x, best.y)?.with_value(best.value);
    Ok(RelaxOutcome {
        solution,
        value: best.value,
        converged,
        grad_norm: best.grad_norm,
        iterations: best.iterations,
        best_restart,
    })
}
