#![allow(dead_code)]

use krivine::embedding::VectorSolution;
use krivine::problems::ProblemInstance;
use krivine::rng::GaussianStream;
use nalgebra::DMatrix;

pub fn gaussian(rows: usize, cols: usize, stream: &mut GaussianStream) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| stream.next_normal())
}

/// Uniform random unit vectors in R^d.
pub fn random_solution(
    m: usize,
    n: usize,
    d: usize,
    stream: &mut GaussianStream,
) -> VectorSolution {
    VectorSolution::from_unnormalized(gaussian(m, d, stream), gaussian(n, d, stream)).unwrap()
}

pub fn random_instance(m: usize, n: usize, stream: &mut GaussianStream) -> ProblemInstance {
    ProblemInstance::new(gaussian(m, n, stream)).unwrap()
}

/// Integer in 1..=max from a uniform draw.
pub fn small(max: usize, stream: &mut GaussianStream) -> usize {
    1 + (stream.next_uniform() * max as f64) as usize
}
