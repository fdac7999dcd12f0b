//! Preprocessing at the level of Gram matrices.
//!
//! The maps S and T send a unit vector x to the tensor series
//! (±|b_n|^{1/2} c^{(2n+1)/2} x^{⊗(2n+1)})_n followed by two padding
//! coordinates. We never build those vectors: every inner product between
//! images is a scalar function of ⟨x, y⟩, so the transformed Gram matrix is
//! computed entrywise and factorized back into (m+n)-dimensional vectors.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Error, Result};
use crate::series::KrivineScheme;

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const DIAGONAL_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-8;
const UNIT_TOL: f64 = 1e-10;

/// Unit vectors x_1..x_m and y_1..y_n stored as matrix rows.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSolution {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
    value: Option<f64>,
}

impl VectorSolution {
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self> {
        if x.nrows() == 0 || y.nrows() == 0 {
            return Err(invalid("vectors", "both sides need at least one vector"));
        }
        if x.ncols() != y.ncols() || x.ncols() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "x vectors have dimension {}, y vectors {}",
                x.ncols(),
                y.ncols()
            )));
        }
        for (side, rows) in [("x", &x), ("y", &y)] {
            for (i, row) in rows.row_iter().enumerate() {
                let norm = row.norm();
                if !((norm - 1.0).abs() <= UNIT_TOL) {
                    return Err(invalid(
                        "vectors",
                        format!("{side}_{i} has norm {norm}, expected 1"),
                    ));
                }
            }
        }
        Ok(Self { x, y, value: None })
    }

    /// Normalizes every row first; rows must be nonzero.
    pub fn from_unnormalized(mut x: DMatrix<f64>, mut y: DMatrix<f64>) -> Result<Self> {
        for rows in [&mut x, &mut y] {
            for mut row in rows.row_iter_mut() {
                let norm = row.norm();
                if !(norm > 0.0 && norm.is_finite()) {
                    return Err(invalid("vectors", "cannot normalize a zero vector"));
                }
                row /= norm;
            }
        }
        Self::new(x, y)
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn m(&self) -> usize {
        self.x.nrows()
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    /// Objective value attached by the relaxation solver, if any.
    pub fn value(&self) -> Option<f64> {
        self.value
    }

    pub fn with_value(mut self, value: f64) -> Self {
        self.value = Some(value);
        self
    }

    /// ⟨x_i, y_j⟩ as an m×n matrix.
    pub fn cross_gram(&self) -> DMatrix<f64> {
        &self.x * self.y.transpose()
    }

    /// Full (m+n)×(m+n) Gram matrix, x-side first.
    pub fn gram(&self) -> DMatrix<f64> {
        let stacked = self.stacked();
        &stacked * stacked.transpose()
    }

    fn stacked(&self) -> DMatrix<f64> {
        let (m, n, d) = (self.m(), self.n(), self.dim());
        let mut stacked = DMatrix::zeros(m + n, d);
        stacked.rows_mut(0, m).copy_from(&self.x);
        stacked.rows_mut(m, n).copy_from(&self.y);
        stacked
    }

    /// Same vectors with the y side negated.
    pub fn negate_y(&self) -> Self {
        Self {
            x: self.x.clone(),
            y: -&self.y,
            value: self.value.map(|v| -v),
        }
    }
}

fn check_unit_range(t: f64) -> Result<f64> {
    if t.abs() <= 1.0 {
        Ok(t)
    } else if t.abs() <= 1.0 + DIAGONAL_TOL {
        Ok(t.clamp(-1.0, 1.0))
    } else {
        Err(invalid("t", format!("|t| must be at most 1, got {t}")))
    }
}

/// ⟨T(x), S(y)⟩ for ⟨x, y⟩ = t, i.e. Σ b_n (c t)^{2n+1} = f_k^{-1}(c t).
pub fn kernel_cross(t: f64, scheme: &KrivineScheme) -> Result<f64> {
    Ok(cross_unchecked(check_unit_range(t)?, scheme))
}

/// ⟨S(x), S(x')⟩ = ⟨T(x), T(x')⟩ for ⟨x, x'⟩ = t: Σ |b_n| (c t)^{2n+1}
/// plus the padding 4C/k (zero in sharp mode). Equals 1 at t = 1.
pub fn kernel_same(t: f64, scheme: &KrivineScheme) -> Result<f64> {
    Ok(same_unchecked(check_unit_range(t)?, scheme))
}

fn cross_unchecked(t: f64, scheme: &KrivineScheme) -> f64 {
    scheme.inverse().eval(scheme.c() * t)
}

fn same_unchecked(t: f64, scheme: &KrivineScheme) -> f64 {
    scheme.inverse().h(scheme.c() * t) + scheme.padding()
}

/// Transformed Gram matrix of (T(x_1)..T(x_m), S(y_1)..S(y_n)).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockKernel {
    h: DMatrix<f64>,
    m: usize,
    n: usize,
    min_eigenvalue: f64,
    clipped: bool,
}

fn min_eigenvalue(matrix: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(matrix.clone()).eigenvalues.min()
}

/// Applies the kernels entrywise: same-side blocks through
/// [`kernel_same`], the cross blocks through [`kernel_cross`].
///
/// `gram` must be symmetric with unit diagonal and (numerically) PSD; its
/// first `m` indices are the x side.
pub fn transform_gram(
    gram: &DMatrix<f64>,
    m: usize,
    scheme: &KrivineScheme,
) -> Result<BlockKernel> {
    let size = gram.nrows();
    if gram.ncols() != size {
        return Err(Error::NotGram(format!(
            "{}x{} is not square",
            size,
            gram.ncols()
        )));
    }
    if m == 0 || m >= size {
        return Err(Error::NotGram(format!(
            "split {m} leaves an empty side in a {size}x{size} matrix"
        )));
    }
    for i in 0..size {
        if !((gram[(i, i)] - 1.0).abs() <= DIAGONAL_TOL) {
            return Err(Error::NotGram(format!(
                "diagonal entry {i} is {}",
                gram[(i, i)]
            )));
        }
        for j in 0..i {
            let (a, b) = (gram[(i, j)], gram[(j, i)]);
            if !((a - b).abs() <= SYMMETRY_TOL) {
                return Err(Error::NotGram(format!("asymmetric at ({i}, {j})")));
            }
            if !(a.abs() <= 1.0 + DIAGONAL_TOL) {
                return Err(Error::NotGram(format!(
                    "entry ({i}, {j}) = {a} outside [-1, 1]"
                )));
            }
        }
    }
    let input_min = min_eigenvalue(gram);
    if input_min < -PSD_TOL {
        return Err(Error::NotGram(format!("minimum eigenvalue {input_min:e}")));
    }

    let mut h = DMatrix::zeros(size, size);
    for i in 0..size {
        for j in 0..=i {
            let t = gram[(i, j)].clamp(-1.0, 1.0);
            let same_side = (i < m) == (j < m);
            let value = if same_side {
                same_unchecked(t, scheme)
            } else {
                cross_unchecked(t, scheme)
            };
            h[(i, j)] = value;
            h[(j, i)] = value;
        }
    }
    let min_eigenvalue = min_eigenvalue(&h);
    if min_eigenvalue < -PSD_TOL {
        return Err(Error::KernelNotPsd { min_eigenvalue });
    }
    Ok(BlockKernel {
        h,
        m,
        n: size - m,
        min_eigenvalue,
        clipped: min_eigenvalue < 0.0,
    })
}

impl BlockKernel {
    /// Wraps an arbitrary symmetric matrix, checking only the PSD threshold.
    pub fn from_matrix(h: DMatrix<f64>, m: usize) -> Result<Self> {
        let size = h.nrows();
        if h.ncols() != size || m == 0 || m >= size {
            return Err(Error::DimensionMismatch(format!(
                "cannot split a {}x{} kernel at {m}",
                size,
                h.ncols()
            )));
        }
        let min_eigenvalue = min_eigenvalue(&h);
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::KernelNotPsd { min_eigenvalue });
        }
        Ok(Self {
            h,
            m,
            n: size - m,
            min_eigenvalue,
            clipped: min_eigenvalue < 0.0,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// Whether realization has to clip slightly negative eigenvalues.
    pub fn clipped(&self) -> bool {
        self.clipped
    }

    /// Factorizes H = V Vᵀ through its symmetric eigendecomposition.
    ///
    /// Eigenvalues in [−1e−8, 0) are set to zero and the rows renormalized,
    /// so the returned vectors are exactly unit length.
    pub fn realize(&self) -> Result<VectorSolution> {
        realize_vectors(self)
    }
}

pub fn realize_vectors(kernel: &BlockKernel) -> Result<VectorSolution> {
    let eigen = SymmetricEigen::new(kernel.h.clone());
    let min = eigen.eigenvalues.min();
    if min < -PSD_TOL {
        return Err(Error::KernelNotPsd {
            min_eigenvalue: min,
        });
    }
    let scales = eigen.eigenvalues.map(|l| l.max(0.0).sqrt());
    let mut vectors = eigen.eigenvectors;
    for (mut column, scale) in vectors.column_iter_mut().zip(scales.iter()) {
        column *= *scale;
    }
    let x = vectors.rows(0, kernel.m).into_owned();
    let y = vectors.rows(kernel.m, kernel.n).into_owned();
    VectorSolution::from_unnormalized(x, y)
}

/// Gram matrix → [`transform_gram`] → [`realize_vectors`].
pub fn preprocess(solution: &VectorSolution, scheme: &KrivineScheme) -> Result<VectorSolution> {
    transform_gram(&solution.gram(), solution.m(), scheme)?.realize()
}
