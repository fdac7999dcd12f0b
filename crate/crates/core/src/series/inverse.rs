//! Inversion of the odd series f_k and the scheme-constant equation.

use serde::Serialize;

use super::coefficients::{eval_odd, CoefficientTable};
use crate::error::{invalid, Error, Result};

/// A coefficient counts as numerically meaningful while it exceeds its
/// propagated rounding error by this factor.
const SIGNIFICANCE: f64 = 1e6;
/// Inversion stops after this many consecutive noise-dominated coefficients.
const NOISE_RUN: usize = 4;
/// Truncation plus rounding error allowed in h at the solved constant.
pub const H_ERROR_TOL: f64 = 1e-10;
/// Bisection stops once the bracket is this narrow.
const BISECTION_TOL: f64 = 1e-13;
/// `solve_ck` only searches below this fraction of the radius estimate.
pub const RADIUS_SAFETY: f64 = 0.999;

/// Coefficients b_n of f_k^{-1}(w) = Σ b_n w^{2n+1}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseTable {
    k: u32,
    b: Vec<f64>,
    /// Running estimate of the absolute rounding error in each b_n.
    noise: Vec<f64>,
    requested: usize,
    radius_estimate: f64,
}

/// Coefficient matching for the odd composition f(g(w)) = w.
///
/// Writing g(w) = w B(w²), the identity becomes Σ_m a_m v^m B(v)^{2m+1} = 1
/// in v = w². Only the m = 0 term involves b_n in the coefficient of v^n,
/// so each b_n is fixed by the previously computed ones. `powers[m][j]`
/// holds [v^j] B^{2m+1}, maintained incrementally from B², giving O(N³)
/// work overall. The same recursion over absolute values bounds the
/// rounding error of each coefficient.
fn match_coefficients(a: &[f64], n_inv: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let a0 = a[0];
    if !(a0 > 0.0) {
        return Err(invalid("a_0", format!("must be positive, got {a0}")));
    }
    let size = n_inv + 1;
    let mut b = Vec::with_capacity(size);
    let mut noise = Vec::with_capacity(size);
    let mut square = Vec::with_capacity(size);
    let mut square_abs = Vec::with_capacity(size);
    let mut powers = vec![Vec::<f64>::with_capacity(size); size];
    let mut powers_abs = vec![Vec::<f64>::with_capacity(size); size];
    let mut noisy_run = 0;

    for n in 0..size {
        let (bn, err) = if n == 0 {
            (1.0 / a0, f64::EPSILON / a0)
        } else {
            let mut sum = 0.0;
            let mut sum_abs = 0.0;
            for m in 1..=n {
                sum += a[m] * powers[m][n - m];
                sum_abs += a[m] * powers_abs[m][n - m];
            }
            let bn = -sum / a0;
            let err = 4.0 * f64::EPSILON * (sum_abs / a0 + (n as f64 + 1.0) * bn.abs());
            (bn, err)
        };
        if !bn.is_finite() || !err.is_finite() {
            return Err(Error::CoefficientOverflow { index: n });
        }
        b.push(bn);
        noise.push(err);

        // [v^n] B² and then [v^n] B^{2m+1} for every power still needed
        let sq: f64 = (0..=n).map(|i| b[i] * b[n - i]).sum();
        let sq_abs: f64 = (0..=n).map(|i| b[i].abs() * b[n - i].abs()).sum();
        square.push(sq);
        square_abs.push(sq_abs);
        powers[0].push(bn);
        powers_abs[0].push(bn.abs());
        for m in 1..size - n {
            let (lower, upper) = powers.split_at_mut(m);
            let prev = &lower[m - 1];
            upper[0].push((0..=n).map(|i| prev[i] * square[n - i]).sum());
            let (lower, upper) = powers_abs.split_at_mut(m);
            let prev = &lower[m - 1];
            upper[0].push((0..=n).map(|i| prev[i] * square_abs[n - i]).sum());
        }

        if n >= 2 && bn.abs() < SIGNIFICANCE * err {
            noisy_run += 1;
            if noisy_run >= NOISE_RUN {
                break;
            }
        } else {
            noisy_run = 0;
        }
    }

    // keep everything up to the last significant coefficient
    let keep = (0..b.len())
        .rev()
        .find(|&n| n < 2 || b[n].abs() >= SIGNIFICANCE * noise[n])
        .unwrap_or(0);
    b.truncate(keep + 1);
    noise.truncate(keep + 1);
    Ok((b, noise))
}

/// Ratio-test radius of Σ b_n w^{2n+1} over the last quartile of indices.
///
/// Uses the smaller of the smallest observed |b_n / b_{n+1}|^{1/2} and a
/// straight-line extrapolation of |b_n / b_{n+1}| against 1/n to 1/n = 0,
/// which corrects the slow approach from above seen when the nearest
/// singularity is algebraic.
fn estimate_radius(b: &[f64]) -> f64 {
    let last = b.len() - 1;
    if last == 0 {
        return f64::INFINITY;
    }
    let start = (3 * last / 4).min(last - 1);
    let points: Vec<(f64, f64)> = (start..last)
        .filter(|&n| b[n + 1] != 0.0 && b[n] != 0.0)
        .map(|n| (1.0 / (n as f64).max(1.0), (b[n] / b[n + 1]).abs()))
        .collect();
    if points.is_empty() {
        return f64::INFINITY;
    }
    let smallest = points
        .iter()
        .map(|&(_, q)| q)
        .fold(f64::INFINITY, f64::min)
        .sqrt();
    if points.len() < 3 {
        return smallest;
    }
    let len = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / len;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx <= 0.0 {
        return smallest;
    }
    let intercept = mean_y - sxy / sxx * mean_x;
    if intercept > 0.0 {
        smallest.min(intercept.sqrt())
    } else {
        smallest
    }
}

impl InverseTable {
    /// Inverts the first `n_inv + 1` coefficients of `table`.
    ///
    /// The result may hold fewer than `n_inv + 1` coefficients: inversion
    /// stops once the computed b_n are swamped by propagated rounding error
    /// (for k = 1 this happens near n = 10, where the true coefficients of
    /// sin(πw/2) fall below the noise floor).
    pub fn invert(table: &CoefficientTable, n_inv: usize) -> Result<Self> {
        if n_inv > table.degree() {
            return Err(invalid(
                "n_inv",
                format!(
                    "{n_inv} exceeds the coefficient table degree {}",
                    table.degree()
                ),
            ));
        }
        let (b, noise) = match_coefficients(&table.coefficients()[..=n_inv], n_inv)?;
        let radius_estimate = estimate_radius(&b);
        Ok(Self {
            k: table.k(),
            b,
            noise,
            requested: n_inv,
            radius_estimate,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.b
    }

    pub fn degree(&self) -> usize {
        self.b.len() - 1
    }

    pub fn requested_degree(&self) -> usize {
        self.requested
    }

    /// True when inversion stopped early at the noise floor.
    pub fn hit_noise_floor(&self) -> bool {
        self.degree() < self.requested
    }

    pub fn radius_estimate(&self) -> f64 {
        self.radius_estimate
    }

    /// Truncated f_k^{-1}(w).
    pub fn eval(&self, w: f64) -> f64 {
        eval_odd(&self.b, w)
    }

    /// h(c) = Σ |b_n| c^{2n+1}, truncated.
    pub fn h(&self, c: f64) -> f64 {
        let u = c * c;
        c * self.b.iter().rev().fold(0.0, |acc, &x| acc * u + x.abs())
    }

    /// Bound on the error of the truncated `h(c)` (and of `eval(w)` for
    /// |w| <= c): geometric tail through the radius estimate plus the
    /// accumulated rounding error of the retained coefficients.
    pub fn error_bound_at(&self, c: f64) -> f64 {
        let c = c.abs();
        let radius = self.radius_estimate;
        let rounding = c * self.noise.iter().rev().fold(0.0, |acc, &x| acc * c * c + x);
        if c == 0.0 {
            return 0.0;
        }
        if !(c < radius) {
            return f64::INFINITY;
        }
        let truncation = if radius.is_infinite() {
            0.0
        } else {
            let last = self.degree();
            let start = 3 * last / 4;
            // envelope |b_n| <= M R^{-(2n+1)} fitted on the last quartile
            let log_envelope = (start..=last)
                .filter(|&n| self.b[n] != 0.0)
                .map(|n| self.b[n].abs().ln() + (2 * n + 1) as f64 * radius.ln())
                .fold(f64::NEG_INFINITY, f64::max);
            let ratio = c / radius;
            let q = ratio * ratio;
            (log_envelope + (2 * last + 3) as f64 * ratio.ln()).exp() / (1.0 - q)
        };
        truncation + rounding
    }

    /// Solves h(c) = target by bisection on (0, 0.999 · radius_estimate).
    pub fn solve_constant(&self, target: f64) -> Result<f64> {
        if !(target > 0.0) {
            return Err(Error::DegenerateTarget(target));
        }
        let mut hi = RADIUS_SAFETY * self.radius_estimate;
        if !hi.is_finite() {
            // entire inverse: h grows without bound, find a bracket
            hi = 1.0;
            while self.h(hi) < target && hi < 1e6 {
                hi *= 2.0;
            }
        }
        let reached = self.h(hi);
        if !(reached >= target) {
            return Err(Error::TargetUnattainable {
                target,
                reached,
                radius: self.radius_estimate,
            });
        }
        let mut lo = 0.0;
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if self.h(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let c = 0.5 * (lo + hi);
        let bound = self.error_bound_at(c);
        if !(bound <= H_ERROR_TOL) {
            return Err(Error::TruncationTooCoarse {
                c,
                bound,
                tol: H_ERROR_TOL,
            });
        }
        Ok(c)
    }
}
