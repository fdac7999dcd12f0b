//! Taylor coefficients of f_k, the expected inner product of two normalized
//! Gaussian vectors in R^k as a function of their correlation.
//!
//! f_k(t) = Σ_n a_n t^{2n+1} with
//!
//! ```text
//! a_0     = (2/k) (Γ((k+1)/2) / Γ(k/2))²
//! a_{n+1} = a_n (2n+1)² / ((2n+2)(k+2n+2))
//! ```
//!
//! All coefficients are positive and sum to f_k(1) = 1.

use serde::{Deserialize, Serialize};

use super::gamma::gamma_half_ratio;
use crate::error::{invalid, Error, Result};

pub const DEFAULT_TAIL_TOL: f64 = 1e-14;
pub const DEFAULT_MAX_TERMS: usize = 512;
const MIN_TERMS: usize = 2;

/// What to do when the term cap is reached before the tail tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapPolicy {
    /// Keep the capped table; its certified `tail_bound` is reported as is.
    #[default]
    Truncate,
    /// Fail with [`Error::TailNotConverged`].
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationConfig {
    pub tail_tol: f64,
    pub max_terms: usize,
    pub cap_policy: CapPolicy,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            tail_tol: DEFAULT_TAIL_TOL,
            max_terms: DEFAULT_MAX_TERMS,
            cap_policy: CapPolicy::Truncate,
        }
    }
}

impl TruncationConfig {
    pub fn with_tail_tol(tail_tol: f64) -> Self {
        Self {
            tail_tol,
            ..Self::default()
        }
    }
}

/// Truncated series {a_n(k)} with a certified bound on the neglected tail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable {
    k: u32,
    a: Vec<f64>,
    tail_bound: f64,
    tail_tol: Option<f64>,
}

/// a_{n+1} / a_n.
#[inline]
pub fn coefficient_ratio(k: u32, n: usize) -> f64 {
    let n = n as f64;
    let k = f64::from(k);
    (2.0 * n + 1.0) * (2.0 * n + 1.0) / ((2.0 * n + 2.0) * (k + 2.0 * n + 2.0))
}

/// Upper bound on Σ_{n>last} a_n given a_{last+1}.
///
/// With β_n = 2n/k + 1 + 1/(k(k+2)) the coefficients telescope up to a
/// small defect: β_n a_n − β_{n+1} a_{n+1} = a_n (1 − ε_n), where
/// ε_n = (1 + 1/(k(k+2))) / ((2n+2)(2n+k+2)) decreases in n. Summing from
/// last+1 gives β a_{last+1} ≤ tail ≤ β a_{last+1} / (1 − ε_{last+1}).
fn tail_bound_after(k: u32, last: usize, next: f64) -> f64 {
    let kf = f64::from(k);
    let n = (last + 1) as f64;
    let defect = 1.0 / (kf * (kf + 2.0));
    let beta = 2.0 * n / kf + 1.0 + defect;
    let eps = (1.0 + defect) / ((2.0 * n + 2.0) * (2.0 * n + kf + 2.0));
    // slack for the O(n) rounding accumulated by the product recurrence
    beta * next / (1.0 - eps) * (1.0 + 1e-12)
}

/// a_0(k) = (2/k) (Γ((k+1)/2) / Γ(k/2))².
pub fn leading_coefficient(k: u32) -> Result<f64> {
    let r = gamma_half_ratio(k)?;
    Ok(2.0 / f64::from(k) * r * r)
}

impl CoefficientTable {
    /// Builds the table with the smallest N whose certified tail bound
    /// meets `config.tail_tol`.
    pub fn compute(k: u32, config: &TruncationConfig) -> Result<Self> {
        if !(config.tail_tol > 0.0 && config.tail_tol <= 1e-4) {
            return Err(invalid(
                "tail_tol",
                format!("must lie in (0, 1e-4], got {}", config.tail_tol),
            ));
        }
        if config.max_terms < MIN_TERMS {
            return Err(invalid(
                "max_terms",
                format!("must be at least {MIN_TERMS}"),
            ));
        }
        let mut a = vec![leading_coefficient(k)?];
        loop {
            let last = a.len() - 1;
            let next = a[last] * coefficient_ratio(k, last);
            let tail = tail_bound_after(k, last, next);
            if last >= MIN_TERMS && tail <= config.tail_tol {
                return Ok(Self {
                    k,
                    a,
                    tail_bound: tail,
                    tail_tol: Some(config.tail_tol),
                });
            }
            if last >= config.max_terms {
                return match config.cap_policy {
                    CapPolicy::Truncate => Ok(Self {
                        k,
                        a,
                        tail_bound: tail,
                        tail_tol: Some(config.tail_tol),
                    }),
                    CapPolicy::Error => Err(Error::TailNotConverged {
                        k,
                        cap: config.max_terms,
                        tail_tol: config.tail_tol,
                        tail_bound: tail,
                    }),
                };
            }
            a.push(next);
        }
    }

    /// Table holding exactly a_0..=a_n.
    pub fn with_terms(k: u32, n: usize) -> Result<Self> {
        let mut a = Vec::with_capacity(n + 1);
        a.push(leading_coefficient(k)?);
        for j in 0..n {
            a.push(a[j] * coefficient_ratio(k, j));
        }
        let next = a[n] * coefficient_ratio(k, n);
        Ok(Self {
            k,
            tail_bound: tail_bound_after(k, n, next),
            a,
            tail_tol: None,
        })
    }

    /// Same table grown (never shrunk) to hold at least a_0..=a_n.
    pub fn extended_to(&self, n: usize) -> Self {
        if n <= self.degree() {
            return self.clone();
        }
        let mut a = self.a.clone();
        for j in self.degree()..n {
            a.push(a[j] * coefficient_ratio(self.k, j));
        }
        let next = a[n] * coefficient_ratio(self.k, n);
        Self {
            k: self.k,
            tail_bound: tail_bound_after(self.k, n, next),
            a,
            tail_tol: self.tail_tol,
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Truncation index N: the table holds a_0..=a_N.
    pub fn degree(&self) -> usize {
        self.a.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.a
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn tail_tol(&self) -> Option<f64> {
        self.tail_tol
    }

    pub fn tail_tol_met(&self) -> bool {
        self.tail_tol.is_none_or(|tol| self.tail_bound <= tol)
    }

    /// Σ_{n=from}^{N} a_n, summed from the small end.
    pub fn partial_sum_from(&self, from: usize) -> f64 {
        self.a.iter().skip(from).rev().sum()
    }

    /// Truncated f_k(t); the absolute error is at most `tail_bound`.
    ///
    /// Exactly odd: `eval(-t) == -eval(t)` bit for bit.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t.abs() <= 1.0) {
            return Err(invalid("t", format!("|t| must be at most 1, got {t}")));
        }
        Ok(eval_odd(&self.a, t))
    }
}

/// Σ_n coeffs[n] t^{2n+1} by Horner's rule in t².
pub(crate) fn eval_odd(coeffs: &[f64], t: f64) -> f64 {
    let u = t * t;
    t * coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
}
