//! Exact maximization of Σ a_ij ε_i δ_j over sign vectors.

use super::instance::{ProblemInstance, SignAssignment};
use crate::error::{Error, Result};

pub const MAX_ENUMERATED_SIDE: usize = 24;

fn signs_from_mask(mask: u64, len: usize) -> Vec<i8> {
    (0..len)
        .map(|i| if mask >> i & 1 == 0 { 1 } else { -1 })
        .collect()
}

/// Exact sign maximizer.
///
/// Enumerates the smaller side only: once ε is fixed, the best δ_j is the
/// sign of Σ_i a_ij ε_i (ties to +1), so the search costs
/// O(2^min(m,n) · mn). Patterns are visited in mask order and only a strict
/// improvement replaces the incumbent, which starts from all +1.
pub fn brute_force_opt(instance: &ProblemInstance) -> Result<SignAssignment> {
    let (m, n) = (instance.m(), instance.n());
    if m.min(n) > MAX_ENUMERATED_SIDE {
        return Err(Error::InstanceTooLarge(m.min(n)));
    }
    if n < m {
        let best = brute_force_opt(&instance.transpose())?;
        return SignAssignment::new(instance, best.delta, best.eps);
    }
    let a = instance.matrix();
    let mut best: Option<(f64, Vec<i8>, Vec<i8>)> = None;
    let mut column = vec![0.0; n];
    for mask in 0..1u64 << m {
        let eps = signs_from_mask(mask, m);
        for (j, slot) in column.iter_mut().enumerate() {
            *slot = (0..m).map(|i| a[(i, j)] * f64::from(eps[i])).sum();
        }
        let score: f64 = column.iter().map(|s| s.abs()).sum();
        if best.as_ref().is_none_or(|(v, _, _)| score > *v) {
            let delta = column
                .iter()
                .map(|&s| if s >= 0.0 { 1 } else { -1 })
                .collect();
            best = Some((score, eps, delta));
        }
    }
    let (_, eps, delta) = best.expect("at least one sign pattern");
    SignAssignment::new(instance, eps, delta)
}

/// Reference search over all 2^(m+n) sign patterns. Only for small
/// instances; used to check [`brute_force_opt`].
pub fn brute_force_naive(instance: &ProblemInstance) -> Result<SignAssignment> {
    let (m, n) = (instance.m(), instance.n());
    if m + n > MAX_ENUMERATED_SIDE {
        return Err(Error::InstanceTooLarge(m + n));
    }
    let mut best: Option<SignAssignment> = None;
    for mask in 0..1u64 << (m + n) {
        let eps = signs_from_mask(mask, m);
        let delta = signs_from_mask(mask >> m, n);
        let value = instance.objective_unchecked(&eps, &delta);
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(SignAssignment { eps, delta, value });
        }
    }
    Ok(best.expect("at least one sign pattern"))
}
