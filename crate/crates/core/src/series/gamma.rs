//! The ratio Γ((k+1)/2) / Γ(k/2) for integer k.

use crate::error::{Error, Result};

/// Largest dimension accepted anywhere in the crate.
pub const MAX_DIMENSION: u32 = 1_000_000;

/// Below this k the ratio is built by the exact two-step recurrence; above
/// it the asymptotic expansion is already at full double precision.
const RECURRENCE_LIMIT: u32 = 64;

// ln(Γ(x + 1/2) / Γ(x)) - ln(x)/2 = Σ c_j x^{-(2j+1)}
const ASYMPTOTIC: [f64; 6] = [
    -1.0 / 8.0,
    1.0 / 192.0,
    -1.0 / 640.0,
    17.0 / 14336.0,
    -31.0 / 18432.0,
    691.0 / 180224.0,
];

/// Returns Γ((k+1)/2) / Γ(k/2).
///
/// Relative error stays below 1e-14 over the whole supported range. Small k
/// use `r(k + 2) = r(k) (k + 1) / k` starting from `r(1) = 1/√π` and
/// `r(2) = √π/2`; large k use the Stirling-type expansion of the log ratio,
/// which never forms the (huge) individual log-gamma values.
pub fn gamma_half_ratio(k: u32) -> Result<f64> {
    if k == 0 || k > MAX_DIMENSION {
        return Err(Error::InvalidDimension {
            k,
            max: MAX_DIMENSION,
        });
    }
    if k <= RECURRENCE_LIMIT {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let (mut r, mut j) = if k % 2 == 1 {
            (1.0 / sqrt_pi, 1)
        } else {
            (sqrt_pi / 2.0, 2)
        };
        while j < k {
            r *= f64::from(j + 1) / f64::from(j);
            j += 2;
        }
        return Ok(r);
    }
    let x = f64::from(k) / 2.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Horner in x^{-2}, then one factor of x^{-1}.
    let series = ASYMPTOTIC.iter().rev().fold(0.0, |acc, &c| acc * inv2 + c) * inv;
    Ok(x.sqrt() * series.exp())
}
