//! Series machinery behind a dimension-k scheme: the coefficients of f_k,
//! the inverse series, and the constant c_k.

mod coefficients;
mod gamma;
mod inverse;
mod scheme;

pub use coefficients::{
    coefficient_ratio, leading_coefficient, CapPolicy, CoefficientTable, TruncationConfig,
    DEFAULT_MAX_TERMS, DEFAULT_TAIL_TOL,
};
pub use gamma::{gamma_half_ratio, MAX_DIMENSION};
pub use inverse::{InverseTable, H_ERROR_TOL, RADIUS_SAFETY};
pub use scheme::{certified_constant, KrivineScheme, Mode, SchemeConfig};
