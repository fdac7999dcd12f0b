use serde::{Deserialize, Serialize};

use super::coefficients::{CoefficientTable, TruncationConfig};
use super::inverse::InverseTable;
use crate::error::{invalid, Error, Result};

const FIRST_INVERSE_DEGREE: usize = 32;

/// Which right-hand side the constant equation Σ |b_n| c^{2n+1} = target uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// target = 1, no padding coordinates.
    Sharp,
    /// target = 1 − 4C/k, with padding 4C/k on the same-side kernels.
    Paper,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sharp" => Ok(Mode::Sharp),
            "paper" => Ok(Mode::Paper),
            other => Err(invalid(
                "mode",
                format!("expected sharp or paper, got {other}"),
            )),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Sharp => "sharp",
            Mode::Paper => "paper",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub mode: Mode,
    /// Replaces the certified constant C_k in paper mode.
    pub c_override: Option<f64>,
    pub truncation: TruncationConfig,
    /// Upper limit on the inverse-series degree tried while solving for c.
    pub max_inverse_degree: usize,
}

impl SchemeConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            c_override: None,
            truncation: TruncationConfig::default(),
            max_inverse_degree: 512,
        }
    }
}

/// C_k = k Σ_{n≥1} a_n(k) = k (1 − a_0(k)).
///
/// On the closed unit disk |f_k(z) − a_0 z| <= Σ_{n≥1} a_n = C_k / k, so this
/// is an admissible choice of the constant C for each k.
pub fn certified_constant(table: &CoefficientTable) -> f64 {
    let a0 = table.coefficients()[0];
    f64::from(table.k()) * (1.0 - a0)
}

/// A solved dimension-k scheme: the constant c, its reciprocal, and the
/// series tables it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KrivineScheme {
    k: u32,
    mode: Mode,
    c_const: Option<f64>,
    target: f64,
    c: f64,
    overhead: f64,
    padding: f64,
    coefficients: CoefficientTable,
    inverse: InverseTable,
}

impl KrivineScheme {
    pub fn build(k: u32, config: &SchemeConfig) -> Result<Self> {
        let base = CoefficientTable::compute(k, &config.truncation)?;
        let kf = f64::from(k);
        let (c_const, target, padding) = match config.mode {
            Mode::Sharp => {
                if config.c_override.is_some() {
                    return Err(invalid("c_override", "only meaningful in paper mode"));
                }
                (None, 1.0, 0.0)
            }
            Mode::Paper => {
                let c_const = match config.c_override {
                    Some(value) if !(value > 0.0 && value.is_finite()) => {
                        return Err(invalid(
                            "c_override",
                            format!("must be positive, got {value}"),
                        ))
                    }
                    Some(value) => value,
                    None => certified_constant(&base),
                };
                let margin = base.coefficients()[0] - 2.0 * c_const / kf;
                if !(margin > 0.0) {
                    return Err(Error::KTooSmallForPaperMode { k, c_const, margin });
                }
                let padding = 4.0 * c_const / kf;
                (Some(c_const), 1.0 - padding, padding)
            }
        };
        if !(target > 0.0) {
            return Err(Error::DegenerateTarget(target));
        }

        let mut degree = FIRST_INVERSE_DEGREE.min(config.max_inverse_degree);
        loop {
            let coefficients = base.extended_to(degree);
            let inverse = InverseTable::invert(&coefficients, degree)?;
            let retry = !inverse.hit_noise_floor() && degree < config.max_inverse_degree;
            match inverse.solve_constant(target) {
                Ok(c) => {
                    return Ok(Self {
                        k,
                        mode: config.mode,
                        c_const,
                        target,
                        c,
                        overhead: 1.0 / c,
                        padding,
                        coefficients,
                        inverse,
                    })
                }
                Err(Error::TruncationTooCoarse { .. } | Error::TargetUnattainable { .. })
                    if retry =>
                {
                    degree = (2 * degree).min(config.max_inverse_degree);
                }
                Err(e) => return Err(e),
            }
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// The constant C used in paper mode.
    pub fn c_const(&self) -> Option<f64> {
        self.c_const
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// 1 / c, the quality of the scheme relative to the best possible one.
    pub fn overhead(&self) -> f64 {
        self.overhead
    }

    /// 4C/k in paper mode, zero in sharp mode.
    pub fn padding(&self) -> f64 {
        self.padding
    }

    pub fn coefficients(&self) -> &CoefficientTable {
        &self.coefficients
    }

    pub fn inverse(&self) -> &InverseTable {
        &self.inverse
    }

    /// |h(c) − target|.
    pub fn residual(&self) -> f64 {
        (self.inverse.h(self.c) - self.target).abs()
    }
}
