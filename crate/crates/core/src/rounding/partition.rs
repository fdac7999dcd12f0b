use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    Sign,
}

/// One cell of a grid labeling: the integer coordinates of the cube
/// `origin + cell_size * (index + [0, 1)^k)` and its label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCell {
    pub index: Vec<i64>,
    pub label: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct GridSpec {
    k: usize,
    cell_size: f64,
    origin: Vec<f64>,
    cells: Vec<GridCell>,
    outside_label: i8,
}

/// Axis-aligned cube cells with explicit labels; every other point gets
/// `outside_label`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct GridLabeling {
    spec: GridSpec,
    lookup: HashMap<Vec<i64>, i8>,
}

fn check_label(label: i8, what: &str) -> Result<()> {
    if label == 1 || label == -1 {
        Ok(())
    } else {
        Err(invalid(
            "partition",
            format!("{what} label must be +1 or -1, got {label}"),
        ))
    }
}

impl TryFrom<GridSpec> for GridLabeling {
    type Error = Error;

    fn try_from(spec: GridSpec) -> Result<Self> {
        if spec.k == 0 {
            return Err(invalid("partition", "k must be positive"));
        }
        if !(spec.cell_size > 0.0 && spec.cell_size.is_finite()) {
            return Err(invalid(
                "partition",
                "cell_size must be positive and finite",
            ));
        }
        if spec.origin.len() != spec.k || spec.origin.iter().any(|o| !o.is_finite()) {
            return Err(invalid(
                "partition",
                format!("origin must hold {} finite numbers", spec.k),
            ));
        }
        check_label(spec.outside_label, "outside")?;
        let mut lookup = HashMap::with_capacity(spec.cells.len());
        for cell in &spec.cells {
            if cell.index.len() != spec.k {
                return Err(invalid(
                    "partition",
                    format!(
                        "cell index {:?} does not have {} entries",
                        cell.index, spec.k
                    ),
                ));
            }
            check_label(cell.label, "cell")?;
            if lookup.insert(cell.index.clone(), cell.label).is_some() {
                return Err(invalid(
                    "partition",
                    format!("cell {:?} listed twice", cell.index),
                ));
            }
        }
        Ok(Self { spec, lookup })
    }
}

impl From<GridLabeling> for GridSpec {
    fn from(grid: GridLabeling) -> Self {
        grid.spec
    }
}

impl GridLabeling {
    pub fn new(
        cell_size: f64,
        origin: Vec<f64>,
        cells: Vec<GridCell>,
        outside_label: i8,
    ) -> Result<Self> {
        GridSpec {
            k: origin.len(),
            cell_size,
            origin,
            cells,
            outside_label,
        }
        .try_into()
    }

    pub fn k(&self) -> usize {
        self.spec.k
    }

    fn label(&self, point: &[f64]) -> i8 {
        let mut index = Vec::with_capacity(self.spec.k);
        for (x, o) in point.iter().zip(&self.spec.origin) {
            let cell = ((x - o) / self.spec.cell_size).floor();
            // i64::MAX as f64 rounds up, so the comparison is strict
            if !(cell >= i64::MIN as f64 && cell < i64::MAX as f64) {
                return self.spec.outside_label;
            }
            index.push(cell as i64);
        }
        self.lookup
            .get(&index)
            .copied()
            .unwrap_or(self.spec.outside_label)
    }
}

/// A total map R^k → {−1, +1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Labeling {
    Builtin(Builtin),
    Grid(GridLabeling),
}

impl Labeling {
    fn k(&self) -> usize {
        match self {
            Labeling::Builtin(Builtin::Sign) => 1,
            Labeling::Grid(g) => g.k(),
        }
    }

    fn label(&self, point: &[f64]) -> i8 {
        match self {
            Labeling::Builtin(Builtin::Sign) => {
                if point[0] >= 0.0 {
                    1
                } else {
                    -1
                }
            }
            Labeling::Grid(g) => g.label(point),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PartitionFile {
    Pair { first: Labeling, second: Labeling },
    Both(Labeling),
}

/// Labelings of R^k for the x side (`first`) and the y side (`second`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionPair {
    k: usize,
    first: Labeling,
    second: Labeling,
}

impl PartitionPair {
    pub fn new(first: Labeling, second: Labeling) -> Result<Self> {
        let k = first.k();
        if second.k() != k {
            return Err(Error::DimensionMismatch(format!(
                "first labeling has k = {k}, second k = {}",
                second.k()
            )));
        }
        Ok(Self { k, first, second })
    }

    /// Krivine's pair (sign, sign) on the real line.
    pub fn sign() -> Self {
        let sign = Labeling::Builtin(Builtin::Sign);
        Self {
            k: 1,
            first: sign.clone(),
            second: sign,
        }
    }

    /// Either a single labeling used on both sides, or
    /// `{"first": .., "second": ..}`. A labeling is the string `"sign"` or a
    /// grid object.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let parsed: PartitionFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("partition: {e}")))?;
        match parsed {
            PartitionFile::Pair { first, second } => Self::new(first, second),
            PartitionFile::Both(labeling) => Self::new(labeling.clone(), labeling),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labeling(&self, side: Side) -> &Labeling {
        match side {
            Side::First => &self.first,
            Side::Second => &self.second,
        }
    }

    /// True for the sign pair, the only case where the expected sign
    /// correlations are known exactly.
    pub fn is_constructive(&self) -> bool {
        let sign = Labeling::Builtin(Builtin::Sign);
        self.first == sign && self.second == sign
    }

    /// Label of `point`; sign(0) = +1.
    pub fn apply(&self, side: Side, point: &[f64]) -> Result<i8> {
        if point.len() != self.k {
            return Err(Error::DimensionMismatch(format!(
                "point has dimension {}, partition has k = {}",
                point.len(),
                self.k
            )));
        }
        Ok(self.apply_unchecked(side, point))
    }

    pub(crate) fn apply_unchecked(&self, side: Side, point: &[f64]) -> i8 {
        self.labeling(side).label(point)
    }
}
