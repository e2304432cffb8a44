use serde::Serialize;
use std::fmt;

/// Non-fatal observations attached to verdicts and reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// An entry whose logarithm was taken lies close to the negative real axis,
    /// so the principal branch is fragile there.
    BranchAmbiguity { row: usize, col: usize, distance: f64 },
    /// The certifying volume is within two decades of the zero threshold.
    LowConfidence { volume: f64, threshold: f64 },
    /// The input was projected onto the channel set before analysis.
    Repaired { distance: f64 },
    /// A detected block failed the pairwise re-check at the chosen tolerance.
    NonTransitiveBlock { block: Vec<usize>, worst: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::BranchAmbiguity { row, col, distance } => {
                write!(f, "entry ({row}, {col}) is {distance:.3e} rad from the branch cut")
            }
            Warning::LowConfidence { volume, threshold } => {
                write!(f, "volume {volume:.3e} is close to the zero threshold {threshold:.3e}")
            }
            Warning::Repaired { distance } => write!(f, "input repaired, Frobenius distance {distance:.3e}"),
            Warning::NonTransitiveBlock { block, worst } => {
                write!(f, "block {block:?} is not closed at tolerance (worst deviation {worst:.3e})")
            }
        }
    }
}
