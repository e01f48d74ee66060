use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension N = {0} is not supported: the model assumes N >= 3 and m = 2(N-1)/N")]
    Dimension(usize),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("field has {field} cells but the grid has {grid}")]
    SizeMismatch { field: usize, grid: usize },

    #[error("invalid field: {0}")]
    Field(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("negative density {value:e} in cell {cell}")]
    NegativeDensity { cell: usize, value: f64 },

    #[error("positivity lost in cell {cell} after a CFL-respecting step (value {value:e})")]
    PositivityViolation { cell: usize, value: f64 },

    #[error("elliptic compatibility residual {residual:e} exceeds {limit:e}")]
    Compatibility { residual: f64, limit: f64 },

    #[error("formula disagreement: {0}")]
    Formula(String),

    #[error("degenerate iterate: {0}")]
    Degenerate(String),

    #[error("masses differ: {0:e} vs {1:e}")]
    MassMismatch(f64, f64),

    #[error("Liapunov functional increased from {from:e} to {to:e} over {samples} consecutive samples")]
    LiapunovIncrease { from: f64, to: f64, samples: usize },

    #[error("step budget of {0} steps exhausted before t_end")]
    StepBudget(u64),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Validation errors map to CLI exit code 1, everything else to 2.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Dimension(_)
                | Error::Grid(_)
                | Error::SizeMismatch { .. }
                | Error::Field(_)
                | Error::Parameter(_)
                | Error::NegativeDensity { .. }
                | Error::MassMismatch(..)
                | Error::Config(_)
        )
    }
}
