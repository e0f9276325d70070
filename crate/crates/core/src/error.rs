use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("query ({x:.3}, {y:.3}) outside map extent")]
    OutOfBounds { x: f64, y: f64 },

    #[error("crop window exceeds map bounds (center ({x:.3}, {y:.3}), {cells} cells)")]
    CropOutOfBounds { x: f64, y: f64, cells: usize },

    #[error("terrain generation failed: {0}")]
    Generation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("model layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("training diverged: {0}")]
    Diverged(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("unusable example: {0}")]
    Unusable(String),

    #[error("no candidate above the rejection threshold")]
    NoFeasiblePlan,

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
