use thiserror::Error;

/// Errors produced across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("frame needs at least one label")]
    EmptyFrame,
    #[error("blank label at position {0}")]
    BlankLabel(usize),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("frame mismatch: [{left}] vs [{right}]")]
    FrameMismatch { left: String, right: String },
    #[error("hyper-power-set operations support at most {max} singletons, frame has {size}")]
    HyperCapacity { size: usize, max: usize },
    #[error("negative mass {mass} on {proposition}")]
    NegativeMass { proposition: String, mass: f64 },
    #[error("mass assigned to the empty proposition")]
    EmptyFocal,
    #[error("masses sum to {sum}, expected 1 within {tolerance}")]
    MassSum { sum: f64, tolerance: f64 },
    #[error("reliability {0} outside [0, 1]")]
    InvalidReliability(f64),
    #[error("total conflict k12 = {k12}: Dempster's rule is undefined")]
    TotalConflict { k12: f64 },
    #[error("fusion failed at stream index {index}: {source}")]
    FusionStep {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("confusion matrix must be {expected}x{expected}, got {rows} rows (row {row} has {cols} entries)")]
    ConfusionShape {
        expected: usize,
        rows: usize,
        row: usize,
        cols: usize,
    },
    #[error("confusion matrix entry ({row},{col}) = {value} outside [0, 1]")]
    ConfusionEntry { row: usize, col: usize, value: f64 },
    #[error("confusion matrix row {row} sums to {sum}, expected 1 within {tolerance}")]
    ConfusionRowSum { row: usize, sum: f64, tolerance: f64 },
    #[error("declared type index {index} outside frame of size {size}")]
    BadDeclaration { index: usize, size: usize },
    #[error("out-of-order scan: expected {expected}, got {got}")]
    ScanOrder { expected: usize, got: usize },
    #[error("scenario segment {index} has zero duration")]
    EmptySegment { index: usize },
    #[error("scenario segments {index} and {} share type {label:?}", index + 1)]
    AdjacentSegments { index: usize, label: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("rule {rule} unusable: all {runs} Monte-Carlo runs failed")]
    RuleUnusable { rule: String, runs: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
