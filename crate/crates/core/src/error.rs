use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient data: {rows} rows, need at least {required}")]
    InsufficientData { rows: usize, required: usize },

    #[error("singular design: column(s) {} are linearly dependent on earlier columns", .columns.join(", "))]
    SingularDesign { columns: Vec<String> },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("invalid regression summary: {0}")]
    InvalidSummary(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("invalid simulation spec: {0}")]
    InvalidSpec(String),

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate cubic (|a| = {a:e} <= {tolerance:e}); solve the delta = 1 quadratic instead")]
    DegenerateCubic { a: f64, tolerance: f64 },

    #[error("degenerate quadratic: {0}")]
    DegenerateQuadratic(String),

    #[error(
        "no URR anchor found after widening delta to [{delta_low}, {delta_high}]; \
         choose a different box"
    )]
    NoAnchor { delta_low: f64, delta_high: f64 },

    #[error("R_max = {rmax} is within 1e-9 of the pole R* = {r_star}")]
    Pole { rmax: f64, r_star: f64 },

    #[error("delta* unavailable: {0}")]
    DeltaStarRefused(String),

    #[error("empty field: no cells to summarize")]
    EmptyField,

    #[error("config error: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for input/config problems, 1 for computation failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InsufficientData { .. }
            | Error::InvalidData(_)
            | Error::MissingColumn(_)
            | Error::InvalidSummary(_)
            | Error::InvalidSpec(_)
            | Error::InvalidBox(_)
            | Error::SingularDesign { .. }
            | Error::Domain(_)
            | Error::Config(_)
            | Error::Csv(_)
            | Error::Json(_)
            | Error::Io(_) => 2,
            _ => 1,
        }
    }
}
