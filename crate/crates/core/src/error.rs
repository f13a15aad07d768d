use thiserror::Error;

/// Every failure mode exposed by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, {len} entries")]
    NotSquare { rows: usize, len: usize },

    #[error("matrix contains a non-finite entry at position {index}")]
    NonFinite { index: usize },

    #[error("matrix is not Hermitian: max |M[i][j] - conj(M[j][i])| = {deviation:e} exceeds {allowed:e}")]
    NonHermitian { deviation: f64, allowed: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    ConvergenceFailure { sweeps: usize, off_norm: f64 },

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("dimension {n} is too small for this operation")]
    DimensionTooSmall { n: usize },

    #[error("dimension {n} exceeds the limit {max}")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnitVector { norm: f64 },

    #[error("spectrum is not simple: minimum gap {min_gap:e} is below {required:e}")]
    DegenerateSpectrum { min_gap: f64, required: f64 },

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("invalid secular problem: {0}")]
    InvalidProblem(String),

    #[error("evaluation at x = {x} collides with a positive-weight pole")]
    PoleEvaluation { x: f64 },

    #[error("poles are not distinct: minimum gap {min_gap:e} is below {required:e}")]
    DegeneratePoles { min_gap: f64, required: f64 },

    #[error("operation requires equal weights")]
    NonUniformWeights,

    #[error("window (l = {ell}, r = {r}) is invalid for n = {n}")]
    WindowOutOfRange { ell: usize, r: usize, n: usize },

    #[error("vanishing tail sum: {0}")]
    DegenerateTail(String),

    #[error("bound intervals do not intersect: lower {lower} > upper {upper}")]
    EmptyIntersection { lower: f64, upper: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("size {m} out of range 1..={n}")]
    SizeOutOfRange { m: usize, n: usize },

    #[error("enumeration of {requested} values exceeds the guard {limit}")]
    ExplosionGuard { requested: u128, limit: u128 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("negative entry {value} at position {index}")]
    NegativeEntry { index: usize, value: f64 },

    #[error("first vector does not majorize the second (min gap {min_gap:e})")]
    NotMajorizing { min_gap: f64 },

    #[error("bad random model: {0}")]
    BadModel(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
