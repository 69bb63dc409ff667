use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid size {grid} is below the aliasing bound {required} for half-width {half_width}")]
    GridTooSmall {
        grid: usize,
        required: usize,
        half_width: usize,
    },

    #[error("overlap sequence is not Hermitian: |a_{{-{index}}} - conj(a_{index})| = {defect:.3e}")]
    NotHermitian { index: usize, defect: f64 },

    #[error("overlap sequence is not normalized: a_0 = {a0}")]
    NotNormalized { a0: f64 },

    #[error("density has non-negligible imaginary part {max_imag:.3e}")]
    ComplexDensity { max_imag: f64 },

    #[error("density is not strictly positive: min {min_value:.3e} at p = {argmin:.6}")]
    NotStrictlyPositive { min_value: f64, argmin: f64 },

    #[error("density is indefinite: min {min_value:.3e} at p = {argmin:.6}")]
    Indefinite { min_value: f64, argmin: f64 },

    #[error("L = 1 is the critical lattice: F has zero at (pi,pi); pass an explicit override to proceed")]
    CriticalLattice,

    #[error("theta series does not decay: q = {q}, imag(z) = {imag}")]
    ThetaDivergent { q: f64, imag: f64 },

    #[error("truncation N = {dim} is below the tail rule {required:.1} for |z|^2 = {norm_sq:.3}")]
    TruncationTooSmall {
        dim: usize,
        required: f64,
        norm_sq: f64,
    },

    #[error("mismatched sizes: {0}")]
    Mismatch(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
