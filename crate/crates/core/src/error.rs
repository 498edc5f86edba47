use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by model construction, the scattering solver and the
/// emission integrator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty manifold: the emitter needs at least one {0} state")]
    EmptyManifold(&'static str),

    #[error("non-finite entry in {0}")]
    NonFiniteEntry(String),

    #[error("index out of range: {what} index {index} (size {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("matrix is not unitary (max deviation of U·U† from identity is {deviation:.3e})")]
    NonUnitaryMatrix { deviation: f64 },

    #[error("excited basis rotation mixes non-degenerate levels {a} and {b}")]
    NonDegenerateExcitedManifold { a: usize, b: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("loss tensor is not passive (emission rate {rate:.3e} on probe dipole)")]
    ActiveLoss { rate: f64 },

    /// The response matrix has no inverse. `dark_state` is the excited-manifold
    /// vector that decouples from every channel.
    #[error("singular response matrix (condition number {condition:.3e}); decoupled excited state {dark_state:?}")]
    SingularResponseMatrix {
        condition: f64,
        dark_state: Vec<Complex64>,
    },

    #[error("singular two-level denominator")]
    SingularDenominator,

    #[error("integrator step size underflow at t = {t:.6e} (h = {h:.3e})")]
    ToleranceNotMet { t: f64, h: f64 },

    #[error("non-physical state at t = {t:.6e}: {reason}")]
    NonPhysicalState { t: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularResponseMatrix { .. }
                | Error::SingularDenominator
                | Error::ToleranceNotMet { .. }
                | Error::NonPhysicalState { .. }
        )
    }
}
