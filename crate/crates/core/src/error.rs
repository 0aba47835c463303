use crate::qstate::Role;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("qubit {0} is not present in the state")]
    UnknownRole(Role),
    #[error("qubit {0} appears more than once")]
    DuplicateRole(Role),
    #[error("a density matrix holds between 1 and 4 qubits, got {0}")]
    QubitCount(usize),
    #[error("matrix dimension {got} does not match {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("conditional state has vanishing trace {0:e}")]
    VanishingTrace(f64),
    #[error("reference state is not pure (largest eigenvalue fraction {0})")]
    NotPure(f64),
    #[error("qubit roles differ between the two states")]
    RoleMismatch,
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("no clicks are possible: the heralding probability is zero")]
    NoClick,
    #[error("degenerate denominator in drift infidelity ({0:e})")]
    DegenerateDrift(f64),
    #[error("objective is identically zero over the search interval")]
    DegenerateObjective,
    #[error("sequence count overflows 128 bits at k = {0}")]
    CountOverflow(usize),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
