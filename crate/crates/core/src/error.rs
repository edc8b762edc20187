use thiserror::Error;

/// Why a run fails validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationReason {
    /// The step's transition is not in the expanded transition set.
    NotATransition,
    /// Some coordinate went below zero in nonnegative mode.
    Negative,
    /// The step does not start in the state the previous step ended in.
    StateMismatch,
    /// The step's effect has the wrong length.
    Dimension,
}

impl ViolationReason {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationReason::NotATransition => "not-a-transition",
            ViolationReason::Negative => "negative",
            ViolationReason::StateMismatch => "state-mismatch",
            ViolationReason::Dimension => "dimension",
        }
    }
}

impl std::fmt::Display for ViolationReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// First failing step of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub index: usize,
    pub reason: ViolationReason,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "index={} reason={}", self.index, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),
    #[error("run violation at {0}")]
    Violation(Violation),
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn overflow() -> Self {
        Error::ResourceLimit("integer overflow".into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or_else(Error::overflow)
}

pub(crate) fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or_else(Error::overflow)
}

/// Componentwise `a + b`, failing on overflow.
pub(crate) fn add_vec(a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
    a.iter().zip(b).map(|(&x, &y)| add(x, y)).collect()
}

/// Componentwise `a + k * b`, failing on overflow.
pub(crate) fn add_scaled(a: &[i64], k: i64, b: &[i64]) -> Result<Vec<i64>> {
    a.iter().zip(b).map(|(&x, &y)| add(x, mul(k, y)?)).collect()
}
