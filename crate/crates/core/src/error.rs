use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the range an operation accepts.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    /// A point lies outside the open parameter box of a chart.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("approximating function is not monotone non-increasing: psi({q_lo}) = {psi_lo} < psi({q_hi}) = {psi_hi}")]
    NonMonotone {
        q_lo: u64,
        psi_lo: f64,
        q_hi: u64,
        psi_hi: f64,
    },

    #[error("cannot classify: {0}")]
    Unclassifiable(String),

    /// A hypothesis of the underlying theorem fails for the given input.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    /// beta is rational at some denominator, hence not badly approximable.
    #[error("not badly approximable: max ||q beta_j|| = 0 at q = {witness_q}")]
    NotBadlyApproximable { witness_q: u64 },

    /// A bounded search ran out of room before producing the requested output.
    #[error("exhausted: {0}")]
    Exhausted(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The linear-forms scan found nothing. Minkowski's theorem rules this out
    /// for valid input, so this is a bug or a broken precondition.
    #[error("search exhausted without a solution (Q = {q_budget}, undecided candidates = {undecided}): {detail}")]
    SearchExhausted {
        q_budget: u64,
        undecided: u64,
        detail: String,
    },

    /// A returned solution failed its direct re-verification.
    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(what: &'static str, input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            what,
            input: input.to_string(),
            reason: reason.into(),
        }
    }

    /// True for errors that signal an implementation bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::SearchExhausted { .. } | Error::CertificationFailed(_)
        )
    }

    /// True for errors raised because a theorem's hypotheses do not hold.
    pub fn is_hypothesis(&self) -> bool {
        matches!(
            self,
            Error::HypothesisViolated(_) | Error::NotBadlyApproximable { .. } | Error::Exhausted(_)
        )
    }
}
