use thiserror::Error;

/// Errors reported by the pushed beta library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A distribution or configuration parameter violates its constraints.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An input lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Both the adaptive and the quantile-midpoint integration stages failed
    /// their internal sanity checks. Distinct from a genuinely tiny integral,
    /// which is reported as a finite (possibly very negative) log value.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    /// A prior's push direction does not match the sampling model variant.
    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    /// The density has no unique maximizer (flat, or unbounded at both ends).
    #[error("the density has no unique mode")]
    NoUniqueMode,

    /// A computation produced a non-finite value where a finite one is
    /// required (e.g. the log-likelihood at the optimizer's starting point).
    #[error("non-finite value: {0}")]
    NonFinite(String),
}
