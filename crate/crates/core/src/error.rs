use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every solver in the crate.
///
/// Domain errors mean "this formula or grid does not cover the request";
/// everything else is a numerical failure. [`Error::is_domain`] draws that
/// line for callers that need to tell the two apart (the CLI exit codes do).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{method} is undefined at tau = {tau}: {reason}")]
    Domain {
        method: &'static str,
        tau: f64,
        reason: String,
    },

    #[error("tau = {tau} lies outside the curve range [0, {max}]")]
    OutOfRange { tau: f64, max: f64 },

    #[error("integrand is not finite at abscissa {abscissa}")]
    QuadratureNode { abscissa: f64 },

    #[error("semi-infinite tail bound {bound:e} exceeds {limit:e}; raise the truncation")]
    TailTooHeavy { bound: f64, limit: f64 },

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("no convergence after {iterations} iterations")]
    MaxIterations { iterations: usize },

    #[error("mesh rejected: {0}")]
    Mesh(String),

    #[error("log argument {argument} left (0, 1) at tau = {tau}")]
    LogDomain { tau: f64, argument: f64 },

    #[error("node {index} (tau = {tau}): {source}")]
    Node {
        index: usize,
        tau: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("projected SOR did not converge at time level {level} within the sweep limit")]
    PsorDivergence { level: usize },

    #[error("no contact with the payoff at time level {level}; widen the x-domain")]
    NoContact { level: usize },

    #[error("American-European premium {value:e} at tau = {tau} is too small to normalise by")]
    DegenerateDenominator { tau: f64, value: f64 },
}

impl Error {
    /// True when the request falls outside a formula's or grid's validity
    /// domain rather than a numerical routine failing.
    pub fn is_domain(&self) -> bool {
        match self {
            Error::Domain { .. } | Error::OutOfRange { .. } => true,
            Error::Node { source, .. } => source.is_domain(),
            _ => false,
        }
    }

    pub(crate) fn at_node(self, index: usize, tau: f64) -> Error {
        Error::Node {
            index,
            tau,
            source: Box::new(self),
        }
    }
}
