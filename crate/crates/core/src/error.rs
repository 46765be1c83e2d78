use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {residual:.3e}, tolerance {tol:.1e})")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("non-finite value produced in {context}")]
    NonFinite { context: &'static str },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("state is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("state trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("empty operator chain")]
    Empty,

    #[error("invalid Hamiltonian spec: {0}")]
    BadSpec(String),

    #[error("state has full rank; no null space to support sigma")]
    FullRank,

    #[error("observable {operator} has degenerate spread {value:.3e} (tolerance {tol:.1e})")]
    DegenerateObservable {
        operator: &'static str,
        value: f64,
        tol: f64,
    },

    #[error("variance of {operator} is degenerate: standard deviation {value:.3e} (tolerance {tol:.1e})")]
    DegenerateVariance {
        operator: &'static str,
        value: f64,
        tol: f64,
    },

    #[error("initial state is maximally mixed; the purity-normalized angle is undefined")]
    MaximallyMixed,

    #[error("MT-like denominator min(<H>, dH) = {value:.3e} is not positive")]
    DegenerateDenominator { value: f64 },

    #[error("series are defined on different time grids")]
    GridMismatch,

    #[error("unknown preset {0:?}; valid ids: {valid}", valid = crate::harness::PRESET_IDS.join(", "))]
    UnknownPreset(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid value for `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("scenario {scenario}{}: {source}", node.map(|n| format!(" (node {n})")).unwrap_or_default())]
    Scenario {
        scenario: String,
        node: Option<usize>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn in_scenario(self, scenario: &str, node: Option<usize>) -> Self {
        match self {
            e @ Error::Scenario { .. } => e,
            e => Error::Scenario {
                scenario: scenario.to_string(),
                node,
                source: Box::new(e),
            },
        }
    }
}
