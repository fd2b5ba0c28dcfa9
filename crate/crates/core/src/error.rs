use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("strip empty at height {n}: boundary rows are incompatible with the vertical rules")]
    StripEmpty { n: usize },

    #[error("degenerate strip at height {n}: trimming removed every column")]
    DegenerateStrip { n: usize },

    #[error(
        "strip at height {n} is not mixing ({scc_count} strongly connected components, period {period:?}); \
         the mixing hypothesis fails for this model and boundary choice"
    )]
    NotMixing {
        n: usize,
        scc_count: usize,
        period: Option<usize>,
    },

    #[error("memory budget exceeded: projected {projected} {what} (limit {limit}); lower n")]
    BudgetExceeded {
        what: &'static str,
        projected: u128,
        limit: u128,
    },

    #[error("Perron iteration did not converge after {iterations} iterations (last relative gap {gap:e})")]
    Convergence { iterations: usize, gap: f64 },

    #[error("identity violation: |log lambda - (h + int f)| = {residual:e} exceeds {threshold:e}")]
    IdentityViolation { residual: f64, threshold: f64 },

    #[error("unfillable boundary: no center symbol is locally admissible")]
    UnfillableBoundary,

    #[error("no fillable boundary exists for this shift")]
    NoFillableBoundary,

    #[error("applicability gate failed (q_hat = {q_hat}, p_c bound = {p_c_bound}); rerun with force to override")]
    GateFailed { q_hat: f64, p_c_bound: f64 },

    #[error("model parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::GateFailed { .. } => 2,
            Error::StripEmpty { .. }
            | Error::DegenerateStrip { .. }
            | Error::NotMixing { .. }
            | Error::BudgetExceeded { .. }
            | Error::Convergence { .. }
            | Error::IdentityViolation { .. }
            | Error::UnfillableBoundary
            | Error::NoFillableBoundary => 3,
            Error::Parse(_) | Error::Input(_) => 4,
            Error::Io(_) | Error::Csv(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
