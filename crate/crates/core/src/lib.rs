//! Pressure and topological entropy of nearest-neighbor Z^2 shifts of finite
//! type, approximated by Perron eigenvalues of strip transfer matrices.
//!
//! A strip of height `n` is bounded by constant rows `t` above and `b`
//! below. Its columns form a finite graph whose weighted adjacency matrix
//! `A_n` gives `log lambda_n`; the differences
//! `(log lambda_{n+1} - log lambda_n) / p` converge to the pressure when the
//! interaction satisfies the applicability gate in [`gibbs`].

// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod gibbs;
pub mod interaction;
pub mod lattice;
pub mod model_file;
pub mod models;
pub mod pressure;
pub mod transfer;

pub use error::{Error, Result};
pub use gibbs::{applicability, q_hat, ApplicabilityReport, P_C_RIGOROUS, P_C_SIMULATED};
pub use interaction::{NnInteraction, StripInteraction};
pub use lattice::{
    Alphabet, ColumnBudget, ColumnSystem, Configuration, CyclicColumnSystem, HigherPower, NnSft,
    PeriodicRow, Symbol,
};
pub use model_file::{load_model, parse_model};
pub use models::{builtin, Model, ModelKind};
pub use pressure::{
    entropy_run, fit_rate, run_pressure, PressureRun, Quantity, RateFit, RateFitOutcome, RunConfig,
    StripMethod, StripRow,
};
pub use transfer::{
    perron, CyclicTransfer, PerronData, PerronOptions, StripChain, StripReport, TransferMatrix,
};
