//! Nearest-neighbor Z² shifts of finite type and their strip systems.

mod boundary;
mod columns;
mod cyclic;
mod sft;

pub use boundary::{candidate_boundary_rows, CandidateRow};
pub use columns::{count_columns, ColumnBudget, ColumnSystem, TrimDiagnostics};
pub(crate) use columns::{
    cycle_period, strongly_connected_components, transpose_csr, transpose_csr_rect,
};
pub use cyclic::{CyclicColumnSystem, Phase};
pub use sft::{Alphabet, Configuration, HigherPower, NnSft, PeriodicRow, Symbol};
