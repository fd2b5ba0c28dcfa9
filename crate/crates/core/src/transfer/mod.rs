//! Strip transfer matrices, Perron enclosures and the induced Markov chain.

mod chain;
mod cyclic;
mod matrix;
mod perron;

pub use chain::{
    identity_threshold, markov_chain, report_for, strip_report, StripChain, StripReport,
};
pub use cyclic::{cyclic_report, CyclicReport, CyclicTransfer, PhaseChain};
pub use matrix::{SparseMatrix, TransferMatrix, SUMMATION_MODE};
pub use perron::{perron, perron_sparse, PerronData, PerronOptions};
