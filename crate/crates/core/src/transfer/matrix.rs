use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interaction::NnInteraction;
use crate::lattice::{cycle_period, strongly_connected_components, transpose_csr, ColumnSystem};

/// Nonnegative square matrix in row-compressed form, rows sorted by column.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn new(dim: usize, row_ptr: Vec<usize>, cols: Vec<u32>, values: Vec<f64>) -> Result<Self> {
        if row_ptr.len() != dim + 1 || cols.len() != values.len() || row_ptr[dim] != cols.len() {
            return Err(Error::Input("inconsistent sparse matrix layout".into()));
        }
        for r in 0..dim {
            let row = &cols[row_ptr[r]..row_ptr[r + 1]];
            if row.windows(2).any(|w| w[0] >= w[1]) || row.iter().any(|&c| c as usize >= dim) {
                return Err(Error::Input(format!(
                    "row {r} has unsorted or out-of-range columns"
                )));
            }
        }
        if values.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Input(
                "stored entries must be positive and finite".into(),
            ));
        }
        Ok(SparseMatrix {
            dim,
            row_ptr,
            cols,
            values,
        })
    }

    /// From `(row, col, value)` triplets; duplicates are rejected.
    pub fn from_triplets(dim: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        entries.sort_by_key(|&(r, c, _)| (r, c));
        if entries
            .windows(2)
            .any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(Error::Input("duplicate matrix entry".into()));
        }
        let mut row_ptr = vec![0usize; dim + 1];
        for &(r, _, _) in &entries {
            if r >= dim {
                return Err(Error::Input("row index out of range".into()));
            }
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let cols = entries.iter().map(|&(_, c, _)| c as u32).collect();
        let values = entries.iter().map(|&(_, _, v)| v).collect();
        SparseMatrix::new(dim, row_ptr, cols, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn cols(&self) -> &[u32] {
        &self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, r: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.cols[a..b], &self.values[a..b])
    }

    pub fn transpose(&self) -> SparseMatrix {
        let (tp, tc) = transpose_csr(&self.row_ptr, &self.cols);
        let mut fill = tp.clone();
        let mut tv = vec![0.0; self.values.len()];
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k] as usize;
                tv[fill[c]] = self.values[k];
                fill[c] += 1;
            }
        }
        SparseMatrix {
            dim: self.dim,
            row_ptr: tp,
            cols: tc,
            values: tv,
        }
    }

    /// `out = A x` with compensated summation inside each row. Rows are
    /// independent, so the result does not depend on the thread count.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        out.par_iter_mut()
            .enumerate()
            .with_min_len(256)
            .for_each(|(r, o)| {
                let (cols, vals) = self.row(r);
                *o = neumaier_dot(cols, vals, x);
            });
    }

    /// Single strongly connected component with period 1.
    pub fn is_primitive(&self) -> bool {
        if self.dim == 0 {
            return false;
        }
        let comp = strongly_connected_components(&self.row_ptr, &self.cols);
        if comp.iter().any(|&c| c != 0) {
            return false;
        }
        cycle_period(&self.row_ptr, &self.cols) == 1
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.dim]; self.dim];
        for r in 0..self.dim {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                m[r][c as usize] = v;
            }
        }
        m
    }
}

#[inline]
fn neumaier_dot(cols: &[u32], vals: &[f64], x: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for (&c, &a) in cols.iter().zip(vals) {
        let term = a * x[c as usize];
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Summation scheme used inside matrix-vector products.
pub const SUMMATION_MODE: &str = "row-sequential Neumaier compensated";

/// Transfer matrix of a strip: entries `exp(-weight)` on the strip edges,
/// stored divided by `exp(log_scale)` so the largest stored entry is 1.
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    cs: ColumnSystem,
    matrix: SparseMatrix,
    weights: Vec<f64>,
    log_scale: f64,
}

impl TransferMatrix {
    /// Builds the transfer matrix of `phi` on a trimmed primitive strip.
    pub fn build(phi: &NnInteraction, cs: ColumnSystem) -> Result<TransferMatrix> {
        let weights = phi.strip_interaction(&cs)?.weights;
        TransferMatrix::from_weights(cs, weights)
    }

    /// Builds from explicit per-edge weights in canonical edge order.
    pub fn from_weights(cs: ColumnSystem, weights: Vec<f64>) -> Result<TransferMatrix> {
        if weights.len() != cs.num_edges() {
            return Err(Error::Input("one weight per strip edge required".into()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Input("strip weights must be finite".into()));
        }
        let not_mixing = |scc_count, period| Error::NotMixing {
            n: cs.height(),
            scc_count,
            period,
        };
        if cs.is_empty() {
            return Err(Error::DegenerateStrip { n: cs.height() });
        }
        let comp = strongly_connected_components(cs.row_ptr(), cs.targets());
        let scc_count = comp.iter().copied().max().unwrap_or(0) + 1;
        if scc_count != 1 {
            return Err(not_mixing(scc_count, None));
        }
        let period = cycle_period(cs.row_ptr(), cs.targets());
        if period != 1 {
            return Err(not_mixing(1, Some(period)));
        }
        let min_w = weights.iter().copied().fold(f64::INFINITY, f64::min);
        let log_scale = -min_w;
        let values: Vec<f64> = weights.iter().map(|&w| (-(w - min_w)).exp()).collect();
        if values.contains(&0.0) {
            return Err(Error::Input(
                "weight spread exceeds double-precision range; entries underflow".into(),
            ));
        }
        let matrix = SparseMatrix::new(
            cs.len(),
            cs.row_ptr().to_vec(),
            cs.targets().to_vec(),
            values,
        )?;
        Ok(TransferMatrix {
            cs,
            matrix,
            weights,
            log_scale,
        })
    }

    pub fn column_system(&self) -> &ColumnSystem {
        &self.cs
    }

    /// Stored (scaled) matrix.
    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    /// Strip interaction value per edge.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// True entries equal stored entries times `exp(log_scale)`.
    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn true_entry(&self, c: usize, d: usize) -> f64 {
        let (cols, vals) = self.matrix.row(c);
        match cols.binary_search(&(d as u32)) {
            Ok(i) => vals[i] * self.log_scale.exp(),
            Err(_) => 0.0,
        }
    }

    /// Canonical edge list with true-scale log entries, `-weight`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# transfer matrix: dim {} edges {}; columns: from to log_entry",
            self.cs.len(),
            self.cs.num_edges()
        );
        for ((c, d), w) in self.cs.edges().zip(&self.weights) {
            let _ = writeln!(s, "{c} {d} {:.17e}", -w);
        }
        s
    }
}
