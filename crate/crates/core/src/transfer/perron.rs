//! Perron eigenvalue enclosure by power iteration.
//!
//! For a nonnegative irreducible matrix `A` and any positive vector `v`,
//!
//! ```text
//! min_c (Av)_c / v_c  <=  lambda(A)  <=  max_c (Av)_c / v_c
//! ```
//!
//! so every power-iteration step yields a valid enclosure. The running
//! maximum of the lower bounds and minimum of the upper bounds is kept.
//! Rounding inside a single matrix-vector product is not bounded formally.

use super::matrix::{SparseMatrix, TransferMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerronOptions {
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Give up when the best gap has not shrunk for this many iterations.
    pub stall_window: usize,
    pub record_history: bool,
}

impl Default for PerronOptions {
    fn default() -> Self {
        PerronOptions {
            rel_tol: 1e-12,
            max_iter: 1_000_000,
            stall_window: 5_000,
            record_history: false,
        }
    }
}

impl PerronOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        PerronOptions {
            rel_tol,
            ..Default::default()
        }
    }
}

/// Enclosure and eigenvectors of a scaled matrix; `log_*` fields are in
/// true scale.
#[derive(Clone, Debug, PartialEq)]
pub struct PerronData {
    pub log_lambda_lo: f64,
    pub log_lambda_hi: f64,
    /// Right eigenvector, largest entry 1.
    pub v: Vec<f64>,
    /// Left eigenvector, normalized so that `u . v = 1`.
    pub u: Vec<f64>,
    pub iterations: usize,
    /// `||A v - lambda v||_inf / (lambda ||v||_inf)` at the midpoint.
    pub residual: f64,
    /// Raw per-step bounds of the right iteration, in stored scale.
    pub history: Vec<(f64, f64)>,
    pub(crate) stored_lo: f64,
    pub(crate) stored_hi: f64,
    pub(crate) log_scale: f64,
}

impl PerronData {
    pub fn lambda_lo(&self) -> f64 {
        self.log_lambda_lo.exp()
    }

    pub fn lambda_hi(&self) -> f64 {
        self.log_lambda_hi.exp()
    }

    /// log of the enclosure midpoint.
    pub fn log_lambda(&self) -> f64 {
        let mid = 0.5 * (self.stored_lo + self.stored_hi);
        mid.ln() + self.log_scale
    }

    pub fn lambda(&self) -> f64 {
        self.log_lambda().exp()
    }

    /// Midpoint in stored scale.
    pub fn stored_lambda(&self) -> f64 {
        0.5 * (self.stored_lo + self.stored_hi)
    }

    pub fn relative_width(&self) -> f64 {
        (self.stored_hi - self.stored_lo) / self.stored_lo
    }
}

struct Iterate {
    lo: f64,
    hi: f64,
    v: Vec<f64>,
    iterations: usize,
    history: Vec<(f64, f64)>,
}

fn power_bounds(
    n: usize,
    apply: &dyn Fn(&[f64], &mut [f64]),
    opts: &PerronOptions,
) -> Result<Iterate> {
    let mut v = vec![1.0f64; n];
    let mut w = vec![0.0f64; n];
    let mut best_lo = 0.0f64;
    let mut best_hi = f64::INFINITY;
    let mut best_gap = f64::INFINITY;
    let mut last_improvement = 0usize;
    let mut history = Vec::new();
    for it in 1..=opts.max_iter {
        apply(&v, &mut w);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        let mut top = 0.0f64;
        for (&wc, &vc) in w.iter().zip(&v) {
            let r = wc / vc;
            lo = lo.min(r);
            hi = hi.max(r);
            top = top.max(wc);
        }
        if !(lo > 0.0) || !hi.is_finite() {
            return Err(Error::Convergence {
                iterations: it,
                gap: f64::INFINITY,
            });
        }
        if opts.record_history {
            history.push((lo, hi));
        }
        best_lo = best_lo.max(lo);
        best_hi = best_hi.min(hi);
        let gap = (best_hi - best_lo) / best_lo;
        for (vc, &wc) in v.iter_mut().zip(&w) {
            *vc = wc / top;
        }
        if gap <= opts.rel_tol {
            return Ok(Iterate {
                lo: best_lo,
                hi: best_hi,
                v,
                iterations: it,
                history,
            });
        }
        if gap < best_gap {
            best_gap = gap;
            last_improvement = it;
        } else if it - last_improvement >= opts.stall_window {
            return Err(Error::Convergence {
                iterations: it,
                gap: best_gap,
            });
        }
    }
    Err(Error::Convergence {
        iterations: opts.max_iter,
        gap: best_gap,
    })
}

/// Perron data of a nonnegative primitive matrix (stored scale, i.e. with
/// `log_scale = 0`).
pub fn perron_sparse(a: &SparseMatrix, opts: &PerronOptions) -> Result<PerronData> {
    perron_scaled(a, 0.0, opts)
}

/// Perron data of a transfer matrix, reported in true scale.
pub fn perron(tm: &TransferMatrix, opts: &PerronOptions) -> Result<PerronData> {
    perron_scaled(tm.matrix(), tm.log_scale(), opts)
}

fn perron_scaled(a: &SparseMatrix, log_scale: f64, opts: &PerronOptions) -> Result<PerronData> {
    let at = a.transpose();
    perron_operator(
        a.dim(),
        &|x, o| a.matvec(x, o),
        &|x, o| at.matvec(x, o),
        log_scale,
        opts,
    )
}

/// Perron data of a nonnegative primitive operator given by its action
/// `right(x) = A x` and `left(x) = A^T x`.
pub(crate) fn perron_operator(
    dim: usize,
    right: &dyn Fn(&[f64], &mut [f64]),
    left: &dyn Fn(&[f64], &mut [f64]),
    log_scale: f64,
    opts: &PerronOptions,
) -> Result<PerronData> {
    if !(opts.rel_tol > 0.0) {
        return Err(Error::Input("rel_tol must be positive".into()));
    }
    if dim == 0 {
        return Err(Error::Input("empty matrix".into()));
    }
    let apply_right = right;
    let right = power_bounds(dim, apply_right, opts)?;
    let left = power_bounds(dim, left, opts)?;

    let mut lo = right.lo.max(left.lo);
    let mut hi = right.hi.min(left.hi);
    if lo > hi {
        // both enclosures converged to within rounding of each other
        std::mem::swap(&mut lo, &mut hi);
    }
    let v = right.v;
    let mut u = left.v;
    let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
    for x in &mut u {
        *x /= dot;
    }
    let mid = 0.5 * (lo + hi);
    let mut av = vec![0.0; dim];
    apply_right(&v, &mut av);
    let vmax = v.iter().copied().fold(0.0, f64::max);
    let residual = av
        .iter()
        .zip(&v)
        .map(|(x, y)| (x - mid * y).abs())
        .fold(0.0, f64::max)
        / (mid * vmax);

    Ok(PerronData {
        log_lambda_lo: lo.ln() + log_scale,
        log_lambda_hi: hi.ln() + log_scale,
        v,
        u,
        iterations: right.iterations + left.iterations,
        residual,
        history: right.history,
        stored_lo: lo,
        stored_hi: hi,
        log_scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[f64]]) -> SparseMatrix {
        let mut t = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    t.push((r, c, v));
                }
            }
        }
        SparseMatrix::from_triplets(rows.len(), t).unwrap()
    }

    #[test]
    fn golden_mean() {
        let a = dense(&[&[1.0, 1.0], &[1.0, 0.0]]);
        let pd = perron_sparse(&a, &PerronOptions::with_tol(1e-14)).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(pd.lambda_lo() <= phi * (1.0 + 1e-15) && phi <= pd.lambda_hi() * (1.0 + 1e-15));
        assert!((pd.lambda() - phi).abs() < 1e-13);
        assert!(pd.v.iter().all(|&x| x > 0.0));
        assert!(pd.u.iter().all(|&x| x > 0.0));
        let dot: f64 = pd.u.iter().zip(&pd.v).map(|(a, b)| a * b).sum();
        assert!((dot - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hard_square_height_two() {
        // columns 00, 01, 10; 01-01 and 10-10 forbidden
        let a = dense(&[&[1.0, 1.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]);
        let pd = perron_sparse(&a, &PerronOptions::with_tol(1e-14)).unwrap();
        assert!((pd.lambda() - (1.0 + 2f64.sqrt())).abs() < 1e-13);
    }

    #[test]
    fn quadratic_hard_core() {
        for a_ in [0.5, 1.0, 2.0, 7.0] {
            let a = dense(&[&[1.0, 1.0], &[a_, 0.0]]);
            let pd = perron_sparse(&a, &PerronOptions::with_tol(1e-14)).unwrap();
            let want = (1.0 + (1.0 + 4.0 * a_).sqrt()) / 2.0;
            assert!((pd.lambda() / want - 1.0).abs() < 1e-13, "a={a_}");
        }
    }

    #[test]
    fn history_is_monotone() {
        let a = dense(&[&[0.2, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.5, 0.0]]);
        let opts = PerronOptions {
            rel_tol: 1e-13,
            record_history: true,
            ..Default::default()
        };
        let pd = perron_sparse(&a, &opts).unwrap();
        assert!(!pd.history.is_empty());
        for w in pd.history.windows(2) {
            assert!(w[1].0 >= w[0].0 * (1.0 - 1e-14));
            assert!(w[1].1 <= w[0].1 * (1.0 + 1e-14));
        }
        for &(lo, hi) in &pd.history {
            assert!(lo <= hi);
        }
    }

    #[test]
    fn periodic_matrix_does_not_converge() {
        let a = dense(&[&[0.0, 1.0], &[2.0, 0.0]]);
        let opts = PerronOptions {
            rel_tol: 1e-12,
            max_iter: 10_000,
            stall_window: 100,
            record_history: false,
        };
        assert!(matches!(
            perron_sparse(&a, &opts),
            Err(Error::Convergence { .. })
        ));
    }
}
