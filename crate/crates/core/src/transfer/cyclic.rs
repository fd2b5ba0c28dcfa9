//! Transfer operator of a cyclic strip.
//!
//! With `B_i` the weighted edges from phase `i` to phase `i + 1`, the
//! `p`-block strip matrix is similar to `M = B_0 B_1 ... B_{p-1}` on phase 0.
//! Its Perron vectors extend to every phase and define a `p`-periodic chain
//! whose `p`-step blocks carry the measure of the block strip, so
//! `log lambda(M) = sum_i (H_i - E_i w)`.

use rayon::prelude::*;

use super::chain::identity_threshold;
use super::perron::{perron_operator, PerronData, PerronOptions};
use crate::error::{Error, Result};
use crate::interaction::NnInteraction;
use crate::lattice::{transpose_csr_rect, CyclicColumnSystem};

/// Rectangular nonnegative matrix in row-compressed form.
#[derive(Clone, Debug)]
struct Factor {
    ncols: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    values: Vec<f64>,
}

impl Factor {
    fn nrows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    fn matvec(&self, x: &[f64], out: &mut [f64]) {
        out.par_iter_mut()
            .enumerate()
            .with_min_len(256)
            .for_each(|(r, o)| {
                let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
                let mut sum = 0.0f64;
                let mut comp = 0.0f64;
                for (&c, &v) in self.cols[a..b].iter().zip(&self.values[a..b]) {
                    let term = v * x[c as usize];
                    let t = sum + term;
                    if sum.abs() >= term.abs() {
                        comp += (sum - t) + term;
                    } else {
                        comp += (term - t) + sum;
                    }
                    sum = t;
                }
                *o = sum + comp;
            });
    }

    fn transpose(&self) -> Factor {
        let (row_ptr, cols) = transpose_csr_rect(&self.row_ptr, &self.cols, self.ncols);
        let mut fill = row_ptr.clone();
        let mut values = vec![0.0; self.values.len()];
        for r in 0..self.nrows() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k] as usize;
                values[fill[c]] = self.values[k];
                fill[c] += 1;
            }
        }
        Factor {
            ncols: self.nrows(),
            row_ptr,
            cols,
            values,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CyclicTransfer {
    cs: CyclicColumnSystem,
    factors: Vec<Factor>,
    transposed: Vec<Factor>,
    weights: Vec<Vec<f64>>,
    log_scale: f64,
}

impl CyclicTransfer {
    /// `cs` must already be trimmed and primitive.
    pub fn build(phi: &NnInteraction, cs: CyclicColumnSystem) -> Result<CyclicTransfer> {
        let (_, diag) = cs.trim_to_essential()?;
        if diag.removed != 0 {
            return Err(Error::Input("cyclic strip must be trimmed first".into()));
        }
        if !diag.is_primitive {
            return Err(Error::NotMixing {
                n: cs.height(),
                scc_count: diag.scc_count,
                period: diag.period,
            });
        }
        let p = cs.p();
        let mut factors = Vec::with_capacity(p);
        let mut weights = Vec::with_capacity(p);
        let mut log_scale = 0.0;
        for i in 0..p {
            let ph = cs.phase(i);
            let next = cs.phase((i + 1) % p);
            let (t0, b0) = (cs.top_symbol(i), cs.bottom_symbol(i));
            let mut w = Vec::with_capacity(ph.num_edges());
            for c in 0..ph.len() {
                let cc = ph.column(c);
                let e = phi.column_energy(cc, t0, b0);
                for &d in ph.successors(c) {
                    let dd = next.column(d as usize);
                    let h: f64 = cc.iter().zip(dd).map(|(&x, &y)| phi.hedge(x, y)).sum();
                    w.push(e + h);
                }
            }
            if w.iter().any(|x| !x.is_finite()) {
                return Err(Error::Input("strip weights must be finite".into()));
            }
            let min_w = w.iter().copied().fold(f64::INFINITY, f64::min);
            let values: Vec<f64> = w.iter().map(|&x| (-(x - min_w)).exp()).collect();
            if values.contains(&0.0) {
                return Err(Error::Input(
                    "weight spread exceeds double-precision range; entries underflow".into(),
                ));
            }
            log_scale -= min_w;
            factors.push(Factor {
                ncols: next.len(),
                row_ptr: ph.row_ptr().to_vec(),
                cols: ph.targets().to_vec(),
                values,
            });
            weights.push(w);
        }
        let transposed = factors.iter().map(Factor::transpose).collect();
        Ok(CyclicTransfer {
            cs,
            factors,
            transposed,
            weights,
            log_scale,
        })
    }

    pub fn column_system(&self) -> &CyclicColumnSystem {
        &self.cs
    }

    pub fn p(&self) -> usize {
        self.factors.len()
    }

    /// Sum over phases of the per-factor scale.
    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn weights(&self, phase: usize) -> &[f64] {
        &self.weights[phase]
    }

    /// `out = B_0 B_1 ... B_{p-1} x`.
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let mut cur = x.to_vec();
        for f in self.factors.iter().rev() {
            let mut next = vec![0.0; f.nrows()];
            f.matvec(&cur, &mut next);
            cur = next;
        }
        out.copy_from_slice(&cur);
    }

    /// `out = (x^T B_0 ... B_{p-1})^T`.
    fn apply_left(&self, x: &[f64], out: &mut [f64]) {
        let mut cur = x.to_vec();
        for f in &self.transposed {
            let mut next = vec![0.0; f.nrows()];
            f.matvec(&cur, &mut next);
            cur = next;
        }
        out.copy_from_slice(&cur);
    }

    pub fn perron(&self, opts: &PerronOptions) -> Result<PerronData> {
        perron_operator(
            self.cs.phase(0).len(),
            &|x, o| self.apply(x, o),
            &|x, o| self.apply_left(x, o),
            self.log_scale,
            opts,
        )
    }
}

/// Transition probabilities and stationary law of one phase.
#[derive(Clone, Debug)]
pub struct PhaseChain {
    pub pi_values: Vec<f64>,
    pub stationary: Vec<f64>,
    pub entropy: f64,
    pub expected_phi: f64,
}

#[derive(Clone, Debug)]
pub struct CyclicReport {
    pub columns: usize,
    pub edges: usize,
    pub log_scale: f64,
    pub perron: PerronData,
    pub phases: Vec<PhaseChain>,
    /// Entropy of one `p`-block step.
    pub entropy: f64,
    pub expected_phi: f64,
    pub log_lambda: f64,
    pub identity_residual: f64,
    pub row_defect: f64,
    pub stationarity_residual: f64,
    pub lambda_rel_width: f64,
}

impl CyclicReport {
    pub fn expected_f(&self) -> f64 {
        -self.expected_phi
    }
}

pub fn cyclic_report(tm: &CyclicTransfer, opts: &PerronOptions) -> Result<CyclicReport> {
    let pd = tm.perron(opts)?;
    let p = tm.p();
    let lambda = pd.stored_lambda();

    // v_i = B_i v_{i+1} / s_i with v_p = v_0 and prod s_i = lambda
    let mut v: Vec<Vec<f64>> = vec![Vec::new(); p];
    let mut s = vec![1.0; p];
    v[0] = pd.v.clone();
    for i in (1..p).rev() {
        let src = if i + 1 == p { &v[0] } else { &v[i + 1] };
        let mut out = vec![0.0; tm.factors[i].nrows()];
        tm.factors[i].matvec(src, &mut out);
        let top = out.iter().copied().fold(0.0, f64::max);
        for x in &mut out {
            *x /= top;
        }
        s[i] = top;
        v[i] = out;
    }
    s[0] = lambda / s[1..].iter().product::<f64>();

    // u_{i+1} = u_i B_i / s_i
    let mut u: Vec<Vec<f64>> = vec![pd.u.clone()];
    for i in 0..p - 1 {
        let mut out = vec![0.0; tm.transposed[i].nrows()];
        tm.transposed[i].matvec(&u[i], &mut out);
        for x in &mut out {
            *x /= s[i];
        }
        u.push(out);
    }

    let mut phases = Vec::with_capacity(p);
    let mut row_defect = 0.0f64;
    for i in 0..p {
        let f = &tm.factors[i];
        let vn = &v[(i + 1) % p];
        let mut pi_values = Vec::with_capacity(f.values.len());
        for c in 0..f.nrows() {
            let start = pi_values.len();
            let mut sum = 0.0;
            for k in f.row_ptr[c]..f.row_ptr[c + 1] {
                let x = f.values[k] * vn[f.cols[k] as usize] / (s[i] * v[i][c]);
                sum += x;
                pi_values.push(x);
            }
            row_defect = row_defect.max((sum - 1.0).abs());
            for x in &mut pi_values[start..] {
                *x /= sum;
            }
        }
        let mut stationary: Vec<f64> = u[i].iter().zip(&v[i]).map(|(a, b)| a * b).collect();
        let z: f64 = stationary.iter().sum();
        for x in &mut stationary {
            *x /= z;
        }
        let w = &tm.weights[i];
        let (mut h, mut e) = (0.0, 0.0);
        for c in 0..f.nrows() {
            let (mut hc, mut ec) = (0.0, 0.0);
            for k in f.row_ptr[c]..f.row_ptr[c + 1] {
                let q = pi_values[k];
                if q > 0.0 {
                    hc -= q * q.ln();
                }
                ec += q * w[k];
            }
            h += stationary[c] * hc;
            e += stationary[c] * ec;
        }
        phases.push(PhaseChain {
            pi_values,
            stationary,
            entropy: h,
            expected_phi: e,
        });
    }

    let mut stationarity_residual = 0.0f64;
    for i in 0..p {
        let f = &tm.factors[i];
        let ph = &phases[i];
        let mut flow = vec![0.0; f.ncols];
        for c in 0..f.nrows() {
            for k in f.row_ptr[c]..f.row_ptr[c + 1] {
                flow[f.cols[k] as usize] += ph.stationary[c] * ph.pi_values[k];
            }
        }
        let target = &phases[(i + 1) % p].stationary;
        for (a, b) in flow.iter().zip(target) {
            stationarity_residual = stationarity_residual.max((a - b).abs());
        }
    }

    let entropy: f64 = phases.iter().map(|ph| ph.entropy).sum();
    let expected_phi: f64 = phases.iter().map(|ph| ph.expected_phi).sum();
    let log_lambda = pd.log_lambda();
    let identity_residual = (log_lambda - (entropy - expected_phi)).abs();
    let threshold = identity_threshold(opts.rel_tol);
    if !(identity_residual <= threshold) {
        return Err(Error::IdentityViolation {
            residual: identity_residual,
            threshold,
        });
    }
    Ok(CyclicReport {
        columns: tm.cs.total_columns(),
        edges: tm.cs.total_edges(),
        log_scale: tm.log_scale,
        lambda_rel_width: pd.relative_width(),
        perron: pd,
        phases,
        entropy,
        expected_phi,
        log_lambda,
        identity_residual,
        row_defect,
        stationarity_residual,
    })
}
