//! The Markov chain induced on strip columns and the pressure identity
//! `log lambda = h(mu) + int f dmu` with `f = -weight`.

use super::matrix::TransferMatrix;
use super::perron::{perron, PerronData, PerronOptions};
use crate::error::{Error, Result};
use crate::interaction::NnInteraction;
use crate::lattice::ColumnSystem;

#[derive(Clone, Debug)]
pub struct StripChain {
    /// Transition probabilities aligned with the strip's canonical edges.
    pub pi_values: Vec<f64>,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    pub stationary: Vec<f64>,
    pub entropy: f64,
    /// Expected strip weight under the chain.
    pub expected_phi: f64,
    pub log_lambda: f64,
    /// `|log lambda - (entropy - expected_phi)|`.
    pub identity_residual: f64,
    /// Largest `|row sum - 1|` before renormalization.
    pub row_defect: f64,
    /// `||pi P - pi||_inf`.
    pub stationarity_residual: f64,
    /// First-order sensitivity of entropy and expected weight to the
    /// eigenvalue enclosure, `(hi - lo) / lo`.
    pub lambda_rel_width: f64,
}

/// Transition matrix `P(c,d) = A(c,d) v(d) / (lambda v(c))` and its
/// stationary law `pi(c) ~ u(c) v(c)`.
pub fn markov_chain(tm: &TransferMatrix, pd: &PerronData) -> StripChain {
    let a = tm.matrix();
    let n = a.dim();
    let lambda = pd.stored_lambda();
    let mut pi_values = Vec::with_capacity(a.nnz());
    let mut row_defect = 0.0f64;
    for c in 0..n {
        let (cols, vals) = a.row(c);
        let start = pi_values.len();
        let mut sum = 0.0;
        for (&d, &x) in cols.iter().zip(vals) {
            let p = x * pd.v[d as usize] / (lambda * pd.v[c]);
            sum += p;
            pi_values.push(p);
        }
        row_defect = row_defect.max((sum - 1.0).abs());
        for p in &mut pi_values[start..] {
            *p /= sum;
        }
    }
    let mut stationary: Vec<f64> = pd.u.iter().zip(&pd.v).map(|(a, b)| a * b).collect();
    let z: f64 = stationary.iter().sum();
    for s in &mut stationary {
        *s /= z;
    }

    let mut entropy = 0.0;
    let mut expected_phi = 0.0;
    let mut flow = vec![0.0; n];
    let weights = tm.weights();
    for c in 0..n {
        let range = a.row_ptr()[c]..a.row_ptr()[c + 1];
        let mut hc = 0.0;
        let mut ec = 0.0;
        for k in range {
            let p = pi_values[k];
            if p > 0.0 {
                hc -= p * p.ln();
            }
            ec += p * weights[k];
            flow[a.cols()[k] as usize] += stationary[c] * p;
        }
        entropy += stationary[c] * hc;
        expected_phi += stationary[c] * ec;
    }
    let stationarity_residual = flow
        .iter()
        .zip(&stationary)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let log_lambda = pd.log_lambda();
    StripChain {
        pi_values,
        row_ptr: a.row_ptr().to_vec(),
        cols: a.cols().to_vec(),
        stationary,
        entropy,
        expected_phi,
        log_lambda,
        identity_residual: (log_lambda - (entropy - expected_phi)).abs(),
        row_defect,
        stationarity_residual,
        lambda_rel_width: pd.relative_width(),
    }
}

impl StripChain {
    pub fn num_states(&self) -> usize {
        self.stationary.len()
    }

    pub fn transition(&self, c: usize, d: usize) -> f64 {
        let cols = &self.cols[self.row_ptr[c]..self.row_ptr[c + 1]];
        match cols.binary_search(&(d as u32)) {
            Ok(i) => self.pi_values[self.row_ptr[c] + i],
            Err(_) => 0.0,
        }
    }

    /// `sum f dmu` for `f = -weight`.
    pub fn expected_f(&self) -> f64 {
        -self.expected_phi
    }

    /// Shannon entropy of the law of `len` consecutive columns, by explicit
    /// enumeration of all admissible blocks.
    pub fn block_entropy(&self, len: usize) -> f64 {
        if len == 0 {
            return 0.0;
        }
        let mut h = Neumaier::default();
        let mut stack: Vec<(usize, usize, f64)> = (0..self.num_states())
            .map(|c| (c, 1, self.stationary[c]))
            .collect();
        while let Some((c, depth, p)) = stack.pop() {
            if depth == len {
                if p > 0.0 {
                    h.add(-p * p.ln());
                }
                continue;
            }
            for k in self.row_ptr[c]..self.row_ptr[c + 1] {
                stack.push((self.cols[k] as usize, depth + 1, p * self.pi_values[k]));
            }
        }
        h.value()
    }

    /// `H(X_0 | X_{-1}, ..., X_{-k})` from block entropies.
    pub fn conditional_entropy_given_past(&self, k: usize) -> f64 {
        self.block_entropy(k + 1) - self.block_entropy(k)
    }
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Full Perron and Markov summary of one strip.
#[derive(Clone, Debug)]
pub struct StripReport {
    pub columns: usize,
    pub edges: usize,
    pub log_scale: f64,
    pub perron: PerronData,
    pub chain: StripChain,
}

pub fn identity_threshold(rel_tol: f64) -> f64 {
    10.0 * rel_tol + 1e-9
}

/// Transfer matrix, Perron enclosure and induced chain of a trimmed
/// primitive strip, with the pressure identity verified.
pub fn strip_report(
    phi: &NnInteraction,
    cs: ColumnSystem,
    opts: &PerronOptions,
) -> Result<StripReport> {
    let tm = TransferMatrix::build(phi, cs)?;
    report_for(&tm, opts)
}

pub fn report_for(tm: &TransferMatrix, opts: &PerronOptions) -> Result<StripReport> {
    let pd = perron(tm, opts)?;
    let chain = markov_chain(tm, &pd);
    let threshold = identity_threshold(opts.rel_tol);
    if !(chain.identity_residual <= threshold) {
        return Err(Error::IdentityViolation {
            residual: chain.identity_residual,
            threshold,
        });
    }
    Ok(StripReport {
        columns: tm.column_system().len(),
        edges: tm.column_system().num_edges(),
        log_scale: tm.log_scale(),
        perron: pd,
        chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ColumnBudget;
    use crate::models;

    fn report(m: &models::Model, n: usize) -> StripReport {
        let cs = ColumnSystem::build(
            &m.sft,
            n,
            m.top.as_ref().unwrap(),
            m.bottom.as_ref().unwrap(),
            &ColumnBudget::default(),
        )
        .unwrap();
        let (cs, _) = cs.trim_to_essential().unwrap();
        strip_report(&m.interaction, cs, &PerronOptions::with_tol(1e-14)).unwrap()
    }

    #[test]
    fn parry_measure_of_golden_mean() {
        let r = report(&models::hard_core(1.0).unwrap(), 1);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let c = &r.chain;
        assert!((c.transition(0, 0) - 1.0 / phi).abs() < 1e-13);
        assert!((c.transition(0, 1) - 1.0 / (phi * phi)).abs() < 1e-13);
        assert!((c.transition(1, 0) - 1.0).abs() < 1e-13);
        let s = 1.0 + phi * phi;
        assert!((c.stationary[0] - phi * phi / s).abs() < 1e-13);
        assert!((c.stationary[1] - 1.0 / s).abs() < 1e-13);
        assert!((c.entropy - phi.ln()).abs() < 1e-13);
        assert_eq!(c.expected_phi, 0.0);
    }

    #[test]
    fn full_shift_uniform_chain() {
        let r = report(&models::zero(2).unwrap(), 1);
        for c in 0..2 {
            for d in 0..2 {
                assert!((r.chain.transition(c, d) - 0.5).abs() < 1e-14);
            }
        }
        assert!((r.chain.entropy - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn identity_hard_core_two() {
        let r = report(&models::hard_core(2.0).unwrap(), 1);
        assert!((r.perron.log_lambda() - 2f64.ln()).abs() < 1e-13);
        let c = &r.chain;
        assert!((c.log_lambda - (c.entropy + c.expected_f())).abs() < 1e-10);
        assert!(c.row_defect < 1e-12);
        assert!(c.stationarity_residual < 1e-12);
    }

    #[test]
    fn identity_ising_height_three() {
        let r = report(&models::ising(0.01, 0.0).unwrap(), 3);
        assert!(r.chain.identity_residual < 1e-9);
    }

    #[test]
    fn markov_block_entropies() {
        let r = report(&models::hard_core(0.7).unwrap(), 3);
        let c = &r.chain;
        let h1 = c.conditional_entropy_given_past(1);
        assert!((h1 - c.entropy).abs() < 1e-12);
        for k in 2..=3 {
            assert!((c.conditional_entropy_given_past(k) - h1).abs() < 1e-12);
        }
    }
}
