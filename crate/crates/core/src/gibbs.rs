//! Single-site Gibbs conditional laws and the applicability gates.
//!
//! Conditional laws are taken over locally admissible fillings of fillable
//! neighbor configurations, so the influence coefficient computed here is
//! the surrogate `q_hat`, an upper bound for the coefficient over globally
//! admissible boundaries.

use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interaction::NnInteraction;
use crate::lattice::{NnSft, Symbol};
use crate::models::ModelKind;

/// Rigorous lower bound for the Z² site percolation threshold.
pub const P_C_RIGOROUS: f64 = 0.556;
/// Simulation estimate of the threshold; reports using it are non-rigorous.
pub const P_C_SIMULATED: f64 = 0.5927;

const TIE_WINDOW: f64 = 1e-9;

/// Symbols on the four neighbors of the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SiteBoundary {
    pub up: Symbol,
    pub down: Symbol,
    pub left: Symbol,
    pub right: Symbol,
}

impl SiteBoundary {
    pub fn uniform(s: Symbol) -> Self {
        SiteBoundary {
            up: s,
            down: s,
            left: s,
            right: s,
        }
    }

    fn admits(&self, sft: &NnSft, x: Symbol) -> bool {
        sft.allows_h(self.left, x)
            && sft.allows_h(x, self.right)
            && sft.allows_v(self.down, x)
            && sft.allows_v(x, self.up)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SiteDistribution {
    pub probs: Vec<f64>,
}

impl SiteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::Input(format!(
                "not a probability vector (sum {total})"
            )));
        }
        Ok(SiteDistribution { probs })
    }

    pub fn prob(&self, s: Symbol) -> f64 {
        self.probs[s as usize]
    }
}

/// Half the l1 distance between two laws on the same alphabet.
pub fn variational_distance(mu: &SiteDistribution, nu: &SiteDistribution) -> f64 {
    debug_assert_eq!(mu.probs.len(), nu.probs.len());
    let s: f64 = mu
        .probs
        .iter()
        .zip(&nu.probs)
        .map(|(a, b)| (a - b).abs())
        .sum();
    (0.5 * s).min(1.0)
}

/// Every neighbor configuration that some center symbol completes.
pub fn fillable_boundaries(sft: &NnSft) -> Vec<SiteBoundary> {
    let syms: Vec<Symbol> = sft.alphabet().symbols().collect();
    let mut out = Vec::new();
    for &up in &syms {
        for &down in &syms {
            for &left in &syms {
                for &right in &syms {
                    let d = SiteBoundary {
                        up,
                        down,
                        left,
                        right,
                    };
                    if syms.iter().any(|&x| d.admits(sft, x)) {
                        out.push(d);
                    }
                }
            }
        }
    }
    out
}

/// Gibbs law of the center symbol given its four neighbors.
pub fn site_distribution(
    phi: &NnInteraction,
    sft: &NnSft,
    delta: &SiteBoundary,
) -> Result<SiteDistribution> {
    for s in [delta.up, delta.down, delta.left, delta.right] {
        sft.alphabet().check(s)?;
    }
    let k = sft.num_symbols();
    let mut logw = vec![f64::NEG_INFINITY; k];
    for x in sft.alphabet().symbols() {
        if delta.admits(sft, x) {
            logw[x as usize] = -(phi.vertex(x)
                + phi.hedge(delta.left, x)
                + phi.hedge(x, delta.right)
                + phi.vedge(delta.down, x)
                + phi.vedge(x, delta.up));
        }
    }
    let top = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Err(Error::UnfillableBoundary);
    }
    let w: Vec<f64> = logw.iter().map(|&l| (l - top).exp()).collect();
    let z: f64 = w.iter().sum();
    Ok(SiteDistribution {
        probs: w.into_iter().map(|x| x / z).collect(),
    })
}

/// Largest variational distance between conditional laws at fillable
/// boundaries.
pub fn q_hat(phi: &NnInteraction, sft: &NnSft) -> Result<f64> {
    let boundaries = fillable_boundaries(sft);
    if boundaries.is_empty() {
        return Err(Error::NoFillableBoundary);
    }
    let mut seen = HashSet::new();
    let mut dists: Vec<SiteDistribution> = Vec::new();
    for d in &boundaries {
        let dist = site_distribution(phi, sft, d)?;
        let key: Vec<u64> = dist.probs.iter().map(|p| p.to_bits()).collect();
        if seen.insert(key) {
            dists.push(dist);
        }
    }
    let best = (0..dists.len())
        .into_par_iter()
        .map(|i| {
            dists[i + 1..]
                .iter()
                .map(|d| variational_distance(&dists[i], d))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApplicabilityReport {
    pub q_hat: f64,
    pub p_c_bound: f64,
    pub passes_qhat: bool,
    pub safe_fraction: f64,
    pub passes_manysafe: bool,
    pub min_neighbor_fraction: f64,
    pub passes_manyadj: bool,
    /// Distance between the laws at the all-(+1) and all-(-1) boundaries.
    pub ising_constant_boundary_q: Option<f64>,
    /// The sufficient condition `2 beta (4 - |h|) < log(p_c / (1 - p_c))`.
    pub ising_condition: Option<bool>,
    pub zero_interaction: bool,
    /// Overall verdict: the hypotheses are certified by some gate.
    pub passes: bool,
    pub rigorous_p_c: bool,
    pub notes: Vec<String>,
}

/// Legal-neighbor fraction minimized over symbols and the four directions.
pub fn min_neighbor_fraction(sft: &NnSft) -> f64 {
    let k = sft.num_symbols();
    let syms: Vec<Symbol> = sft.alphabet().symbols().collect();
    let mut best = usize::MAX;
    for &a in &syms {
        let counts = [
            syms.iter().filter(|&&b| sft.allows_h(a, b)).count(),
            syms.iter().filter(|&&b| sft.allows_h(b, a)).count(),
            syms.iter().filter(|&&b| sft.allows_v(a, b)).count(),
            syms.iter().filter(|&&b| sft.allows_v(b, a)).count(),
        ];
        best = best.min(*counts.iter().min().unwrap());
    }
    best as f64 / k as f64
}

pub fn manyadj_threshold(p_c_bound: f64) -> f64 {
    1.0 - p_c_bound / (4.0 * (1.0 + p_c_bound))
}

/// The displayed Ising coefficient
/// `e^{b(h-4)}/(e^{b(h-4)}+e^{-b(h-4)}) - e^{b(h+4)}/(e^{b(h+4)}+e^{-b(h+4)})`
/// in absolute value (the signed expression is non-positive for `beta >= 0`).
pub fn ising_q_formula(beta: f64, h: f64) -> f64 {
    let plus = |n: f64| {
        let x = beta * (h - n);
        // e^x / (e^x + e^-x)
        1.0 / (1.0 + (-2.0 * x).exp())
    };
    (plus(4.0) - plus(-4.0)).abs()
}

pub fn ising_condition(beta: f64, h: f64, p_c_bound: f64) -> bool {
    2.0 * beta * (4.0 - h.abs()) < (p_c_bound / (1.0 - p_c_bound)).ln()
}

pub fn applicability(
    phi: &NnInteraction,
    sft: &NnSft,
    kind: &ModelKind,
    p_c_bound: f64,
) -> Result<ApplicabilityReport> {
    if !(p_c_bound > 0.0 && p_c_bound < 1.0) {
        return Err(Error::Input(format!(
            "p_c bound must lie in (0,1), got {p_c_bound}"
        )));
    }
    let q = q_hat(phi, sft)?;
    let k = sft.num_symbols() as f64;
    let safe_fraction = sft.find_safe_symbols().len() as f64 / k;
    let mnf = min_neighbor_fraction(sft);
    let zero_interaction = phi.is_zero();
    let passes_qhat = q < p_c_bound;
    let passes_manysafe = safe_fraction > 1.0 - p_c_bound;
    let passes_manyadj = mnf > manyadj_threshold(p_c_bound);

    let mut notes = vec![
        "q_hat is taken over fillable (locally admissible) boundaries and bounds the true coefficient from above".to_string(),
        "strong irreducibility of the shift is assumed, not verified".to_string(),
    ];
    let rigorous_p_c = p_c_bound <= P_C_RIGOROUS;
    if !rigorous_p_c {
        notes.push(format!(
            "NON-RIGOROUS: p_c bound {p_c_bound} exceeds the proven lower bound {P_C_RIGOROUS}"
        ));
    }
    if (q - p_c_bound).abs() < TIE_WINDOW {
        notes.push(format!("q_hat is within {TIE_WINDOW:e} of the threshold"));
    }
    if !zero_interaction && (passes_manysafe || passes_manyadj) {
        notes.push(
            "safe-symbol and neighbor-fraction gates certify the zero interaction only".into(),
        );
    }

    let (ising_constant_boundary_q, ising_cond) = match kind {
        ModelKind::Ising { beta, h } => {
            let plus = site_distribution(phi, sft, &SiteBoundary::uniform(0))?;
            let minus = site_distribution(phi, sft, &SiteBoundary::uniform(1))?;
            (
                Some(variational_distance(&plus, &minus)),
                Some(ising_condition(*beta, *h, p_c_bound)),
            )
        }
        _ => (None, None),
    };

    let passes = passes_qhat || (zero_interaction && (passes_manysafe || passes_manyadj));
    Ok(ApplicabilityReport {
        q_hat: q,
        p_c_bound,
        passes_qhat,
        safe_fraction,
        passes_manysafe,
        min_neighbor_fraction: mnf,
        passes_manyadj,
        ising_constant_boundary_q,
        ising_condition: ising_cond,
        zero_interaction,
        passes,
        rigorous_p_c,
        notes,
    })
}

impl ApplicabilityReport {
    /// `key=value` lines, one per field.
    pub fn key_values(&self) -> Vec<(String, String)> {
        let mut kv = vec![
            ("q_hat".to_string(), format!("{:.15e}", self.q_hat)),
            ("p_c_bound".into(), format!("{}", self.p_c_bound)),
            ("passes_qhat".into(), self.passes_qhat.to_string()),
            (
                "safe_fraction".into(),
                format!("{:.15e}", self.safe_fraction),
            ),
            ("passes_manysafe".into(), self.passes_manysafe.to_string()),
            (
                "min_neighbor_fraction".into(),
                format!("{:.15e}", self.min_neighbor_fraction),
            ),
            ("passes_manyadj".into(), self.passes_manyadj.to_string()),
            ("zero_interaction".into(), self.zero_interaction.to_string()),
            ("rigorous_p_c".into(), self.rigorous_p_c.to_string()),
            ("passes".into(), self.passes.to_string()),
        ];
        if let Some(q) = self.ising_constant_boundary_q {
            kv.push(("ising_constant_boundary_q".into(), format!("{q:.15e}")));
        }
        if let Some(c) = self.ising_condition {
            kv.push(("ising_condition".into(), c.to_string()));
        }
        kv
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let verdict = if self.passes { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "applicability: {verdict}");
        let _ = writeln!(
            s,
            "  q_hat = {:.15} (gate: q_hat < {})",
            self.q_hat, self.p_c_bound
        );
        let _ = writeln!(
            s,
            "  safe-symbol fraction = {:.15} (gate: > {:.15})",
            self.safe_fraction,
            1.0 - self.p_c_bound
        );
        let _ = writeln!(
            s,
            "  min legal-neighbor fraction = {:.15} (gate: > {:.15})",
            self.min_neighbor_fraction,
            manyadj_threshold(self.p_c_bound)
        );
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        let _ = writeln!(s, "[report]");
        for (k, v) in self.key_values() {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }
}
