//! Bounded search for periodic boundary rows.
//!
//! Global admissibility is undecidable in general. A row is accepted here if
//! it is cyclically admissible and can be stacked on, and under, `depth`
//! further rows of the same period. Results carry that depth.

use super::sft::{NnSft, PeriodicRow, Symbol};
use crate::error::{Error, Result};

const MAX_WORDS: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateRow {
    pub row: PeriodicRow,
    /// Number of rows verified above and below the candidate.
    pub verified_depth: usize,
}

/// Candidate rows of minimal period `<= max_period`, one per rotation class
/// (the lexicographically least rotation), ordered by period then word.
pub fn candidate_boundary_rows(
    sft: &NnSft,
    max_period: usize,
    depth: usize,
) -> Result<Vec<CandidateRow>> {
    if max_period == 0 || depth == 0 {
        return Err(Error::Input(
            "max_period and depth must be at least 1".into(),
        ));
    }
    let mut out = Vec::new();
    for p in 1..=max_period {
        let words = cyclic_words(sft, p)?;
        if words.is_empty() {
            continue;
        }
        let stacks =
            |lo: &[Symbol], up: &[Symbol]| lo.iter().zip(up).all(|(&a, &b)| sft.allows_v(a, b));
        let m = words.len();
        // up[i]: rows that can sit above row i, down[i]: rows that can sit below.
        let mut up = vec![Vec::new(); m];
        let mut down = vec![Vec::new(); m];
        for i in 0..m {
            for j in 0..m {
                if stacks(&words[i], &words[j]) {
                    up[i].push(j);
                    down[j].push(i);
                }
            }
        }
        let extends = |adj: &[Vec<usize>]| {
            let mut ok = vec![true; m];
            for _ in 0..depth {
                ok = (0..m).map(|i| adj[i].iter().any(|&j| ok[j])).collect();
            }
            ok
        };
        let ok_up = extends(&up);
        let ok_down = extends(&down);
        for (i, w) in words.iter().enumerate() {
            if ok_up[i] && ok_down[i] && is_canonical(w) {
                out.push(CandidateRow {
                    row: PeriodicRow::new(w.clone())?,
                    verified_depth: depth,
                });
            }
        }
    }
    Ok(out)
}

/// All words of length `p` admissible as one period of a bi-infinite row.
fn cyclic_words(sft: &NnSft, p: usize) -> Result<Vec<Vec<Symbol>>> {
    let k = sft.num_symbols();
    if (k as f64).powi(p as i32) > MAX_WORDS as f64 {
        return Err(Error::BudgetExceeded {
            what: "candidate row words",
            projected: (k as u128).saturating_pow(p as u32),
            limit: MAX_WORDS as u128,
        });
    }
    let mut words: Vec<Vec<Symbol>> = sft.alphabet().symbols().map(|s| vec![s]).collect();
    for _ in 1..p {
        words = words
            .into_iter()
            .flat_map(|w| {
                let last = *w.last().unwrap();
                sft.rights(last)
                    .map(|r| {
                        let mut v = w.clone();
                        v.push(r);
                        v
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    words.retain(|w| sft.allows_h(w[p - 1], w[0]));
    Ok(words)
}

/// Primitive word that is the least among its rotations.
fn is_canonical(w: &[Symbol]) -> bool {
    let p = w.len();
    for r in 1..p {
        let rotated: Vec<Symbol> = w[r..].iter().chain(&w[..r]).copied().collect();
        match rotated.as_slice().cmp(w) {
            std::cmp::Ordering::Less | std::cmp::Ordering::Equal => return false,
            std::cmp::Ordering::Greater => {}
        }
    }
    true
}
