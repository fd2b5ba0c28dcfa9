//! Strips between periodic boundary rows, kept as `p` phases.
//!
//! Phase `i` holds the columns at horizontal positions `x = i mod p`, which
//! see `t.at(i)` above and `b.at(i)` below. Edges run from phase `i` to phase
//! `i + 1 mod p`, so a path through all phases is one column of the
//! `p`-block recoded strip without materializing the block columns.

use super::columns::{
    count_columns, cycle_period, enumerate_columns, enumerate_edges, essential,
    strongly_connected_components, ColumnBudget, TrimDiagnostics,
};
use super::sft::{NnSft, PeriodicRow, Symbol};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phase {
    n: usize,
    columns: Vec<Symbol>,
    row_ptr: Vec<usize>,
    /// Indices into the next phase.
    targets: Vec<u32>,
}

impl Phase {
    pub fn len(&self) -> usize {
        self.columns.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, c: usize) -> &[Symbol] {
        &self.columns[c * self.n..(c + 1) * self.n]
    }

    pub fn successors(&self, c: usize) -> &[u32] {
        &self.targets[self.row_ptr[c]..self.row_ptr[c + 1]]
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicColumnSystem {
    n: usize,
    t: PeriodicRow,
    b: PeriodicRow,
    phases: Vec<Phase>,
}

impl CyclicColumnSystem {
    /// `p` must be a multiple of both row periods.
    pub fn build(
        sft: &NnSft,
        n: usize,
        t: &PeriodicRow,
        b: &PeriodicRow,
        p: usize,
        budget: &ColumnBudget,
    ) -> Result<CyclicColumnSystem> {
        if n == 0 {
            return Err(Error::Input("strip height must be at least 1".into()));
        }
        if p == 0 || !p.is_multiple_of(t.period()) || !p.is_multiple_of(b.period()) {
            return Err(Error::Input(format!(
                "phase count {p} must be a positive multiple of the row periods {} and {}",
                t.period(),
                b.period()
            )));
        }
        for &s in t.word().iter().chain(b.word()) {
            sft.alphabet().check(s)?;
        }
        let counts: Vec<u128> = (0..p)
            .map(|i| count_columns(sft, n, t.at(i as i64), b.at(i as i64)))
            .collect();
        let projected = counts.iter().fold(0u128, |a, &c| a.saturating_add(c));
        if projected > budget.max_columns as u128 {
            return Err(Error::BudgetExceeded {
                what: "columns",
                projected,
                limit: budget.max_columns as u128,
            });
        }
        if counts.contains(&0) {
            return Err(Error::StripEmpty { n });
        }
        let columns: Vec<Vec<Symbol>> = (0..p)
            .map(|i| enumerate_columns(sft, n, t.at(i as i64), b.at(i as i64), counts[i] as usize))
            .collect();
        let mut phases = Vec::with_capacity(p);
        let mut used = 0;
        for i in 0..p {
            let (row_ptr, targets) =
                enumerate_edges(sft, n, &columns[i], &columns[(i + 1) % p], budget, used)?;
            used += targets.len();
            phases.push(Phase {
                n,
                columns: columns[i].clone(),
                row_ptr,
                targets,
            });
        }
        Ok(CyclicColumnSystem {
            n,
            t: t.clone(),
            b: b.clone(),
            phases,
        })
    }

    pub fn height(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.phases.len()
    }

    pub fn top(&self) -> &PeriodicRow {
        &self.t
    }

    pub fn bottom(&self) -> &PeriodicRow {
        &self.b
    }

    pub fn top_symbol(&self, phase: usize) -> Symbol {
        self.t.at(phase as i64)
    }

    pub fn bottom_symbol(&self, phase: usize) -> Symbol {
        self.b.at(phase as i64)
    }

    pub fn phase(&self, i: usize) -> &Phase {
        &self.phases[i]
    }

    pub fn phases(&self) -> &[Phase] {
        &self.phases
    }

    pub fn total_columns(&self) -> usize {
        self.phases.iter().map(Phase::len).sum()
    }

    pub fn total_edges(&self) -> usize {
        self.phases.iter().map(Phase::num_edges).sum()
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = vec![0];
        for ph in &self.phases {
            off.push(off.last().unwrap() + ph.len());
        }
        off
    }

    /// All phases as one digraph; its period is `p` times the period of
    /// the product `B_0 ... B_{p-1}` restricted to phase 0.
    fn union_graph(&self) -> (Vec<usize>, Vec<u32>) {
        let p = self.p();
        let off = self.offsets();
        let mut row_ptr = vec![0];
        let mut targets = Vec::with_capacity(self.total_edges());
        for (i, ph) in self.phases.iter().enumerate() {
            let shift = off[(i + 1) % p] as u32;
            for c in 0..ph.len() {
                targets.extend(ph.successors(c).iter().map(|&d| d + shift));
                row_ptr.push(targets.len());
            }
        }
        (row_ptr, targets)
    }

    /// Removes inessential columns in every phase and classifies the rest.
    /// `period` in the diagnostics refers to the product matrix.
    pub fn trim_to_essential(&self) -> Result<(CyclicColumnSystem, TrimDiagnostics)> {
        let p = self.p();
        let off = self.offsets();
        let (row_ptr, targets) = self.union_graph();
        let alive = essential(&row_ptr, &targets);
        let kept: Vec<Vec<usize>> = (0..p)
            .map(|i| {
                (0..self.phases[i].len())
                    .filter(|&c| alive[off[i] + c])
                    .collect()
            })
            .collect();
        if kept.iter().any(Vec::is_empty) {
            return Err(Error::DegenerateStrip { n: self.n });
        }
        let remaps: Vec<Vec<u32>> = (0..p)
            .map(|i| {
                let mut r = vec![u32::MAX; self.phases[i].len()];
                for (new, &old) in kept[i].iter().enumerate() {
                    r[old] = new as u32;
                }
                r
            })
            .collect();
        let phases: Vec<Phase> = (0..p)
            .map(|i| {
                let ph = &self.phases[i];
                let next = &remaps[(i + 1) % p];
                let mut columns = Vec::with_capacity(kept[i].len() * self.n);
                let mut rp = vec![0];
                let mut tg = Vec::new();
                for &old in &kept[i] {
                    columns.extend_from_slice(ph.column(old));
                    tg.extend(
                        ph.successors(old)
                            .iter()
                            .map(|&d| next[d as usize])
                            .filter(|&d| d != u32::MAX),
                    );
                    rp.push(tg.len());
                }
                Phase {
                    n: self.n,
                    columns,
                    row_ptr: rp,
                    targets: tg,
                }
            })
            .collect();
        let trimmed = CyclicColumnSystem {
            n: self.n,
            t: self.t.clone(),
            b: self.b.clone(),
            phases,
        };
        let (urp, utg) = trimmed.union_graph();
        let comp = strongly_connected_components(&urp, &utg);
        let scc_count = comp.iter().copied().max().map_or(0, |x| x + 1);
        let is_single_scc = scc_count == 1;
        let period = is_single_scc.then(|| cycle_period(&urp, &utg) / p);
        let diag = TrimDiagnostics {
            removed: self.total_columns() - trimmed.total_columns(),
            scc_count,
            is_single_scc,
            period,
            is_primitive: is_single_scc && period == Some(1),
        };
        Ok((trimmed, diag))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ColumnSystem;

    fn hard_square() -> NnSft {
        let pairs = [("0", "0"), ("0", "1"), ("1", "0")];
        NnSft::from_names(&["0", "1"], &pairs, &pairs).unwrap()
    }

    #[test]
    fn one_phase_matches_column_system() {
        let sft = hard_square();
        let z = PeriodicRow::constant(0);
        for n in 1..=6 {
            let cs = ColumnSystem::build(&sft, n, &z, &z, &ColumnBudget::default()).unwrap();
            let cy =
                CyclicColumnSystem::build(&sft, n, &z, &z, 1, &ColumnBudget::default()).unwrap();
            assert_eq!(cy.p(), 1);
            assert_eq!(cy.total_columns(), cs.len());
            assert_eq!(cy.phase(0).targets(), cs.targets());
            assert_eq!(cy.phase(0).row_ptr(), cs.row_ptr());
        }
    }

    #[test]
    fn paths_through_phases_count_block_columns() {
        let sft = hard_square();
        let z = PeriodicRow::constant(0);
        let hp = sft.higher_power(2).unwrap();
        for n in 1..=5 {
            let cy =
                CyclicColumnSystem::build(&sft, n, &z, &z, 2, &ColumnBudget::default()).unwrap();
            let blocks = ColumnSystem::build(
                &hp.sft,
                n,
                &hp.recode_row(&z).unwrap(),
                &hp.recode_row(&z).unwrap(),
                &ColumnBudget::default(),
            )
            .unwrap();
            assert_eq!(cy.phase(0).num_edges(), blocks.len());
        }
    }

    #[test]
    fn checkerboard_phases_and_period() {
        let names = ["1", "2", "3", "4"];
        let diff: Vec<(&str, &str)> = names
            .iter()
            .flat_map(|a| names.iter().filter(move |b| *b != a).map(move |b| (*a, *b)))
            .collect();
        let sft = NnSft::from_names(&names, &diff, &diff).unwrap();
        let row = PeriodicRow::new(vec![0, 1]).unwrap();
        assert!(
            CyclicColumnSystem::build(&sft, 2, &row, &row, 3, &ColumnBudget::default()).is_err()
        );
        let cy =
            CyclicColumnSystem::build(&sft, 3, &row, &row, 2, &ColumnBudget::default()).unwrap();
        for i in 0..2 {
            for c in 0..cy.phase(i).len() {
                let col = cy.phase(i).column(c);
                assert_ne!(col[0], cy.bottom_symbol(i));
                assert_ne!(col[2], cy.top_symbol(i));
            }
        }
        let (_, diag) = cy.trim_to_essential().unwrap();
        assert!(diag.is_primitive, "{diag:?}");
    }

    #[test]
    fn budget_counts_all_phases() {
        let sft = hard_square();
        let z = PeriodicRow::constant(0);
        let tiny = ColumnBudget {
            max_columns: 10,
            max_edges: 1_000,
        };
        // 8 columns per phase at n = 4
        assert!(matches!(
            CyclicColumnSystem::build(&sft, 4, &z, &z, 2, &tiny),
            Err(Error::BudgetExceeded {
                what: "columns",
                projected: 16,
                ..
            })
        ));
    }
}
