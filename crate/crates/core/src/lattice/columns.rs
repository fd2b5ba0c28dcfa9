//! Strip column alphabets and their horizontal compatibility graphs.
//!
//! A column of height `n` is stored bottom row first. Columns are kept in
//! lexicographic order of their symbol indices with the bottom row most
//! significant, and edges are kept as a row-compressed adjacency sorted by
//! `(from, to)`.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use super::sft::{NnSft, PeriodicRow, Symbol};
use crate::error::{Error, Result};

/// Limits on the size of a strip system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColumnBudget {
    pub max_columns: usize,
    pub max_edges: usize,
}

impl Default for ColumnBudget {
    fn default() -> Self {
        ColumnBudget {
            max_columns: 4_000_000,
            max_edges: 60_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnSystem {
    n: usize,
    t: PeriodicRow,
    b: PeriodicRow,
    columns: Vec<Symbol>,
    row_ptr: Vec<usize>,
    targets: Vec<u32>,
}

/// Outcome flags of [`ColumnSystem::trim_to_essential`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrimDiagnostics {
    pub removed: usize,
    pub scc_count: usize,
    pub is_single_scc: bool,
    /// gcd of cycle lengths; only defined for a single component.
    pub period: Option<usize>,
    pub is_primitive: bool,
}

/// Exact number of height-`n` columns compatible with constant rows `t`
/// above and `b` below, computed without enumerating them.
pub fn count_columns(sft: &NnSft, n: usize, t: Symbol, b: Symbol) -> u128 {
    let k = sft.num_symbols();
    let mut counts: Vec<u128> = (0..k as Symbol)
        .map(|x| u128::from(sft.allows_v(b, x)))
        .collect();
    for _ in 1..n {
        let mut next = vec![0u128; k];
        for (lo, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for up in sft.uppers(lo as Symbol) {
                next[up as usize] = next[up as usize].saturating_add(c);
            }
        }
        counts = next;
    }
    counts
        .iter()
        .enumerate()
        .filter(|(x, _)| sft.allows_v(*x as Symbol, t))
        .fold(0u128, |acc, (_, &c)| acc.saturating_add(c))
}

fn constant_symbol(row: &PeriodicRow, which: &str) -> Result<Symbol> {
    if row.period() != 1 {
        return Err(Error::Input(format!(
            "{which} row must be constant here (period {}); recode by blocks first",
            row.period()
        )));
    }
    Ok(row.word()[0])
}

impl ColumnSystem {
    /// Enumerates the locally admissible height-`n` columns between `b` and
    /// `t` and the horizontally compatible column pairs.
    pub fn build(
        sft: &NnSft,
        n: usize,
        t: &PeriodicRow,
        b: &PeriodicRow,
        budget: &ColumnBudget,
    ) -> Result<ColumnSystem> {
        if n == 0 {
            return Err(Error::Input("strip height must be at least 1".into()));
        }
        let t0 = constant_symbol(t, "top")?;
        let b0 = constant_symbol(b, "bottom")?;
        sft.alphabet().check(t0)?;
        sft.alphabet().check(b0)?;

        let projected = count_columns(sft, n, t0, b0);
        if projected > budget.max_columns as u128 {
            return Err(Error::BudgetExceeded {
                what: "columns",
                projected,
                limit: budget.max_columns as u128,
            });
        }
        if projected == 0 {
            return Err(Error::StripEmpty { n });
        }
        let columns = enumerate_columns(sft, n, t0, b0, projected as usize);
        let (row_ptr, targets) = enumerate_edges(sft, n, &columns, &columns, budget, 0)?;
        Ok(ColumnSystem {
            n,
            t: t.clone(),
            b: b.clone(),
            columns,
            row_ptr,
            targets,
        })
    }

    pub fn height(&self) -> usize {
        self.n
    }

    pub fn top(&self) -> &PeriodicRow {
        &self.t
    }

    pub fn bottom(&self) -> &PeriodicRow {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len()
    }

    /// Column `i`, bottom row first.
    pub fn column(&self, i: usize) -> &[Symbol] {
        &self.columns[i * self.n..(i + 1) * self.n]
    }

    pub fn successors(&self, i: usize) -> &[u32] {
        &self.targets[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    /// All edges in canonical `(from, to)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |c| self.successors(c).iter().map(move |&d| (c, d as usize)))
    }

    pub fn has_edge(&self, c: usize, d: usize) -> bool {
        self.successors(c).binary_search(&(d as u32)).is_ok()
    }

    /// Removes columns with no successor or no predecessor until none remain,
    /// then classifies the remaining digraph.
    pub fn trim_to_essential(&self) -> Result<(ColumnSystem, TrimDiagnostics)> {
        let m = self.len();
        let alive = essential(&self.row_ptr, &self.targets);
        let kept: Vec<usize> = (0..m).filter(|&c| alive[c]).collect();
        if kept.is_empty() {
            return Err(Error::DegenerateStrip { n: self.n });
        }
        let trimmed = self.restrict(&kept);
        let sccs = strongly_connected_components(&trimmed.row_ptr, &trimmed.targets);
        let scc_count = sccs.iter().copied().max().map_or(0, |x| x + 1);
        let is_single_scc = scc_count == 1;
        let period = if is_single_scc {
            Some(cycle_period(&trimmed.row_ptr, &trimmed.targets))
        } else {
            None
        };
        let diag = TrimDiagnostics {
            removed: m - kept.len(),
            scc_count,
            is_single_scc,
            period,
            is_primitive: is_single_scc && period == Some(1),
        };
        Ok((trimmed, diag))
    }

    fn restrict(&self, kept: &[usize]) -> ColumnSystem {
        let mut remap = vec![u32::MAX; self.len()];
        for (new, &old) in kept.iter().enumerate() {
            remap[old] = new as u32;
        }
        let mut columns = Vec::with_capacity(kept.len() * self.n);
        let mut row_ptr = Vec::with_capacity(kept.len() + 1);
        let mut targets = Vec::new();
        row_ptr.push(0);
        for &old in kept {
            columns.extend_from_slice(self.column(old));
            targets.extend(
                self.successors(old)
                    .iter()
                    .map(|&d| remap[d as usize])
                    .filter(|&d| d != u32::MAX),
            );
            row_ptr.push(targets.len());
        }
        ColumnSystem {
            n: self.n,
            t: self.t.clone(),
            b: self.b.clone(),
            columns,
            row_ptr,
            targets,
        }
    }

    /// Compressed predecessor lists.
    pub fn transpose(&self) -> (Vec<usize>, Vec<u32>) {
        transpose_csr(&self.row_ptr, &self.targets)
    }

    /// Canonical text form used for golden files and diffs.
    pub fn to_canonical_string(&self, sft: &NnSft) -> String {
        let a = sft.alphabet();
        let mut s = String::new();
        let _ = writeln!(s, "# column system; columns listed bottom row first");
        let _ = writeln!(s, "height {}", self.n);
        let _ = writeln!(s, "top {}", self.t.display(a));
        let _ = writeln!(s, "bottom {}", self.b.display(a));
        let _ = writeln!(s, "columns {}", self.len());
        for i in 0..self.len() {
            let names: Vec<&str> = self.column(i).iter().map(|&x| a.name(x)).collect();
            let _ = writeln!(s, "{i} {}", names.join(" "));
        }
        let _ = writeln!(s, "edges {}", self.num_edges());
        for (c, d) in self.edges() {
            let _ = writeln!(s, "{c} {d}");
        }
        s
    }
}

pub(super) fn enumerate_columns(
    sft: &NnSft,
    n: usize,
    t0: Symbol,
    b0: Symbol,
    cap: usize,
) -> Vec<Symbol> {
    let k = sft.num_symbols();
    // feasible[i][s]: level i (0-based) holding s can be completed up to t0.
    let mut feasible = vec![vec![false; k]; n];
    for s in 0..k {
        feasible[n - 1][s] = sft.allows_v(s as Symbol, t0);
    }
    for i in (0..n - 1).rev() {
        for s in 0..k {
            feasible[i][s] = sft.uppers(s as Symbol).any(|u| feasible[i + 1][u as usize]);
        }
    }
    let uppers: Vec<Vec<Symbol>> = (0..k as Symbol).map(|s| sft.uppers(s).collect()).collect();
    let first: Vec<Symbol> = sft.uppers(b0).collect();

    let mut out = Vec::with_capacity(cap * n);
    let mut prefix: Vec<Symbol> = Vec::with_capacity(n);
    // Iterative DFS; cursor[i] indexes the candidate list at level i.
    let mut cursor = vec![0usize; n];
    let mut level = 0usize;
    loop {
        let cands: &[Symbol] = if level == 0 {
            &first
        } else {
            &uppers[prefix[level - 1] as usize]
        };
        let mut advanced = false;
        while cursor[level] < cands.len() {
            let s = cands[cursor[level]];
            cursor[level] += 1;
            if feasible[level][s as usize] {
                prefix.push(s);
                advanced = true;
                break;
            }
        }
        if advanced {
            if level + 1 == n {
                out.extend_from_slice(&prefix);
                prefix.pop();
            } else {
                level += 1;
                cursor[level] = 0;
            }
        } else {
            if level == 0 {
                break;
            }
            level -= 1;
            prefix.pop();
        }
    }
    out
}

/// Edges from every column of `from` to the compatible columns of `to`;
/// `used` edges already count against the budget.
pub(super) fn enumerate_edges(
    sft: &NnSft,
    n: usize,
    from: &[Symbol],
    to: &[Symbol],
    budget: &ColumnBudget,
    used: usize,
) -> Result<(Vec<usize>, Vec<u32>)> {
    let m = from.len() / n;
    let m_to = to.len() / n;
    let rights: Vec<Vec<Symbol>> = sft
        .alphabet()
        .symbols()
        .map(|s| sft.rights(s).collect())
        .collect();
    let total = AtomicUsize::new(used);
    let over = |t: &AtomicUsize| t.load(Ordering::Relaxed) > budget.max_edges;

    let lists: Vec<Vec<u32>> = (0..m)
        .into_par_iter()
        .map(|c| {
            if over(&total) {
                return Vec::new();
            }
            let col = &from[c * n..(c + 1) * n];
            let mut out = Vec::new();
            compatible(to, n, col, &rights, 0, 0, m_to, &mut out);
            total.fetch_add(out.len(), Ordering::Relaxed);
            out
        })
        .collect();
    let count = total.load(Ordering::Relaxed);
    if count > budget.max_edges {
        return Err(Error::BudgetExceeded {
            what: "edges",
            projected: count as u128,
            limit: budget.max_edges as u128,
        });
    }
    let mut row_ptr = Vec::with_capacity(m + 1);
    let mut targets = Vec::with_capacity(count - used);
    row_ptr.push(0);
    for l in lists {
        targets.extend_from_slice(&l);
        row_ptr.push(targets.len());
    }
    Ok((row_ptr, targets))
}

/// Walks the implicit trie of sorted columns, following only symbols that
/// are horizontally compatible with `col` at each level.
#[allow(clippy::too_many_arguments)]
fn compatible(
    columns: &[Symbol],
    n: usize,
    col: &[Symbol],
    rights: &[Vec<Symbol>],
    level: usize,
    lo: usize,
    hi: usize,
    out: &mut Vec<u32>,
) {
    if level == n {
        out.extend((lo..hi).map(|i| i as u32));
        return;
    }
    let at = |i: usize| columns[i * n + level];
    let mut start = lo;
    for &y in &rights[col[level] as usize] {
        let a = start + partition_point(start, hi, |i| at(i) < y);
        if a >= hi {
            break;
        }
        let b = a + partition_point(a, hi, |i| at(i) <= y);
        if b > a {
            compatible(columns, n, col, rights, level + 1, a, b, out);
        }
        start = b;
    }
}

fn partition_point(lo: usize, hi: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut l, mut h) = (lo, hi);
    while l < h {
        let mid = l + (h - l) / 2;
        if pred(mid) {
            l = mid + 1;
        } else {
            h = mid;
        }
    }
    l - lo
}

/// Vertices left after repeatedly deleting those without a successor or
/// without a predecessor.
pub(crate) fn essential(row_ptr: &[usize], targets: &[u32]) -> Vec<bool> {
    let m = row_ptr.len() - 1;
    let succ = |c: usize| &targets[row_ptr[c]..row_ptr[c + 1]];
    let mut outdeg: Vec<usize> = (0..m).map(|c| succ(c).len()).collect();
    let mut indeg = vec![0usize; m];
    for &d in targets {
        indeg[d as usize] += 1;
    }
    let (tp, ts) = transpose_csr(row_ptr, targets);
    let mut alive = vec![true; m];
    let mut queue: Vec<usize> = (0..m)
        .filter(|&c| outdeg[c] == 0 || indeg[c] == 0)
        .collect();
    for &c in &queue {
        alive[c] = false;
    }
    while let Some(c) = queue.pop() {
        for &d in succ(c) {
            let d = d as usize;
            indeg[d] -= 1;
            if alive[d] && indeg[d] == 0 {
                alive[d] = false;
                queue.push(d);
            }
        }
        for &p in &ts[tp[c]..tp[c + 1]] {
            let p = p as usize;
            outdeg[p] -= 1;
            if alive[p] && outdeg[p] == 0 {
                alive[p] = false;
                queue.push(p);
            }
        }
    }
    alive
}

pub(crate) fn transpose_csr(row_ptr: &[usize], targets: &[u32]) -> (Vec<usize>, Vec<u32>) {
    transpose_csr_rect(row_ptr, targets, row_ptr.len() - 1)
}

/// Transpose of an adjacency from `row_ptr.len() - 1` rows into `ncols`
/// targets.
pub(crate) fn transpose_csr_rect(
    row_ptr: &[usize],
    targets: &[u32],
    ncols: usize,
) -> (Vec<usize>, Vec<u32>) {
    let m = row_ptr.len() - 1;
    let mut counts = vec![0usize; ncols + 1];
    for &d in targets {
        counts[d as usize + 1] += 1;
    }
    for i in 0..ncols {
        counts[i + 1] += counts[i];
    }
    let mut fill = counts.clone();
    let mut out = vec![0u32; targets.len()];
    for c in 0..m {
        for &d in &targets[row_ptr[c]..row_ptr[c + 1]] {
            out[fill[d as usize]] = c as u32;
            fill[d as usize] += 1;
        }
    }
    (counts, out)
}

/// Component id per vertex (iterative Tarjan).
pub(crate) fn strongly_connected_components(row_ptr: &[usize], targets: &[u32]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let m = row_ptr.len() - 1;
    let mut index = vec![UNSEEN; m];
    let mut low = vec![0usize; m];
    let mut on_stack = vec![false; m];
    let mut comp = vec![UNSEEN; m];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..m {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, row_ptr[root]));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge < row_ptr[v + 1] {
                let w = targets[*edge] as usize;
                *edge += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, row_ptr[w]));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Period of a strongly connected digraph: gcd over edges of
/// `level(u) + 1 - level(v)` for BFS levels from vertex 0.
pub(crate) fn cycle_period(row_ptr: &[usize], targets: &[u32]) -> usize {
    let m = row_ptr.len() - 1;
    let mut level = vec![usize::MAX; m];
    let mut queue = std::collections::VecDeque::new();
    level[0] = 0;
    queue.push_back(0usize);
    while let Some(u) = queue.pop_front() {
        for &v in &targets[row_ptr[u]..row_ptr[u + 1]] {
            let v = v as usize;
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0;
    for u in 0..m {
        for &v in &targets[row_ptr[u]..row_ptr[u + 1]] {
            let d = (level[u] + 1).abs_diff(level[v as usize]);
            g = gcd(g, d);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hard_square() -> NnSft {
        let pairs = [("0", "0"), ("0", "1"), ("1", "0")];
        NnSft::from_names(&["0", "1"], &pairs, &pairs).unwrap()
    }

    fn zero() -> PeriodicRow {
        PeriodicRow::constant(0)
    }

    fn build(sft: &NnSft, n: usize) -> ColumnSystem {
        ColumnSystem::build(sft, n, &zero(), &zero(), &ColumnBudget::default()).unwrap()
    }

    #[test]
    fn height_one_is_golden_mean() {
        let cs = build(&hard_square(), 1);
        assert_eq!(cs.len(), 2);
        assert_eq!(cs.edges().collect::<Vec<_>>(), vec![(0, 0), (0, 1), (1, 0)]);
    }

    #[test]
    fn height_two_brute_force() {
        let hs = hard_square();
        let cs = build(&hs, 2);
        let cols: Vec<Vec<Symbol>> = (0..cs.len()).map(|i| cs.column(i).to_vec()).collect();
        assert_eq!(cols, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        let mut expected = Vec::new();
        for c in 0..3 {
            for d in 0..3 {
                let ok = (0..2).all(|i| hs.allows_h(cols[c][i], cols[d][i]));
                if ok {
                    expected.push((c, d));
                }
            }
        }
        assert_eq!(expected.len(), 7);
        assert_eq!(cs.edges().collect::<Vec<_>>(), expected);
        assert!(!cs.has_edge(1, 1));
        assert!(!cs.has_edge(2, 2));
    }

    #[test]
    fn fibonacci_counts_match_brute_force() {
        let hs = hard_square();
        let (mut f1, mut f2) = (1u64, 1u64);
        for n in 1..=15usize {
            let (a, b) = (f2, f1 + f2);
            f1 = a;
            f2 = b;
            // f2 is now F_{n+2}
            let brute = (0u32..1 << n).filter(|c| c & (c >> 1) == 0).count() as u64;
            assert_eq!(brute, f2, "brute force n={n}");
            assert_eq!(build(&hs, n).len() as u64, f2, "n={n}");
            assert_eq!(count_columns(&hs, n, 0, 0), f2 as u128);
        }
    }

    #[test]
    fn boundary_rows_constrain_columns() {
        let hs = hard_square();
        let one = PeriodicRow::constant(1);
        let cs = ColumnSystem::build(&hs, 3, &one, &zero(), &ColumnBudget::default()).unwrap();
        // top cell must be 0 under a row of ones
        for i in 0..cs.len() {
            assert_eq!(cs.column(i)[2], 0);
        }
        assert_eq!(cs.len(), 3);
        let alt = PeriodicRow::new(vec![0, 1]).unwrap();
        assert!(ColumnSystem::build(&hs, 2, &alt, &zero(), &ColumnBudget::default()).is_err());
    }

    #[test]
    fn strip_empty_is_reported() {
        // 2-checkerboard between equal rows is empty at even height.
        let pairs = [("1", "2"), ("2", "1")];
        let cb = NnSft::from_names(&["1", "2"], &pairs, &pairs).unwrap();
        let r = PeriodicRow::constant(0);
        let err = ColumnSystem::build(&cb, 2, &r, &r, &ColumnBudget::default()).unwrap_err();
        assert!(matches!(err, Error::StripEmpty { n: 2 }));
    }

    #[test]
    fn budget_reports_projection() {
        let fs = NnSft::full_shift(&["a", "b", "c"]).unwrap();
        let budget = ColumnBudget {
            max_columns: 100,
            max_edges: 1000,
        };
        match ColumnSystem::build(&fs, 5, &zero(), &zero(), &budget) {
            Err(Error::BudgetExceeded {
                what, projected, ..
            }) => {
                assert_eq!(what, "columns");
                assert_eq!(projected, 243);
            }
            other => panic!("unexpected {other:?}"),
        }
        match ColumnSystem::build(&fs, 4, &zero(), &zero(), &budget) {
            Err(Error::BudgetExceeded { what, .. }) => assert_eq!(what, "edges"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn trim_hard_square_is_noop() {
        let cs = build(&hard_square(), 2);
        let (t, d) = cs.trim_to_essential().unwrap();
        assert_eq!(t, cs);
        assert_eq!(d.removed, 0);
        assert!(d.is_primitive);
        assert_eq!(d.period, Some(1));
    }

    #[test]
    fn trim_flags_period_two() {
        let fs = NnSft::from_names(
            &["0", "1"],
            &[("0", "1"), ("1", "0")],
            &[("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")],
        )
        .unwrap();
        let cs = build(&fs, 1);
        let (_, d) = cs.trim_to_essential().unwrap();
        assert!(d.is_single_scc);
        assert_eq!(d.period, Some(2));
        assert!(!d.is_primitive);
    }

    #[test]
    fn trim_removes_transients_and_counts_components() {
        // 0 -> 1 -> 1, 1 -> 2, 2 -> 2: 0 has no predecessor, and the two
        // self-loops are separate components joined by a transient edge.
        let sft = NnSft::from_names(
            &["0", "1", "2"],
            &[("0", "1"), ("1", "1"), ("1", "2"), ("2", "2")],
            &[
                ("0", "0"),
                ("1", "1"),
                ("2", "2"),
                ("1", "0"),
                ("2", "0"),
                ("0", "1"),
                ("0", "2"),
            ],
        )
        .unwrap();
        let cs = build(&sft, 1);
        let (t, d) = cs.trim_to_essential().unwrap();
        assert_eq!(d.removed, 1);
        assert_eq!(t.len(), 2);
        assert_eq!(d.scc_count, 2);
        assert!(!d.is_single_scc);
        assert!(!d.is_primitive);
        assert_eq!(d.period, None);
    }

    #[test]
    fn degenerate_strip() {
        let sft = NnSft::from_names(
            &["0", "1"],
            &[("0", "1")],
            &[("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")],
        )
        .unwrap();
        let cs = build(&sft, 1);
        assert!(matches!(
            cs.trim_to_essential(),
            Err(Error::DegenerateStrip { n: 1 })
        ));
    }

    #[test]
    fn canonical_serialization_golden() {
        let hs = hard_square();
        let text = build(&hs, 2).to_canonical_string(&hs);
        let expected = "\
# column system; columns listed bottom row first
height 2
top (0)^Z
bottom (0)^Z
columns 3
0 0 0
1 0 1
2 1 0
edges 7
0 0
0 1
0 2
1 0
1 2
2 0
2 1
";
        assert_eq!(text, expected);
        // deterministic across runs
        assert_eq!(
            build(&hs, 9).to_canonical_string(&hs),
            build(&hs, 9).to_canonical_string(&hs)
        );
    }
}
