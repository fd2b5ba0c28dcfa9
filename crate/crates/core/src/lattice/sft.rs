//! Nearest-neighbor Z² shifts of finite type.
//!
//! Horizontal pairs in `e1` are stored as `(left, right)`. Vertical pairs in
//! `e2` are stored as `(lower, upper)`; this orientation is used by every
//! table, file format and formula in the crate.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// Index of a symbol in its [`Alphabet`].
pub type Symbol = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        if names.len() < 2 {
            return Err(Error::Input(format!(
                "an alphabet needs at least two symbols, got {}",
                names.len()
            )));
        }
        if names.len() > Symbol::MAX as usize {
            return Err(Error::Input("alphabet too large".into()));
        }
        let mut index = HashMap::with_capacity(names.len());
        let mut owned = Vec::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            let name = name.as_ref().to_string();
            if name.is_empty() {
                return Err(Error::Input("empty symbol name".into()));
            }
            if index.insert(name.clone(), i as Symbol).is_some() {
                return Err(Error::Input(format!("duplicate symbol name {name:?}")));
            }
            owned.push(name);
        }
        Ok(Alphabet {
            names: owned,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    /// Symbols in declared order.
    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.names.len()).map(|i| i as Symbol)
    }

    pub fn check(&self, s: Symbol) -> Result<()> {
        if (s as usize) < self.len() {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "symbol index {s} out of range for alphabet of size {}",
                self.len()
            )))
        }
    }
}

/// A nearest-neighbor Z² SFT equipped with its allowed pair sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NnSft {
    alphabet: Alphabet,
    // Dense |A|x|A| membership tables, row-major by first symbol.
    e1: Vec<bool>,
    e2: Vec<bool>,
}

impl NnSft {
    pub fn new(
        alphabet: Alphabet,
        e1: impl IntoIterator<Item = (Symbol, Symbol)>,
        e2: impl IntoIterator<Item = (Symbol, Symbol)>,
    ) -> Result<Self> {
        let k = alphabet.len();
        let mut t1 = vec![false; k * k];
        let mut t2 = vec![false; k * k];
        for (a, b) in e1 {
            alphabet.check(a)?;
            alphabet.check(b)?;
            t1[a as usize * k + b as usize] = true;
        }
        for (a, b) in e2 {
            alphabet.check(a)?;
            alphabet.check(b)?;
            t2[a as usize * k + b as usize] = true;
        }
        Ok(NnSft {
            alphabet,
            e1: t1,
            e2: t2,
        })
    }

    /// Builds an SFT from symbol names and name pairs.
    pub fn from_names<S: AsRef<str>>(names: &[S], e1: &[(S, S)], e2: &[(S, S)]) -> Result<Self> {
        let alphabet = Alphabet::new(names)?;
        let resolve = |pairs: &[(S, S)]| -> Result<Vec<(Symbol, Symbol)>> {
            pairs
                .iter()
                .map(|(a, b)| {
                    let look = |n: &str| {
                        alphabet
                            .lookup(n)
                            .ok_or_else(|| Error::Input(format!("unknown symbol {n:?}")))
                    };
                    Ok((look(a.as_ref())?, look(b.as_ref())?))
                })
                .collect()
        };
        let p1 = resolve(e1)?;
        let p2 = resolve(e2)?;
        NnSft::new(alphabet, p1, p2)
    }

    /// The full shift on `names`.
    pub fn full_shift<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let alphabet = Alphabet::new(names)?;
        let k = alphabet.len() as Symbol;
        let all: Vec<_> = (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).collect();
        NnSft::new(alphabet, all.clone(), all)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_symbols(&self) -> usize {
        self.alphabet.len()
    }

    /// `(left, right)` allowed horizontally.
    #[inline]
    pub fn allows_h(&self, left: Symbol, right: Symbol) -> bool {
        self.e1[left as usize * self.num_symbols() + right as usize]
    }

    /// `(lower, upper)` allowed vertically.
    #[inline]
    pub fn allows_v(&self, lower: Symbol, upper: Symbol) -> bool {
        self.e2[lower as usize * self.num_symbols() + upper as usize]
    }

    pub fn e1_pairs(&self) -> Vec<(Symbol, Symbol)> {
        self.pairs(&self.e1)
    }

    pub fn e2_pairs(&self) -> Vec<(Symbol, Symbol)> {
        self.pairs(&self.e2)
    }

    fn pairs(&self, table: &[bool]) -> Vec<(Symbol, Symbol)> {
        let k = self.num_symbols();
        (0..k * k)
            .filter(|&i| table[i])
            .map(|i| ((i / k) as Symbol, (i % k) as Symbol))
            .collect()
    }

    /// Symbols that may sit directly above `lower`, in increasing order.
    pub fn uppers(&self, lower: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        self.alphabet
            .symbols()
            .filter(move |&u| self.allows_v(lower, u))
    }

    /// Symbols that may sit directly right of `left`, in increasing order.
    pub fn rights(&self, left: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        self.alphabet
            .symbols()
            .filter(move |&r| self.allows_h(left, r))
    }

    pub fn is_full_shift(&self) -> bool {
        self.e1.iter().all(|&b| b) && self.e2.iter().all(|&b| b)
    }

    /// Checks every adjacent pair lying inside the shape of `config`.
    pub fn is_locally_admissible(&self, config: &Configuration) -> Result<bool> {
        for &s in config.values.values() {
            self.alphabet.check(s)?;
        }
        for (&(x, y), &s) in &config.values {
            if let Some(&r) = config.values.get(&(x + 1, y)) {
                if !self.allows_h(s, r) {
                    return Ok(false);
                }
            }
            if let Some(&u) = config.values.get(&(x, y + 1)) {
                if !self.allows_v(s, u) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Symbols that may legally appear next to any symbol in any direction.
    pub fn find_safe_symbols(&self) -> Vec<Symbol> {
        let syms: Vec<Symbol> = self.alphabet.symbols().collect();
        syms.iter()
            .copied()
            .filter(|&a| {
                syms.iter().all(|&b| {
                    self.allows_h(a, b)
                        && self.allows_h(b, a)
                        && self.allows_v(a, b)
                        && self.allows_v(b, a)
                })
            })
            .collect()
    }

    /// Recodes by horizontal `p`-blocks: the alphabet becomes the locally
    /// admissible words of length `p`, ordered lexicographically with the
    /// leftmost symbol most significant.
    pub fn higher_power(&self, p: usize) -> Result<HigherPower> {
        if p == 0 {
            return Err(Error::Input("block length p must be at least 1".into()));
        }
        let mut blocks: Vec<Vec<Symbol>> = self.alphabet.symbols().map(|s| vec![s]).collect();
        for _ in 1..p {
            let mut next = Vec::new();
            for b in &blocks {
                let last = *b.last().unwrap();
                for r in self.rights(last) {
                    let mut w = b.clone();
                    w.push(r);
                    next.push(w);
                }
            }
            blocks = next;
        }
        if blocks.len() < 2 {
            return Err(Error::Input(format!(
                "the {p}-block recoding has fewer than two symbols"
            )));
        }
        let names: Vec<String> = blocks
            .iter()
            .map(|b| {
                let parts: Vec<&str> = b.iter().map(|&s| self.alphabet.name(s)).collect();
                if p == 1 {
                    parts[0].to_string()
                } else {
                    format!("[{}]", parts.join(" "))
                }
            })
            .collect();
        let alphabet = Alphabet::new(&names)?;
        let m = blocks.len();
        let mut e1 = Vec::new();
        let mut e2 = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let (x, y) = (&blocks[i], &blocks[j]);
                if self.allows_h(x[p - 1], y[0]) {
                    e1.push((i as Symbol, j as Symbol));
                }
                if x.iter().zip(y).all(|(&lo, &up)| self.allows_v(lo, up)) {
                    e2.push((i as Symbol, j as Symbol));
                }
            }
        }
        let sft = NnSft::new(alphabet, e1, e2)?;
        Ok(HigherPower { sft, blocks, p })
    }
}

/// The result of horizontal block recoding, remembering each block's members.
#[derive(Clone, Debug)]
pub struct HigherPower {
    pub sft: NnSft,
    pub blocks: Vec<Vec<Symbol>>,
    pub p: usize,
}

impl HigherPower {
    pub fn block_of(&self, word: &[Symbol]) -> Option<Symbol> {
        self.blocks
            .binary_search_by(|b| b.as_slice().cmp(word))
            .ok()
            .map(|i| i as Symbol)
    }

    /// The constant recoded row `(row|[0,p-1])^Z`.
    pub fn recode_row(&self, row: &PeriodicRow) -> Result<PeriodicRow> {
        if !self.p.is_multiple_of(row.period()) {
            return Err(Error::Input(format!(
                "row period {} does not divide block length {}",
                row.period(),
                self.p
            )));
        }
        let word: Vec<Symbol> = (0..self.p).map(|i| row.at(i as i64)).collect();
        let block = self.block_of(&word).ok_or_else(|| {
            Error::Input("boundary row is not horizontally locally admissible".into())
        })?;
        if !self.sft.allows_h(block, block) {
            return Err(Error::Input(
                "boundary row is not horizontally admissible across its period".into(),
            ));
        }
        PeriodicRow::new(vec![block])
    }
}

/// A finite configuration on Z². Sites are `(x, y)` with `y` increasing upward.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Configuration {
    pub values: BTreeMap<(i64, i64), Symbol>,
}

impl Configuration {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, site: (i64, i64), s: Symbol) -> Self {
        self.values.insert(site, s);
        self
    }

    pub fn set(&mut self, site: (i64, i64), s: Symbol) {
        self.values.insert(site, s);
    }

    pub fn get(&self, site: (i64, i64)) -> Option<Symbol> {
        self.values.get(&site).copied()
    }

    /// A horizontal word placed on row `y` starting at `x0`.
    pub fn row(word: &[Symbol], x0: i64, y: i64) -> Self {
        let mut c = Self::new();
        for (i, &s) in word.iter().enumerate() {
            c.set((x0 + i as i64, y), s);
        }
        c
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The bi-infinite row `word^Z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicRow {
    word: Vec<Symbol>,
}

impl PeriodicRow {
    pub fn new(word: Vec<Symbol>) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::Input("periodic row needs a nonempty word".into()));
        }
        Ok(PeriodicRow { word })
    }

    pub fn constant(s: Symbol) -> Self {
        PeriodicRow { word: vec![s] }
    }

    pub fn from_names<S: AsRef<str>>(alphabet: &Alphabet, names: &[S]) -> Result<Self> {
        let word = names
            .iter()
            .map(|n| {
                alphabet
                    .lookup(n.as_ref())
                    .ok_or_else(|| Error::Input(format!("unknown symbol {:?}", n.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        PeriodicRow::new(word)
    }

    pub fn word(&self) -> &[Symbol] {
        &self.word
    }

    pub fn period(&self) -> usize {
        self.word.len()
    }

    #[inline]
    pub fn at(&self, i: i64) -> Symbol {
        let p = self.word.len() as i64;
        self.word[i.rem_euclid(p) as usize]
    }

    pub fn display(&self, alphabet: &Alphabet) -> String {
        let parts: Vec<&str> = self.word.iter().map(|&s| alphabet.name(s)).collect();
        format!("({})^Z", parts.join(","))
    }
}

impl fmt::Display for PeriodicRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.word.iter().map(|s| s.to_string()).collect();
        write!(f, "({})^Z", parts.join(","))
    }
}
