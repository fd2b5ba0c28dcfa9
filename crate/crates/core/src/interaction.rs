//! Translation-invariant nearest-neighbor interactions and the strip
//! interaction they induce on column pairs.
//!
//! Gibbs weights are `exp(-energy)`. Vertical pair values are keyed
//! `(lower, upper)` like the SFT tables.

use std::ops::Add;

use crate::error::{Error, Result};
use crate::lattice::{ColumnSystem, Configuration, HigherPower, Symbol};

#[derive(Clone, Debug, PartialEq)]
pub struct NnInteraction {
    k: usize,
    vertex: Vec<f64>,
    hedge: Vec<f64>,
    vedge: Vec<f64>,
}

impl NnInteraction {
    pub fn zero(num_symbols: usize) -> Self {
        NnInteraction {
            k: num_symbols,
            vertex: vec![0.0; num_symbols],
            hedge: vec![0.0; num_symbols * num_symbols],
            vedge: vec![0.0; num_symbols * num_symbols],
        }
    }

    /// Builds from dense tables: `vertex[a]`, `hedge[left * k + right]`,
    /// `vedge[lower * k + upper]`.
    pub fn from_tables(vertex: Vec<f64>, hedge: Vec<f64>, vedge: Vec<f64>) -> Result<Self> {
        let k = vertex.len();
        if hedge.len() != k * k || vedge.len() != k * k {
            return Err(Error::Input(format!(
                "interaction tables must have sizes {k}, {0}, {0}",
                k * k
            )));
        }
        let this = NnInteraction {
            k,
            vertex,
            hedge,
            vedge,
        };
        this.check_finite()?;
        Ok(this)
    }

    fn check_finite(&self) -> Result<()> {
        if self
            .vertex
            .iter()
            .chain(&self.hedge)
            .chain(&self.vedge)
            .all(|v| v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::Input("interaction values must be finite".into()))
        }
    }

    pub fn num_symbols(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn vertex(&self, a: Symbol) -> f64 {
        self.vertex[a as usize]
    }

    #[inline]
    pub fn hedge(&self, left: Symbol, right: Symbol) -> f64 {
        self.hedge[left as usize * self.k + right as usize]
    }

    #[inline]
    pub fn vedge(&self, lower: Symbol, upper: Symbol) -> f64 {
        self.vedge[lower as usize * self.k + upper as usize]
    }

    pub fn set_vertex(&mut self, a: Symbol, value: f64) -> Result<()> {
        self.check_value(value)?;
        self.vertex[a as usize] = value;
        Ok(())
    }

    pub fn set_hedge(&mut self, left: Symbol, right: Symbol, value: f64) -> Result<()> {
        self.check_value(value)?;
        let k = self.k;
        self.hedge[left as usize * k + right as usize] = value;
        Ok(())
    }

    pub fn set_vedge(&mut self, lower: Symbol, upper: Symbol, value: f64) -> Result<()> {
        self.check_value(value)?;
        let k = self.k;
        self.vedge[lower as usize * k + upper as usize] = value;
        Ok(())
    }

    fn check_value(&self, value: f64) -> Result<()> {
        if value.is_finite() {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "non-finite interaction value {value}"
            )))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.vertex
            .iter()
            .chain(&self.hedge)
            .chain(&self.vedge)
            .all(|&v| v == 0.0)
    }

    /// The single-shape interaction on `{(0,0), (0,1), (1,0)}`: the site
    /// value plus its upward and rightward edges.
    pub fn phi_hat(&self, x: &Configuration) -> Result<f64> {
        let site = |p: (i64, i64)| {
            x.get(p)
                .ok_or_else(|| Error::Input(format!("configuration is missing site {p:?}")))
        };
        let (o, up, right) = (site((0, 0))?, site((0, 1))?, site((1, 0))?);
        for s in [o, up, right] {
            if s as usize >= self.k {
                return Err(Error::Input(format!("symbol index {s} out of range")));
            }
        }
        Ok(self.vertex(o) + self.vedge(o, up) + self.hedge(o, right))
    }

    /// Energy of a column between the constant rows: site values plus the
    /// vertical edges inside it and to both boundary rows.
    pub fn column_energy(&self, col: &[Symbol], t0: Symbol, b0: Symbol) -> f64 {
        let mut e = self.vedge(b0, col[0]) + self.vedge(col[col.len() - 1], t0);
        for (i, &x) in col.iter().enumerate() {
            e += self.vertex(x);
            if let Some(&up) = col.get(i + 1) {
                e += self.vedge(x, up);
            }
        }
        e
    }

    /// Weights of the strip interaction on every edge of `cs`, in canonical
    /// edge order.
    pub fn strip_interaction<'a>(&self, cs: &'a ColumnSystem) -> Result<StripInteraction<'a>> {
        let t0 = single(cs.top().word())?;
        let b0 = single(cs.bottom().word())?;
        if t0 as usize >= self.k || b0 as usize >= self.k {
            return Err(Error::Input("boundary symbol out of range".into()));
        }
        let col_energy: Vec<f64> = (0..cs.len())
            .map(|c| self.column_energy(cs.column(c), t0, b0))
            .collect();
        let mut weights = Vec::with_capacity(cs.num_edges());
        for c in 0..cs.len() {
            let cc = cs.column(c);
            if cc.iter().any(|&s| s as usize >= self.k) {
                return Err(Error::Input(
                    "column system built over a larger alphabet".into(),
                ));
            }
            for &d in cs.successors(c) {
                let dd = cs.column(d as usize);
                let h: f64 = cc.iter().zip(dd).map(|(&x, &y)| self.hedge(x, y)).sum();
                weights.push(col_energy[c] + h);
            }
        }
        Ok(StripInteraction { cs, weights })
    }

    /// The interaction on horizontal `p`-blocks: sums of member values, with
    /// each block's internal horizontal edges counted on its outgoing
    /// horizontal edge together with the seam.
    pub fn power_interaction(&self, hp: &HigherPower) -> Result<NnInteraction> {
        let p = hp.p;
        let m = hp.blocks.len();
        if hp.blocks.iter().flatten().any(|&s| s as usize >= self.k) {
            return Err(Error::Input(
                "interaction alphabet smaller than recoded SFT".into(),
            ));
        }
        let mut out = NnInteraction::zero(m);
        for (i, x) in hp.blocks.iter().enumerate() {
            out.vertex[i] = x.iter().map(|&s| self.vertex(s)).sum();
            let internal: f64 = x.windows(2).map(|w| self.hedge(w[0], w[1])).sum();
            for (j, y) in hp.blocks.iter().enumerate() {
                out.hedge[i * m + j] = internal + self.hedge(x[p - 1], y[0]);
                out.vedge[i * m + j] = x.iter().zip(y).map(|(&lo, &up)| self.vedge(lo, up)).sum();
            }
        }
        Ok(out)
    }
}

fn single(word: &[Symbol]) -> Result<Symbol> {
    match word {
        [s] => Ok(*s),
        _ => Err(Error::Input(
            "strip interaction needs constant boundary rows".into(),
        )),
    }
}

impl Add for &NnInteraction {
    type Output = NnInteraction;

    fn add(self, rhs: &NnInteraction) -> NnInteraction {
        assert_eq!(self.k, rhs.k, "interactions over different alphabets");
        let zip = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        NnInteraction {
            k: self.k,
            vertex: zip(&self.vertex, &rhs.vertex),
            hedge: zip(&self.hedge, &rhs.hedge),
            vedge: zip(&self.vedge, &rhs.vedge),
        }
    }
}

/// Strip interaction weights aligned with the edges of a column system.
#[derive(Clone, Debug)]
pub struct StripInteraction<'a> {
    pub cs: &'a ColumnSystem,
    pub weights: Vec<f64>,
}

impl StripInteraction<'_> {
    pub fn weight(&self, c: usize, d: usize) -> Option<f64> {
        let succ = self.cs.successors(c);
        succ.binary_search(&(d as u32))
            .ok()
            .map(|i| self.weights[self.cs.row_ptr()[c] + i])
    }
}
