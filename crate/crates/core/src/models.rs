//! Built-in models: hard-core, Ising antiferromagnet, k-checkerboard and the
//! zero interaction on a full shift.

use std::fmt;

use crate::error::{Error, Result};
use crate::interaction::NnInteraction;
use crate::lattice::{NnSft, PeriodicRow};

/// How the hard-core activity enters the site energy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HardCoreConvention {
    /// `vertex(1) = -ln a`, so an isolated occupied site has Gibbs weight `a`.
    #[default]
    Activity,
    /// `vertex(1) = a` taken literally as an energy.
    Raw,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    HardCore {
        a: f64,
        convention: HardCoreConvention,
    },
    Ising {
        beta: f64,
        h: f64,
    },
    Checkerboard {
        k: usize,
    },
    Zero {
        k: usize,
    },
    Custom,
}

/// An SFT, an interaction on it and default boundary rows.
#[derive(Clone, Debug)]
pub struct Model {
    pub name: String,
    pub kind: ModelKind,
    pub sft: NnSft,
    pub interaction: NnInteraction,
    pub top: Option<PeriodicRow>,
    pub bottom: Option<PeriodicRow>,
}

impl Model {
    /// Same SFT and rows, zero interaction.
    pub fn with_zero_interaction(&self) -> Model {
        Model {
            name: format!("{} (zero interaction)", self.name),
            kind: if self.interaction.is_zero() {
                self.kind.clone()
            } else {
                ModelKind::Custom
            },
            interaction: NnInteraction::zero(self.sft.num_symbols()),
            ..self.clone()
        }
    }

    /// Stable text describing every table, used to fingerprint checkpoints.
    pub fn canonical_description(&self) -> String {
        let a = self.sft.alphabet();
        let mut s = format!("symbols={:?};", a.names());
        s += &format!("e1={:?};e2={:?};", self.sft.e1_pairs(), self.sft.e2_pairs());
        let k = a.len() as u32;
        for x in 0..k {
            s += &format!("v{x}={:016x};", self.interaction.vertex(x).to_bits());
            for y in 0..k {
                s += &format!(
                    "h{x},{y}={:016x};w{x},{y}={:016x};",
                    self.interaction.hedge(x, y).to_bits(),
                    self.interaction.vedge(x, y).to_bits()
                );
            }
        }
        s
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::HardCore { a, convention } => match convention {
                HardCoreConvention::Activity => write!(f, "hard_core a={a}"),
                HardCoreConvention::Raw => write!(f, "hard_core a={a} convention=raw"),
            },
            ModelKind::Ising { beta, h } => write!(f, "ising beta={beta} h={h}"),
            ModelKind::Checkerboard { k } => write!(f, "checkerboard k={k}"),
            ModelKind::Zero { k } => write!(f, "zero k={k}"),
            ModelKind::Custom => write!(f, "custom"),
        }
    }
}

pub fn hard_square_sft() -> NnSft {
    let pairs = [("0", "0"), ("0", "1"), ("1", "0")];
    NnSft::from_names(&["0", "1"], &pairs, &pairs).expect("static hard-square tables")
}

pub fn hard_core(a: f64) -> Result<Model> {
    hard_core_with(a, HardCoreConvention::Activity)
}

pub fn hard_core_with(a: f64, convention: HardCoreConvention) -> Result<Model> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Input(format!(
            "hard-core activity must be positive, got {a}"
        )));
    }
    let sft = hard_square_sft();
    let mut phi = NnInteraction::zero(2);
    let v1 = match convention {
        HardCoreConvention::Activity => -a.ln(),
        HardCoreConvention::Raw => a,
    };
    phi.set_vertex(1, v1)?;
    Ok(Model {
        name: ModelKind::HardCore { a, convention }.to_string(),
        kind: ModelKind::HardCore { a, convention },
        sft,
        interaction: phi,
        top: Some(PeriodicRow::constant(0)),
        bottom: Some(PeriodicRow::constant(0)),
    })
}

/// Ising antiferromagnet on the full shift over `{+1, -1}` (indices 0, 1):
/// `vertex(u) = -beta h u`, `hedge(u, v) = vedge(u, v) = beta u v`.
pub fn ising(beta: f64, h: f64) -> Result<Model> {
    if !(beta >= 0.0 && beta.is_finite() && h.is_finite()) {
        return Err(Error::Input(format!(
            "ising needs finite beta >= 0 and finite h, got beta={beta} h={h}"
        )));
    }
    let sft = NnSft::full_shift(&["+1", "-1"])?;
    let spin = |s: u32| if s == 0 { 1.0 } else { -1.0 };
    let mut phi = NnInteraction::zero(2);
    for u in 0..2 {
        phi.set_vertex(u, -beta * h * spin(u))?;
        for v in 0..2 {
            phi.set_hedge(u, v, beta * spin(u) * spin(v))?;
            phi.set_vedge(u, v, beta * spin(u) * spin(v))?;
        }
    }
    Ok(Model {
        name: ModelKind::Ising { beta, h }.to_string(),
        kind: ModelKind::Ising { beta, h },
        sft,
        interaction: phi,
        top: Some(PeriodicRow::constant(0)),
        bottom: Some(PeriodicRow::constant(0)),
    })
}

/// Proper k-colorings of Z²: symbols `1..=k`, adjacent symbols unequal.
pub fn checkerboard(k: usize) -> Result<Model> {
    if k < 2 {
        return Err(Error::Input(format!("checkerboard needs k >= 2, got {k}")));
    }
    let names: Vec<String> = (1..=k).map(|i| i.to_string()).collect();
    let alphabet = crate::lattice::Alphabet::new(&names)?;
    let pairs: Vec<(u32, u32)> = (0..k as u32)
        .flat_map(|a| (0..k as u32).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let sft = NnSft::new(alphabet, pairs.clone(), pairs)?;
    let row = PeriodicRow::new(vec![0, 1])?;
    Ok(Model {
        name: ModelKind::Checkerboard { k }.to_string(),
        kind: ModelKind::Checkerboard { k },
        sft,
        interaction: NnInteraction::zero(k),
        top: Some(row.clone()),
        bottom: Some(row),
    })
}

/// Zero interaction on the full shift over `k` symbols `0..k`.
pub fn zero(k: usize) -> Result<Model> {
    if k < 2 {
        return Err(Error::Input(format!("full shift needs k >= 2, got {k}")));
    }
    let names: Vec<String> = (0..k).map(|i| i.to_string()).collect();
    Ok(Model {
        name: ModelKind::Zero { k }.to_string(),
        kind: ModelKind::Zero { k },
        sft: NnSft::full_shift(&names)?,
        interaction: NnInteraction::zero(k),
        top: Some(PeriodicRow::constant(0)),
        bottom: Some(PeriodicRow::constant(0)),
    })
}

/// Parses `name key=value ...`, e.g. `ising beta=0.02 h=0`.
pub fn builtin(spec: &str) -> Result<Model> {
    let mut parts = spec.split_whitespace();
    let name = parts
        .next()
        .ok_or_else(|| Error::Parse("empty model specification".into()))?;
    let mut params: Vec<(String, String)> = Vec::new();
    for p in parts {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {p:?}")))?;
        params.push((k.to_string(), v.to_string()));
    }
    let take = |key: &str| {
        params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    };
    let num = |key: &str, default: Option<f64>| -> Result<f64> {
        match take(key) {
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("{key}: not a number: {v:?}"))),
            None => default.ok_or_else(|| Error::Parse(format!("{name} needs {key}=..."))),
        }
    };
    let int = |key: &str, default: Option<usize>| -> Result<usize> {
        match take(key) {
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("{key}: not an integer: {v:?}"))),
            None => default.ok_or_else(|| Error::Parse(format!("{name} needs {key}=..."))),
        }
    };
    let allowed: &[&str] = match name {
        "hard_core" => &["a", "convention"],
        "hard_square" => &[],
        "ising" => &["beta", "h"],
        "checkerboard" => &["k"],
        "zero" => &["k"],
        other => return Err(Error::Parse(format!("unknown built-in model {other:?}"))),
    };
    if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        return Err(Error::Parse(format!(
            "{name} does not take parameter {k:?}"
        )));
    }
    match name {
        "hard_core" => {
            let convention = match take("convention") {
                None | Some("activity") => HardCoreConvention::Activity,
                Some("raw") => HardCoreConvention::Raw,
                Some(v) => return Err(Error::Parse(format!("unknown convention {v:?}"))),
            };
            hard_core_with(num("a", None)?, convention)
        }
        "hard_square" => hard_core(1.0).map(|mut m| {
            m.name = "hard_square".into();
            m
        }),
        "ising" => ising(num("beta", None)?, num("h", Some(0.0))?),
        "checkerboard" => checkerboard(int("k", None)?),
        _ => zero(int("k", Some(2))?),
    }
}
