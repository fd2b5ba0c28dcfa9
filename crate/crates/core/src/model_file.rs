//! Model files.
//!
//! ```toml
//! name = "antiferromagnet"
//!
//! [alphabet]
//! symbols = ["+1", "-1"]
//!
//! [e1]
//! allowed = "all"            # or a list of [left, right] pairs
//!
//! [e2]
//! forbidden = []             # complement form
//!
//! [interaction]
//! vertex = { "+1" = 0.0, "-1" = 0.0 }
//! hedge = [["+1", "+1", 0.02], ["-1", "-1", 0.02], ["+1", "-1", -0.02], ["-1", "+1", -0.02]]
//! vedge = [["+1", "+1", "log(2)"]]
//!
//! [boundary]
//! t = "+1"
//! b = "+1 -1"
//! ```
//!
//! Instead of `[alphabet]`/`[e1]`/`[e2]`/`[interaction]`, a file may name a
//! built-in with `builtin = "ising beta=0.02 h=0"` and only override
//! `[boundary]`. Values are numbers or the strings `log(x)`, `-log(x)`,
//! `exp(x)`. Boundary words are symbol lists, whitespace-separated strings,
//! or (when every symbol name is one character) plain strings such as `"01"`.

use std::path::Path;

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::interaction::NnInteraction;
use crate::lattice::{Alphabet, NnSft, PeriodicRow, Symbol};
use crate::models::{self, Model, ModelKind};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

const TOP_KEYS: &[&str] = &[
    "name",
    "builtin",
    "alphabet",
    "e1",
    "e2",
    "interaction",
    "boundary",
];

pub fn parse_model(text: &str) -> Result<Model> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| perr(e.to_string()))?;
    if let Some(k) = table.keys().find(|k| !TOP_KEYS.contains(&k.as_str())) {
        return Err(perr(format!("unknown key or section {k:?}")));
    }
    let mut model = match table.get("builtin") {
        Some(b) => {
            let spec = b.as_str().ok_or_else(|| perr("builtin must be a string"))?;
            for sec in ["alphabet", "e1", "e2", "interaction"] {
                if table.contains_key(sec) {
                    return Err(perr(format!("[{sec}] cannot be combined with builtin")));
                }
            }
            models::builtin(spec)?
        }
        None => custom_model(&table)?,
    };
    if let Some(name) = table.get("name") {
        model.name = name
            .as_str()
            .ok_or_else(|| perr("name must be a string"))?
            .to_string();
    }
    if let Some(b) = table.get("boundary") {
        let b = b
            .as_table()
            .ok_or_else(|| perr("[boundary] must be a table"))?;
        if let Some(k) = b.keys().find(|k| *k != "t" && *k != "b") {
            return Err(perr(format!("unknown boundary key {k:?}")));
        }
        let alphabet = model.sft.alphabet().clone();
        if let Some(t) = b.get("t") {
            model.top =
                Some(parse_word(&alphabet, t).map_err(|e| perr(format!("boundary t: {e}")))?);
        }
        if let Some(w) = b.get("b") {
            model.bottom =
                Some(parse_word(&alphabet, w).map_err(|e| perr(format!("boundary b: {e}")))?);
        }
    }
    if model.top.is_none() || model.bottom.is_none() {
        return Err(perr("[boundary] must give both t and b"));
    }
    Ok(model)
}

fn custom_model(table: &Table) -> Result<Model> {
    let alpha = table
        .get("alphabet")
        .and_then(Value::as_table)
        .ok_or_else(|| perr("missing [alphabet] section"))?;
    let names: Vec<String> = alpha
        .get("symbols")
        .and_then(Value::as_array)
        .ok_or_else(|| perr("[alphabet] needs symbols = [...]"))?
        .iter()
        .map(|v| match v {
            Value::String(s) => Ok(s.clone()),
            Value::Integer(i) => Ok(i.to_string()),
            other => Err(perr(format!("bad symbol {other}"))),
        })
        .collect::<Result<_>>()?;
    let alphabet = Alphabet::new(&names).map_err(|e| perr(e.to_string()))?;
    let e1 = constraint(&alphabet, table, "e1")?;
    let e2 = constraint(&alphabet, table, "e2")?;
    let sft = NnSft::new(alphabet.clone(), e1, e2).map_err(|e| perr(e.to_string()))?;
    let interaction = match table.get("interaction") {
        None => NnInteraction::zero(alphabet.len()),
        Some(v) => interaction(
            &alphabet,
            v.as_table()
                .ok_or_else(|| perr("[interaction] must be a table"))?,
        )?,
    };
    Ok(Model {
        name: "custom".into(),
        kind: ModelKind::Custom,
        sft,
        interaction,
        top: None,
        bottom: None,
    })
}

fn symbol(alphabet: &Alphabet, v: &Value) -> Result<Symbol> {
    let name = match v {
        Value::String(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        other => return Err(perr(format!("expected a symbol name, got {other}"))),
    };
    alphabet
        .lookup(&name)
        .ok_or_else(|| perr(format!("unknown symbol {name:?}")))
}

fn pair_list(alphabet: &Alphabet, v: &Value, what: &str) -> Result<Vec<(Symbol, Symbol)>> {
    let arr = v
        .as_array()
        .ok_or_else(|| perr(format!("{what} must be a list of pairs")))?;
    arr.iter()
        .map(|p| match p.as_array().map(Vec::as_slice) {
            Some([a, b]) => Ok((symbol(alphabet, a)?, symbol(alphabet, b)?)),
            _ => Err(perr(format!("{what}: expected [a, b], got {p}"))),
        })
        .collect()
}

fn constraint(alphabet: &Alphabet, table: &Table, section: &str) -> Result<Vec<(Symbol, Symbol)>> {
    let sec = table
        .get(section)
        .and_then(Value::as_table)
        .ok_or_else(|| perr(format!("missing [{section}] section")))?;
    let k = alphabet.len() as Symbol;
    let all: Vec<(Symbol, Symbol)> = (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).collect();
    match (sec.get("allowed"), sec.get("forbidden")) {
        (Some(_), Some(_)) => Err(perr(format!(
            "[{section}] takes either allowed or forbidden, not both"
        ))),
        (Some(Value::String(s)), None) if s == "all" => Ok(all),
        (Some(v), None) => pair_list(alphabet, v, &format!("{section}.allowed")),
        (None, Some(v)) => {
            let bad = pair_list(alphabet, v, &format!("{section}.forbidden"))?;
            Ok(all.into_iter().filter(|p| !bad.contains(p)).collect())
        }
        (None, None) => Err(perr(format!("[{section}] needs allowed or forbidden"))),
    }
}

/// A number, `log(x)`, `-log(x)` or `exp(x)`.
pub fn parse_value(v: &Value) -> Result<f64> {
    let x = match v {
        Value::Float(f) => *f,
        Value::Integer(i) => *i as f64,
        Value::String(s) => parse_value_str(s)?,
        other => return Err(perr(format!("expected a number, got {other}"))),
    };
    if !x.is_finite() {
        return Err(perr(format!("value {v} is not finite")));
    }
    Ok(x)
}

fn parse_value_str(s: &str) -> Result<f64> {
    let s = s.trim();
    let arg = |inner: &str| -> Result<f64> {
        inner
            .trim()
            .parse::<f64>()
            .map_err(|_| perr(format!("bad number in {s:?}")))
    };
    let call = |f: &str| {
        s.strip_prefix(f)
            .and_then(|r| r.strip_prefix('('))
            .and_then(|r| r.strip_suffix(')'))
    };
    if let Some(inner) = call("-log") {
        let x = arg(inner)?;
        if !(x > 0.0) {
            return Err(perr(format!("log of non-positive value in {s:?}")));
        }
        Ok(-x.ln())
    } else if let Some(inner) = call("log") {
        let x = arg(inner)?;
        if !(x > 0.0) {
            return Err(perr(format!("log of non-positive value in {s:?}")));
        }
        Ok(x.ln())
    } else if let Some(inner) = call("exp") {
        Ok(arg(inner)?.exp())
    } else {
        s.parse::<f64>()
            .map_err(|_| perr(format!("cannot read value {s:?}")))
    }
}

fn interaction(alphabet: &Alphabet, sec: &Table) -> Result<NnInteraction> {
    if let Some(k) = sec
        .keys()
        .find(|k| !["vertex", "hedge", "vedge"].contains(&k.as_str()))
    {
        return Err(perr(format!("unknown interaction key {k:?}")));
    }
    let mut phi = NnInteraction::zero(alphabet.len());
    if let Some(v) = sec.get("vertex") {
        let t = v
            .as_table()
            .ok_or_else(|| perr("interaction.vertex must be a table of symbol = value"))?;
        for (name, val) in t {
            let s = alphabet
                .lookup(name)
                .ok_or_else(|| perr(format!("unknown symbol {name:?}")))?;
            phi.set_vertex(s, parse_value(val)?)?;
        }
    }
    for key in ["hedge", "vedge"] {
        let Some(v) = sec.get(key) else { continue };
        let arr = v
            .as_array()
            .ok_or_else(|| perr(format!("interaction.{key} must be a list of [a, b, value]")))?;
        for item in arr {
            let Some([a, b, val]) = item.as_array().map(Vec::as_slice) else {
                return Err(perr(format!(
                    "interaction.{key}: expected [a, b, value], got {item}"
                )));
            };
            let (a, b, x) = (
                symbol(alphabet, a)?,
                symbol(alphabet, b)?,
                parse_value(val)?,
            );
            if key == "hedge" {
                phi.set_hedge(a, b, x)?;
            } else {
                phi.set_vedge(a, b, x)?;
            }
        }
    }
    Ok(phi)
}

fn parse_word(alphabet: &Alphabet, v: &Value) -> Result<PeriodicRow> {
    let word: Vec<Symbol> = match v {
        Value::Array(items) => items
            .iter()
            .map(|x| symbol(alphabet, x))
            .collect::<Result<_>>()?,
        Value::Integer(i) => vec![symbol(alphabet, &Value::Integer(*i))?],
        Value::String(s) => parse_word_str(alphabet, s)?,
        other => return Err(perr(format!("expected a word, got {other}"))),
    };
    PeriodicRow::new(word).map_err(|e| perr(e.to_string()))
}

/// Reads a word such as `"0 1"`, `"01"` or `"+1"`.
pub fn parse_word_str(alphabet: &Alphabet, s: &str) -> Result<Vec<Symbol>> {
    let s = s.trim();
    if let Some(sym) = alphabet.lookup(s) {
        return Ok(vec![sym]);
    }
    let lookup = |name: &str| {
        alphabet
            .lookup(name)
            .ok_or_else(|| perr(format!("unknown symbol {name:?}")))
    };
    if s.contains(char::is_whitespace) || s.contains(',') {
        return s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(lookup)
            .collect();
    }
    if alphabet.names().iter().all(|n| n.chars().count() == 1) {
        return s.chars().map(|c| lookup(&c.to_string())).collect();
    }
    Err(perr(format!("cannot split word {s:?} into symbols")))
}

/// A path to an existing file is read as a model file; anything else as
/// a built-in specification.
pub fn load_model(arg: &str) -> Result<Model> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        parse_model(&text)
    } else {
        models::builtin(arg)
    }
}
