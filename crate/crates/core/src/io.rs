//! JSON formats for spaces, index sets, sequences and filter bases.
//!
//! Rationals are written as reduced `"p/q"` strings. Integers above `2⁵³`
//! may be given as decimal strings. Parse failures carry the file path and
//! the line and column reported by `serde_json`.

use std::path::Path;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::filters::{self, FilterBase};
use crate::indexset::{Eventual, IndexSet, SetRule};
use crate::metric::FiniteMetricSpace;
use crate::rational;
use crate::ultralimit::RationalSequence;

fn json_err(path: &str, e: serde_json::Error) -> Error {
    Error::Json {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses `text` as `T`; `path` is only used in diagnostics.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, path: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| json_err(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    parse_json(&text, &path.display().to_string())
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, to_json_string(value))?;
    Ok(())
}

fn in_file(path: &str, e: Error) -> Error {
    match e {
        Error::Json { .. } | Error::Io(_) => e,
        other => Error::Structural(format!("{path}: {other}")),
    }
}

fn u128_of(v: &Value) -> Result<u128> {
    match v {
        Value::Number(n) => n.as_u64().map(u128::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
    .ok_or_else(|| Error::structural(format!("expected a nonnegative integer, got {v}")))
}

/// `{"points": [..], "basepoint": label, "dist": [["p/q", ..], ..]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceJson {
    pub points: Vec<String>,
    pub basepoint: String,
    pub dist: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub pseudo: bool,
}

impl SpaceJson {
    pub fn from_space(x: &FiniteMetricSpace) -> Self {
        SpaceJson {
            points: x.labels().to_vec(),
            basepoint: x.label(x.basepoint()).to_string(),
            dist: x
                .rows()
                .map(|r| r.iter().map(|q| Value::String(rational::format(q))).collect())
                .collect(),
            pseudo: x.is_pseudo(),
        }
    }

    /// Builds and validates the space.
    pub fn to_space(&self) -> Result<FiniteMetricSpace> {
        let base = self
            .points
            .iter()
            .position(|p| *p == self.basepoint)
            .ok_or_else(|| Error::structural(format!("unknown basepoint {:?}", self.basepoint)))?;
        let rows = self
            .dist
            .iter()
            .map(|r| r.iter().map(rational::from_json).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let x = FiniteMetricSpace::from_rows(self.points.clone(), rows, base, self.pseudo)?;
        if let Some(v) = x.first_violation() {
            return Err(Error::structural(format!("not a metric: {v}")));
        }
        Ok(x)
    }
}

pub fn parse_space(text: &str, path: &str) -> Result<FiniteMetricSpace> {
    parse_json::<SpaceJson>(text, path)?
        .to_space()
        .map_err(|e| in_file(path, e))
}

pub fn read_space(path: &Path) -> Result<FiniteMetricSpace> {
    parse_space(&std::fs::read_to_string(path)?, &path.display().to_string())
}

pub fn write_space(path: &Path, x: &FiniteMetricSpace) -> Result<()> {
    write_json(path, &SpaceJson::from_space(x))
}

/// `{"elems": [..], "horizon": H, "rule": "powers:2"}`; with a rule the
/// elements are generated up to the horizon and `elems` must be absent or
/// consistent with it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexSetJson {
    #[serde(default)]
    pub elems: Vec<Value>,
    pub horizon: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    /// Marks an explicit list as the whole set.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub finite: bool,
}

impl IndexSetJson {
    pub fn to_set(&self) -> Result<IndexSet> {
        let h = u128_of(&self.horizon)?;
        let elems = self.elems.iter().map(u128_of).collect::<Result<Vec<_>>>()?;
        let set = match &self.rule {
            Some(r) => {
                let rule: SetRule = r.parse()?;
                let set = IndexSet::from_rule(rule, h);
                if let Some(x) = elems.iter().find(|&&x| !set.contains(x)) {
                    return Err(Error::structural(format!("element {x} does not follow rule {rule}")));
                }
                set
            }
            None => IndexSet::from_elems(elems, h)?,
        };
        Ok(if self.finite { set.with_eventual(Eventual::Finite) } else { set })
    }

    /// Lists elements explicitly; rule-backed sets keep only the rule.
    pub fn from_set(s: &IndexSet) -> Result<Self> {
        let num = |x: u128| {
            u64::try_from(x).map_or_else(|_| Value::String(x.to_string()), Value::from)
        };
        let (elems, rule) = match s.eventual() {
            Eventual::Rule(r) => (Vec::new(), Some(r.to_string())),
            _ => (s.to_vec(1_000_000)?.into_iter().map(num).collect(), None),
        };
        Ok(IndexSetJson {
            elems,
            horizon: num(s.horizon()),
            rule,
            finite: matches!(s.eventual(), Eventual::Finite),
        })
    }
}

pub fn parse_index_set(text: &str, path: &str) -> Result<IndexSet> {
    parse_json::<IndexSetJson>(text, path)?
        .to_set()
        .map_err(|e| in_file(path, e))
}

pub fn read_index_set(path: &Path) -> Result<IndexSet> {
    parse_index_set(&std::fs::read_to_string(path)?, &path.display().to_string())
}

/// `{"rule": "alternate"|"table"|"constant"|"reciprocal"|"power", ..}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SequenceJson {
    Alternate { values: Vec<Value> },
    Table { values: Vec<Value> },
    Constant { value: Value },
    Reciprocal,
    Power { coef: Value, exp: u32 },
}

impl SequenceJson {
    pub fn to_sequence(&self) -> Result<RationalSequence> {
        let list = |v: &[Value]| v.iter().map(rational::from_json).collect::<Result<Vec<BigRational>>>();
        Ok(match self {
            SequenceJson::Alternate { values } if values.is_empty() => {
                return Err(Error::structural("alternate needs at least one value"))
            }
            SequenceJson::Alternate { values } => RationalSequence::Alternate(list(values)?),
            SequenceJson::Table { values } => RationalSequence::Table(list(values)?),
            SequenceJson::Constant { value } => RationalSequence::Constant(rational::from_json(value)?),
            SequenceJson::Reciprocal => RationalSequence::Reciprocal,
            SequenceJson::Power { coef, exp } => RationalSequence::Power {
                coef: rational::from_json(coef)?,
                exp: *exp,
            },
        })
    }
}

pub fn parse_sequence(text: &str, path: &str) -> Result<RationalSequence> {
    parse_json::<SequenceJson>(text, path)?
        .to_sequence()
        .map_err(|e| in_file(path, e))
}

pub fn read_sequence(path: &Path) -> Result<RationalSequence> {
    parse_sequence(&std::fs::read_to_string(path)?, &path.display().to_string())
}

/// A filter base: explicit generators, or a preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseJson {
    Generators { generators: Vec<IndexSetJson> },
    Evens { horizon: Value },
    Odds { horizon: Value },
    Cofinite { horizon: Value },
    Slow { horizon: Value },
}

impl BaseJson {
    pub fn to_base(&self) -> Result<FilterBase> {
        match self {
            BaseJson::Generators { generators } => {
                FilterBase::new(generators.iter().map(IndexSetJson::to_set).collect::<Result<_>>()?)
            }
            BaseJson::Evens { horizon } => FilterBase::new(vec![IndexSet::evens(u128_of(horizon)?)]),
            BaseJson::Odds { horizon } => FilterBase::new(vec![IndexSet::odds(u128_of(horizon)?)]),
            BaseJson::Cofinite { horizon } => Ok(FilterBase::cofinite(u128_of(horizon)?)),
            BaseJson::Slow { horizon } => Ok(filters::slow_base(u128_of(horizon)?)?.base().clone()),
        }
    }
}

pub fn parse_base(text: &str, path: &str) -> Result<FilterBase> {
    parse_json::<BaseJson>(text, path)?
        .to_base()
        .map_err(|e| in_file(path, e))
}

pub fn read_base(path: &Path) -> Result<FilterBase> {
    parse_base(&std::fs::read_to_string(path)?, &path.display().to_string())
}

/// `n,gh_upper,window_lo,window_hi` with rationals as `"p/q"` strings.
pub fn write_convergence_csv(path: &Path, rows: &[crate::decone::ConvergenceRow]) -> Result<()> {
    let err = crate::suite::csv_err;
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record(["n", "gh_upper", "window_lo", "window_hi"]).map_err(err)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            rational::format(&r.gh_upper),
            rational::format(&r.window_lo),
            rational::format(&r.window_hi),
        ])
        .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}
