use std::collections::BTreeMap;
use std::fs;

use coarsekit::covers::Cover;
use coarsekit::fixtures::{cover_fixture, fixture};
use coarsekit::json::{self, JsonError, NumberKind, Spaces};
use coarsekit::metric::{MetricFamily, SpaceRef};
use coarsekit::{Exact, PointSet, Scalar};
use serde_json::Value;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameter values.
    Usage(String),
    /// Unreadable or malformed input files.
    Input(String),
    /// The operation ran and a check or precondition failed.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) | CliError::Input(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Input(_) => "input",
            CliError::Failed(_) => "failed",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<JsonError> for CliError {
    fn from(e: JsonError) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

pub fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Parsed input files keyed by the argument that named them.
#[derive(Debug, Default)]
pub struct Docs {
    docs: BTreeMap<String, (String, Value)>,
}

fn is_fixture(name: &str) -> bool {
    fixture::<Exact>(name).is_some() || cover_fixture::<Exact>(name).is_some()
}

impl Docs {
    /// Reads every argument that is not a bundled fixture name as a JSON
    /// file.
    pub fn load<'a>(args: impl IntoIterator<Item = &'a str>) -> Result<Docs> {
        let mut docs = Docs::default();
        for arg in args {
            if is_fixture(arg) || docs.docs.contains_key(arg) {
                continue;
            }
            let text = fs::read_to_string(arg).map_err(|e| {
                CliError::Input(format!("'{arg}' is neither a fixture nor a readable file: {e}"))
            })?;
            let value =
                json::parse(&text).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
            docs.docs.insert(arg.to_string(), (text, value));
        }
        Ok(docs)
    }

    pub fn kind(&self) -> NumberKind {
        if self
            .docs
            .values()
            .any(|(_, v)| json::detect_kind(v) == NumberKind::Float)
        {
            NumberKind::Float
        } else {
            NumberKind::Exact
        }
    }

    pub fn value(&self, arg: &str) -> Result<&Value> {
        self.docs
            .get(arg)
            .map(|(_, v)| v)
            .ok_or_else(|| CliError::Input(format!("unknown fixture or file '{arg}'")))
    }

    pub fn text(&self, arg: &str) -> Result<&str> {
        self.docs
            .get(arg)
            .map(|(t, _)| t.as_str())
            .ok_or_else(|| CliError::Input(format!("unknown file '{arg}'")))
    }
}

fn in_file<T>(arg: &str, r: std::result::Result<T, JsonError>) -> Result<T> {
    r.map_err(|e| CliError::Input(format!("{arg}: {e}")))
}

pub fn space<S: Scalar>(docs: &Docs, arg: &str) -> Result<SpaceRef<S>> {
    if let Some(s) = fixture::<S>(arg) {
        return Ok(s.into_ref());
    }
    let v = docs.value(arg)?;
    if v.get("type").is_none() {
        return Err(CliError::Input(format!("{arg}: expected a space document")));
    }
    Ok(in_file(arg, json::space_from_json::<S>(v))?.into_ref())
}

pub fn family<S: Scalar>(docs: &Docs, arg: &str, spaces: &mut Spaces<S>) -> Result<MetricFamily<S>> {
    if let Some(s) = fixture::<S>(arg) {
        return Ok(MetricFamily::single(s.into_ref()));
    }
    let v = docs.value(arg)?;
    // A certificate stands for its target family, so decompositions chain.
    if v.get("members").is_some() && v.get("r").is_some() {
        return Ok(in_file(arg, json::certificate_from_json(v, spaces))?.target);
    }
    in_file(arg, json::family_from_json(v, spaces))
}

pub fn cover<S: Scalar>(docs: &Docs, arg: &str) -> Result<Cover<S>> {
    if let Some(c) = cover_fixture::<S>(arg) {
        return Ok(c);
    }
    in_file(arg, json::cover_from_json(docs.value(arg)?, &mut Spaces::new()))
}

pub fn scalar<S: Scalar>(arg: &str, what: &str) -> Result<S> {
    S::from_json(&Value::String(arg.to_string()))
        .map_err(|e| CliError::Usage(format!("--{what}: {e}")))
}

pub fn positive<S: Scalar>(arg: &str, what: &str) -> Result<S> {
    let v = scalar::<S>(arg, what)?;
    if v <= S::zero() {
        return Err(CliError::Usage(format!("--{what} must be positive")));
    }
    Ok(v)
}

/// Parses `0,3,7-9` (ranges inclusive).
pub fn points(arg: &str, what: &str) -> Result<PointSet> {
    let bad = || CliError::Usage(format!("--{what}: expected ids like 0,3,7-9, got '{arg}'"));
    let mut ids = Vec::new();
    for piece in arg.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match piece.split_once('-') {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                if b < a {
                    return Err(bad());
                }
                ids.extend(a..=b);
            }
            None => ids.push(piece.parse().map_err(|_| bad())?),
        }
    }
    Ok(PointSet::new(ids))
}
