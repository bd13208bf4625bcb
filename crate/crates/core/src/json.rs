//! Canonical JSON for every artifact: spaces, families, covers,
//! certificates, complexes, feature maps, doubling certificates and game
//! sessions.
//!
//! Output is pretty-printed with sorted keys and a trailing newline, so
//! writing a parsed document reproduces it byte for byte. Documents that
//! reference spaces carry them under `"spaces"`, keyed by id.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::covers::Cover;
use crate::decomposition::{DecompositionCertificate, Level, MemberLevels, Strategy, StrategyName};
use crate::doubling::{CenterDomain, CenterWitness, DoublingCertificate, ScaleWitness};
use crate::embedding::{FeatureMap, PartitionWeights};
use crate::game::{GameSession, GameStatus, Turn};
use crate::metric::{FiniteMetricSpace, Member, MetricFamily, Norm, SpaceRef, SpaceSource};
use crate::nerve::{ComplexMap, ComplexPoint, UniformComplex};
use crate::point_set::{PointId, PointSet};
use crate::scalar::Scalar;

/// Levels above this index switch the certificate to the sparse encoding.
const DENSE_LEVEL_LIMIT: Level = 4096;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(String),
    #[error("{0}")]
    Schema(String),
    #[error("unknown space '{0}'")]
    UnknownSpace(String),
    #[error("invalid space: {0}")]
    Metric(#[from] crate::metric::MetricError),
    #[error("invalid number: {0}")]
    Scalar(#[from] crate::scalar::ScalarError),
}

type Result<T> = std::result::Result<T, JsonError>;

fn schema<T>(msg: impl Into<String>) -> Result<T> {
    Err(JsonError::Schema(msg.into()))
}

/// Spaces available while decoding, keyed by id.
pub type Spaces<S> = BTreeMap<String, SpaceRef<S>>;

/// Whether a document's numbers call for exact or floating scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumberKind {
    Exact,
    Float,
}

/// `Float` if any number in `v` is written with a fraction or exponent.
/// Rationals written as `"p/q"` strings stay exact.
pub fn detect_kind(v: &Value) -> NumberKind {
    fn any_float(v: &Value) -> bool {
        match v {
            Value::Number(n) => n.is_f64(),
            Value::Array(a) => a.iter().any(any_float),
            Value::Object(o) => o.values().any(any_float),
            _ => false,
        }
    }
    if any_float(v) {
        NumberKind::Float
    } else {
        NumberKind::Exact
    }
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| JsonError::Syntax(e.to_string()))
}

/// Pretty, key-sorted, newline-terminated.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

// ---- field helpers ----

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| JsonError::Schema(format!("missing field '{key}'")))
}

fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    field(v, key)?
        .as_str()
        .ok_or_else(|| JsonError::Schema(format!("'{key}' must be a string")))
}

fn u64_of(v: &Value, what: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| JsonError::Schema(format!("'{what}' must be a nonnegative integer")))
}

fn u64_field(v: &Value, key: &str) -> Result<u64> {
    u64_of(field(v, key)?, key)
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| JsonError::Schema(format!("'{what}' must be an array")))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| JsonError::Schema(format!("'{what}' must be an object")))
}

fn scalar<S: Scalar>(v: &Value) -> Result<S> {
    Ok(S::from_json(v)?)
}

fn scalar_vec<S: Scalar>(v: &Value, what: &str) -> Result<Vec<S>> {
    array(v, what)?.iter().map(scalar).collect()
}

fn scalar_rows<S: Scalar>(v: &Value, what: &str) -> Result<Vec<Vec<S>>> {
    array(v, what)?.iter().map(|r| scalar_vec(r, what)).collect()
}

fn points_of(v: &Value, what: &str) -> Result<PointSet> {
    let ids = array(v, what)?
        .iter()
        .map(|p| u64_of(p, what).map(|p| p as PointId))
        .collect::<Result<Vec<_>>>()?;
    Ok(PointSet::new(ids))
}

fn point_key(key: &str) -> Result<PointId> {
    key.parse()
        .map_err(|_| JsonError::Schema(format!("'{key}' is not a point id")))
}

pub fn points_json(p: &PointSet) -> Value {
    Value::from(p.as_slice().to_vec())
}

fn rows_json<S: Scalar>(rows: &[Vec<S>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| Value::Array(r.iter().map(|x| x.to_json()).collect()))
            .collect(),
    )
}

// ---- spaces ----

fn norm_str(n: Norm) -> &'static str {
    match n {
        Norm::L1 => "l1",
        Norm::L2 => "l2",
        Norm::LInf => "linf",
    }
}

fn parse_norm(v: Option<&Value>) -> Result<Norm> {
    match v.and_then(Value::as_str).unwrap_or("l1") {
        "l1" => Ok(Norm::L1),
        "l2" => Ok(Norm::L2),
        "linf" => Ok(Norm::LInf),
        other => schema(format!("unknown norm '{other}'")),
    }
}

/// Spaces keep the description they were built from; bare matrices are
/// written as `"matrix"`.
pub fn space_to_json<S: Scalar>(space: &FiniteMetricSpace<S>) -> Value {
    let mut obj = match space.source() {
        None => json!({"type": "matrix", "matrix": rows_json(&space.matrix())}),
        Some(SpaceSource::Matrix(rows)) => json!({"type": "matrix", "matrix": rows_json(rows)}),
        Some(SpaceSource::Points { coords, norm }) => {
            json!({"type": "points", "coords": rows_json(coords), "norm": norm_str(*norm)})
        }
        Some(SpaceSource::WeightedL1 { coords, weights }) => {
            let mut o = json!({"type": "weighted_l1", "coords": rows_json(coords)});
            if let Some(w) = weights {
                o["weights"] = Value::Array(w.iter().map(|x| x.to_json()).collect());
            }
            o
        }
        Some(SpaceSource::Graph { vertices, edges }) => json!({
            "type": "graph",
            "vertices": vertices,
            "edges": edges
                .iter()
                .map(|(a, b, w)| json!([a, b, w.to_json()]))
                .collect::<Vec<_>>(),
        }),
        Some(SpaceSource::Grid { dims, norm }) => {
            json!({"type": "grid", "dims": dims, "norm": norm_str(*norm)})
        }
    };
    obj["id"] = Value::from(space.id());
    if let Some(label) = space.label() {
        obj["label"] = Value::from(label);
    }
    let derived_coords = matches!(
        space.source(),
        Some(SpaceSource::Points { .. } | SpaceSource::WeightedL1 { .. } | SpaceSource::Grid { .. })
    );
    if let (false, Some(c)) = (derived_coords, space.coords()) {
        obj["display_coords"] = rows_json(c);
    }
    obj
}

pub fn space_from_json<S: Scalar>(v: &Value) -> Result<FiniteMetricSpace<S>> {
    let id = v.get("id").and_then(Value::as_str).unwrap_or("space");
    let source = match str_field(v, "type")? {
        "matrix" => SpaceSource::Matrix(scalar_rows(field(v, "matrix")?, "matrix")?),
        "points" => SpaceSource::Points {
            coords: scalar_rows(field(v, "coords")?, "coords")?,
            norm: parse_norm(v.get("norm"))?,
        },
        "weighted_l1" => SpaceSource::WeightedL1 {
            coords: scalar_rows(field(v, "coords")?, "coords")?,
            weights: v
                .get("weights")
                .map(|w| scalar_vec(w, "weights"))
                .transpose()?,
        },
        "graph" => {
            let edges = array(field(v, "edges")?, "edges")?
                .iter()
                .map(|e| match e.as_array().map(Vec::as_slice) {
                    Some([a, b, w]) => Ok((
                        u64_of(a, "edges")? as PointId,
                        u64_of(b, "edges")? as PointId,
                        scalar(w)?,
                    )),
                    _ => schema("each edge must be [a, b, weight]"),
                })
                .collect::<Result<Vec<_>>>()?;
            SpaceSource::Graph {
                vertices: u64_field(v, "vertices")? as usize,
                edges,
            }
        }
        "grid" => SpaceSource::Grid {
            dims: array(field(v, "dims")?, "dims")?
                .iter()
                .map(|d| u64_of(d, "dims").map(|d| d as usize))
                .collect::<Result<_>>()?,
            norm: parse_norm(v.get("norm"))?,
        },
        other => return schema(format!("unknown space type '{other}'")),
    };
    let mut space = FiniteMetricSpace::build(id, &source)?;
    if let Some(label) = v.get("label").and_then(Value::as_str) {
        space = space.with_label(label);
    }
    if let Some(c) = v.get("display_coords") {
        space = space.with_coords(scalar_rows(c, "display_coords")?);
    }
    Ok(space)
}

pub fn spaces_to_json<'a, S: Scalar>(spaces: impl IntoIterator<Item = &'a SpaceRef<S>>) -> Value {
    let map: Map<String, Value> = spaces
        .into_iter()
        .map(|s| (s.id().to_string(), space_to_json(s.as_ref())))
        .collect();
    Value::Object(map)
}

/// Reads `"spaces"` from a document (if present) into `into`. A space whose
/// id is already known is kept as is.
pub fn collect_spaces<S: Scalar>(doc: &Value, into: &mut Spaces<S>) -> Result<()> {
    if let Some(spaces) = doc.get("spaces") {
        for (id, sv) in object(spaces, "spaces")? {
            if !into.contains_key(id) {
                let space = space_from_json::<S>(sv)?.with_id(id.clone());
                into.insert(id.clone(), Arc::new(space));
            }
        }
    }
    Ok(())
}

fn space_ref<S: Scalar>(spaces: &Spaces<S>, id: &str) -> Result<SpaceRef<S>> {
    spaces
        .get(id)
        .cloned()
        .ok_or_else(|| JsonError::UnknownSpace(id.to_string()))
}

fn family_spaces<S: Scalar>(families: &[&MetricFamily<S>]) -> Value {
    let mut seen: BTreeMap<&str, &SpaceRef<S>> = BTreeMap::new();
    for f in families {
        for m in f.members() {
            seen.entry(m.space.id()).or_insert(&m.space);
        }
    }
    spaces_to_json(seen.into_values())
}

// ---- families ----

fn member_json<S: Scalar>(m: &Member<S>) -> Value {
    json!({"space": m.space.id(), "points": points_json(&m.points)})
}

fn member_from_json<S: Scalar>(v: &Value, spaces: &Spaces<S>) -> Result<Member<S>> {
    let space = space_ref(spaces, str_field(v, "space")?)?;
    let points = points_of(field(v, "points")?, "points")?;
    Ok(Member::new(space, points)?)
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn family_body<S: Scalar>(f: &MetricFamily<S>) -> Value {
    let mut o = json!({
        "id": f.id,
        "members": f.members().iter().map(member_json).collect::<Vec<_>>(),
    });
    if f.labels() != default_labels(f.len()).as_slice() {
        o["labels"] = Value::from(f.labels().to_vec());
    }
    o
}

fn family_from_body<S: Scalar>(v: &Value, spaces: &Spaces<S>) -> Result<MetricFamily<S>> {
    let members = array(field(v, "members")?, "members")?
        .iter()
        .map(|m| member_from_json(m, spaces))
        .collect::<Result<Vec<_>>>()?;
    let mut f = MetricFamily::new(str_field(v, "id")?, members);
    if let Some(labels) = v.get("labels") {
        let labels = array(labels, "labels")?
            .iter()
            .map(|l| l.as_str().map(String::from))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| JsonError::Schema("labels must be strings".into()))?;
        f = f.with_labels(labels);
    }
    Ok(f)
}

pub fn family_to_json<S: Scalar>(f: &MetricFamily<S>) -> Value {
    let mut o = family_body(f);
    o["spaces"] = family_spaces(&[f]);
    o
}

/// Accepts a family document, or a space document standing for the
/// one-member family of the whole space.
pub fn family_from_json<S: Scalar>(v: &Value, spaces: &mut Spaces<S>) -> Result<MetricFamily<S>> {
    if v.get("type").is_some() {
        let space: SpaceRef<S> = Arc::new(space_from_json(v)?);
        spaces.insert(space.id().to_string(), space.clone());
        return Ok(MetricFamily::single(space));
    }
    collect_spaces(v, spaces)?;
    family_from_body(v, spaces)
}

// ---- covers ----

pub fn cover_to_json<S: Scalar>(c: &Cover<S>) -> Value {
    let mut o = json!({
        "space": c.space().id(),
        "elements": c.elements().iter().map(points_json).collect::<Vec<_>>(),
        "spaces": spaces_to_json([c.space()]),
    });
    if c.domain() != &c.space().points() {
        o["domain"] = points_json(c.domain());
    }
    o
}

pub fn cover_from_json<S: Scalar>(v: &Value, spaces: &mut Spaces<S>) -> Result<Cover<S>> {
    collect_spaces(v, spaces)?;
    let space = space_ref(spaces, str_field(v, "space")?)?;
    let elements = array(field(v, "elements")?, "elements")?
        .iter()
        .map(|e| points_of(e, "elements"))
        .collect::<Result<Vec<_>>>()?;
    let domain = match v.get("domain") {
        Some(d) => points_of(d, "domain")?,
        None => space.points(),
    };
    Cover::on(space, domain, elements).map_err(|e| JsonError::Schema(e.to_string()))
}

// ---- certificates ----

fn levels_json(levels: &MemberLevels) -> Value {
    let parts = |ps: &[PointSet]| Value::Array(ps.iter().map(points_json).collect());
    match levels.max_level() {
        None => json!([]),
        Some(max) if max < DENSE_LEVEL_LIMIT => {
            Value::Array((0..=max).map(|l| parts(levels.level(l))).collect())
        }
        Some(_) => Value::Object(
            levels
                .levels()
                .map(|(l, ps)| (l.to_string(), parts(ps)))
                .collect(),
        ),
    }
}

fn levels_from_json(v: &Value) -> Result<MemberLevels> {
    let mut out = MemberLevels::new();
    let mut push = |level: Level, parts: &Value| -> Result<()> {
        for p in array(parts, "levels")? {
            out.push(level, points_of(p, "levels")?);
        }
        Ok(())
    };
    match v {
        Value::Array(levels) => {
            for (l, parts) in levels.iter().enumerate() {
                push(l as Level, parts)?;
            }
        }
        Value::Object(levels) => {
            for (l, parts) in levels {
                let l: Level = l
                    .parse()
                    .map_err(|_| JsonError::Schema(format!("'{l}' is not a level")))?;
                push(l, parts)?;
            }
        }
        _ => return schema("'levels' must be an array or an object"),
    }
    Ok(out)
}

fn certificate_body<S: Scalar>(c: &DecompositionCertificate<S>) -> Value {
    let members: Vec<Value> = c
        .source
        .members()
        .iter()
        .zip(&c.members)
        .map(|(m, levels)| {
            json!({
                "space": m.space.id(),
                "points": points_json(&m.points),
                "levels": levels_json(levels),
            })
        })
        .collect();
    let mut o = json!({
        "r": c.r.to_json(),
        "n": c.n,
        "source": c.source.id,
        "members": members,
        "target": c.target.id,
    });
    if c.source.labels() != default_labels(c.source.len()).as_slice() {
        o["source_labels"] = Value::from(c.source.labels().to_vec());
    }
    let default = DecompositionCertificate::new(c.source.clone(), c.r, c.n, c.members.clone());
    let same_target = default.target.len() == c.target.len()
        && default
            .target
            .members()
            .iter()
            .zip(c.target.members())
            .all(|(a, b)| a.same_as(b));
    if !same_target {
        o["target_members"] =
            Value::Array(c.target.members().iter().map(member_json).collect());
    }
    o
}

fn certificate_from_body<S: Scalar>(
    v: &Value,
    spaces: &Spaces<S>,
) -> Result<DecompositionCertificate<S>> {
    let r: S = scalar(field(v, "r")?)?;
    let n: Level = u64_field(v, "n")?;
    let mut members = Vec::new();
    let mut levels = Vec::new();
    for m in array(field(v, "members")?, "members")? {
        members.push(member_from_json(m, spaces)?);
        levels.push(levels_from_json(field(m, "levels")?)?);
    }
    let mut source = MetricFamily::new(str_field(v, "source")?, members);
    if let Some(labels) = v.get("source_labels").and_then(Value::as_array) {
        let labels: Vec<String> = labels
            .iter()
            .filter_map(|l| l.as_str().map(String::from))
            .collect();
        source = source.with_labels(labels);
    }
    let target_id = str_field(v, "target")?;
    let mut cert = match v.get("target_members") {
        Some(t) => {
            let target = array(t, "target_members")?
                .iter()
                .map(|m| member_from_json(m, spaces))
                .collect::<Result<Vec<_>>>()?;
            DecompositionCertificate::with_target(
                source,
                r,
                n,
                levels,
                MetricFamily::new(target_id, target),
            )
        }
        None => DecompositionCertificate::new(source, r, n, levels),
    };
    cert.target.id = target_id.to_string();
    Ok(cert)
}

fn certificate_spaces<S: Scalar>(c: &DecompositionCertificate<S>) -> Value {
    family_spaces(&[&c.source, &c.target])
}

pub fn certificate_to_json<S: Scalar>(c: &DecompositionCertificate<S>) -> Value {
    let mut o = certificate_body(c);
    o["spaces"] = certificate_spaces(c);
    o
}

pub fn certificate_from_json<S: Scalar>(
    v: &Value,
    spaces: &mut Spaces<S>,
) -> Result<DecompositionCertificate<S>> {
    collect_spaces(v, spaces)?;
    certificate_from_body(v, spaces)
}

// ---- complexes and maps into them ----

pub fn complex_to_json(c: &UniformComplex) -> Value {
    json!({"vertices": c.vertices(), "facets": c.facets()})
}

pub fn complex_from_json(v: &Value) -> Result<UniformComplex> {
    let facets = array(field(v, "facets")?, "facets")?
        .iter()
        .map(|f| {
            array(f, "facets")?
                .iter()
                .map(|x| u64_of(x, "facets").map(|x| x as usize))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let complex = UniformComplex::new(facets);
    if let Some(vs) = v.get("vertices") {
        let listed = points_of(vs, "vertices")?;
        if listed.as_slice() != complex.vertices() {
            return schema("'vertices' disagrees with the facets");
        }
    }
    Ok(complex)
}

pub fn complex_map_to_json<S: Scalar>(m: &ComplexMap<S>) -> Value {
    let values: Map<String, Value> = m
        .values
        .iter()
        .map(|(p, x)| {
            let coords: Map<String, Value> = x
                .coords()
                .iter()
                .map(|(v, c)| (v.to_string(), c.to_json()))
                .collect();
            (p.to_string(), Value::Object(coords))
        })
        .collect();
    json!({
        "space": m.space.id(),
        "complex": complex_to_json(&m.complex),
        "values": values,
        "spaces": spaces_to_json([&m.space]),
    })
}

pub fn complex_map_from_json<S: Scalar>(v: &Value, spaces: &mut Spaces<S>) -> Result<ComplexMap<S>> {
    collect_spaces(v, spaces)?;
    let space = space_ref(spaces, str_field(v, "space")?)?;
    let complex = complex_from_json(field(v, "complex")?)?;
    let mut values = BTreeMap::new();
    for (p, coords) in object(field(v, "values")?, "values")? {
        let mut c = BTreeMap::new();
        for (vid, x) in object(coords, "values")? {
            c.insert(point_key(vid)?, scalar::<S>(x)?);
        }
        let point = ComplexPoint::new(c).map_err(|e| JsonError::Schema(e.to_string()))?;
        values.insert(point_key(p)?, point);
    }
    ComplexMap::new(space, complex, values).map_err(|e| JsonError::Schema(e.to_string()))
}

// ---- feature maps and weights ----

fn f64_json(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn f64_vec(v: &Value, what: &str) -> Result<Vec<f64>> {
    array(v, what)?
        .iter()
        .map(|x| {
            x.as_f64()
                .ok_or_else(|| JsonError::Schema(format!("'{what}' must hold numbers")))
        })
        .collect()
}

fn f64_table_json(t: &BTreeMap<PointId, Vec<f64>>) -> Value {
    Value::Object(
        t.iter()
            .map(|(p, v)| (p.to_string(), Value::Array(v.iter().map(|x| f64_json(*x)).collect())))
            .collect(),
    )
}

fn f64_table(v: &Value, what: &str) -> Result<BTreeMap<PointId, Vec<f64>>> {
    object(v, what)?
        .iter()
        .map(|(p, xs)| Ok((point_key(p)?, f64_vec(xs, what)?)))
        .collect()
}

pub fn feature_map_to_json(m: &FeatureMap) -> Value {
    json!({"dim": m.dim, "vectors": f64_table_json(&m.vectors)})
}

pub fn feature_map_from_json(v: &Value) -> Result<FeatureMap> {
    let dim = u64_field(v, "dim")? as usize;
    FeatureMap::new(dim, f64_table(field(v, "vectors")?, "vectors")?)
        .map_err(|e| JsonError::Schema(e.to_string()))
}

pub fn weights_to_json(w: &PartitionWeights) -> Value {
    json!({
        "parts": w.parts.iter().map(points_json).collect::<Vec<_>>(),
        "weights": f64_table_json(&w.weights),
    })
}

pub fn weights_from_json(v: &Value) -> Result<PartitionWeights> {
    Ok(PartitionWeights {
        parts: array(field(v, "parts")?, "parts")?
            .iter()
            .map(|p| points_of(p, "parts"))
            .collect::<Result<_>>()?,
        weights: f64_table(field(v, "weights")?, "weights")?,
    })
}

// ---- doubling certificates ----

pub fn doubling_to_json<S: Scalar>(c: &DoublingCertificate<S>) -> Value {
    let scales: Vec<Value> = c
        .scales
        .iter()
        .map(|s| {
            json!({
                "r": s.r.to_json(),
                "witnesses": s.witnesses.iter().map(|w| json!({
                    "center": w.center,
                    "balls": w.balls,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "space": c.space.id(),
        "subset": points_json(&c.subset),
        "centers": match c.centers {
            CenterDomain::Host => "host",
            CenterDomain::Subset => "subset",
        },
        "n": c.n,
        "r_min": c.r_min.to_json(),
        "scales": scales,
        "spaces": spaces_to_json([&c.space]),
    })
}

pub fn doubling_from_json<S: Scalar>(
    v: &Value,
    spaces: &mut Spaces<S>,
) -> Result<DoublingCertificate<S>> {
    collect_spaces(v, spaces)?;
    let scales = array(field(v, "scales")?, "scales")?
        .iter()
        .map(|s| {
            let witnesses = array(field(s, "witnesses")?, "witnesses")?
                .iter()
                .map(|w| {
                    Ok(CenterWitness {
                        center: u64_field(w, "center")? as PointId,
                        balls: array(field(w, "balls")?, "balls")?
                            .iter()
                            .map(|b| u64_of(b, "balls").map(|b| b as PointId))
                            .collect::<Result<_>>()?,
                    })
                })
                .collect::<Result<_>>()?;
            Ok(ScaleWitness {
                r: scalar(field(s, "r")?)?,
                witnesses,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DoublingCertificate {
        space: space_ref(spaces, str_field(v, "space")?)?,
        subset: points_of(field(v, "subset")?, "subset")?,
        centers: match str_field(v, "centers")? {
            "host" => CenterDomain::Host,
            "subset" => CenterDomain::Subset,
            other => return schema(format!("unknown center domain '{other}'")),
        },
        n: u64_field(v, "n")? as usize,
        r_min: scalar(field(v, "r_min")?)?,
        scales,
    })
}

// ---- strategies and sessions ----

pub fn strategy_to_json<S: Scalar>(s: &Strategy<S>) -> Value {
    match s {
        Strategy::NetThenGrave { growth, max_steps } => json!({
            "name": s.name().as_str(),
            "growth": growth,
            "max_steps": max_steps,
        }),
        Strategy::Singletons => json!({"name": s.name().as_str()}),
        Strategy::OracleSmall { n, diameter_bound } => json!({
            "name": s.name().as_str(),
            "n": n,
            "diameter_bound": diameter_bound.to_json(),
        }),
    }
}

/// Accepts a bare name (default parameters) or an object with `"name"`.
pub fn strategy_from_json<S: Scalar>(v: &Value) -> Result<Strategy<S>> {
    let name = match v {
        Value::String(s) => s.as_str(),
        _ => str_field(v, "name")?,
    };
    let name: StrategyName = name.parse().map_err(JsonError::Schema)?;
    let get = |k: &str| v.get(k);
    Ok(match name {
        StrategyName::NetThenGrave => {
            let Strategy::NetThenGrave {
                growth: g0,
                max_steps: m0,
            } = Strategy::<S>::net_then_grave()
            else {
                unreachable!()
            };
            Strategy::NetThenGrave {
                growth: get("growth").map_or(Ok(g0 as u64), |g| u64_of(g, "growth"))? as u32,
                max_steps: get("max_steps").map_or(Ok(m0 as u64), |m| u64_of(m, "max_steps"))?
                    as u32,
            }
        }
        StrategyName::Singletons => Strategy::Singletons,
        StrategyName::OracleSmall => Strategy::OracleSmall {
            n: u64_field(v, "n")?,
            diameter_bound: scalar(field(v, "diameter_bound")?)?,
        },
    })
}

fn turn_json<S: Scalar>(t: &Turn<S>) -> Value {
    json!({
        "r": t.r.to_json(),
        "n": t.certificate.n,
        "mesh": t.mesh.to_json(),
        "part_count": t.certificate.part_count(),
        "certificate": certificate_body(&t.certificate),
    })
}

/// The full session state; [`session_from_json`] reloads it.
pub fn session_to_json<S: Scalar>(s: &GameSession<S>) -> Value {
    let mut families = vec![&s.initial];
    for t in &s.turns {
        families.push(&t.certificate.source);
        families.push(&t.certificate.target);
    }
    let mut o = json!({
        "id": s.id,
        "bound": s.bound.to_json(),
        "strategy": strategy_to_json(&s.strategy),
        "max_turns": s.max_turns,
        "status": s.status.label(),
        "initial": family_body(&s.initial),
        "initial_mesh": s.initial.mesh().to_json(),
        "current_mesh": s.current_mesh().to_json(),
        "turns": s.turns.iter().map(turn_json).collect::<Vec<_>>(),
        "spaces": family_spaces(&families),
    });
    if let GameStatus::DefenderStuck { reason } = &s.status {
        o["reason"] = Value::from(reason.as_str());
    }
    o
}

pub fn session_from_json<S: Scalar>(v: &Value) -> Result<GameSession<S>> {
    let mut spaces = Spaces::new();
    collect_spaces(v, &mut spaces)?;
    let turns = array(field(v, "turns")?, "turns")?
        .iter()
        .map(|t| {
            let certificate = certificate_from_body(field(t, "certificate")?, &spaces)?;
            Ok(Turn {
                r: scalar(field(t, "r")?)?,
                mesh: certificate.mesh(),
                certificate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let status = match str_field(v, "status")? {
        "in_progress" => GameStatus::InProgress,
        "defender_won" => GameStatus::DefenderWon,
        "defender_stuck" => GameStatus::DefenderStuck {
            reason: v
                .get("reason")
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string(),
        },
        other => return schema(format!("unknown status '{other}'")),
    };
    let max_turns = u64_field(v, "max_turns")?;
    Ok(GameSession {
        id: u64_field(v, "id")?,
        initial: family_from_body(field(v, "initial")?, &spaces)?,
        bound: scalar(field(v, "bound")?)?,
        strategy: strategy_from_json(field(v, "strategy")?)?,
        max_turns: u32::try_from(max_turns).map_err(|_| JsonError::Schema("max_turns too large".into()))?,
        turns,
        status,
    })
}
