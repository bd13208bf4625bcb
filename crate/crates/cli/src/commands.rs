use coarsekit::decomposition::{
    compose_certificates, defend, exhaustive_decompose, grave_construct, verify_certificate,
    Strategy, StrategyName,
};
use coarsekit::doubling::{
    certify_doubling, doubling_to_asdim_cover, dyadic_grid, subspace_doubling, verify_doubling,
};
use coarsekit::embedding::{glue_embeddings, FeatureMap, PartitionWeights};
use coarsekit::fixtures::{
    cover_fixture, fixture, random_metric, two_intervals, COVER_FIXTURE_NAMES, FIXTURE_NAMES,
};
use coarsekit::game::{play, replay_transcript, Challenger, GameSession};
use coarsekit::json::{self, Spaces};
use coarsekit::metric::{Member, MetricFamily, SpaceRef};
use coarsekit::nerve::{
    distance_ratio_map, lipschitz_constant, nerve_of_cover, partition_of_unity_map,
    required_lebesgue,
};
use coarsekit::{Extent, PointSet, Scalar};
use serde_json::{json, Value};

use crate::args::*;
use crate::input::{self, failed, usage, CliError, Docs, Result};

pub const GLUE_EXAMPLES: &[&str] = &["two_intervals"];

pub enum Body {
    Json(Value),
    Text(String),
}

pub struct Output {
    pub body: Body,
    /// 0, or 1 when the command ran but a check failed.
    pub status: u8,
}

fn ok(v: Value) -> Result<Output> {
    Ok(Output {
        body: Body::Json(v),
        status: 0,
    })
}

fn checked(v: Value, passed: bool) -> Result<Output> {
    Ok(Output {
        body: Body::Json(v),
        status: if passed { 0 } else { 1 },
    })
}

/// File arguments of a command, in the order they are read.
pub fn file_args(cmd: &Command) -> Vec<&str> {
    fn path(p: &std::path::Path) -> &str {
        p.to_str().unwrap_or_default()
    }
    match cmd {
        Command::Build(a) => a.space.iter().map(String::as_str).collect(),
        Command::Decompose(a) => a.family.iter().chain(&a.cover).map(String::as_str).collect(),
        Command::Verify(a) => vec![path(a.path())],
        Command::Compose(a) => vec![path(a.outer()), path(a.inner())],
        Command::Oracle(a) => vec![&a.space],
        Command::CoverStats(a) => vec![&a.cover],
        Command::Nerve(a) => vec![&a.cover],
        Command::Lipschitz(a) => vec![&a.cover],
        Command::Doubling(a) => vec![&a.space],
        Command::Glue(a) => a.input.iter().map(|p| path(p)).collect(),
        Command::Game(a) => vec![&a.family],
        Command::Fixtures(_) => Vec::new(),
    }
}

pub fn run<S: Scalar>(cli: &Cli, docs: &Docs) -> Result<Output> {
    match &cli.command {
        Command::Build(a) => build::<S>(a, docs, cli.global.seed),
        Command::Decompose(a) => decompose::<S>(a, docs),
        Command::Verify(a) => verify::<S>(a.path().to_str().unwrap_or_default(), docs),
        Command::Compose(a) => compose::<S>(a, docs),
        Command::Oracle(a) => oracle::<S>(a, docs),
        Command::CoverStats(a) => cover_stats::<S>(a, docs),
        Command::Nerve(a) => nerve::<S>(a, docs),
        Command::Lipschitz(a) => lipschitz::<S>(a, docs),
        Command::Doubling(a) => doubling::<S>(a, docs),
        Command::Glue(a) => glue::<S>(a, docs),
        Command::Game(a) => game::<S>(a, docs),
        Command::Fixtures(a) => fixtures::<S>(a),
    }
}

fn build<S: Scalar>(a: &BuildArgs, docs: &Docs, seed: u64) -> Result<Output> {
    let space = match (&a.space, a.random) {
        (Some(arg), _) => input::space::<S>(docs, arg)?.as_ref().clone(),
        (None, Some(n)) => {
            if n == 0 || a.max_weight < 1 {
                return Err(usage("--random and --max-weight must be positive"));
            }
            random_metric::<S>(&format!("random{n}"), n, a.max_weight, seed)
        }
        (None, None) => return Err(usage("build needs --space or --random")),
    };
    let space = match &a.id {
        Some(id) => space.with_id(id.clone()),
        None => space,
    };
    ok(json::space_to_json(&space))
}

fn strategy<S: Scalar>(a: &StrategyArgs) -> Result<Strategy<S>> {
    let name: StrategyName = a.strategy.parse().map_err(CliError::Usage)?;
    Ok(match name {
        StrategyName::NetThenGrave => {
            let Strategy::NetThenGrave { growth, max_steps } = Strategy::<S>::net_then_grave()
            else {
                unreachable!("default is net_then_grave")
            };
            Strategy::NetThenGrave {
                growth: a.growth.unwrap_or(growth),
                max_steps: a.max_steps.unwrap_or(max_steps),
            }
        }
        StrategyName::Singletons => Strategy::Singletons,
        StrategyName::OracleSmall => Strategy::OracleSmall {
            n: a.n.ok_or_else(|| usage("oracle_small needs --n"))?,
            diameter_bound: input::scalar(
                a.diam.as_deref().ok_or_else(|| usage("oracle_small needs --diam"))?,
                "diam",
            )?,
        },
    })
}

fn decompose<S: Scalar>(a: &DecomposeArgs, docs: &Docs) -> Result<Output> {
    let r = input::positive::<S>(&a.r, "r")?;
    let cert = match (&a.family, &a.cover) {
        (Some(f), _) => {
            let family = input::family::<S>(docs, f, &mut Spaces::new())?;
            defend(&family, r, &strategy::<S>(&a.strategy)?).map_err(failed)?
        }
        (None, Some(c)) => {
            let cover = input::cover::<S>(docs, c)?;
            let n = a
                .strategy
                .n
                .unwrap_or(cover.multiplicity().saturating_sub(1) as u64);
            grave_construct(&cover, r, n).map_err(failed)?
        }
        (None, None) => return Err(usage("decompose needs --family or --cover")),
    };
    ok(json::certificate_to_json(&cert))
}

/// The artifacts `verify` recognizes, by their distinguishing keys.
fn artifact_kind(v: &Value) -> Option<&'static str> {
    let has = |k: &str| v.get(k).is_some();
    Some(if has("turns") {
        "session"
    } else if has("scales") && has("r_min") {
        "doubling"
    } else if has("members") && has("r") && has("n") {
        "certificate"
    } else if has("members") {
        "family"
    } else if has("type") {
        "space"
    } else if has("elements") {
        "cover"
    } else if has("xis") {
        "glue_input"
    } else if has("values") && has("complex") {
        "complex_map"
    } else if has("vertices") && has("facets") {
        "complex"
    } else if has("dim") && has("vectors") {
        "feature_map"
    } else {
        return None;
    })
}

fn verify<S: Scalar>(path: &str, docs: &Docs) -> Result<Output> {
    let v = docs.value(path)?;
    let kind = artifact_kind(v)
        .ok_or_else(|| CliError::Input(format!("{path}: not a recognized artifact")))?;
    let mut spaces = Spaces::<S>::new();
    let in_file = |e: json::JsonError| CliError::Input(format!("{path}: {e}"));
    let (reserialized, mut report, valid) = match kind {
        "certificate" => {
            let cert = json::certificate_from_json::<S>(v, &mut spaces).map_err(in_file)?;
            let rep = verify_certificate(&cert);
            let report = json!({
                "valid": rep.valid,
                "violation": rep.violation.map(|x| x.to_string()),
                "parts": rep.parts,
                "mesh": rep.mesh.to_json(),
                "r": cert.r.to_json(),
                "n": cert.n,
            });
            (json::certificate_to_json(&cert), report, rep.valid)
        }
        "session" => {
            let session = json::session_from_json::<S>(v).map_err(in_file)?;
            let (report, valid) = session_report(&session);
            (json::session_to_json(&session), report, valid)
        }
        "doubling" => {
            let cert = json::doubling_from_json::<S>(v, &mut spaces).map_err(in_file)?;
            let rep = verify_doubling(&cert);
            let report = json!({
                "valid": rep.valid,
                "violation": rep.violation,
                "n": cert.n,
                "r_min": cert.r_min.to_json(),
                "scales": cert.scales.len(),
            });
            (json::doubling_to_json(&cert), report, rep.valid)
        }
        "family" => {
            let f = json::family_from_json::<S>(v, &mut spaces).map_err(in_file)?;
            let report = json!({"members": f.len(), "mesh": f.mesh().to_json()});
            (json::family_to_json(&f), report, true)
        }
        "space" => {
            let s = json::space_from_json::<S>(v).map_err(in_file)?;
            (json::space_to_json(&s), json!({"points": s.len()}), true)
        }
        "cover" => {
            let c = json::cover_from_json::<S>(v, &mut spaces).map_err(in_file)?;
            (json::cover_to_json(&c), json!({"elements": c.len()}), true)
        }
        "glue_input" => {
            let g = glue_input_from_json::<S>(v).map_err(in_file)?;
            (glue_input_to_json(&g), json!({"parts": g.weights.parts.len()}), true)
        }
        "complex_map" => {
            let m = json::complex_map_from_json::<S>(v, &mut spaces).map_err(in_file)?;
            (json::complex_map_to_json(&m), json!({"points": m.values.len()}), true)
        }
        "complex" => {
            let c = json::complex_from_json(v).map_err(in_file)?;
            (json::complex_to_json(&c), json!({"dim": c.dim()}), true)
        }
        _ => {
            let m = json::feature_map_from_json(v).map_err(in_file)?;
            (json::feature_map_to_json(&m), json!({"points": m.vectors.len()}), true)
        }
    };
    let canonical = json::to_canonical_string(&reserialized) == docs.text(path)?;
    report["kind"] = Value::from(kind);
    report["canonical"] = Value::from(canonical);
    checked(report, valid)
}

/// Verifies every turn, the chaining of turns and the composed transcript.
fn session_report<S: Scalar>(session: &GameSession<S>) -> (Value, bool) {
    let mut valid = true;
    let mut prev = &session.initial;
    let turns: Vec<Value> = session
        .turns
        .iter()
        .map(|t| {
            let rep = verify_certificate(&t.certificate);
            let chained = t.certificate.source.same_members(prev);
            prev = &t.certificate.target;
            valid &= rep.valid && chained;
            json!({
                "r": t.r.to_json(),
                "valid": rep.valid,
                "violation": rep.violation.map(|x| x.to_string()),
                "chained": chained,
                "mesh": t.mesh.to_json(),
            })
        })
        .collect();
    let replay = match replay_transcript(session) {
        Ok(rep) => {
            valid &= rep.valid && rep.r_matches && rep.n_matches;
            json!({
                "valid": rep.valid,
                "r_matches": rep.r_matches,
                "n_matches": rep.n_matches,
                "n": rep.composed.n,
                "mesh": rep.mesh.to_json(),
            })
        }
        Err(coarsekit::game::GameError::EmptyTranscript) => Value::Null,
        Err(e) => {
            valid = false;
            json!({"valid": false, "error": e.to_string()})
        }
    };
    let report = json!({
        "valid": valid,
        "status": session.status.label(),
        "turns": turns,
        "replay": replay,
    });
    (report, valid)
}

fn compose<S: Scalar>(a: &ComposeArgs, docs: &Docs) -> Result<Output> {
    let mut spaces = Spaces::<S>::new();
    let mut load = |p: &std::path::Path| {
        let p = p.to_str().unwrap_or_default();
        json::certificate_from_json::<S>(docs.value(p)?, &mut spaces)
            .map_err(|e| CliError::Input(format!("{p}: {e}")))
    };
    let first = load(a.outer())?;
    let second = load(a.inner())?;
    let composed = compose_certificates(&first, &second).map_err(failed)?;
    ok(json::certificate_to_json(&composed))
}

fn oracle<S: Scalar>(a: &OracleArgs, docs: &Docs) -> Result<Output> {
    let space = input::space::<S>(docs, &a.space)?;
    let points = match &a.points {
        Some(p) => input::points(p, "points")?,
        None => space.points(),
    };
    space.check_subset(&points).map_err(usage)?;
    let r = input::positive::<S>(&a.r, "r")?;
    let d = input::scalar::<S>(&a.diam, "diam")?;
    let verdict = exhaustive_decompose(&space, &points, r, a.n, d).map_err(failed)?;
    ok(json!({
        "space": space.id(),
        "points": json::points_json(&points),
        "r": r.to_json(),
        "n": a.n,
        "diam": d.to_json(),
        "decomposable": verdict.decomposable,
        "min_worst_diameter": verdict.min_worst_diameter.to_json(),
        "witness": verdict.witness.as_ref().map(json::certificate_to_json),
    }))
}

fn cover_stats<S: Scalar>(a: &CoverStatsArgs, docs: &Docs) -> Result<Output> {
    let cover = input::cover::<S>(docs, &a.cover)?;
    let scales = a
        .d
        .iter()
        .map(|d| {
            let d = input::positive::<S>(d, "d")?;
            Ok(json!({
                "d": d.to_json(),
                "multiplicity": cover.d_multiplicity(d),
                "closed_multiplicity": cover.closed_d_multiplicity(d),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    ok(json!({
        "space": cover.space().id(),
        "points": cover.domain().len(),
        "elements": cover.len(),
        "multiplicity": cover.multiplicity(),
        "lebesgue": cover.lebesgue_number().to_json(),
        "mesh": cover.mesh().to_json(),
        "d_multiplicity": scales,
    }))
}

fn nerve<S: Scalar>(a: &NerveArgs, docs: &Docs) -> Result<Output> {
    let complex = nerve_of_cover(&input::cover::<S>(docs, &a.cover)?);
    if a.dot {
        return Ok(Output {
            body: Body::Text(complex.to_dot()),
            status: 0,
        });
    }
    ok(json::complex_to_json(&complex))
}

fn lipschitz<S: Scalar>(a: &LipschitzArgs, docs: &Docs) -> Result<Output> {
    let cover = input::cover::<S>(docs, &a.cover)?;
    let epsilon = input::positive::<S>(&a.epsilon, "epsilon")?;
    let n = a.n.unwrap_or(cover.multiplicity().saturating_sub(1));
    let map = if a.unchecked {
        distance_ratio_map(&cover)
    } else {
        partition_of_unity_map(&cover, epsilon, n).map_err(failed)?
    };
    let report = lipschitz_constant(&map);
    let lebesgue = cover.lebesgue_number();
    // 2(n+1)(2n+3)/L, the bound the construction proves for any Lebesgue number L.
    let chain_bound = match lebesgue {
        Extent::Finite(l) if l > S::zero() => {
            (S::from_int(2) * S::from_int(n as i64 + 1) * S::from_int(2 * n as i64 + 3) / l)
                .to_json()
        }
        Extent::Finite(_) => Value::Null,
        Extent::Unbounded => S::zero().to_json(),
    };
    let within = report.constant.le_tol(epsilon);
    let mut out = json!({
        "space": cover.space().id(),
        "n": n,
        "epsilon": epsilon.to_json(),
        "multiplicity": cover.multiplicity(),
        "lebesgue": lebesgue.to_json(),
        "required_lebesgue": required_lebesgue(n, epsilon).to_json(),
        "constant": report.constant.to_json(),
        "worst_pair": report.worst.map(|(x, y)| json!([x, y])),
        "within_epsilon": within,
        "chain_bound": chain_bound,
        "checked": !a.unchecked,
    });
    if a.with_map {
        out["map"] = json::complex_map_to_json(&map);
    }
    // Unchecked runs only measure; the epsilon bound is promised only
    // when the preconditions hold.
    checked(out, within || a.unchecked)
}

fn doubling<S: Scalar>(a: &DoublingArgs, docs: &Docs) -> Result<Output> {
    let space = input::space::<S>(docs, &a.space)?;
    let subset = match &a.subset {
        Some(p) => input::points(p, "subset")?,
        None => space.points(),
    };
    let r_min = input::positive::<S>(&a.r_min, "r-min")?;
    let grid = dyadic_grid(r_min, space.diameter(&space.points()));
    let cert = certify_doubling(&space, &subset, r_min, &grid).map_err(|e| match e {
        coarsekit::doubling::DoublingError::InvalidSubset => usage(e),
        e => failed(e),
    })?;
    if a.subspace {
        return ok(json::doubling_to_json(&subspace_doubling(&cert).map_err(failed)?));
    }
    if let Some(lambda) = &a.asdim {
        let lambda = input::positive::<S>(lambda, "asdim")?;
        let member = Member::new(space.clone(), subset).map_err(usage)?;
        let family = MetricFamily::new(format!("{}/subset", space.id()), vec![member]);
        let report = doubling_to_asdim_cover(&family, &[cert], lambda).map_err(failed)?;
        return ok(json::certificate_to_json(&report.certificate));
    }
    ok(json::doubling_to_json(&cert))
}

/// Everything `glue` needs, as stored in a glue input document.
pub struct GlueInput<S> {
    pub space: SpaceRef<S>,
    pub domain: PointSet,
    pub weights: PartitionWeights,
    pub xis: Vec<FeatureMap>,
    pub r: S,
    pub epsilon: f64,
    pub s_grid: Vec<f64>,
}

fn glue_example<S: Scalar>(name: &str) -> Option<GlueInput<S>> {
    match name {
        "two_intervals" => {
            let t = two_intervals::<S>();
            let s_grid = (0..5).map(|k| f64::from(1u32 << k)).collect();
            Some(GlueInput {
                domain: t.space.points(),
                space: t.space,
                weights: t.weights,
                xis: t.xis,
                r: t.r,
                epsilon: t.epsilon,
                s_grid,
            })
        }
        _ => None,
    }
}

pub fn glue_input_to_json<S: Scalar>(g: &GlueInput<S>) -> Value {
    let mut o = json!({
        "space": g.space.id(),
        "weights": json::weights_to_json(&g.weights),
        "xis": g.xis.iter().map(json::feature_map_to_json).collect::<Vec<_>>(),
        "r": g.r.to_json(),
        "epsilon": g.epsilon,
        "s_grid": g.s_grid,
        "spaces": json::spaces_to_json([&g.space]),
    });
    if g.domain != g.space.points() {
        o["domain"] = json::points_json(&g.domain);
    }
    o
}

fn glue_input_from_json<S: Scalar>(v: &Value) -> std::result::Result<GlueInput<S>, json::JsonError> {
    let schema = |m: &str| json::JsonError::Schema(m.to_string());
    let mut spaces = Spaces::<S>::new();
    json::collect_spaces(v, &mut spaces)?;
    let id = v
        .get("space")
        .and_then(Value::as_str)
        .ok_or_else(|| schema("'space' must be a string"))?;
    let space = spaces
        .get(id)
        .cloned()
        .ok_or_else(|| json::JsonError::UnknownSpace(id.to_string()))?;
    let domain = match v.get("domain") {
        Some(d) => {
            let mut spaces = Spaces::new();
            spaces.insert(id.to_string(), space.clone());
            // A cover with one element reads a point list with the usual checks.
            let probe = json!({"space": id, "elements": [d], "domain": d});
            json::cover_from_json(&probe, &mut spaces)?.domain().clone()
        }
        None => space.points(),
    };
    let weights = json::weights_from_json(v.get("weights").ok_or_else(|| schema("missing field 'weights'"))?)?;
    let xis = v
        .get("xis")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("'xis' must be an array"))?
        .iter()
        .map(json::feature_map_from_json)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let r = S::from_json(v.get("r").ok_or_else(|| schema("missing field 'r'"))?)?;
    let epsilon = v
        .get("epsilon")
        .and_then(Value::as_f64)
        .ok_or_else(|| schema("'epsilon' must be a number"))?;
    let s_grid = match v.get("s_grid") {
        Some(g) => g
            .as_array()
            .and_then(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
            .ok_or_else(|| schema("'s_grid' must be an array of numbers"))?,
        None => Vec::new(),
    };
    Ok(GlueInput {
        space,
        domain,
        weights,
        xis,
        r,
        epsilon,
        s_grid,
    })
}

fn glue<S: Scalar>(a: &GlueArgs, docs: &Docs) -> Result<Output> {
    let g = match (&a.input, &a.example) {
        (Some(p), _) => {
            let p = p.to_str().unwrap_or_default();
            glue_input_from_json::<S>(docs.value(p)?)
                .map_err(|e| CliError::Input(format!("{p}: {e}")))?
        }
        (None, Some(name)) => glue_example::<S>(name)
            .ok_or_else(|| usage(format!("unknown glue example '{name}'")))?,
        (None, None) => return Err(usage("glue needs an input file or --example")),
    };
    let rep = glue_embeddings(&g.space, &g.domain, &g.weights, &g.xis, g.r, g.epsilon, &g.s_grid)
        .map_err(failed)?;
    let out = json!({
        "eta": json::feature_map_to_json(&rep.eta),
        "blocks": rep.blocks,
        "max_norm_error": rep.max_norm_error,
        "worst_variation": rep.worst_variation.map(|(x, y, v)| json!([x, y, v])),
        "variation_ok": rep.variation_ok,
        "decay_profile": rep.decay_profile.iter().map(|(s, v)| json!([s, v])).collect::<Vec<_>>(),
    });
    checked(out, rep.variation_ok)
}

fn challenger<S: Scalar>(arg: &str) -> Result<Challenger<S>> {
    let bad = || usage(format!("--challenger: expected constant:R, geometric:R:LAMBDA or script:R1,R2,..., got '{arg}'"));
    let (kind, rest) = arg.split_once(':').ok_or_else(bad)?;
    let scale = |s: &str| input::positive::<S>(s, "challenger");
    Ok(match kind {
        "constant" => Challenger::Constant(scale(rest)?),
        "geometric" => {
            let (r, lambda) = rest.split_once(':').ok_or_else(bad)?;
            Challenger::Geometric {
                r: scale(r)?,
                lambda: scale(lambda)?,
            }
        }
        "script" => Challenger::Script(rest.split(',').map(scale).collect::<Result<_>>()?),
        _ => return Err(bad()),
    })
}

fn game<S: Scalar>(a: &GameArgs, docs: &Docs) -> Result<Output> {
    let family = input::family::<S>(docs, &a.family, &mut Spaces::new())?;
    let bound = input::scalar::<S>(&a.bound, "bound")?;
    let policy = match (&a.challenger, &a.script) {
        (Some(c), _) => c.clone(),
        (None, Some(s)) => format!("script:{s}"),
        (None, None) => return Err(usage("--challenger or --script is required")),
    };
    let challenger = challenger::<S>(&policy)?;
    let mut session = GameSession::start(0, family, bound, strategy::<S>(&a.strategy)?, a.max_turns)
        .map_err(usage)?;
    play(&mut session, &challenger).map_err(failed)?;
    ok(json::session_to_json(&session))
}

fn fixtures<S: Scalar>(a: &FixturesArgs) -> Result<Output> {
    if a.check {
        return fixture_checks::<S>();
    }
    let Some(name) = &a.name else {
        return ok(json!({
            "spaces": FIXTURE_NAMES,
            "space_patterns": ["lineN", "gridAxB"],
            "covers": COVER_FIXTURE_NAMES,
            "glue": GLUE_EXAMPLES,
        }));
    };
    if let Some(s) = fixture::<S>(name) {
        return ok(json::space_to_json(&s));
    }
    if let Some(c) = cover_fixture::<S>(name) {
        return ok(json::cover_to_json(&c));
    }
    if let Some(g) = glue_example::<S>(name) {
        return ok(glue_input_to_json(&g));
    }
    Err(usage(format!("unknown fixture '{name}'")))
}

/// Runs the defender, the verifier, the doubling certifier, the cover
/// construction, gluing and a short game on every bundled fixture.
fn fixture_checks<S: Scalar>() -> Result<Output> {
    let mut checks = Vec::new();
    let mut record = |name: &str, check: &str, outcome: std::result::Result<String, String>| {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        checks.push(json!({"fixture": name, "check": check, "passed": passed, "detail": detail}));
    };
    let one = S::one();
    for name in FIXTURE_NAMES {
        let space = fixture::<S>(name).expect("listed fixtures exist").into_ref();
        let family = MetricFamily::single(space.clone());
        let outcome = defend(&family, one, &Strategy::net_then_grave())
            .map_err(|e| e.to_string())
            .and_then(|c| {
                let rep = verify_certificate(&c);
                match rep.violation {
                    None => Ok(format!("n = {}, mesh {}", c.n, rep.mesh)),
                    Some(v) => Err(v.to_string()),
                }
            });
        record(name, "decompose_r1", outcome);
        let grid = dyadic_grid(one, space.diameter(&space.points()));
        let outcome = certify_doubling(&space, &space.points(), one, &grid)
            .map_err(|e| e.to_string())
            .and_then(|c| {
                let rep = verify_doubling(&c);
                match rep.violation {
                    None => Ok(format!("N = {}", c.n)),
                    Some(v) => Err(v),
                }
            });
        record(name, "doubling", outcome);
    }
    for name in COVER_FIXTURE_NAMES {
        let cover = cover_fixture::<S>(name).expect("listed covers exist");
        let n = cover.multiplicity() - 1;
        let outcome = match cover.lebesgue_number() {
            Extent::Finite(l) => {
                let r = l / S::from_int(n as i64 + 2);
                grave_construct(&cover, r, n as u64)
                    .map_err(|e| e.to_string())
                    .and_then(|c| match verify_certificate(&c).violation {
                        None => Ok(format!("r = {r}, {} parts", c.part_count())),
                        Some(v) => Err(v.to_string()),
                    })
            }
            Extent::Unbounded => Ok("single element".into()),
        };
        record(name, "cover_to_decomposition", outcome);
    }
    for name in GLUE_EXAMPLES {
        let g = glue_example::<S>(name).expect("listed examples exist");
        let outcome =
            glue_embeddings(&g.space, &g.domain, &g.weights, &g.xis, g.r, g.epsilon, &g.s_grid)
                .map_err(|e| e.to_string())
                .and_then(|rep| {
                    if rep.variation_ok {
                        Ok(format!("norm error {:.1e}", rep.max_norm_error))
                    } else {
                        Err("variation above epsilon".into())
                    }
                });
        record(name, "glue", outcome);
    }
    let line = fixture::<S>("line100").expect("bundled").into_ref();
    let outcome = GameSession::start(
        0,
        MetricFamily::single(line),
        S::from_int(5),
        Strategy::net_then_grave(),
        coarsekit::game::DEFAULT_MAX_TURNS,
    )
    .map_err(|e| e.to_string())
    .and_then(|mut s| {
        play(&mut s, &Challenger::Constant(S::from_int(2))).map_err(|e| e.to_string())?;
        let rep = replay_transcript(&s).map_err(|e| e.to_string())?;
        if s.status.label() == "defender_won" && rep.valid && rep.n_matches {
            Ok(format!("won in {} turns", s.turns.len()))
        } else {
            Err(format!("status {}, replay valid {}", s.status.label(), rep.valid))
        }
    });
    record("line100", "game_constant_r2", outcome);
    let passed = checks.iter().all(|c| c["passed"] == true);
    checked(json!({"passed": passed, "checks": checks}), passed)
}
