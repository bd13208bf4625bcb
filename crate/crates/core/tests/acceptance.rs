//! Acceptance suite. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails.
//!
//! Run with `cargo test -p coarsekit --test acceptance -- --nocapture`.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coarsekit::covers::Cover;
use coarsekit::decomposition::{
    compose_certificates, defend, exhaustive_decompose, grave_construct, pushforward_expansion,
    verify_certificate, DecompositionCertificate, Level, MemberLevels, SelfMap, Strategy,
};
use coarsekit::doubling::{
    certify_doubling, doubling_to_asdim_cover, dyadic_grid, subspace_doubling, verify_doubling,
    CenterDomain, DoublingCertificate,
};
use coarsekit::embedding::glue_embeddings;
use coarsekit::fixtures::{fixture, random_metric, scaled_grid, scaled_line, two_intervals};
use coarsekit::game::{play, replay_transcript, Challenger, GameSession, GameStatus};
use coarsekit::metric::{grid, line, r_components, MetricFamily, SpaceRef};
use coarsekit::nerve::{partition_of_unity_map, random_complex_points, star_cover, ComplexPoint, UniformComplex};
use coarsekit::{Exact, PointId, PointSet, Scalar};

type Outcome = Result<String, String>;

fn q(v: i64) -> Exact {
    Exact::from_integer(v)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Independent check: levels of every member cover it, parts on one level
/// are pairwise more than `r` apart, and every part is a target member.
fn check_decomposition<S: Scalar>(c: &DecompositionCertificate<S>) -> Result<(), String> {
    let targets: Vec<(String, PointSet)> = c
        .target
        .members()
        .iter()
        .map(|m| (m.space.id().to_string(), m.points.clone()))
        .collect();
    for (mi, (member, levels)) in c.source.members().iter().zip(&c.members).enumerate() {
        let space = &member.space;
        let mut covered = PointSet::default();
        for (level, parts) in levels.levels() {
            ensure(level <= c.n, || format!("member {mi} uses level {level} > n = {}", c.n))?;
            for (i, a) in parts.iter().enumerate() {
                ensure(a.is_subset(&member.points), || format!("part {a:?} leaves member {mi}"))?;
                ensure(
                    targets.contains(&(space.id().to_string(), a.clone())),
                    || format!("part {a:?} is not in the target"),
                )?;
                covered = covered.union(a);
                for b in &parts[i + 1..] {
                    for x in a.iter() {
                        for y in b.iter() {
                            ensure(space.dist(x, y).gt_tol(c.r), || {
                                format!("points {x},{y} on level {level} are within r")
                            })?;
                        }
                    }
                }
            }
        }
        ensure(covered == member.points, || format!("member {mi} is not covered"))?;
    }
    Ok(())
}

/// `(r, 0)`-decomposition into `r`-components.
fn components_certificate<S: Scalar>(family: &MetricFamily<S>, r: S) -> DecompositionCertificate<S> {
    let members = family
        .members()
        .iter()
        .map(|m| {
            let mut l = MemberLevels::new();
            for c in r_components(&m.space, &m.points, r) {
                l.push(0, c);
            }
            l
        })
        .collect();
    DecompositionCertificate::new(family.clone(), r, 0, members)
}

fn random_stage(
    family: &MetricFamily<Exact>,
    rng: &mut ChaCha8Rng,
) -> Result<DecompositionCertificate<Exact>, String> {
    let r = Exact::new(rng.random_range(1..=6), rng.random_range(1..=2));
    match rng.random_range(0..3) {
        0 => defend(family, r, &Strategy::net_then_grave()).map_err(|e| e.to_string()),
        1 => Ok(components_certificate(family, r)),
        _ => {
            let gap = family
                .members()
                .iter()
                .filter_map(|m| m.space.min_positive_gap(&m.points))
                .min()
                .unwrap_or(q(1));
            Ok(DecompositionCertificate::singletons(family.clone(), gap / q(2)))
        }
    }
}

fn random_small_space(rng: &mut ChaCha8Rng, id: &str) -> SpaceRef<Exact> {
    match rng.random_range(0..3) {
        0 => random_metric::<Exact>(id, rng.random_range(2..=30), 8, rng.random()).into_ref(),
        1 => line::<Exact>(id, rng.random_range(2..=30)).into_ref(),
        _ => grid::<Exact>(id, &[rng.random_range(1..=5), rng.random_range(2..=6)]).into_ref(),
    }
}

fn composition_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut max_n = 0;
    for trial in 0..200 {
        let space = random_small_space(&mut rng, &format!("chain{trial}"));
        let family = MetricFamily::single(space);
        let first = random_stage(&family, &mut rng)?;
        let second = random_stage(&first.target, &mut rng)?;
        for c in [&first, &second] {
            ensure(verify_certificate(c).valid, || format!("trial {trial}: stage invalid"))?;
        }
        let composed = compose_certificates(&first, &second).map_err(|e| e.to_string())?;
        ensure(verify_certificate(&composed).valid, || format!("trial {trial}: composed invalid"))?;
        check_decomposition(&composed).map_err(|e| format!("trial {trial}: {e}"))?;
        let r = if first.r < second.r { first.r } else { second.r };
        ensure(composed.r == r, || format!("trial {trial}: r = {}, expected {r}", composed.r))?;
        let n = (first.n + 1) * (second.n + 1) - 1;
        ensure(composed.n == n, || format!("trial {trial}: n = {}, expected {n}", composed.n))?;
        max_n = max_n.max(n);
    }
    Ok(format!("200 chains, composed n up to {max_n}"))
}

/// Random closed balls until the space is covered.
fn random_ball_cover(space: &SpaceRef<Exact>, rng: &mut ChaCha8Rng) -> Cover<Exact> {
    let all = space.points();
    let mut elements: Vec<PointSet> = Vec::new();
    let mut covered = PointSet::default();
    let mut order: Vec<PointId> = all.iter().collect();
    order.shuffle(rng);
    for c in order {
        if covered.contains(c) && rng.random_bool(0.7) {
            continue;
        }
        let ball = space.closed_ball(c, q(rng.random_range(1..=8)), &all);
        covered = covered.union(&ball);
        elements.push(ball);
    }
    Cover::new(space.clone(), elements).expect("every point is in its own ball")
}

fn cover_to_decomposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut levels_seen = 0;
    for trial in 0..100 {
        let id = format!("cover{trial}");
        let space = if rng.random_bool(0.5) {
            line::<Exact>(id, rng.random_range(5..=60)).into_ref()
        } else {
            grid::<Exact>(id, &[rng.random_range(2..=7), rng.random_range(2..=8)]).into_ref()
        };
        let cover = random_ball_cover(&space, &mut rng);
        let n = (cover.multiplicity() - 1 + rng.random_range(0..=1)) as Level;
        let slots = q(n as i64 + 1);
        let r = match cover.lebesgue_number().finite() {
            Some(l) => l / slots * Exact::new(1, rng.random_range(1..=3)),
            None => q(rng.random_range(1..=3)),
        };
        // Preconditions, measured independently of the construction.
        let mult = (0..space.len())
            .map(|x| cover.elements().iter().filter(|e| e.contains(x)).count())
            .max()
            .unwrap_or(0);
        ensure(mult as Level <= n + 1, || format!("trial {trial}: bad multiplicity"))?;
        let cert = grave_construct(&cover, r, n).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(verify_certificate(&cert).valid, || format!("trial {trial}: invalid"))?;
        check_decomposition(&cert).map_err(|e| format!("trial {trial}: {e}"))?;
        for (_, part) in cert.members[0].parts() {
            ensure(cover.elements().iter().any(|e| part.is_subset(e)), || {
                format!("trial {trial}: part {part:?} is in no cover element")
            })?;
        }
        levels_seen = levels_seen.max(cert.members[0].max_level().unwrap_or(0) + 1);
    }
    Ok(format!("100 covers, up to {levels_seen} nonempty levels"))
}

/// Is there a partition into parts of diameter `<= d` whose conflict graph
/// (parts within `r` of each other) is `(n+1)`-colorable?
fn brute_force_decomposable(space: &SpaceRef<Exact>, r: Exact, n: usize, d: Exact) -> bool {
    let pts: Vec<PointId> = space.points().iter().collect();
    let mut labels = vec![0usize; pts.len()];
    fn colorable(conflict: &[Vec<bool>], colors: usize, assign: &mut Vec<usize>) -> bool {
        let i = assign.len();
        if i == conflict.len() {
            return true;
        }
        for c in 0..colors {
            if (0..i).all(|j| !(conflict[i][j] && assign[j] == c)) {
                assign.push(c);
                if colorable(conflict, colors, assign) {
                    return true;
                }
                assign.pop();
            }
        }
        false
    }
    fn rec(
        i: usize,
        blocks: usize,
        pts: &[PointId],
        labels: &mut Vec<usize>,
        space: &SpaceRef<Exact>,
        r: Exact,
        n: usize,
        d: Exact,
    ) -> bool {
        if i == pts.len() {
            let parts: Vec<Vec<PointId>> = (0..blocks)
                .map(|b| (0..pts.len()).filter(|&k| labels[k] == b).map(|k| pts[k]).collect())
                .collect();
            let conflict: Vec<Vec<bool>> = parts
                .iter()
                .map(|a| {
                    parts
                        .iter()
                        .map(|b| a != b && a.iter().any(|&x| b.iter().any(|&y| space.dist(x, y) <= r)))
                        .collect()
                })
                .collect();
            return colorable(&conflict, n + 1, &mut Vec::new());
        }
        for b in 0..=blocks {
            if (0..i).any(|k| labels[k] == b && space.dist(pts[k], pts[i]) > d) {
                continue;
            }
            labels[i] = b;
            let next = if b == blocks { blocks + 1 } else { blocks };
            if rec(i + 1, next, pts, labels, space, r, n, d) {
                return true;
            }
        }
        false
    }
    rec(0, 0, &pts, &mut labels, space, r, n, d)
}

fn quantile(sorted: &[Exact], num: usize, den: usize) -> Exact {
    sorted[(sorted.len() - 1) * num / den]
}

fn oracle_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut yes, mut no) = (0, 0);
    for m in 0..50 {
        let size = rng.random_range(3..=8);
        let space = random_metric::<Exact>(&format!("rand{m}"), size, 6, rng.random()).into_ref();
        let mut dists: Vec<Exact> = Vec::new();
        for x in 0..size {
            for y in x + 1..size {
                dists.push(space.dist(x, y));
            }
        }
        dists.sort();
        dists.dedup();
        let family = MetricFamily::single(space.clone());
        for r in [quantile(&dists, 1, 4), quantile(&dists, 1, 2), quantile(&dists, 3, 4)] {
            for n in [0u64, 1] {
                for d in [quantile(&dists, 1, 3), quantile(&dists, 2, 3)] {
                    let strategy = Strategy::OracleSmall { n, diameter_bound: d };
                    let defended = defend(&family, r, &strategy);
                    let verdict = exhaustive_decompose(&space, &space.points(), r, n, d)
                        .map_err(|e| e.to_string())?;
                    let brute = brute_force_decomposable(&space, r, n as usize, d);
                    let tag = || format!("matrix {m}, r={r}, n={n}, D={d}");
                    ensure(defended.is_ok() == verdict.decomposable, || format!("{}: defend disagrees", tag()))?;
                    ensure(brute == verdict.decomposable, || format!("{}: brute force disagrees", tag()))?;
                    if let Ok(c) = defended {
                        ensure(verify_certificate(&c).valid && c.mesh() <= d, || {
                            format!("{}: witness invalid", tag())
                        })?;
                        yes += 1;
                    } else {
                        no += 1;
                    }
                }
            }
        }
    }
    Ok(format!("600 instances, {yes} decomposable, {no} not"))
}

/// Worst ratio of `d1(phi(x), phi(y))` to `d(x, y)`, recomputed from the
/// distance-ratio formula.
fn independent_lipschitz(cover: &Cover<f64>) -> f64 {
    let space = cover.space();
    let dom = cover.domain();
    let phi = |x: PointId| -> Vec<f64> {
        let raw: Vec<f64> = cover
            .elements()
            .iter()
            .map(|u| dom.difference(u).iter().map(|z| space.dist(x, z)).fold(f64::INFINITY, f64::min))
            .map(|v| if v.is_finite() { v } else { 0.0 })
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / total).collect()
    };
    let values: Vec<Vec<f64>> = dom.iter().map(phi).collect();
    let pts: Vec<PointId> = dom.iter().collect();
    let mut worst: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d1: f64 = values[i].iter().zip(&values[j]).map(|(a, b)| (a - b).abs()).sum();
            worst = worst.max(d1 / space.dist(pts[i], pts[j]));
        }
    }
    worst
}

fn partition_of_unity_lipschitz() -> Outcome {
    let line40: SpaceRef<f64> = scaled_line("line40x10", 40, 10.0).into_ref();
    let grid8: SpaceRef<f64> = scaled_grid("grid8x8x20", 8, 8, 20.0).into_ref();
    let all_grid = grid8.points();
    let minus = |all: &PointSet, p: PointId| all.difference(&PointSet::singleton(p));
    let corners = [0, 63, 7];
    let mut lines = Vec::new();
    for (n, eps) in [(1usize, 1.0f64), (2, 0.5)] {
        let covers = [
            Cover::new(line40.clone(), vec![PointSet::range(0, 38), PointSet::range(1, 39)]).unwrap(),
            Cover::new(grid8.clone(), corners[..=n].iter().map(|&c| minus(&all_grid, c)).collect())
                .unwrap(),
        ];
        for cover in covers {
            let map = partition_of_unity_map(&cover, eps, n).map_err(|e| e.to_string())?;
            let lib = coarsekit::nerve::lipschitz_constant(&map).constant;
            let ours = independent_lipschitz(&cover);
            ensure((lib - ours).abs() <= 1e-9 * ours.max(1.0), || {
                format!("library constant {lib} vs recomputed {ours}")
            })?;
            ensure(ours <= eps * (1.0 + 1e-9), || {
                format!("{} (n={n}, eps={eps}): Lipschitz {ours} > {eps}", cover.space().id())
            })?;
            lines.push(format!("{}:{ours:.4}", cover.space().id()));
        }
    }
    Ok(format!("constants {}", lines.join(", ")))
}

fn pigeonhole() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut complexes: Vec<UniformComplex> = (0..=4).map(|d| UniformComplex::new([(0..=d).collect()])).collect();
    for _ in 0..10 {
        let facets: Vec<Vec<usize>> = (0..rng.random_range(1..=6))
            .map(|_| {
                let mut vs: Vec<usize> = (0..9).collect();
                vs.shuffle(&mut rng);
                vs.truncate(rng.random_range(1..=5));
                vs
            })
            .collect();
        complexes.push(UniformComplex::new(facets));
    }
    let mut tested = 0;
    let mut worst_margin = f64::INFINITY;
    for c in &complexes {
        let n = c.dim();
        let mut points: Vec<ComplexPoint<f64>> = c.simplices().iter().map(|s| ComplexPoint::barycenter(s)).collect();
        points.extend(random_complex_points::<f64, _>(c, 1000, &mut rng));
        let bound = 1.0 / (n as f64 + 1.0) - 1e-12;
        for p in &points {
            let max = p.coords().values().copied().fold(0.0, f64::max);
            ensure(max >= bound, || format!("dim {n}: max coordinate {max} < {bound}"))?;
            worst_margin = worst_margin.min(max - bound);
        }
        let report = star_cover(c, n, &points).map_err(|e| e.to_string())?;
        ensure(report.passed, || format!("dim {n}: star cover check failed"))?;
        tested += points.len();
    }
    Ok(format!("{} complexes, {tested} points, smallest margin {worst_margin:.3e}", complexes.len()))
}

fn doubling_multiplicity() -> Outcome {
    let mut lines = Vec::new();
    for name in ["line64", "grid16x16"] {
        let space: SpaceRef<Exact> = fixture(name).unwrap().into_ref();
        let all = space.points();
        let grid = dyadic_grid(q(1), space.diameter(&all));
        let cert = certify_doubling(&space, &all, q(1), &grid).map_err(|e| e.to_string())?;
        ensure(verify_doubling(&cert).valid, || format!("{name}: doubling certificate invalid"))?;
        let family = MetricFamily::single(space.clone());
        let bound = cert.n.pow(4);
        let mut worst = 0;
        for &lambda in &grid {
            let report = doubling_to_asdim_cover(&family, std::slice::from_ref(&cert), lambda)
                .map_err(|e| format!("{name} at {lambda}: {e}"))?;
            // Recount from the net, with closed balls of radius 4r.
            let member = &report.members[0];
            let radius = q(4) * report.r;
            let mult = all
                .iter()
                .map(|x| member.net.iter().filter(|&z| space.dist(x, z) <= radius).count())
                .max()
                .unwrap_or(0);
            ensure(mult == member.multiplicity, || format!("{name}: multiplicity recount differs"))?;
            ensure(mult <= bound, || format!("{name} at {lambda}: {mult} > N^4 = {bound}"))?;
            ensure(verify_certificate(&report.certificate).valid, || format!("{name}: decomposition invalid"))?;
            worst = worst.max(mult);
        }
        lines.push(format!("{name}: N={}, max multiplicity {worst} <= {bound}", cert.n));
    }
    Ok(lines.join("; "))
}

/// Every listed center lies in the subset and its `r`-ball traces cover the
/// `2r`-ball trace around the witness center, with at most `n` balls.
fn check_subset_witnesses(c: &DoublingCertificate<Exact>) -> Result<(), String> {
    for scale in &c.scales {
        for y in c.subset.iter() {
            let w = scale
                .witnesses
                .iter()
                .find(|w| w.center == y)
                .ok_or_else(|| format!("no witness for {y} at r = {}", scale.r))?;
            ensure(w.balls.len() <= c.n, || format!("{} balls > {}", w.balls.len(), c.n))?;
            ensure(w.balls.iter().all(|b| c.subset.contains(*b)), || "center outside subset".into())?;
            for z in c.subset.iter() {
                if c.space.dist(y, z) < q(2) * scale.r {
                    ensure(w.balls.iter().any(|&b| c.space.dist(b, z) < scale.r), || {
                        format!("point {z} near {y} uncovered at r = {}", scale.r)
                    })?;
                }
            }
        }
    }
    Ok(())
}

fn subspace_transfer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let hosts: [SpaceRef<Exact>; 2] = [fixture("line64").unwrap().into_ref(), fixture("grid8x8").unwrap().into_ref()];
    let mut worst = 0;
    for trial in 0..20 {
        let host = &hosts[trial % 2];
        let mut ids: Vec<PointId> = host.points().iter().collect();
        ids.shuffle(&mut rng);
        ids.truncate(rng.random_range(4..=host.len() / 2));
        let subset = PointSet::new(ids);
        let r = q(rng.random_range(1..=2));
        let grid = dyadic_grid(r, host.diameter(&host.points()));
        let cert = certify_doubling(host, &subset, r, &grid).map_err(|e| e.to_string())?;
        let sub = subspace_doubling(&cert).map_err(|e| e.to_string())?;
        ensure(sub.centers == CenterDomain::Subset, || "centers not restricted".into())?;
        ensure(sub.n == cert.n * cert.n && sub.r_min == q(2) * r, || {
            format!("trial {trial}: constants ({}, {}) are not (N^2, 2R)", sub.n, sub.r_min)
        })?;
        ensure(verify_doubling(&sub).valid, || format!("trial {trial}: verifier rejects"))?;
        check_subset_witnesses(&sub).map_err(|e| format!("trial {trial}: {e}"))?;
        worst = worst.max(sub.scales.iter().map(|s| s.max_balls()).max().unwrap_or(0));
    }
    Ok(format!("20 subsets, largest ball count {worst}"))
}

fn expansion_pushforward() -> Outcome {
    let mut lines = Vec::new();
    for k in 0..=3u32 {
        let scale = 1i64 << k;
        let host = line::<Exact>(format!("host{k}"), 31 * scale as usize + 1).into_ref();
        let base = PointSet::range(0, 15);
        let family = MetricFamily::new("base", vec![coarsekit::metric::Member::new(host.clone(), base).unwrap()]);
        let cert = defend(&family, q(1), &Strategy::net_then_grave()).map_err(|e| e.to_string())?;
        let len = host.len();
        let t = SelfMap::from_fn(len, |x| (2 * x < len).then_some(2 * x));
        let pushed = pushforward_expansion(&host, &t, q(2), &cert, k).map_err(|e| e.to_string())?;
        ensure(pushed.r == q(scale), || format!("k={k}: scale {}", pushed.r))?;
        ensure(verify_certificate(&pushed).valid, || format!("k={k}: pushed certificate invalid"))?;
        check_decomposition(&pushed).map_err(|e| format!("k={k}: {e}"))?;
        for (level, part) in cert.members[0].parts() {
            let image = PointSet::new(part.iter().map(|x| x * scale as usize).collect());
            ensure(pushed.members[0].level(level).contains(&image), || {
                format!("k={k}: image of {part:?} missing on level {level}")
            })?;
            ensure(host.diameter(&image) == q(scale) * host.diameter(part), || {
                format!("k={k}: diameter of {part:?} does not scale by {scale}")
            })?;
        }
        lines.push(format!("k={k}: r={}, mesh={}", pushed.r, pushed.mesh()));
    }
    Ok(lines.join("; "))
}

fn gluing_norm() -> Outcome {
    let f = two_intervals::<Exact>();
    let all = f.space.points();
    let report = glue_embeddings(&f.space, &all, &f.weights, &f.xis, f.r, f.epsilon, &[1.0, 10.0])
        .map_err(|e| e.to_string())?;
    let mut worst_norm: f64 = 0.0;
    let mut worst_var: f64 = 0.0;
    let mut eta: BTreeMap<PointId, Vec<f64>> = BTreeMap::new();
    for x in all.iter() {
        let v: Vec<f64> = f
            .xis
            .iter()
            .enumerate()
            .flat_map(|(j, xi)| {
                let s = f.weights.weights[&x][j].sqrt();
                xi.at(x).into_iter().map(move |c| s * c)
            })
            .collect();
        let diff: f64 = v.iter().zip(&report.eta.vectors[&x]).map(|(a, b)| (a - b).abs()).sum();
        ensure(diff < 1e-12, || format!("eta({x}) differs from the recomputation"))?;
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        worst_norm = worst_norm.max((norm - 1.0).abs());
        eta.insert(x, v);
    }
    for x in all.iter() {
        for y in all.iter() {
            if x < y && f.space.dist(x, y) <= f.r {
                let d = eta[&x].iter().zip(&eta[&y]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                worst_var = worst_var.max(d);
            }
        }
    }
    ensure(worst_norm <= 1e-9, || format!("norm error {worst_norm}"))?;
    ensure(worst_var <= f.epsilon, || format!("variation {worst_var} > {}", f.epsilon))?;
    ensure(report.variation_ok, || "library reports a variation failure".into())?;
    Ok(format!("norm error {worst_norm:.1e}, worst close-pair variation {worst_var:.4} <= {}", f.epsilon))
}

fn game_engine() -> Outcome {
    let space = fixture::<Exact>("line100").unwrap().into_ref();
    let mut session = GameSession::start(1, MetricFamily::single(space), q(5), Strategy::net_then_grave(), 16)
        .map_err(|e| e.to_string())?;
    play(&mut session, &Challenger::Constant(q(2))).map_err(|e| e.to_string())?;
    ensure(session.status == GameStatus::DefenderWon, || format!("status {:?}", session.status))?;
    for (i, t) in session.turns.iter().enumerate() {
        check_decomposition(&t.certificate).map_err(|e| format!("turn {i}: {e}"))?;
    }
    let replay = replay_transcript(&session).map_err(|e| e.to_string())?;
    let product: u64 = session.turns.iter().map(|t| t.certificate.n + 1).product();
    ensure(replay.valid, || "composed certificate invalid".into())?;
    check_decomposition(&replay.composed)?;
    ensure(replay.composed.n + 1 == product, || format!("n + 1 = {} != {product}", replay.composed.n + 1))?;
    ensure(replay.composed.r == q(2) && replay.mesh <= q(5), || "composed r or mesh off".into())?;
    let meshes: Vec<String> = session.turns.iter().map(|t| t.mesh.to_string()).collect();
    Ok(format!(
        "won in {} turns, meshes {}, composed n = {}",
        session.turns.len(),
        meshes.join(" -> "),
        replay.composed.n
    ))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("composition_law", composition_law, 10),
        ("cover_to_decomposition", cover_to_decomposition, 30),
        ("oracle_agreement", oracle_agreement, 60),
        ("partition_of_unity_lipschitz", partition_of_unity_lipschitz, 10),
        ("star_cover_pigeonhole", pigeonhole, 5),
        ("doubling_net_multiplicity", doubling_multiplicity, 30),
        ("subspace_doubling_transfer", subspace_transfer, 30),
        ("expansion_pushforward", expansion_pushforward, 5),
        ("gluing_norm_identity", gluing_norm, 5),
        ("game_engine", game_engine, 30),
    ];
    let mut failed = Vec::new();
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(budget);
        match (&outcome, over) {
            (Ok(detail), false) => println!("PASS {name} ({:.2}s): {detail}", elapsed.as_secs_f64()),
            (Ok(detail), true) => {
                println!("FAIL {name} ({:.2}s > {budget}s budget): {detail}", elapsed.as_secs_f64());
                failed.push(name);
            }
            (Err(e), _) => {
                println!("FAIL {name} ({:.2}s): {e}", elapsed.as_secs_f64());
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
