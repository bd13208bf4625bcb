use crate::decomposition::certificate::{DecompositionCertificate, MemberLevels};
use crate::decomposition::DecompositionError;
use crate::metric::{verify_family_map, FamilyMap, Member, MetricFamily, SpaceRef};
use crate::point_set::{PointId, PointSet};
use crate::scalar::Scalar;

/// Pulls a decomposition of `map.target` back to `map.source` at scale `r`.
///
/// Needs `cert.r >= rho(r)`: two source points within `r` have images
/// within `rho(r)`, so images in distinct same-level parts force the
/// preimages more than `r` apart. Each source member uses the first member
/// map that starts at it.
pub fn pullback_certificate<S: Scalar>(
    map: &FamilyMap<S>,
    cert: &DecompositionCertificate<S>,
    r: S,
) -> Result<DecompositionCertificate<S>, DecompositionError> {
    if r <= S::zero() {
        return Err(DecompositionError::NonPositiveScale);
    }
    if !cert.source.same_members(&map.target) {
        return Err(DecompositionError::SourceMismatch(format!(
            "certificate decomposes '{}', map lands in '{}'",
            cert.source.id, map.target.id
        )));
    }
    let needed = map.rho.eval(r);
    if cert.r.lt_tol(needed) {
        return Err(DecompositionError::ScaleTooSmall {
            cert_r: cert.r.to_string(),
            needed: needed.to_string(),
        });
    }
    let report = verify_family_map(map, None);
    if !report.passed {
        let why = report
            .worst
            .map(|w| format!("pair ({}, {}) breaks the {:?} bound", w.x, w.y, w.bound))
            .unwrap_or_default();
        return Err(DecompositionError::MapNotCoarse(why));
    }

    let mut members = Vec::with_capacity(map.source.len());
    for (si, src) in map.source.members().iter().enumerate() {
        let m = map.maps.iter().find(|m| m.source == si).ok_or(
            DecompositionError::UnmappedPoint {
                member: si,
                point: src.points.first().unwrap_or(0),
            },
        )?;
        let target = &map.target.members()[m.target];
        let ci = cert
            .source
            .position(target)
            .expect("same member sets were checked above");
        let mut out = MemberLevels::new();
        for (level, part) in cert.members[ci].parts() {
            let mut pre = Vec::new();
            for p in src.points.iter() {
                let img = *m
                    .image
                    .get(&p)
                    .ok_or(DecompositionError::UnmappedPoint { member: si, point: p })?;
                if part.contains(img) {
                    pre.push(p);
                }
            }
            out.push(level, PointSet::new(pre));
        }
        members.push(out);
    }
    Ok(DecompositionCertificate::new(
        map.source.clone(),
        r,
        cert.n,
        members,
    ))
}

/// A partial self-map of a space, `None` where undefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfMap {
    image: Vec<Option<PointId>>,
}

impl SelfMap {
    pub fn new(image: Vec<Option<PointId>>) -> Self {
        SelfMap { image }
    }

    /// Map given by `f` on `0..len`.
    pub fn from_fn(len: usize, f: impl Fn(PointId) -> Option<PointId>) -> Self {
        SelfMap::new((0..len).map(f).collect())
    }

    pub fn apply(&self, p: PointId) -> Option<PointId> {
        self.image.get(p).copied().flatten()
    }

    pub fn iterate(&self, p: PointId, k: u32) -> Option<PointId> {
        (0..k).try_fold(p, |x, _| self.apply(x))
    }

    pub fn image(&self) -> &[Option<PointId>] {
        &self.image
    }
}

/// Pushes a certificate on subsets of `space` forward along `T^k`, where
/// `T` multiplies every distance by `lambda > 1`. Parts become their `T^k`
/// images and the scale becomes `lambda^k r`.
pub fn pushforward_expansion<S: Scalar>(
    space: &SpaceRef<S>,
    t: &SelfMap,
    lambda: S,
    cert: &DecompositionCertificate<S>,
    k: u32,
) -> Result<DecompositionCertificate<S>, DecompositionError> {
    if lambda.le_tol(S::one()) {
        return Err(DecompositionError::InvalidFactor);
    }
    if let Some(m) = cert.source.members().iter().find(|m| m.space.id() != space.id()) {
        return Err(DecompositionError::SourceMismatch(format!(
            "member lives in '{}', not in the host '{}'",
            m.space.id(),
            space.id()
        )));
    }
    check_expansion(space, t, lambda)?;
    if k == 0 {
        return Ok(cert.clone());
    }
    let push = |set: &PointSet| -> Result<PointSet, DecompositionError> {
        set.iter()
            .map(|p| {
                t.iterate(p, k)
                    .filter(|&q| q < space.len())
                    .ok_or(DecompositionError::ImageEscapesSpace { point: p })
            })
            .collect()
    };
    let mut members = Vec::with_capacity(cert.members.len());
    let mut images = Vec::with_capacity(cert.members.len());
    for (src, levels) in cert.source.members().iter().zip(&cert.members) {
        images.push(Member {
            space: space.clone(),
            points: push(&src.points)?,
        });
        let mut out = MemberLevels::new();
        for (level, part) in levels.parts() {
            out.push(level, push(part)?);
        }
        members.push(out);
    }
    let family = MetricFamily::new(format!("T^{k}({})", cert.source.id), images);
    Ok(DecompositionCertificate::new(
        family,
        lambda.powu(k) * cert.r,
        cert.n,
        members,
    ))
}

fn check_expansion<S: Scalar>(
    space: &SpaceRef<S>,
    t: &SelfMap,
    lambda: S,
) -> Result<(), DecompositionError> {
    let defined: Vec<(PointId, PointId)> = (0..space.len())
        .filter_map(|p| t.apply(p).map(|q| (p, q)))
        .collect();
    if let Some(&(p, _)) = defined.iter().find(|(_, q)| *q >= space.len()) {
        return Err(DecompositionError::ImageEscapesSpace { point: p });
    }
    let mut worst: Option<(S, PointId, PointId)> = None;
    for (i, &(x, tx)) in defined.iter().enumerate() {
        for &(y, ty) in &defined[i + 1..] {
            let want = lambda * space.dist(x, y);
            let got = space.dist(tx, ty);
            if !got.eq_tol(want) {
                let err = (got - want).abs();
                if worst.is_none_or(|w| err > w.0) {
                    worst = Some((err, x, y));
                }
            }
        }
    }
    match worst {
        Some((_, x, y)) => Err(DecompositionError::NotAnExpansion { x, y }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::verify_certificate;
    use crate::metric::{line, MemberMap, PiecewiseLinear};
    use crate::Exact;

    fn q(v: i64) -> Exact {
        Exact::from_integer(v)
    }

    fn alternating(space: SpaceRef<Exact>, points: PointSet, block: usize, r: Exact) -> DecompositionCertificate<Exact> {
        let pts = points.as_slice().to_vec();
        let mut levels = MemberLevels::new();
        for (b, chunk) in pts.chunks(block).enumerate() {
            levels.push((b % 2) as u64, PointSet::new(chunk.to_vec()));
        }
        let fam = MetricFamily::new("X", vec![Member::new(space, points).unwrap()]);
        DecompositionCertificate::new(fam, r, 1, vec![levels])
    }

    #[test]
    fn identity_pullback_is_unchanged() {
        let l = line::<Exact>("Z", 12).into_ref();
        let cert = alternating(l.clone(), l.points(), 3, q(3));
        assert!(verify_certificate(&cert).valid);
        let id = FamilyMap::identity(
            cert.source.clone(),
            PiecewiseLinear::linear(q(1)),
            PiecewiseLinear::linear(q(1)),
        );
        let back = pullback_certificate(&id, &cert, q(3)).unwrap();
        assert!(back.same_decomposition(&cert));
        assert!(matches!(
            pullback_certificate(&id, &cert, q(4)),
            Err(DecompositionError::ScaleTooSmall { .. })
        ));
    }

    #[test]
    fn dilation_pullback_halves_the_scale() {
        let small = line::<Exact>("A", 6).into_ref();
        let big = line::<Exact>("B", 11).into_ref();
        let evens = PointSet::new((0..=10).step_by(2).collect());
        let cert = alternating(big.clone(), evens.clone(), 2, q(4));
        assert!(verify_certificate(&cert).valid);
        let map = FamilyMap::new(
            MetricFamily::single(small.clone()),
            cert.source.clone(),
            vec![MemberMap {
                source: 0,
                target: 0,
                image: (0..6).map(|x| (x, 2 * x)).collect(),
            }],
            PiecewiseLinear::linear(q(2)),
            PiecewiseLinear::linear(q(2)),
        )
        .unwrap();
        let back = pullback_certificate(&map, &cert, q(2)).unwrap();
        assert_eq!(back.r, q(2));
        assert!(verify_certificate(&back).valid);
    }

    #[test]
    fn collapsing_map_keeps_shared_images_together() {
        let src = line::<Exact>("A", 4).into_ref();
        let tgt = line::<Exact>("B", 2).into_ref();
        let mut levels = MemberLevels::new();
        levels.push(0, PointSet::singleton(0));
        levels.push(1, PointSet::singleton(1));
        let cert = DecompositionCertificate::new(MetricFamily::single(tgt), q(1), 1, vec![levels]);
        let map = FamilyMap::new(
            MetricFamily::single(src),
            cert.source.clone(),
            vec![MemberMap {
                source: 0,
                target: 0,
                image: [(0, 0), (1, 0), (2, 1), (3, 1)].into_iter().collect(),
            }],
            PiecewiseLinear::linear(q(0)),
            PiecewiseLinear::linear(q(1)),
        )
        .unwrap();
        let back = pullback_certificate(&map, &cert, q(1)).unwrap();
        assert_eq!(back.members[0].level(0), &[PointSet::range(0, 1)]);
        assert!(verify_certificate(&back).valid);
    }

    fn doubling(len: usize) -> SelfMap {
        SelfMap::from_fn(len, |x| (2 * x < len).then_some(2 * x))
    }

    #[test]
    fn pushforward_doubles_the_scale() {
        let host = line::<Exact>("H", 32).into_ref();
        let cert = alternating(host.clone(), PointSet::range(0, 15), 2, q(1));
        assert!(verify_certificate(&cert).valid);
        let t = doubling(32);
        let same = pushforward_expansion(&host, &t, q(2), &cert, 0).unwrap();
        assert!(same.same_decomposition(&cert));
        let pushed = pushforward_expansion(&host, &t, q(2), &cert, 1).unwrap();
        assert_eq!(pushed.r, q(2));
        assert_eq!(
            pushed.source.members()[0].points,
            PointSet::new((0..=30).step_by(2).collect())
        );
        assert!(verify_certificate(&pushed).valid);
        assert!(matches!(
            pushforward_expansion(&host, &t, q(2), &cert, 2),
            Err(DecompositionError::ImageEscapesSpace { .. })
        ));
    }

    #[test]
    fn non_expansions_are_rejected() {
        let host = line::<Exact>("H", 8).into_ref();
        let cert = DecompositionCertificate::identity(MetricFamily::single(host.clone()), q(1));
        let shift = SelfMap::from_fn(8, |x| (x + 1 < 8).then_some(x + 1));
        assert!(matches!(
            pushforward_expansion(&host, &shift, q(2), &cert, 1),
            Err(DecompositionError::NotAnExpansion { .. })
        ));
        assert_eq!(
            pushforward_expansion(&host, &shift, q(1), &cert, 1).unwrap_err(),
            DecompositionError::InvalidFactor
        );
    }
}
