use std::collections::BTreeMap;

use crate::metric::family::MetricFamily;
use crate::point_set::PointId;
use crate::scalar::Scalar;

/// Nondecreasing function on `[0, inf)` given by sorted knots, linearly
/// interpolated and extended past the last knot with the last slope.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear<S> {
    knots: Vec<(S, S)>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MapError {
    #[error("control function needs at least one knot")]
    NoKnots,
    #[error("control function knots must have strictly increasing arguments starting at >= 0")]
    UnsortedKnots,
    #[error("control function is decreasing near t = {0}")]
    Decreasing(String),
    #[error("lower bound exceeds upper bound at t = {0}")]
    LowerAboveUpper(String),
    #[error("source member {0} is not the domain of any map")]
    UncoveredMember(usize),
    #[error("member index {0} out of range")]
    MemberOutOfRange(usize),
    #[error("point {point} of source member {member} has no image")]
    UnmappedPoint { member: usize, point: PointId },
    #[error("image {image} of point {point} is outside target member {target}")]
    ImageOutsideTarget {
        point: PointId,
        image: PointId,
        target: usize,
    },
}

impl<S: Scalar> PiecewiseLinear<S> {
    pub fn new(knots: Vec<(S, S)>) -> Result<Self, MapError> {
        if knots.is_empty() {
            return Err(MapError::NoKnots);
        }
        if knots[0].0 < S::zero() || knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(MapError::UnsortedKnots);
        }
        if let Some(w) = knots.windows(2).find(|w| w[1].1 < w[0].1) {
            return Err(MapError::Decreasing(w[1].0.to_string()));
        }
        Ok(PiecewiseLinear { knots })
    }

    /// `t -> slope * t`.
    pub fn linear(slope: S) -> Self {
        PiecewiseLinear {
            knots: vec![(S::zero(), S::zero()), (S::one(), slope)],
        }
    }

    pub fn knots(&self) -> &[(S, S)] {
        &self.knots
    }

    pub fn eval(&self, t: S) -> S {
        let k = &self.knots;
        if k.len() == 1 {
            return k[0].1;
        }
        let seg = match k.iter().position(|(x, _)| t <= *x) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => k.len() - 2,
        };
        let (x0, y0) = k[seg];
        let (x1, y1) = k[seg + 1];
        let v = y0 + (y1 - y0) * (t - x0) / (x1 - x0);
        // Below the first knot the function is held constant.
        if t < x0 {
            y0
        } else {
            v
        }
    }
}

/// One point function between a source member and a target member.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberMap {
    pub source: usize,
    pub target: usize,
    pub image: BTreeMap<PointId, PointId>,
}

/// A map of families with coarse control functions `delta <= rho`.
#[derive(Debug, Clone)]
pub struct FamilyMap<S> {
    pub source: MetricFamily<S>,
    pub target: MetricFamily<S>,
    pub maps: Vec<MemberMap>,
    pub delta: PiecewiseLinear<S>,
    pub rho: PiecewiseLinear<S>,
}

impl<S: Scalar> FamilyMap<S> {
    pub fn new(
        source: MetricFamily<S>,
        target: MetricFamily<S>,
        maps: Vec<MemberMap>,
        delta: PiecewiseLinear<S>,
        rho: PiecewiseLinear<S>,
    ) -> Result<Self, MapError> {
        for m in &maps {
            let src = source
                .members()
                .get(m.source)
                .ok_or(MapError::MemberOutOfRange(m.source))?;
            let tgt = target
                .members()
                .get(m.target)
                .ok_or(MapError::MemberOutOfRange(m.target))?;
            for p in src.points.iter() {
                let img = *m.image.get(&p).ok_or(MapError::UnmappedPoint {
                    member: m.source,
                    point: p,
                })?;
                if !tgt.points.contains(img) {
                    return Err(MapError::ImageOutsideTarget {
                        point: p,
                        image: img,
                        target: m.target,
                    });
                }
            }
        }
        if let Some(i) = (0..source.len()).find(|i| maps.iter().all(|m| m.source != *i)) {
            return Err(MapError::UncoveredMember(i));
        }
        let mut grid: Vec<S> = delta
            .knots()
            .iter()
            .chain(rho.knots())
            .map(|k| k.0)
            .collect();
        grid.sort_by(|a, b| a.partial_cmp(b).expect("knots are comparable"));
        if let Some(t) = grid.iter().find(|t| delta.eval(**t).gt_tol(rho.eval(**t))) {
            return Err(MapError::LowerAboveUpper(t.to_string()));
        }
        Ok(FamilyMap {
            source,
            target,
            maps,
            delta,
            rho,
        })
    }

    /// Identity maps of a family onto itself.
    pub fn identity(family: MetricFamily<S>, delta: PiecewiseLinear<S>, rho: PiecewiseLinear<S>) -> Self {
        let maps = family
            .members()
            .iter()
            .enumerate()
            .map(|(i, m)| MemberMap {
                source: i,
                target: i,
                image: m.points.iter().map(|p| (p, p)).collect(),
            })
            .collect();
        FamilyMap {
            source: family.clone(),
            target: family,
            maps,
            delta,
            rho,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairViolation<S> {
    pub map_index: usize,
    pub x: PointId,
    pub y: PointId,
    pub source_dist: S,
    pub image_dist: S,
    pub bound: Bound,
    pub excess: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMapReport<S> {
    pub passed: bool,
    pub worst: Option<PairViolation<S>>,
    /// Tightest nondecreasing lower control: at each observed source distance
    /// `t`, the least image distance over pairs at distance `>= t`.
    pub delta_hat: Vec<(S, S)>,
    /// Tightest nondecreasing upper control: at each observed `t`, the largest
    /// image distance over pairs at distance `<= t`.
    pub rho_hat: Vec<(S, S)>,
    /// Uniform closeness constant of the composites with a supplied inverse.
    pub closeness: Option<S>,
}

/// Checks `delta(d(x,y)) <= d(f x, f y) <= rho(d(x,y))` on every pair of
/// every member map, and optionally the closeness of `g . f` and `f . g` to
/// the identities for a supplied inverse family map.
pub fn verify_family_map<S: Scalar>(
    map: &FamilyMap<S>,
    inverse: Option<&FamilyMap<S>>,
) -> FamilyMapReport<S> {
    let mut worst: Option<PairViolation<S>> = None;
    let mut samples: Vec<(S, S)> = Vec::new();
    for (mi, m) in map.maps.iter().enumerate() {
        let src = &map.source.members()[m.source];
        let tgt_space = &map.target.members()[m.target].space;
        let pts = src.points.as_slice();
        for (i, &x) in pts.iter().enumerate() {
            for &y in &pts[i + 1..] {
                let d = src.space.dist(x, y);
                let e = tgt_space.dist(m.image[&x], m.image[&y]);
                samples.push((d, e));
                let lo = map.delta.eval(d);
                let hi = map.rho.eval(d);
                let candidate = if lo.gt_tol(e) {
                    Some((Bound::Lower, lo - e))
                } else if e.gt_tol(hi) {
                    Some((Bound::Upper, e - hi))
                } else {
                    None
                };
                if let Some((bound, excess)) = candidate {
                    if worst.as_ref().is_none_or(|w| excess > w.excess) {
                        worst = Some(PairViolation {
                            map_index: mi,
                            x,
                            y,
                            source_dist: d,
                            image_dist: e,
                            bound,
                            excess,
                        });
                    }
                }
            }
        }
    }
    let (delta_hat, rho_hat) = empirical_controls(&mut samples);
    let closeness = inverse.map(|g| closeness_constant(map, g));
    FamilyMapReport {
        passed: worst.is_none(),
        worst,
        delta_hat,
        rho_hat,
        closeness,
    }
}

fn empirical_controls<S: Scalar>(samples: &mut [(S, S)]) -> (Vec<(S, S)>, Vec<(S, S)>) {
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances"));
    let mut rho_hat: Vec<(S, S)> = Vec::new();
    let mut running = S::zero();
    for &(d, e) in samples.iter() {
        running = running.max_s(e);
        match rho_hat.last_mut() {
            Some(last) if last.0 == d => last.1 = running,
            _ => rho_hat.push((d, running)),
        }
    }
    let mut delta_hat: Vec<(S, S)> = Vec::new();
    let mut running: Option<S> = None;
    for &(d, e) in samples.iter().rev() {
        running = Some(running.map_or(e, |r| r.min_s(e)));
        let v = running.expect("just set");
        match delta_hat.last_mut() {
            Some(last) if last.0 == d => last.1 = v,
            _ => delta_hat.push((d, v)),
        }
    }
    delta_hat.reverse();
    (delta_hat, rho_hat)
}

fn closeness_constant<S: Scalar>(f: &FamilyMap<S>, g: &FamilyMap<S>) -> S {
    let mut worst = S::zero();
    for fm in &f.maps {
        // g must send f's target member back into f's source member.
        let Some(gm) = g
            .maps
            .iter()
            .find(|gm| gm.source == fm.target && gm.target == fm.source)
        else {
            continue;
        };
        let x_space = &f.source.members()[fm.source].space;
        let y_space = &f.target.members()[fm.target].space;
        for (&x, &fx) in &fm.image {
            if let Some(&gfx) = gm.image.get(&fx) {
                worst = worst.max_s(x_space.dist(x, gfx));
            }
        }
        for (&y, &gy) in &gm.image {
            if let Some(&fgy) = fm.image.get(&gy) {
                worst = worst.max_s(y_space.dist(y, fgy));
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::family::{Member, MetricFamily};
    use crate::metric::space::{grid, line};
    use crate::point_set::PointSet;
    use crate::Exact;

    fn q(v: i64) -> Exact {
        Exact::from_integer(v)
    }

    #[test]
    fn piecewise_eval() {
        let f = PiecewiseLinear::new(vec![(q(0), q(0)), (q(2), q(4)), (q(4), q(5))]).unwrap();
        assert_eq!(f.eval(q(1)), q(2));
        assert_eq!(f.eval(q(3)), Exact::new(9, 2));
        assert_eq!(f.eval(q(6)), q(6));
        assert!(PiecewiseLinear::new(vec![(q(0), q(2)), (q(1), q(1))]).is_err());
        assert!(PiecewiseLinear::<Exact>::new(vec![]).is_err());
    }

    #[test]
    fn identity_passes() {
        let l = line::<Exact>("Z", 8).into_ref();
        let fam = MetricFamily::single(l);
        let id = FamilyMap::identity(
            fam,
            PiecewiseLinear::linear(q(1)),
            PiecewiseLinear::linear(q(1)),
        );
        let inv = id.clone();
        let report = verify_family_map(&id, Some(&inv));
        assert!(report.passed);
        assert_eq!(report.closeness, Some(q(0)));
    }

    #[test]
    fn dilation_passes() {
        let small = line::<Exact>("Z6", 6).into_ref();
        let big = line::<Exact>("Z11", 11).into_ref();
        let map = FamilyMap::new(
            MetricFamily::single(small),
            MetricFamily::single(big),
            vec![MemberMap {
                source: 0,
                target: 0,
                image: (0..6).map(|x| (x, 2 * x)).collect(),
            }],
            PiecewiseLinear::linear(q(2)),
            PiecewiseLinear::linear(q(2)),
        )
        .unwrap();
        let report = verify_family_map(&map, None);
        assert!(report.passed);
        assert_eq!(report.rho_hat.last(), Some(&(q(5), q(10))));
    }

    #[test]
    fn projection_fails_with_witness() {
        let g = grid::<Exact>("G", &[5, 5]).into_ref();
        let l = line::<Exact>("L", 5).into_ref();
        let coords = g.coords().unwrap().to_vec();
        let image = (0..25)
            .map(|p| (p, coords[p][0].to_integer() as usize))
            .collect();
        let map = FamilyMap::new(
            MetricFamily::single(g),
            MetricFamily::new("L", vec![Member::new(l, PointSet::range(0, 4)).unwrap()]),
            vec![MemberMap {
                source: 0,
                target: 0,
                image,
            }],
            PiecewiseLinear::linear(q(1)),
            PiecewiseLinear::linear(q(1)),
        )
        .unwrap();
        let report = verify_family_map(&map, None);
        assert!(!report.passed);
        let w = report.worst.unwrap();
        // Points 0 = (0,0) and 4 = (0,4).
        assert_eq!((w.x, w.y), (0, 4));
        assert_eq!(w.bound, Bound::Lower);
    }

    #[test]
    fn constructor_rejects_partial_maps() {
        let l = line::<Exact>("Z", 3).into_ref();
        let fam = MetricFamily::single(l);
        let err = FamilyMap::new(
            fam.clone(),
            fam,
            vec![MemberMap {
                source: 0,
                target: 0,
                image: [(0, 0), (1, 1)].into_iter().collect(),
            }],
            PiecewiseLinear::linear(q(1)),
            PiecewiseLinear::linear(q(1)),
        )
        .unwrap_err();
        assert_eq!(err, MapError::UnmappedPoint { member: 0, point: 2 });
    }
}
