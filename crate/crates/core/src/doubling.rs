//! Large-scale doubling certificates: greedy witnesses that every trace
//! `B_{2r}(x) ∩ Y` is covered by a bounded number of `r`-balls, the transfer
//! to the subspace metric, and the net-ball cover whose multiplicity the
//! doubling constant controls.

use fixedbitset::FixedBitSet;

use crate::covers::Cover;
use crate::decomposition::{
    grave_construct_levels, DecompositionCertificate, DecompositionError, Level,
};
use crate::metric::{max_separated_net, MetricFamily, SpaceRef};
use crate::point_set::{PointId, PointSet};
use crate::scalar::{half, two, Extent, Scalar};

/// Where ball centers may lie.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterDomain {
    /// Any point of the host space.
    Host,
    /// Only points of the certified subset.
    Subset,
}

/// The balls covering one trace `B_{2r}(center) ∩ Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterWitness {
    pub center: PointId,
    pub balls: Vec<PointId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleWitness<S> {
    pub r: S,
    pub witnesses: Vec<CenterWitness>,
}

impl<S: Scalar> ScaleWitness<S> {
    pub fn max_balls(&self) -> usize {
        self.witnesses.iter().map(|w| w.balls.len()).max().unwrap_or(0)
    }

    fn at(&self, center: PointId) -> Option<&CenterWitness> {
        self.witnesses
            .binary_search_by_key(&center, |w| w.center)
            .ok()
            .map(|i| &self.witnesses[i])
    }
}

/// Certified `(N, R)`-doubling of `subset` over a finite scale grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublingCertificate<S> {
    pub space: SpaceRef<S>,
    pub subset: PointSet,
    pub centers: CenterDomain,
    pub n: usize,
    pub r_min: S,
    pub scales: Vec<ScaleWitness<S>>,
}

impl<S: Scalar> DoublingCertificate<S> {
    /// Per-scale witness counts.
    pub fn counts(&self) -> Vec<(S, usize)> {
        self.scales.iter().map(|s| (s.r, s.max_balls())).collect()
    }

    /// Points `x` whose traces must be covered.
    pub fn tested_centers(&self) -> PointSet {
        match self.centers {
            CenterDomain::Host => self.space.points(),
            CenterDomain::Subset => self.subset.clone(),
        }
    }

    fn scale(&self, r: S) -> Option<&ScaleWitness<S>> {
        self.scales.iter().find(|s| s.r.eq_tol(r))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DoublingError {
    #[error("scale {0} is below R")]
    ScaleBelowR(String),
    #[error("R must be positive")]
    NonPositiveR,
    #[error("subset is empty or leaves the space")]
    InvalidSubset,
    #[error("input certificate does not verify: {0}")]
    InvalidInput(String),
    #[error("net-ball cover multiplicity {measured} exceeds N^4 = {bound}")]
    MultiplicityBoundViolated { measured: usize, bound: usize },
    #[error("member {0} has no doubling certificate")]
    MissingCertificate(usize),
    #[error("Lebesgue number {measured} is below lambda = {lambda}")]
    LebesgueTooSmall { measured: String, lambda: String },
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
}

/// `R, 2R, 4R, ...` up to the largest value not above `diameter`; always
/// contains `R`.
pub fn dyadic_grid<S: Scalar>(r_min: S, diameter: S) -> Vec<S> {
    let mut grid = vec![r_min];
    let mut r = r_min * two();
    while r.le_tol(diameter) {
        grid.push(r);
        r = r * two();
    }
    grid
}

/// Greedily certifies doubling of `subset` with host-centered balls at every
/// scale of `grid` and every host point `x`.
///
/// Each step takes the uncovered trace point farthest from `x` and covers it
/// with the candidate ball that covers the most uncovered points, ties going
/// to the lowest center id.
pub fn certify_doubling<S: Scalar>(
    space: &SpaceRef<S>,
    subset: &PointSet,
    r_min: S,
    grid: &[S],
) -> Result<DoublingCertificate<S>, DoublingError> {
    if r_min <= S::zero() {
        return Err(DoublingError::NonPositiveR);
    }
    if subset.is_empty() || space.check_subset(subset).is_err() {
        return Err(DoublingError::InvalidSubset);
    }
    if let Some(r) = grid.iter().find(|r| r.lt_tol(r_min)) {
        return Err(DoublingError::ScaleBelowR(r.to_string()));
    }
    let host = space.points();
    let scales: Vec<ScaleWitness<S>> = grid
        .iter()
        .map(|&r| {
            let balls: Vec<FixedBitSet> = host
                .iter()
                .map(|c| bitset_of(space.len(), &space.open_ball(c, r, subset)))
                .collect();
            ScaleWitness {
                r,
                witnesses: host
                    .iter()
                    .map(|x| CenterWitness {
                        center: x,
                        balls: greedy_cover(space, subset, &balls, x, r),
                    })
                    .collect(),
            }
        })
        .collect();
    let n = scales.iter().map(ScaleWitness::max_balls).max().unwrap_or(0).max(1);
    Ok(DoublingCertificate {
        space: space.clone(),
        subset: subset.clone(),
        centers: CenterDomain::Host,
        n,
        r_min,
        scales,
    })
}

fn bitset_of(len: usize, set: &PointSet) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(len);
    for p in set.iter() {
        b.insert(p);
    }
    b
}

/// `balls[c]` is the trace of the open `r`-ball around host point `c`.
fn greedy_cover<S: Scalar>(
    space: &SpaceRef<S>,
    subset: &PointSet,
    balls: &[FixedBitSet],
    x: PointId,
    r: S,
) -> Vec<PointId> {
    let mut uncovered = bitset_of(space.len(), &space.open_ball(x, two::<S>() * r, subset));
    let mut chosen = Vec::new();
    while let Some(far) = uncovered.ones().max_by(|&a, &b| {
        space
            .dist(x, a)
            .partial_cmp(&space.dist(x, b))
            .expect("distances are comparable")
            .then(b.cmp(&a))
    }) {
        let mut best: Option<(usize, PointId)> = None;
        for (c, ball) in balls.iter().enumerate() {
            if !ball.contains(far) {
                continue;
            }
            let gain = ball.intersection_count(&uncovered);
            if best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, c));
            }
        }
        let (_, c) = best.expect("the farthest point covers itself");
        uncovered.difference_with(&balls[c]);
        chosen.push(c);
    }
    chosen
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingReport {
    pub valid: bool,
    pub violation: Option<String>,
}

/// Exhaustive check: for every tested scale and center, at most `N` balls,
/// centers in the allowed domain, and the trace `B_{2r}(x) ∩ Y` inside their
/// union.
pub fn verify_doubling<S: Scalar>(cert: &DoublingCertificate<S>) -> DoublingReport {
    let fail = |v: String| DoublingReport {
        valid: false,
        violation: Some(v),
    };
    let space = &cert.space;
    let allowed = match cert.centers {
        CenterDomain::Host => space.points(),
        CenterDomain::Subset => cert.subset.clone(),
    };
    for scale in &cert.scales {
        if scale.r.lt_tol(cert.r_min) {
            return fail(format!("scale {} is below R = {}", scale.r, cert.r_min));
        }
        for x in cert.tested_centers().iter() {
            let Some(w) = scale.at(x) else {
                return fail(format!("no witness for center {x} at scale {}", scale.r));
            };
            if w.balls.len() > cert.n {
                return fail(format!(
                    "center {x} at scale {} uses {} balls, more than N = {}",
                    scale.r,
                    w.balls.len(),
                    cert.n
                ));
            }
            if let Some(c) = w.balls.iter().find(|c| !allowed.contains(**c)) {
                return fail(format!("ball center {c} is outside the allowed centers"));
            }
            let trace = space.open_ball(x, two::<S>() * scale.r, &cert.subset);
            let uncovered = trace
                .iter()
                .find(|&y| !w.balls.iter().any(|&c| space.dist(c, y).lt_tol(scale.r)));
            if let Some(y) = uncovered {
                return fail(format!(
                    "point {y} of the trace around {x} at scale {} is uncovered",
                    scale.r
                ));
            }
        }
    }
    DoublingReport {
        valid: true,
        violation: None,
    }
}

/// Turns an `(N, R)` host-centered certificate into an `(N^2, 2R)` one with
/// centers in the subset.
///
/// For output scale `r` (needing input scales `r` and `r/2`): the `N` balls
/// `B_r(x_i)` covering the trace at `x` are each covered by `N` balls
/// `B_{r/2}(y_ij)`; those meeting `Y` are recentered at their lowest-id point
/// `u_ij` of `Y`, and `B_{r/2}(y_ij) ⊂ B_r(u_ij)`.
pub fn subspace_doubling<S: Scalar>(
    cert: &DoublingCertificate<S>,
) -> Result<DoublingCertificate<S>, DoublingError> {
    let report = verify_doubling(cert);
    if !report.valid {
        return Err(DoublingError::InvalidInput(report.violation.unwrap_or_default()));
    }
    if cert.centers != CenterDomain::Host {
        return Err(DoublingError::InvalidInput(
            "input centers must range over the host".into(),
        ));
    }
    let space = &cert.space;
    let mut scales = Vec::new();
    for outer in &cert.scales {
        let Some(inner) = cert.scale(outer.r * half()) else {
            continue;
        };
        let witnesses = cert
            .subset
            .iter()
            .map(|x| {
                let first = outer.at(x).expect("verified certificate covers every host point");
                let mut centers: Vec<PointId> = Vec::new();
                for &xi in &first.balls {
                    let second = inner.at(xi).expect("verified certificate covers every host point");
                    for &y in &second.balls {
                        if let Some(u) = space.open_ball(y, inner.r, &cert.subset).first() {
                            centers.push(u);
                        }
                    }
                }
                centers.sort_unstable();
                centers.dedup();
                CenterWitness {
                    center: x,
                    balls: centers,
                }
            })
            .collect();
        scales.push(ScaleWitness {
            r: outer.r,
            witnesses,
        });
    }
    Ok(DoublingCertificate {
        space: space.clone(),
        subset: cert.subset.clone(),
        centers: CenterDomain::Subset,
        n: cert.n * cert.n,
        r_min: cert.r_min * two(),
        scales,
    })
}

/// Certifies doubling of a union of subsets and compares with `bound`.
pub fn check_union_doubling<S: Scalar>(
    space: &SpaceRef<S>,
    parts: &[PointSet],
    r_min: S,
    grid: &[S],
    bound: usize,
) -> Result<(DoublingCertificate<S>, bool), DoublingError> {
    let union = parts.iter().fold(PointSet::default(), |a, p| a.union(p));
    let cert = certify_doubling(space, &union, r_min, grid)?;
    let within = cert.n <= bound;
    Ok((cert, within))
}

/// Net-ball cover of one member at scale `r`: greedy `2r`-separated net and
/// closed `4r`-balls around it.
#[derive(Debug, Clone)]
pub struct MemberCoverReport<S> {
    pub net: PointSet,
    pub cover: Cover<S>,
    pub multiplicity: usize,
    pub lebesgue: Extent<S>,
}

#[derive(Debug, Clone)]
pub struct AsdimCoverReport<S> {
    pub r: S,
    pub bound: usize,
    pub members: Vec<MemberCoverReport<S>>,
    pub multiplicity: usize,
    /// Decomposition at scale `lambda / multiplicity` with
    /// `multiplicity - 1` as the level bound.
    pub certificate: DecompositionCertificate<S>,
}

/// Builds the net-ball covers at `r = max(lambda, R)` for every member,
/// checks multiplicity `<= N^4` and Lebesgue number `>= lambda`, and feeds
/// them to the cover-to-decomposition construction.
pub fn doubling_to_asdim_cover<S: Scalar>(
    family: &MetricFamily<S>,
    certs: &[DoublingCertificate<S>],
    lambda: S,
) -> Result<AsdimCoverReport<S>, DoublingError> {
    if lambda <= S::zero() {
        return Err(DoublingError::NonPositiveR);
    }
    if certs.len() < family.len() {
        return Err(DoublingError::MissingCertificate(certs.len()));
    }
    let n_max = certs.iter().map(|c| c.n).max().unwrap_or(1);
    let r_big = certs.iter().map(|c| c.r_min).fold(S::zero(), S::max_s);
    let r = lambda.max_s(r_big);
    let bound = n_max.pow(4);

    let mut members = Vec::with_capacity(family.len());
    for m in family.members() {
        let net = max_separated_net(&m.space, &m.points, two::<S>() * r);
        let radius = two::<S>() * two::<S>() * r;
        let elements = net
            .iter()
            .map(|z| m.space.closed_ball(z, radius, &m.points))
            .collect();
        let cover = Cover::on(m.space.clone(), m.points.clone(), elements)
            .expect("balls around a maximal net cover the member");
        let multiplicity = cover.multiplicity();
        if multiplicity > bound {
            return Err(DoublingError::MultiplicityBoundViolated {
                measured: multiplicity,
                bound,
            });
        }
        let lebesgue = cover.lebesgue_number();
        if !lebesgue.at_least(lambda) {
            return Err(DoublingError::LebesgueTooSmall {
                measured: lebesgue.finite().map(|v| v.to_string()).unwrap_or_default(),
                lambda: lambda.to_string(),
            });
        }
        members.push(MemberCoverReport {
            net,
            multiplicity,
            lebesgue,
            cover,
        });
    }
    let multiplicity = members.iter().map(|m| m.multiplicity).max().unwrap_or(1);
    let n = (multiplicity - 1) as Level;
    let scale = lambda / S::from_int(multiplicity as i64);
    let levels = members
        .iter()
        .map(|m| grave_construct_levels(&m.cover, scale, n))
        .collect::<Result<Vec<_>, _>>()?;
    let certificate = DecompositionCertificate::new(family.clone(), scale, n, levels);
    Ok(AsdimCoverReport {
        r,
        bound,
        members,
        multiplicity,
        certificate,
    })
}

/// Number of net points in the closed ball of radius `8r` around `x`.
pub fn net_points_near<S: Scalar>(
    space: &SpaceRef<S>,
    net: &PointSet,
    x: PointId,
    r: S,
) -> usize {
    let eight = two::<S>() * two::<S>() * two::<S>();
    space.closed_ball(x, eight * r, net).len()
}
