//! Defending a point against early removal.
//!
//! A set `S` defends `p` for `m` steps when `p` cannot be peeled off within
//! the first `m` removals from `S ∪ {p}`. Equivalently every open halfspace
//! bounded by a hyperplane through `p` holds at least `m` points of `S`, so
//! the open-halfspace depth of `p` is at least `m`. The smallest such sets in
//! `R^d` have `d + 2m - 1` points.

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{self, require_general_position, Point, PointSet};
use crate::lp;
use crate::peeling::{defends_by_peeling, PeelConfig, PeelGraph};
use crate::random::{random_general_position, rng_for};
use crate::scalar::{self, dot, Scalar};

pub const DEFAULT_ORACLE_LIMIT: usize = 12;
const GALE_PERTURBATION_BUDGET: u64 = 64;
const MAX_RADIUS_EXPONENT: u32 = 96;

/// Depth of a point together with a direction attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthReport {
    pub depth: usize,
    /// Nonzero `a` with exactly `depth` points satisfying `a·(s - p) > 0`.
    pub witness: Point,
}

impl DepthReport {
    pub fn verify(&self, s: &PointSet, p: &Point) -> bool {
        !self.witness.is_origin() && open_count(&self.witness.0, s.points(), p) == self.depth
    }
}

fn open_count(a: &[Scalar], points: &[Point], p: &Point) -> usize {
    points.iter().filter(|s| dot(a, &scalar::sub(&s.0, &p.0)).is_positive()).count()
}

fn union_checked(s: &PointSet, p: &Point) -> Result<()> {
    if p.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: p.dim() });
    }
    let mut all = s.points().to_vec();
    all.push(p.clone());
    require_general_position(&all, s.dim())
}

/// Minimum over nonzero directions `a` of `|{s : a·(s - p) > 0}|`.
///
/// The count can only drop when `a` moves onto a hyperplane `a·(s - p) = 0`,
/// so the minimum is attained at a normal of a hyperplane through `p` and
/// `d - 1` points of `S`; those are enumerated in both orientations.
pub fn open_halfspace_depth(s: &PointSet, p: &Point) -> Result<DepthReport> {
    union_checked(s, p)?;
    let dim = s.dim();
    if dim == 1 {
        let x = &p.0[0];
        let left = s.points().iter().filter(|q| q.0[0] < *x).count();
        let right = s.len() - left;
        return Ok(if left <= right {
            DepthReport { depth: left, witness: Point::from_ints(&[-1]) }
        } else {
            DepthReport { depth: right, witness: Point::from_ints(&[1]) }
        });
    }
    let vecs: Vec<Vec<Scalar>> = s.points().iter().map(|q| scalar::sub(&q.0, &p.0)).collect();
    if vecs.len() < dim - 1 {
        let a = geom::nullspace_vector(&vecs, dim).expect("fewer vectors than dimensions");
        return Ok(DepthReport { depth: 0, witness: Point(a) });
    }
    let mut best: Option<(usize, Vec<Scalar>)> = None;
    for subset in (0..vecs.len()).combinations(dim - 1) {
        let rows: Vec<Vec<Scalar>> = subset.iter().map(|&i| vecs[i].clone()).collect();
        let a = geom::nullspace_vector(&rows, dim).expect("at most d-1 rows");
        let (mut pos, mut neg) = (0, 0);
        for v in &vecs {
            let t = dot(&a, v);
            if t.is_positive() {
                pos += 1;
            } else if t.is_negative() {
                neg += 1;
            }
        }
        let (count, dir) = if pos <= neg { (pos, a) } else { (neg, a.iter().map(|x| -x).collect()) };
        if best.as_ref().is_none_or(|(b, _)| count < *b) {
            best = Some((count, dir));
        }
    }
    let (depth, a) = best.expect("at least one candidate hyperplane");
    Ok(DepthReport { depth, witness: Point(a) })
}

/// Depth computed by brute force: the smallest `k` for which some `k`-subset
/// can be put strictly on the positive side of a hyperplane through `p` with
/// every other point weakly on the negative side, each case decided by an
/// exact linear program.
pub fn depth_oracle(s: &PointSet, p: &Point, limit: usize) -> Result<usize> {
    if s.len() > limit {
        return Err(Error::TooLarge { size: s.len(), limit });
    }
    union_checked(s, p)?;
    let dim = s.dim();
    let vecs: Vec<Vec<Scalar>> = s.points().iter().map(|q| scalar::sub(&q.0, &p.0)).collect();
    let refs: Vec<&Point> = s.points().iter().collect();
    if !geom::strictly_inside(p, &refs) {
        return Ok(0);
    }
    let n = vecs.len();
    for k in 1..=n {
        for positive in (0..n).combinations(k) {
            if separable(&vecs, &positive, dim) {
                return Ok(k);
            }
        }
    }
    Ok(n)
}

/// Is there `a` with `a·v >= 1` on `positive` and `a·v <= 0` elsewhere?
/// Variables are `a⁺, a⁻` and one slack per row.
fn separable(vecs: &[Vec<Scalar>], positive: &[usize], dim: usize) -> bool {
    let n = vecs.len();
    let cols = 2 * dim + n;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for (i, v) in vecs.iter().enumerate() {
        let mut row = vec![Scalar::zero(); cols];
        for k in 0..dim {
            row[k] = v[k].clone();
            row[dim + k] = -v[k].clone();
        }
        if positive.contains(&i) {
            row[2 * dim + i] = -Scalar::one();
            b.push(Scalar::one());
        } else {
            row[2 * dim + i] = Scalar::one();
            b.push(Scalar::zero());
        }
        a.push(row);
    }
    lp::solve(&a, &b).is_feasible()
}

fn moment_vector(dim: usize, i: i64) -> Vec<Scalar> {
    let sign = if i % 2 == 0 { 1 } else { -1 };
    let mut out = Vec::with_capacity(dim);
    let mut power = 1i64;
    for _ in 0..dim {
        out.push(scalar::int(sign * power));
        power *= i;
    }
    out
}

/// `d + 2m - 1` points whose open-halfspace depth around the origin is
/// exactly `m`, with the points and the origin in general position.
///
/// Points lie on the alternating moment curve `(-1)^i (1, t, …, t^{d-1})` at
/// `t = 1, …, n`. Any polynomial of degree below `d` changes sign at most
/// `d - 1` times, which leaves at least `m` points on each side of every
/// hyperplane through the origin. Affine degeneracies are broken by radial
/// nudges `1 + u/q`, which leave the depth untouched. The result is always
/// re-verified.
pub fn gale_set(d: usize, m: usize) -> Result<PointSet> {
    if d == 0 || m == 0 {
        return Err(Error::InvalidArgument("gale_set needs d >= 1 and m >= 1".into()));
    }
    let n = d + 2 * m - 1;
    let base: Vec<Vec<Scalar>> = (1..=n as i64).map(|i| moment_vector(d, i)).collect();
    let origin = Point::origin(d);
    for attempt in 0..=GALE_PERTURBATION_BUDGET {
        let pts: Vec<Point> = if attempt == 0 {
            base.iter().cloned().map(Point).collect()
        } else {
            let q = (8 * attempt) as i64;
            let mut rng = rng_for(attempt, 0x6a1e);
            base.iter()
                .map(|v| {
                    let r = scalar::ratio(q + rng.gen_range(1..=q), q);
                    Point(scalar::scale(v, &r))
                })
                .collect()
        };
        let Ok(set) = PointSet::new(d, pts) else { continue };
        let mut with_origin = set.points().to_vec();
        with_origin.push(origin.clone());
        if geom::general_position_violation(&with_origin, d).is_some() {
            continue;
        }
        if open_halfspace_depth(&set, &origin)?.depth == m {
            return Ok(set);
        }
    }
    Err(Error::Certification(format!("no certified defending set for d={d}, m={m}")))
}

/// An `m`-step defending set of size `D = d + 2m - 1` whose peeling shows at
/// most `D - m + 1` hull vertices during its first `m` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseSet {
    pub points: PointSet,
    pub m: usize,
    /// Radial factors applied to the last `m - 1` points, in order.
    pub scaling_radii: Vec<Scalar>,
}

impl BaseSet {
    pub fn defense_number(&self) -> usize {
        self.points.len()
    }
}

/// Whether the closed ball of radius `eps` at the origin sits inside the
/// interior of the hull of every `size`-subset of `pool`. Checked through the
/// cross-polytope of radius `d·eps`, which contains a ball of radius
/// `√d·eps > eps`.
fn ball_inside_subsets(pool: &[Point], size: usize, eps: &Scalar, dim: usize) -> bool {
    let reach = eps * Scalar::from_integer((dim as i64).into());
    let mut probes = Vec::with_capacity(2 * dim);
    for k in 0..dim {
        for sign in [1i64, -1] {
            let mut c = vec![Scalar::zero(); dim];
            c[k] = &reach * Scalar::from_integer(sign.into());
            probes.push(Point(c));
        }
    }
    (0..pool.len()).combinations(size).all(|subset| {
        let pts: Vec<Point> = subset.iter().map(|&i| pool[i].clone()).collect();
        probes.iter().all(|q| geom::convex_membership_in(q, &pts).is_member())
    })
}

/// Builds and certifies the base set for `(d, m)`.
pub fn base_set(d: usize, m: usize, cfg: &PeelConfig) -> Result<BaseSet> {
    if d < 2 || m == 0 {
        return Err(Error::InvalidArgument("base_set needs d >= 2 and m >= 1".into()));
    }
    let gale = gale_set(d, m)?;
    let big_d = gale.len();
    let keep = big_d - m + 1;
    let shrink = gale.points().iter().map(|p| scalar::l1_norm(&p.0)).max().expect("nonempty").recip();
    let unit: Vec<Point> = gale.points().iter().map(|p| p.scaled(&shrink)).collect();

    let origin = Point::origin(d);
    let mut pts: Vec<Point> = unit[..keep].to_vec();
    let mut radii = Vec::with_capacity(m - 1);
    for j in 1..m {
        let k = (1..=MAX_RADIUS_EXPONENT)
            .find(|&k| ball_inside_subsets(&pts, keep, &scalar::dyadic(k), d))
            .ok_or_else(|| Error::Certification(format!("no enclosed ball for scaling step {j}")))?;
        let source = &unit[big_d - m + j];
        let mut exp = k + 1;
        loop {
            let eps = scalar::dyadic(exp);
            let candidate = source.scaled(&eps);
            let mut trial = pts.clone();
            trial.push(candidate.clone());
            trial.push(origin.clone());
            if geom::general_position_violation(&trial, d).is_none() {
                pts.push(candidate);
                radii.push(eps);
                break;
            }
            exp += 1;
            if exp > MAX_RADIUS_EXPONENT {
                return Err(Error::Certification(format!("scaling step {j} stays degenerate")));
            }
        }
    }
    let points = PointSet::new(d, pts)?;
    certify_base_set(&points, m, cfg)?;
    Ok(BaseSet { points, m, scaling_radii: radii })
}

/// Checks both base-set properties exhaustively, naming a violating removal
/// prefix on failure.
pub fn certify_base_set(points: &PointSet, m: usize, cfg: &PeelConfig) -> Result<()> {
    let origin = Point::origin(points.dim());
    if !defends_by_peeling(points, &origin, m, cfg)? {
        return Err(Error::Certification(format!("origin is not defended for {m} steps")));
    }
    let union = points.with_point(origin)?;
    let cap = points.len() - m + 1;
    let keep = 1u64 << points.len();
    let graph = PeelGraph::explore(union.points(), union.dim(), m - 1, keep, cfg.state_budget)?;
    for state in graph.states() {
        let hull = graph.hull(state).expect("explored");
        if hull.len() > cap {
            let prefix = graph.path_to(state).unwrap_or_default();
            return Err(Error::Certification(format!(
                "{} hull vertices (cap {cap}) after removing {prefix:?}",
                hull.len()
            )));
        }
    }
    Ok(())
}

/// Outcome of sampling sets one point short of the defense number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdReport {
    pub d: usize,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub set_size: usize,
    pub max_depth: usize,
    /// `histogram[k]` = number of trials with depth `k`.
    pub histogram: Vec<usize>,
}

impl ThresholdReport {
    /// No sampled set reached depth `m`.
    pub fn holds(&self) -> bool {
        self.max_depth < self.m
    }
}

/// One sampled set of size `d + 2m - 2`, in general position with the origin.
pub fn below_threshold_sample(d: usize, m: usize, seed: u64, trial: u64) -> PointSet {
    let mut rng = rng_for(seed, trial);
    let pts = random_general_position(&mut rng, d, d + 2 * m - 2, &[Point::origin(d)]);
    PointSet::new(d, pts).expect("sampled points are distinct")
}

/// Samples `trials` sets of `d + 2m - 2` points and records the depth of the
/// origin in each. Trial `i` draws from stream `i` of `seed`.
pub fn below_threshold_search(d: usize, m: usize, trials: usize, seed: u64) -> Result<ThresholdReport> {
    if trials == 0 || d == 0 || m == 0 {
        return Err(Error::InvalidArgument("trials, d and m must be positive".into()));
    }
    let origin = Point::origin(d);
    let depths: Vec<usize> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let set = below_threshold_sample(d, m, seed, t);
            open_halfspace_depth(&set, &origin).map(|r| r.depth)
        })
        .collect::<Result<_>>()?;
    let max_depth = depths.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0; max_depth + 1];
    for &k in &depths {
        histogram[k] += 1;
    }
    Ok(ThresholdReport { d, m, trials, seed, set_size: d + 2 * m - 2, max_depth, histogram })
}

/// The cap on hull vertices a base set may show: `D - m + 1 = d + m`.
pub fn hull_cap(d: usize, m: usize) -> usize {
    d + m
}

/// Radially rescales point `i` by `factor` (positive).
pub fn rescale_point(s: &PointSet, i: usize, factor: &Scalar) -> Result<PointSet> {
    if !factor.is_positive() {
        return Err(Error::InvalidArgument("scale factor must be positive".into()));
    }
    let mut pts = s.points().to_vec();
    pts[i] = pts[i].scaled(factor);
    PointSet::new(s.dim(), pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn triangle() -> PointSet {
        PointSet::from_ints(2, &[&[2, 0], &[-1, 2], &[-1, -2]]).unwrap()
    }

    #[test]
    fn depth_examples() {
        let o2 = Point::origin(2);
        let r = open_halfspace_depth(&triangle(), &o2).unwrap();
        assert_eq!(r.depth, 1);
        assert!(r.verify(&triangle(), &o2));

        let line = PointSet::from_ints(1, &[&[-2], &[-1], &[1], &[2]]).unwrap();
        let r = open_halfspace_depth(&line, &Point::origin(1)).unwrap();
        assert_eq!(r.depth, 2);
        assert!(r.verify(&line, &Point::origin(1)));

        let g = gale_set(2, 2).unwrap();
        assert_eq!(open_halfspace_depth(&g, &o2).unwrap().depth, 2);
    }

    #[test]
    fn depth_rejects_degenerate_union() {
        let s = PointSet::from_ints(2, &[&[1, 1], &[2, 2], &[0, 5]]).unwrap();
        assert!(matches!(open_halfspace_depth(&s, &Point::origin(2)), Err(Error::Degenerate { .. })));
        assert!(open_halfspace_depth(&s, &Point::origin(3)).is_err());
    }

    #[test]
    fn depth_small_sets() {
        let s = PointSet::from_ints(3, &[&[1, 2, 3]]).unwrap();
        let r = open_halfspace_depth(&s, &Point::origin(3)).unwrap();
        assert_eq!(r.depth, 0);
        assert!(r.verify(&s, &Point::origin(3)));
    }

    #[test]
    fn oracle_examples() {
        let o2 = Point::origin(2);
        assert_eq!(depth_oracle(&triangle(), &o2, DEFAULT_ORACLE_LIMIT).unwrap(), 1);
        let one_sided = PointSet::from_ints(2, &[&[1, 1], &[2, 5], &[3, -1]]).unwrap();
        assert_eq!(depth_oracle(&one_sided, &o2, DEFAULT_ORACLE_LIMIT).unwrap(), 0);
        assert_eq!(open_halfspace_depth(&one_sided, &o2).unwrap().depth, 0);
        assert_eq!(depth_oracle(&gale_set(2, 2).unwrap(), &o2, DEFAULT_ORACLE_LIMIT).unwrap(), 2);
        assert!(matches!(depth_oracle(&gale_set(2, 2).unwrap(), &o2, 3), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn gale_examples() {
        for m in 1..=4 {
            let g = gale_set(1, m).unwrap();
            assert_eq!(g.len(), 2 * m);
            let left = g.points().iter().filter(|p| p.0[0].is_negative()).count();
            assert_eq!(left, m);
        }
        let g = gale_set(3, 1).unwrap();
        assert_eq!(g.len(), 4);
        let refs: Vec<&Point> = g.points().iter().collect();
        assert!(geom::strictly_inside(&Point::origin(3), &refs));
        let g = gale_set(2, 3).unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!(open_halfspace_depth(&g, &Point::origin(2)).unwrap().depth, 3);
        assert!(gale_set(0, 1).is_err());
    }

    #[test]
    fn base_set_examples() {
        let cfg = PeelConfig::default();
        let b = base_set(2, 1, &cfg).unwrap();
        assert!(b.scaling_radii.is_empty());
        // Same points as the Gale set up to one common positive factor.
        let g = gale_set(2, 1).unwrap();
        let k = &b.points.points()[0].0[0] / &g.points()[0].0[0];
        assert!(k.is_positive());
        for (p, q) in b.points.points().iter().zip(g.points()) {
            assert_eq!(p, &q.scaled(&k));
        }

        let b = base_set(2, 3, &cfg).unwrap();
        assert_eq!(b.points.len(), 7);
        assert_eq!(b.scaling_radii.len(), 2);
        assert!(defends_by_peeling(&b.points, &Point::origin(2), 3, &cfg).unwrap());

        let b = base_set(3, 2, &cfg).unwrap();
        assert_eq!(b.points.len(), 6);
        assert!(defends_by_peeling(&b.points, &Point::origin(3), 2, &cfg).unwrap());
        assert!(base_set(1, 2, &cfg).is_err());
    }

    #[test]
    fn base_set_certification_negative_controls() {
        let cfg = PeelConfig::default();
        // A pentagon defends its center for two steps but keeps all five
        // points on the hull, above the cap of four.
        let pentagon = PointSet::from_ints(2, &[&[10, 0], &[3, 9], &[-8, 6], &[-8, -6], &[3, -9]]).unwrap();
        assert_eq!(open_halfspace_depth(&pentagon, &Point::origin(2)).unwrap().depth, 2);
        let err = certify_base_set(&pentagon, 2, &cfg).unwrap_err();
        assert!(matches!(err, Error::Certification(ref msg) if msg.contains("hull vertices")), "{err:?}");
        let g = gale_set(2, 3).unwrap();
        let err = certify_base_set(&g, 4, &cfg).unwrap_err();
        assert!(matches!(err, Error::Certification(ref msg) if msg.contains("not defended")), "{err:?}");
    }

    #[test]
    fn threshold_examples() {
        let r = below_threshold_search(2, 2, 200, 11).unwrap();
        assert!(r.holds());
        assert_eq!(r.set_size, 4);
        assert_eq!(r.histogram.iter().sum::<usize>(), 200);
        let r = below_threshold_search(1, 3, 50, 0).unwrap();
        assert!(r.max_depth <= 2);
        let r = below_threshold_search(3, 1, 1, 5).unwrap();
        assert_eq!(r.trials, 1);
        assert!(below_threshold_search(2, 2, 0, 0).is_err());
        assert_eq!(below_threshold_search(2, 2, 64, 9).unwrap(), below_threshold_search(2, 2, 64, 9).unwrap());
    }

    #[test]
    fn scaling_keeps_depth() {
        let g = gale_set(3, 2).unwrap();
        let o = Point::origin(3);
        let before = open_halfspace_depth(&g, &o).unwrap().depth;
        for i in 0..g.len() {
            let s = rescale_point(&g, i, &ratio(1, 7)).unwrap();
            assert_eq!(open_halfspace_depth(&s, &o).unwrap().depth, before);
        }
    }
}
