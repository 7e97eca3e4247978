//! Recursive point sets with few peeling sequences.
//!
//! `S_n` for `n <= D` is a prefix of the base set. For larger `n` the points
//! are split into `D` near-equal parts, each part is built recursively,
//! squashed into a thin segment, and the segment is planted on a base point
//! so that it points at the origin. Every structural claim the counting
//! argument relies on is re-checked exhaustively by [`certify_construction`].

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::defense::{self, BaseSet};
use crate::error::{Error, Result};
use crate::geom::{self, Point, PointSet};
use crate::interval::Enclosure;
use crate::peeling::{self, PeelConfig, PeelGraph, PeelState};
use crate::scalar::{self, dot, Scalar};

/// Largest set certified exhaustively.
pub const DEFAULT_AUDIT_LIMIT: usize = 14;
/// Sets larger than this skip the general-position sweep.
pub const GENERAL_POSITION_CHECK_LIMIT: usize = 30;
const FIRST_EXPONENT: u32 = 2;
const MAX_EXPONENT: u32 = 40;
const ROTATION_SEARCH: i64 = 64;

/// Anisotropic squash applied after a rational rotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlattenParams {
    pub delta: Scalar,
    pub eps: Scalar,
    /// Half-angle parameter of the rotation; searched when absent.
    pub rotation_t: Option<Scalar>,
}

impl FlattenParams {
    /// `delta = 2^-k`, `eps = delta · 2^-k`.
    pub fn dyadic(k: u32) -> Self {
        FlattenParams { delta: scalar::dyadic(k), eps: scalar::dyadic(2 * k), rotation_t: None }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.eps > Scalar::zero() && self.eps <= self.delta && self.delta <= Scalar::one();
        if !ok {
            return Err(Error::InvalidArgument("flatten needs 0 < eps <= delta <= 1".into()));
        }
        Ok(())
    }
}

/// Rotation by the angle with `tan(θ/2) = t` in each plane `(0, k)`,
/// applied for `k = 1..d` in turn. Exactly orthogonal.
fn rotate(p: &[Scalar], t: &Scalar) -> Vec<Scalar> {
    let t2 = t * t;
    let denom = Scalar::one() + &t2;
    let c = (Scalar::one() - &t2) / &denom;
    let s = (t * scalar::int(2)) / &denom;
    let mut v = p.to_vec();
    for k in 1..v.len() {
        let (x, y) = (v[0].clone(), v[k].clone());
        v[0] = &c * &x - &s * &y;
        v[k] = &s * &x + &c * &y;
    }
    v
}

fn distinct_first_coordinates(points: &[Vec<Scalar>]) -> bool {
    let mut xs: Vec<&Scalar> = points.iter().map(|p| &p[0]).collect();
    xs.sort();
    xs.windows(2).all(|w| w[0] != w[1])
}

/// Rotates until first coordinates are pairwise distinct, then maps
/// `(x, y) -> (delta·x, eps·y)`.
pub fn flatten(p: &PointSet, params: &FlattenParams) -> Result<PointSet> {
    params.validate()?;
    let raw: Vec<Vec<Scalar>> = p.points().iter().map(|q| q.0.clone()).collect();
    let candidates: Vec<Scalar> = match &params.rotation_t {
        Some(t) => vec![t.clone()],
        None => std::iter::once(Scalar::zero()).chain((2..=ROTATION_SEARCH).map(|q| scalar::ratio(1, q))).collect(),
    };
    let rotated = candidates
        .iter()
        .map(|t| raw.iter().map(|q| rotate(q, t)).collect::<Vec<_>>())
        .find(|r| distinct_first_coordinates(r))
        .ok_or_else(|| Error::Certification("no rotation separates first coordinates".into()))?;
    let squashed = rotated
        .into_iter()
        .map(|mut v| {
            v[0] *= &params.delta;
            for c in v.iter_mut().skip(1) {
                *c *= &params.eps;
            }
            Point(v)
        })
        .collect();
    PointSet::new(p.dim(), squashed)
}

/// `target` followed by an orthogonal rational basis of its complement,
/// by unnormalized Gram–Schmidt against the standard basis.
fn aligned_frame(target: &Point) -> Vec<Vec<Scalar>> {
    let dim = target.dim();
    let mut frame = vec![target.0.clone()];
    for k in 0..dim {
        if frame.len() == dim {
            break;
        }
        let mut v = vec![Scalar::zero(); dim];
        v[k] = Scalar::one();
        for b in &frame {
            let coef = dot(&v, b) / dot(b, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= &coef * bi;
            }
        }
        if v.iter().any(|c| !c.is_zero()) {
            frame.push(v);
        }
    }
    frame
}

/// Applies the linear map `e_1 -> target`, `e_k -> frame_k`, then translates
/// so that the point with the largest first coordinate lands on `target`.
pub fn place_block(b: &PointSet, target: &Point) -> Result<PointSet> {
    if target.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: b.dim(), found: target.dim() });
    }
    if target.is_origin() {
        return Err(Error::InvalidArgument("cannot align a block with the origin".into()));
    }
    let frame = aligned_frame(target);
    let dim = b.dim();
    let apply = |p: &Point| -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); dim];
        for (coef, col) in p.0.iter().zip(&frame) {
            for (o, c) in out.iter_mut().zip(col) {
                *o += coef * c;
            }
        }
        out
    };
    let tip = b.points().iter().max_by(|p, q| p.0[0].cmp(&q.0[0])).expect("nonempty block");
    let shift = scalar::sub(&target.0, &apply(tip));
    let placed = b.points().iter().map(|p| Point(apply(p).iter().zip(&shift).map(|(a, s)| a + s).collect())).collect();
    PointSet::new(dim, placed)
}

/// Recursive structure of a construction. Indices refer to the full set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockTree {
    pub node: usize,
    pub size: usize,
    pub placement: Option<Point>,
    pub child_sizes: Vec<usize>,
    pub children: Vec<BlockTree>,
    pub leaf_points: Vec<usize>,
}

impl BlockTree {
    /// All point indices under this node, in order.
    pub fn indices(&self) -> Vec<usize> {
        if self.children.is_empty() {
            return self.leaf_points.clone();
        }
        self.children.iter().flat_map(BlockTree::indices).collect()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(BlockTree::depth).max().unwrap_or(0)
    }
}

/// Sizes `⌈n/D⌉` for the first `n mod D` parts and `⌊n/D⌋` for the rest.
pub fn partition(n: usize, parts: usize) -> Vec<usize> {
    let (q, r) = (n / parts, n % parts);
    (0..parts).map(|j| if j < r { q + 1 } else { q }).collect()
}

/// A built construction and the parameters it was built with.
#[derive(Debug, Clone)]
pub struct Construction {
    pub d: usize,
    pub m: usize,
    pub n: usize,
    pub points: PointSet,
    pub tree: BlockTree,
    pub exponent: u32,
    pub params: FlattenParams,
    /// Exhaustive certificate, when the set was small enough to audit.
    pub certificate: Option<CertificationReport>,
    /// Largest `n` certified with the same parameters.
    pub certified_up_to: usize,
}

struct Builder<'a> {
    base: &'a [Point],
    params: &'a FlattenParams,
    memo: HashMap<usize, Vec<Point>>,
}

impl Builder<'_> {
    fn points(&mut self, n: usize) -> Result<Vec<Point>> {
        if let Some(p) = self.memo.get(&n) {
            return Ok(p.clone());
        }
        let big_d = self.base.len();
        let out = if n <= big_d {
            self.base[..n].to_vec()
        } else {
            let dim = self.base[0].dim();
            let mut out = Vec::with_capacity(n);
            for (j, size) in partition(n, big_d).into_iter().enumerate() {
                let inner = PointSet::new(dim, self.points(size)?)?;
                let flat = flatten(&inner, self.params)?;
                out.extend(place_block(&flat, &self.base[j])?.points().iter().cloned());
            }
            out
        };
        self.memo.insert(n, out.clone());
        Ok(out)
    }
}

fn tree(n: usize, base: &[Point], placement: Option<Point>, offset: usize, next_id: &mut usize) -> BlockTree {
    let node = *next_id;
    *next_id += 1;
    let big_d = base.len();
    if n <= big_d {
        return BlockTree {
            node,
            size: n,
            placement,
            child_sizes: Vec::new(),
            children: Vec::new(),
            leaf_points: (offset..offset + n).collect(),
        };
    }
    let sizes = partition(n, big_d);
    let mut start = offset;
    let mut children = Vec::with_capacity(big_d);
    for (j, &size) in sizes.iter().enumerate() {
        children.push(tree(size, base, Some(base[j].clone()), start, next_id));
        start += size;
    }
    BlockTree { node, size: n, placement, child_sizes: sizes, children, leaf_points: Vec::new() }
}

/// Top-level block label of every point: singletons when the set is a base
/// prefix, otherwise the child index.
pub fn top_level_blocks(tree: &BlockTree) -> Vec<usize> {
    if tree.children.is_empty() {
        return (0..tree.size).collect();
    }
    let mut labels = vec![0; tree.size];
    for (j, child) in tree.children.iter().enumerate() {
        for i in child.indices() {
            labels[i] = j;
        }
    }
    labels
}

/// Builds `S_n` on a given base set with fixed squash parameters. No
/// certification.
pub fn build_with(base: &BaseSet, n: usize, params: &FlattenParams) -> Result<(PointSet, BlockTree)> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let mut builder = Builder { base: base.points.points(), params, memo: HashMap::new() };
    let pts = builder.points(n)?;
    let t = tree(n, base.points.points(), None, 0, &mut 0);
    let ps = PointSet::new(base.points.dim(), pts)?.with_blocks(top_level_blocks(&t))?;
    Ok((ps, t))
}

/// What the exhaustive audit of a construction found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificationReport {
    pub n: usize,
    pub states: usize,
    pub count: BigUint,
    pub block_counts: Vec<BigUint>,
    pub max_active_blocks: usize,
    pub active_cap: usize,
    /// `(D - m + 1)^n · Π g(A_i)` over all but the `m` smallest blocks.
    pub product_bound: BigUint,
    /// Enclosure of `c · a^n`, when `d >= 3` and `n >= 2`.
    pub closed_form_bound: Option<Enclosure>,
}

/// Exhaustively checks a construction: general position; while the origin
/// is strictly inside, each block shows at most its outermost point on the
/// hull; at most `D - m + 1` blocks show hull vertices at once; and the
/// count respects the product bound (and the closed-form bound for
/// `d >= 3`).
pub fn certify_construction(
    s: &PointSet,
    tree: &BlockTree,
    m: usize,
    cfg: &PeelConfig,
    audit_limit: usize,
) -> Result<CertificationReport> {
    let n = s.len();
    if n > audit_limit {
        return Err(Error::TooLarge { size: n, limit: audit_limit });
    }
    if tree.size != n {
        return Err(Error::InvalidArgument(format!("tree covers {} points, set has {n}", tree.size)));
    }
    let d = s.dim();
    let big_d = bounds::defense_number(d, m);
    if let Some(bad) = geom::general_position_violation(s.points(), d) {
        return Err(Error::Certification(format!("general position fails on {bad:?}")));
    }
    let blocks = top_level_blocks(tree);
    let block_count = blocks.iter().max().map_or(0, |b| b + 1);
    let graph = PeelGraph::full(s.points(), d, cfg.state_budget)?;
    let origin = Point::origin(d);

    for state in graph.states() {
        let remaining: Vec<&Point> = state.indices().map(|i| &s.points()[i]).collect();
        if !geom::strictly_inside(&origin, &remaining) {
            continue;
        }
        let hull = graph.hull(state).expect("explored");
        for b in 0..block_count {
            let members: Vec<usize> = state.indices().filter(|&i| blocks[i] == b).collect();
            let Some(&outer) = members.iter().max_by(|&&i, &&j| s.points()[i].norm_sq().cmp(&s.points()[j].norm_sq()))
            else {
                continue;
            };
            if let Some(v) = members.iter().find(|&&i| i != outer && hull.contains(i)) {
                let prefix = graph.path_to(state).unwrap_or_default();
                return Err(Error::Certification(format!(
                    "outermost-only removal fails: point {v} of block {b} is a hull vertex after removing {prefix:?}"
                )));
            }
        }
    }

    let active_cap = big_d - m + 1;
    let max_active = peeling::max_active_blocks(&graph, &blocks);
    if max_active > active_cap {
        let witness = graph
            .states()
            .find(|&st| {
                let hull = graph.hull(st).expect("explored");
                hull.indices().map(|v| blocks[v]).collect::<std::collections::BTreeSet<_>>().len() > active_cap
            })
            .and_then(|st| graph.path_to(st))
            .unwrap_or_default();
        return Err(Error::Certification(format!(
            "{max_active} active blocks (cap {active_cap}) after removing {witness:?}"
        )));
    }

    let count = graph.count_sequences();
    let mut sized: Vec<(usize, BigUint)> = Vec::with_capacity(block_count);
    for b in 0..block_count {
        let members: Vec<Point> = (0..n).filter(|&i| blocks[i] == b).map(|i| s.points()[i].clone()).collect();
        let sub = PointSet::new(d, members)?;
        let g = PeelGraph::full(sub.points(), d, cfg.state_budget)?.count_sequences();
        sized.push((sub.len(), g));
    }
    let block_counts: Vec<BigUint> = sized.iter().map(|(_, g)| g.clone()).collect();
    sized.sort();
    // Missing blocks (n < D) count as empty, with one peeling sequence each.
    let present_skip = m.saturating_sub(big_d - sized.len());
    let product: BigUint = sized.iter().skip(present_skip).map(|(_, g)| g.clone()).product();
    let product_bound = BigUint::from(active_cap).pow(n as u32) * product;
    if count > product_bound {
        return Err(Error::Certification(format!("count {count} exceeds the product bound {product_bound}")));
    }

    let closed_form_bound = if d >= 3 && n >= 2 {
        let e = bounds::theorem2_bound(d, m, n, bounds::DEFAULT_PRECISION)?;
        if Scalar::from_integer(count.clone().into()) > e.hi {
            return Err(Error::Certification(format!("count {count} exceeds c·a^n <= {}", scalar::to_string(&e.hi))));
        }
        Some(e)
    } else {
        None
    };

    Ok(CertificationReport {
        n,
        states: graph.state_count(),
        count,
        block_counts,
        max_active_blocks: max_active,
        active_cap,
        product_bound,
        closed_form_bound,
    })
}

/// Options for [`build_sn`].
#[derive(Debug, Clone)]
pub struct BuildConfig {
    pub peel: PeelConfig,
    pub audit_limit: usize,
    pub first_exponent: u32,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig { peel: PeelConfig::default(), audit_limit: DEFAULT_AUDIT_LIMIT, first_exponent: FIRST_EXPONENT }
    }
}

/// Builds `S_n` with `delta = 2^-k`, `eps = 2^-2k`, raising `k` until the
/// audit passes at `min(n, audit_limit)`. Larger sets reuse that `k` and are
/// reported as certified only up to the audited size.
pub fn build_sn(d: usize, m: usize, n: usize, cfg: &BuildConfig) -> Result<Construction> {
    if d < 2 || m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("needs d >= 2, m >= 1, n >= 1 (got d={d}, m={m}, n={n})")));
    }
    let base = defense::base_set(d, m, &cfg.peel)?;
    build_on(&base, n, cfg)
}

/// As [`build_sn`], on a precomputed base set.
pub fn build_on(base: &BaseSet, n: usize, cfg: &BuildConfig) -> Result<Construction> {
    let d = base.points.dim();
    let m = base.m;
    let audited = n.min(cfg.audit_limit);
    let mut last_err = None;
    for k in cfg.first_exponent..=MAX_EXPONENT {
        let params = FlattenParams::dyadic(k);
        let (ps, t) = match build_with(base, audited, &params) {
            Ok(v) => v,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        match certify_construction(&ps, &t, m, &cfg.peel, cfg.audit_limit) {
            Ok(report) => {
                if audited == n {
                    return Ok(Construction {
                        d,
                        m,
                        n,
                        points: ps,
                        tree: t,
                        exponent: k,
                        params,
                        certificate: Some(report),
                        certified_up_to: n,
                    });
                }
                let (ps, t) = build_with(base, n, &params)?;
                if n <= GENERAL_POSITION_CHECK_LIMIT {
                    if let Some(bad) = geom::general_position_violation(ps.points(), d) {
                        return Err(Error::Certification(format!("general position fails on {bad:?}")));
                    }
                }
                return Ok(Construction {
                    d,
                    m,
                    n,
                    points: ps,
                    tree: t,
                    exponent: k,
                    params,
                    certificate: None,
                    certified_up_to: audited,
                });
            }
            Err(e) if e.is_resource() => return Err(e),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Certification("no squash exponent certified".into())))
}

/// `true` when `state` leaves the origin strictly inside the hull.
pub fn origin_defended(s: &PointSet, state: PeelState) -> bool {
    let remaining: Vec<&Point> = state.indices().map(|i| &s.points()[i]).collect();
    geom::strictly_inside(&Point::origin(s.dim()), &remaining)
}
