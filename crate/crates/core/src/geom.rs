//! Exact linear algebra and convexity predicates in arbitrary dimension.

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{self, Feasibility};
use crate::scalar::{self, dot, Scalar};

/// A point of `R^d` with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(pub Vec<Scalar>);

impl Point {
    pub fn new(coords: Vec<Scalar>) -> Self {
        Point(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Point(coords.iter().map(|&v| scalar::int(v)).collect())
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![Scalar::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scaled(&self, k: &Scalar) -> Point {
        Point(scalar::scale(&self.0, k))
    }

    pub fn norm_sq(&self) -> Scalar {
        dot(&self.0, &self.0)
    }
}

impl serde::Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(self.0.iter().map(scalar::to_string))
    }
}

impl<'de> serde::Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(de)?;
        raw.iter().map(|t| scalar::parse(t)).collect::<Result<Vec<_>>>().map(Point).map_err(serde::de::Error::custom)
    }
}

/// An ordered list of distinct points of a common dimension, with optional
/// labels and block assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Point>,
    pub labels: Option<Vec<String>>,
    pub blocks: Option<Vec<usize>>,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
            }
        }
        for (i, j) in (0..points.len()).tuple_combinations() {
            if points[i] == points[j] {
                return Err(Error::Degenerate { subset: vec![i, j] });
            }
        }
        Ok(PointSet { dim, points, labels: None, blocks: None })
    }

    pub fn from_ints(dim: usize, rows: &[&[i64]]) -> Result<Self> {
        PointSet::new(dim, rows.iter().map(|r| Point::from_ints(r)).collect())
    }

    pub fn with_blocks(mut self, blocks: Vec<usize>) -> Result<Self> {
        if blocks.len() != self.points.len() {
            return Err(Error::InvalidArgument(format!("{} block ids for {} points", blocks.len(), self.points.len())));
        }
        self.blocks = Some(blocks);
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.points.len() {
            return Err(Error::InvalidArgument(format!("{} labels for {} points", labels.len(), self.points.len())));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// A copy with `p` appended (labels and blocks dropped).
    pub fn with_point(&self, p: Point) -> Result<PointSet> {
        let mut pts = self.points.clone();
        pts.push(p);
        PointSet::new(self.dim, pts)
    }

    /// A copy without point `i` (labels and blocks dropped).
    pub fn without(&self, i: usize) -> PointSet {
        let mut pts = self.points.clone();
        pts.remove(i);
        PointSet { dim: self.dim, points: pts, labels: None, blocks: None }
    }
}

/// Witness that a point does or does not lie in a convex hull.
#[derive(Debug, Clone, PartialEq)]
pub enum MembershipCertificate {
    /// One nonnegative weight per cited point; weights sum to one and
    /// reproduce the query.
    Weights(Vec<Scalar>),
    /// `normal·q > offset` while `normal·s <= offset` for every cited point.
    Separator { normal: Point, offset: Scalar },
}

impl MembershipCertificate {
    pub fn is_member(&self) -> bool {
        matches!(self, MembershipCertificate::Weights(_))
    }

    /// Re-checks the certificate exactly against `q` and `points`.
    pub fn verify(&self, q: &Point, points: &[Point]) -> bool {
        match self {
            MembershipCertificate::Weights(w) => {
                if w.len() != points.len() || w.iter().any(Signed::is_negative) {
                    return false;
                }
                if w.iter().sum::<Scalar>() != Scalar::one() {
                    return false;
                }
                (0..q.dim()).all(|k| {
                    let s: Scalar = w.iter().zip(points).map(|(wi, p)| wi * &p.0[k]).sum();
                    s == q.0[k]
                })
            }
            MembershipCertificate::Separator { normal, offset } => {
                !normal.is_origin()
                    && dot(&normal.0, &q.0) > *offset
                    && points.iter().all(|s| dot(&normal.0, &s.0) <= *offset)
            }
        }
    }
}

/// Determinant of an integer matrix by fraction-free (Bareiss) elimination.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Clears each row's denominators. Returns the integer rows and the product
/// of the (positive) row multipliers.
fn integer_rows(rows: &[Vec<Scalar>]) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale = BigInt::one();
    let int_rows = rows
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            scale *= &l;
            row.iter().map(|v| (v * Scalar::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    (int_rows, scale)
}

/// Exact determinant of a square rational matrix.
pub fn determinant(rows: &[Vec<Scalar>]) -> Scalar {
    let (m, scale) = integer_rows(rows);
    Scalar::new(bareiss_det(m), scale)
}

fn determinant_sign(rows: &[Vec<Scalar>]) -> i8 {
    let (m, _) = integer_rows(rows);
    let d = bareiss_det(m);
    if d.is_positive() {
        1
    } else if d.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of `det[p_1 - p_0, …, p_d - p_0]` for `d + 1` points of `R^d`.
pub fn orientation(simplex: &[Point], dim: usize) -> Result<i8> {
    if simplex.len() != dim + 1 {
        return Err(Error::DimensionMismatch { expected: dim + 1, found: simplex.len() });
    }
    if let Some(p) = simplex.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
    }
    Ok(orientation_unchecked(simplex.iter(), dim))
}

fn orientation_unchecked<'a>(mut simplex: impl Iterator<Item = &'a Point>, _dim: usize) -> i8 {
    let base = simplex.next().expect("nonempty simplex");
    let rows: Vec<Vec<Scalar>> = simplex.map(|p| scalar::sub(&p.0, &base.0)).collect();
    determinant_sign(&rows)
}

/// Rank of a list of rational vectors.
pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    let mut m: Vec<Vec<Scalar>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let piv = m[r][c].clone();
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &piv;
            for j in c..cols {
                let v = &f * &m[r][j];
                m[i][j] -= v;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// A nonzero vector orthogonal to every row, if one exists.
pub fn nullspace_vector(rows: &[Vec<Scalar>], dim: usize) -> Option<Vec<Scalar>> {
    let mut m: Vec<Vec<Scalar>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..dim {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..dim {
                    let v = &f * &m[r][j];
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free = (0..dim).find(|c| !pivots.contains(c))?;
    let mut v = vec![Scalar::zero(); dim];
    v[free] = Scalar::one();
    for (row, &pc) in pivots.iter().enumerate() {
        v[pc] = -m[row][free].clone();
    }
    Some(v)
}

/// First affinely dependent subset found, or `None` when the points are in
/// general position (no `d + 1` on a common hyperplane, all distinct).
pub fn general_position_violation(points: &[Point], dim: usize) -> Option<Vec<usize>> {
    for (i, j) in (0..points.len()).tuple_combinations() {
        if points[i] == points[j] {
            return Some(vec![i, j]);
        }
    }
    if dim == 1 {
        return None;
    }
    let n = points.len();
    if n <= dim + 1 {
        if n >= 2 {
            let rows: Vec<Vec<Scalar>> = points[1..].iter().map(|p| scalar::sub(&p.0, &points[0].0)).collect();
            if rank(&rows) < n - 1 {
                return Some((0..n).collect());
            }
        }
        return None;
    }
    (0..n).combinations(dim + 1).find(|c| orientation_unchecked(c.iter().map(|&i| &points[i]), dim) == 0)
}

pub fn is_general_position(ps: &PointSet) -> bool {
    general_position_violation(ps.points(), ps.dim()).is_none()
}

pub(crate) fn require_general_position(points: &[Point], dim: usize) -> Result<()> {
    match general_position_violation(points, dim) {
        Some(subset) => Err(Error::Degenerate { subset }),
        None => Ok(()),
    }
}

/// Decides `q ∈ conv(points)` and returns an exactly verifiable certificate.
pub fn convex_membership_in(q: &Point, points: &[Point]) -> MembershipCertificate {
    let dim = q.dim();
    if points.is_empty() {
        let mut normal = vec![Scalar::zero(); dim];
        normal[0] = Scalar::one();
        let offset = &q.0[0] - Scalar::one();
        return MembershipCertificate::Separator { normal: Point(normal), offset };
    }
    let n = points.len();
    let mut a: Vec<Vec<Scalar>> = (0..dim).map(|k| points.iter().map(|p| p.0[k].clone()).collect()).collect();
    a.push(vec![Scalar::one(); n]);
    let mut b: Vec<Scalar> = q.0.clone();
    b.push(Scalar::one());
    match lp::solve(&a, &b) {
        Feasibility::Feasible(w) => MembershipCertificate::Weights(w),
        Feasibility::Infeasible(y) => {
            // y = (w, t) with w·p + t >= 0 and w·q + t < 0.
            let t = y[dim].clone();
            let normal: Vec<Scalar> = y[..dim].iter().map(|v| -v).collect();
            MembershipCertificate::Separator { normal: Point(normal), offset: t }
        }
    }
}

/// `q ∈ conv(P)` with a certificate. Errors on a dimension mismatch.
pub fn convex_membership(q: &Point, ps: &PointSet) -> Result<MembershipCertificate> {
    if q.dim() != ps.dim() {
        return Err(Error::DimensionMismatch { expected: ps.dim(), found: q.dim() });
    }
    Ok(convex_membership_in(q, ps.points()))
}

/// Whether nonnegative combinations of `vectors` reach `target`.
pub fn cone_contains(vectors: &[Vec<Scalar>], target: &[Scalar]) -> bool {
    if vectors.is_empty() {
        return target.iter().all(Zero::is_zero);
    }
    let dim = target.len();
    let a: Vec<Vec<Scalar>> = (0..dim).map(|k| vectors.iter().map(|v| v[k].clone()).collect()).collect();
    lp::solve(&a, target).is_feasible()
}

/// `p` lies in the interior of `conv(points)`, i.e. the vectors `s - p`
/// positively span the whole space.
pub fn strictly_inside(p: &Point, points: &[&Point]) -> bool {
    let dim = p.dim();
    if points.len() <= dim {
        return false;
    }
    let vs: Vec<Vec<Scalar>> = points.iter().map(|s| scalar::sub(&s.0, &p.0)).collect();
    (0..dim).all(|k| {
        [Scalar::one(), -Scalar::one()].into_iter().all(|sign| {
            let mut e = vec![Scalar::zero(); dim];
            e[k] = sign;
            cone_contains(&vs, &e)
        })
    })
}

fn bit(i: usize) -> u64 {
    1u64 << i
}

pub(crate) fn mask_indices(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&i| mask & bit(i) != 0)
}

/// Hull vertices of the subset `mask` of `points`, as a bitmask. Indices in
/// `known` are taken to be vertices already (vertex status is inherited by
/// subsets).
pub(crate) fn hull_mask(points: &[Point], dim: usize, mask: u64, known: u64) -> u64 {
    let members: Vec<usize> = mask_indices(mask).collect();
    if members.len() <= 1 {
        return mask;
    }
    if dim == 1 {
        let mut out = 0;
        for &i in &members {
            let x = &points[i].0[0];
            let lowest = members.iter().all(|&j| j == i || points[j].0[0] > *x);
            let highest = members.iter().all(|&j| j == i || points[j].0[0] < *x);
            if lowest || highest {
                out |= bit(i);
            }
        }
        return out;
    }
    let mut out = known & mask;
    for &i in &members {
        if out & bit(i) != 0 {
            continue;
        }
        let others: Vec<Point> = members.iter().filter(|&&j| j != i).map(|&j| points[j].clone()).collect();
        if !convex_membership_in(&points[i], &others).is_member() {
            out |= bit(i);
        }
    }
    out
}

/// Indices `i` with `P[i] ∉ conv(P \ {P[i]})`.
pub fn hull_vertices(ps: &PointSet) -> Vec<usize> {
    let n = ps.len();
    assert!(n <= 64, "hull_vertices supports at most 64 points");
    let all = if n == 64 { u64::MAX } else { bit(n) - 1 };
    mask_indices(hull_mask(ps.points(), ps.dim(), all, 0)).collect()
}

/// `q ∈ conv(points)` decided by simplex containment through orientation
/// signs alone. Assumes `points ∪ {q}` in general position.
pub fn in_hull_by_simplices(q: &Point, points: &[&Point], dim: usize) -> bool {
    if dim == 1 {
        let x = &q.0[0];
        return points.iter().any(|p| p.0[0] < *x) && points.iter().any(|p| p.0[0] > *x);
    }
    if points.len() < dim + 1 {
        return false;
    }
    let mut simplex: Vec<&Point> = Vec::with_capacity(dim + 1);
    for c in (0..points.len()).combinations(dim + 1) {
        simplex.clear();
        simplex.extend(c.iter().map(|&i| points[i]));
        let whole = orientation_unchecked(simplex.iter().copied(), dim);
        if whole == 0 {
            continue;
        }
        let inside = (0..=dim).all(|k| {
            let swapped = simplex.iter().enumerate().map(|(j, p)| if j == k { q } else { *p });
            let s = orientation_unchecked(swapped, dim);
            s == 0 || s == whole
        });
        if inside {
            return true;
        }
    }
    false
}
