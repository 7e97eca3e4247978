//! Counting, enumerating and auditing peeling sequences.
//!
//! Every routine works on the reachable part of the state graph whose nodes
//! are subsets of the input (bitmasks over the input order) and whose edges
//! remove one current hull vertex. The graph is explored layer by layer;
//! hull vertices of each layer are computed in parallel, and every per-state
//! result is a pure function of the state, so the output never depends on the
//! schedule.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{self, hull_mask, mask_indices, require_general_position, Point, PointSet};

pub const DEFAULT_STATE_BUDGET: usize = 1 << 26;
pub const DEFAULT_NAIVE_LIMIT: usize = 9;
pub const DEFAULT_CENSUS_LIMIT: usize = 14;

/// Hard cap from the bitmask state representation.
pub const MAX_POINTS: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeelConfig {
    /// Maximum number of distinct states the explorer may visit.
    pub state_budget: usize,
    /// Largest input accepted by [`peel_count_naive`].
    pub naive_limit: usize,
    /// Largest input accepted by [`simplified_census`].
    pub census_limit: usize,
}

impl Default for PeelConfig {
    fn default() -> Self {
        PeelConfig {
            state_budget: DEFAULT_STATE_BUDGET,
            naive_limit: DEFAULT_NAIVE_LIMIT,
            census_limit: DEFAULT_CENSUS_LIMIT,
        }
    }
}

/// The points still present, as a bitmask over the input ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeelState(pub u64);

impl PeelState {
    pub fn full(n: usize) -> Self {
        PeelState(full_mask(n))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn without(self, i: usize) -> Self {
        PeelState(self.0 & !(1 << i))
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        mask_indices(self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeelReport {
    pub count: BigUint,
    pub enumerated: Option<Vec<Vec<usize>>>,
    pub visited_states: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplifiedReport {
    pub distinct_sequences: BigUint,
    pub max_active_blocks: usize,
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// The reachable peeling states of a point set together with the hull
/// vertices of each.
#[derive(Debug, Clone)]
pub struct PeelGraph {
    n: usize,
    layers: Vec<Vec<u64>>,
    hulls: HashMap<u64, u64>,
}

impl PeelGraph {
    /// Explores every state reachable by at most `max_removals` removals.
    /// Indices in `keep` are never removed, even when on the hull.
    pub fn explore(points: &[Point], dim: usize, max_removals: usize, keep: u64, budget: usize) -> Result<Self> {
        let n = points.len();
        if n > MAX_POINTS {
            return Err(Error::TooLarge { size: n, limit: MAX_POINTS });
        }
        let mut layers: Vec<Vec<u64>> = Vec::new();
        let mut hulls: HashMap<u64, u64> = HashMap::new();
        let mut frontier: BTreeMap<u64, u64> = BTreeMap::from([(full_mask(n), 0)]);
        for depth in 0..=max_removals.min(n) {
            if frontier.is_empty() {
                break;
            }
            if hulls.len() + frontier.len() > budget {
                return Err(Error::StateBudget { budget });
            }
            let entries: Vec<(u64, u64)> = std::mem::take(&mut frontier).into_iter().collect();
            let computed: Vec<u64> =
                entries.par_iter().map(|&(state, known)| hull_mask(points, dim, state, known)).collect();
            let mut layer = Vec::with_capacity(entries.len());
            for (&(state, _), &hull) in entries.iter().zip(&computed) {
                hulls.insert(state, hull);
                layer.push(state);
                if depth == max_removals {
                    continue;
                }
                for v in mask_indices(hull & !keep) {
                    let child = state & !(1 << v);
                    let inherited = hull & !(1 << v);
                    *frontier.entry(child).or_insert(0) |= inherited;
                }
            }
            layers.push(layer);
        }
        Ok(PeelGraph { n, layers, hulls })
    }

    pub fn full(points: &[Point], dim: usize, budget: usize) -> Result<Self> {
        Self::explore(points, dim, points.len(), 0, budget)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn state_count(&self) -> usize {
        self.hulls.len()
    }

    /// States grouped by number of removals.
    pub fn layers(&self) -> &[Vec<u64>] {
        &self.layers
    }

    pub fn states(&self) -> impl Iterator<Item = PeelState> + '_ {
        self.layers.iter().flatten().map(|&s| PeelState(s))
    }

    pub fn hull(&self, state: PeelState) -> Option<PeelState> {
        self.hulls.get(&state.0).map(|&h| PeelState(h))
    }

    /// A removal order leading from the full set to `target`, if `target`
    /// was reached during exploration.
    pub fn path_to(&self, target: PeelState) -> Option<Vec<usize>> {
        if !self.hulls.contains_key(&target.0) {
            return None;
        }
        let mut path = Vec::new();
        let mut state = full_mask(self.n);
        while state != target.0 {
            let hull = self.hulls[&state];
            let v = mask_indices(hull & !target.0).find(|&v| self.hulls.contains_key(&(state & !(1 << v))))?;
            path.push(v);
            state &= !(1 << v);
        }
        Some(path)
    }

    /// Number of complete peeling sequences, by summing path counts forward
    /// through the layers. Only meaningful for a fully explored graph.
    pub fn count_sequences(&self) -> BigUint {
        let mut ways: HashMap<u64, BigUint> = HashMap::from([(full_mask(self.n), BigUint::one())]);
        for layer in &self.layers {
            let mut next: HashMap<u64, BigUint> = HashMap::new();
            for state in layer {
                let Some(w) = ways.remove(state) else { continue };
                if *state == 0 {
                    return w;
                }
                let hull = self.hulls[state];
                for v in mask_indices(hull) {
                    *next.entry(state & !(1 << v)).or_insert_with(BigUint::zero) += &w;
                }
            }
            ways = next;
        }
        ways.remove(&0).unwrap_or_else(BigUint::zero)
    }
}

fn checked_points(ps: &PointSet) -> Result<()> {
    if ps.len() > MAX_POINTS {
        return Err(Error::TooLarge { size: ps.len(), limit: MAX_POINTS });
    }
    require_general_position(ps.points(), ps.dim())
}

/// Number of peeling sequences, by memoized recursion over remaining subsets.
pub fn peel_count(ps: &PointSet, cfg: &PeelConfig) -> Result<PeelReport> {
    checked_points(ps)?;
    let graph = PeelGraph::full(ps.points(), ps.dim(), cfg.state_budget)?;
    Ok(PeelReport { count: graph.count_sequences(), enumerated: None, visited_states: graph.state_count() })
}

/// Number of peeling sequences by plain depth-first enumeration of every
/// sequence. Hull membership is decided by orientation signs instead of the
/// linear program, and only that predicate is cached.
pub fn peel_count_naive(ps: &PointSet, cfg: &PeelConfig) -> Result<BigUint> {
    if ps.len() > cfg.naive_limit {
        return Err(Error::TooLarge { size: ps.len(), limit: cfg.naive_limit });
    }
    require_general_position(ps.points(), ps.dim())?;
    let points = ps.points();
    let dim = ps.dim();
    let mut cache: HashMap<u64, Vec<usize>> = HashMap::new();

    fn walk(points: &[Point], dim: usize, state: u64, cache: &mut HashMap<u64, Vec<usize>>) -> u64 {
        if state == 0 {
            return 1;
        }
        let vertices = cache
            .entry(state)
            .or_insert_with(|| {
                mask_indices(state)
                    .filter(|&i| {
                        let others: Vec<&Point> = mask_indices(state).filter(|&j| j != i).map(|j| &points[j]).collect();
                        !geom::in_hull_by_simplices(&points[i], &others, dim)
                    })
                    .collect()
            })
            .clone();
        vertices.into_iter().map(|v| walk(points, dim, state & !(1 << v), cache)).sum()
    }

    Ok(BigUint::from(walk(points, dim, full_mask(ps.len()), &mut cache)))
}

/// The lexicographically first `limit` peeling sequences.
pub fn peel_enumerate(ps: &PointSet, limit: usize) -> Result<Vec<Vec<usize>>> {
    checked_points(ps)?;
    let mut out = Vec::new();
    if limit == 0 {
        return Ok(out);
    }
    let mut cache: HashMap<u64, u64> = HashMap::new();
    let mut prefix = Vec::with_capacity(ps.len());

    fn walk(
        ps: &PointSet,
        state: u64,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
        cache: &mut HashMap<u64, u64>,
    ) {
        if state == 0 {
            out.push(prefix.clone());
            return;
        }
        let hull = *cache.entry(state).or_insert_with(|| hull_mask(ps.points(), ps.dim(), state, 0));
        for v in mask_indices(hull) {
            if out.len() >= limit {
                return;
            }
            prefix.push(v);
            walk(ps, state & !(1 << v), prefix, out, limit, cache);
            prefix.pop();
        }
    }

    walk(ps, full_mask(ps.len()), &mut prefix, &mut out, limit, &mut cache);
    Ok(out)
}

/// Checks a removal order step by step with fresh membership tests.
pub fn is_peeling_sequence(ps: &PointSet, seq: &[usize]) -> bool {
    let n = ps.len();
    let mut sorted = seq.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return false;
    }
    let mut remaining: Vec<usize> = (0..n).collect();
    for &v in seq {
        let others: Vec<Point> = remaining.iter().filter(|&&j| j != v).map(|&j| ps.points()[j].clone()).collect();
        let inside = if ps.dim() == 1 {
            let x = &ps.points()[v].0[0];
            others.iter().any(|p| p.0[0] < *x) && others.iter().any(|p| p.0[0] > *x)
        } else {
            geom::convex_membership_in(&ps.points()[v], &others).is_member()
        };
        if inside {
            return false;
        }
        remaining.retain(|&j| j != v);
    }
    true
}

/// True iff no peeling sequence of `S ∪ {p}` removes `p` within its first
/// `m` removals.
pub fn defends_by_peeling(s: &PointSet, p: &Point, m: usize, cfg: &PeelConfig) -> Result<bool> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let union = s.with_point(p.clone())?;
    checked_points(&union)?;
    let target = union.len() - 1;
    let graph = PeelGraph::explore(union.points(), union.dim(), m - 1, 1 << target, cfg.state_budget)?;
    let defended = graph.states().all(|st| !graph.hull(st).expect("explored").contains(target));
    Ok(defended)
}

/// Whether every reachable state with more than `d` points shows at least
/// `d + 1` hull vertices.
pub fn lower_bound_audit(ps: &PointSet, cfg: &PeelConfig) -> Result<bool> {
    checked_points(ps)?;
    let graph = PeelGraph::full(ps.points(), ps.dim(), cfg.state_budget)?;
    Ok(audit_graph(&graph, ps.dim()))
}

pub(crate) fn audit_graph(graph: &PeelGraph, dim: usize) -> bool {
    graph.states().all(|st| st.len() <= dim || graph.hull(st).expect("explored").len() > dim)
}

/// `(d+1)^(n-d-1) · (d+1)!`, the count every general-position set reaches
/// (`n!` when `n <= d+1`).
pub fn lower_bound_count(n: usize, dim: usize) -> BigUint {
    if n <= dim + 1 {
        return (1..=n).map(BigUint::from).product();
    }
    let base = BigUint::from(dim + 1);
    let fact: BigUint = (1..=dim + 1).map(BigUint::from).product();
    base.pow((n - dim - 1) as u32) * fact
}

/// Distinct block-symbol strings over all peeling sequences, and the most
/// blocks ever simultaneously showing a hull vertex.
pub fn simplified_census(ps: &PointSet, cfg: &PeelConfig) -> Result<SimplifiedReport> {
    let blocks = ps.blocks.as_ref().ok_or(Error::MissingBlocks)?;
    if ps.len() > cfg.census_limit {
        return Err(Error::TooLarge { size: ps.len(), limit: cfg.census_limit });
    }
    checked_points(ps)?;
    let graph = PeelGraph::full(ps.points(), ps.dim(), cfg.state_budget)?;
    Ok(census_on_graph(&graph, blocks))
}

pub(crate) fn max_active_blocks(graph: &PeelGraph, blocks: &[usize]) -> usize {
    graph
        .states()
        .map(|st| {
            let hull = graph.hull(st).expect("explored");
            hull.indices().map(|v| blocks[v]).collect::<BTreeSet<_>>().len()
        })
        .max()
        .unwrap_or(0)
}

pub(crate) fn census_on_graph(graph: &PeelGraph, blocks: &[usize]) -> SimplifiedReport {
    // Determinize the peeling automaton over the block alphabet: a node is
    // the set of states reachable by one block string. Distinct strings are
    // then paths in an acyclic deterministic automaton.
    fn distinct(set: Vec<u64>, graph: &PeelGraph, blocks: &[usize], memo: &mut HashMap<Vec<u64>, BigUint>) -> BigUint {
        if set == [0] {
            return BigUint::one();
        }
        if let Some(v) = memo.get(&set) {
            return v.clone();
        }
        let mut moves: BTreeMap<usize, BTreeSet<u64>> = BTreeMap::new();
        for &s in &set {
            let hull = graph.hull(PeelState(s)).expect("explored").0;
            for v in mask_indices(hull) {
                moves.entry(blocks[v]).or_default().insert(s & !(1 << v));
            }
        }
        let total =
            moves.into_values().map(|next| distinct(next.into_iter().collect(), graph, blocks, memo)).sum::<BigUint>();
        memo.insert(set, total.clone());
        total
    }

    let mut memo = HashMap::new();
    let distinct_sequences = distinct(vec![full_mask(graph.n())], graph, blocks, &mut memo);
    SimplifiedReport { distinct_sequences, max_active_blocks: max_active_blocks(graph, blocks) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn triangle_plus_interior() -> PointSet {
        PointSet::from_ints(2, &[&[0, 0], &[6, 0], &[0, 6], &[1, 1]]).unwrap()
    }

    fn convex_polygon(n: i64) -> PointSet {
        PointSet::new(2, (0..n).map(|i| Point::from_ints(&[i, i * i])).collect()).unwrap()
    }

    fn cfg() -> PeelConfig {
        PeelConfig::default()
    }

    #[test]
    fn count_examples() {
        assert_eq!(peel_count(&convex_polygon(5), &cfg()).unwrap().count, BigUint::from(120u32));
        assert_eq!(peel_count(&triangle_plus_interior(), &cfg()).unwrap().count, BigUint::from(18u32));
        let line = PointSet::from_ints(1, &[&[0], &[1], &[2]]).unwrap();
        assert_eq!(peel_count(&line, &cfg()).unwrap().count, BigUint::from(4u32));
    }

    #[test]
    fn naive_examples() {
        assert_eq!(peel_count_naive(&triangle_plus_interior(), &cfg()).unwrap(), BigUint::from(18u32));
        assert_eq!(peel_count_naive(&convex_polygon(6), &cfg()).unwrap(), BigUint::from(720u32));
        let one = PointSet::from_ints(2, &[&[3, 4]]).unwrap();
        assert_eq!(peel_count_naive(&one, &cfg()).unwrap(), BigUint::one());
        assert!(matches!(peel_count_naive(&convex_polygon(10), &cfg()), Err(Error::TooLarge { size: 10, limit: 9 })));
    }

    #[test]
    fn degenerate_input_is_rejected() {
        let p = PointSet::from_ints(2, &[&[0, 0], &[1, 1], &[2, 2], &[0, 1]]).unwrap();
        assert_eq!(peel_count(&p, &cfg()), Err(Error::Degenerate { subset: vec![0, 1, 2] }));
    }

    #[test]
    fn state_budget_is_enforced() {
        let small = PeelConfig { state_budget: 10, ..cfg() };
        assert_eq!(peel_count(&convex_polygon(6), &small), Err(Error::StateBudget { budget: 10 }));
    }

    #[test]
    fn enumerate_examples() {
        let p = triangle_plus_interior();
        let seqs = peel_enumerate(&p, 3).unwrap();
        // Hand-derived: lexicographic order removes index 0 first, then the
        // remaining triangle {1,2,3} in every order.
        assert_eq!(seqs, vec![vec![0, 1, 2, 3], vec![0, 1, 3, 2], vec![0, 2, 1, 3]]);
        for s in &seqs {
            assert!(is_peeling_sequence(&p, s));
        }
        assert!(peel_enumerate(&p, 0).unwrap().is_empty());
        let two = PointSet::from_ints(2, &[&[0, 0], &[1, 0]]).unwrap();
        assert_eq!(peel_enumerate(&two, 10).unwrap(), vec![vec![0, 1], vec![1, 0]]);
        let all = peel_enumerate(&p, 1000).unwrap();
        assert_eq!(all.len(), 18);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        // The interior point can never go first.
        assert!(all.iter().all(|s| s[0] != 3));
        assert!(!is_peeling_sequence(&p, &[3, 0, 1, 2]));
    }

    #[test]
    fn defense_examples() {
        let tri = PointSet::from_ints(2, &[&[2, 0], &[-1, 2], &[-1, -2]]).unwrap();
        let o = Point::origin(2);
        assert!(defends_by_peeling(&tri, &o, 1, &cfg()).unwrap());
        assert!(!defends_by_peeling(&tri, &o, 2, &cfg()).unwrap());
        let line = PointSet::from_ints(1, &[&[-2], &[-1], &[1], &[2]]).unwrap();
        let o1 = Point::origin(1);
        assert!(defends_by_peeling(&line, &o1, 1, &cfg()).unwrap());
        assert!(defends_by_peeling(&line, &o1, 2, &cfg()).unwrap());
        assert!(!defends_by_peeling(&line, &o1, 3, &cfg()).unwrap());
        assert!(defends_by_peeling(&line, &o1, 0, &cfg()).is_err());
        // Degenerate union.
        let bad = PointSet::from_ints(2, &[&[1, 1], &[-1, 2], &[-1, -2]]).unwrap();
        let q = Point::from_ints(&[-1, 0]);
        assert!(matches!(defends_by_peeling(&bad, &q, 1, &cfg()), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn audit_examples() {
        assert!(lower_bound_audit(&triangle_plus_interior(), &cfg()).unwrap());
        let simplex = PointSet::from_ints(3, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        assert!(lower_bound_audit(&simplex, &cfg()).unwrap());
        assert_eq!(lower_bound_count(4, 2), BigUint::from(18u32));
        assert_eq!(lower_bound_count(3, 2), BigUint::from(6u32));
    }

    #[test]
    fn census_examples() {
        let p = triangle_plus_interior();
        assert_eq!(simplified_census(&p, &cfg()), Err(Error::MissingBlocks));
        let one_block = p.clone().with_blocks(vec![7; 4]).unwrap();
        let r = simplified_census(&one_block, &cfg()).unwrap();
        assert_eq!(r.distinct_sequences, BigUint::one());
        assert_eq!(r.max_active_blocks, 1);
        let singletons = p.clone().with_blocks(vec![0, 1, 2, 3]).unwrap();
        let r = simplified_census(&singletons, &cfg()).unwrap();
        assert_eq!(r.distinct_sequences, BigUint::from(18u32));
        assert_eq!(r.max_active_blocks, 3);
        // Interior point shares a block with one corner. Strings over {a,b,c}
        // with a twice: corner 0 and the interior point 3 are both `a`.
        let paired = p.with_blocks(vec![0, 1, 2, 0]).unwrap();
        let r = simplified_census(&paired, &cfg()).unwrap();
        let all = peel_enumerate(&paired, 1000).unwrap();
        let strings: BTreeSet<Vec<usize>> = all.iter().map(|s| s.iter().map(|&v| [0, 1, 2, 0][v]).collect()).collect();
        assert_eq!(r.distinct_sequences, BigUint::from(strings.len()));
    }

    #[test]
    fn rational_coordinates_count() {
        let p = PointSet::new(
            2,
            vec![
                Point::new(vec![ratio(1, 3), int(0)]),
                Point::new(vec![int(5), ratio(1, 7)]),
                Point::new(vec![int(0), int(5)]),
                Point::new(vec![ratio(4, 3), ratio(3, 2)]),
                Point::new(vec![ratio(3, 2), ratio(4, 3)]),
            ],
        )
        .unwrap();
        let fast = peel_count(&p, &cfg()).unwrap().count;
        assert_eq!(fast, peel_count_naive(&p, &cfg()).unwrap());
        let seqs = peel_enumerate(&p, usize::MAX).unwrap();
        assert_eq!(BigUint::from(seqs.len()), fast);
    }
}
