//! The square-quotient relation on walks: lifted cycles, the join
//! construction, fundamental-cycle generators, and a bounded equivalence
//! oracle for testing.
//!
//! Two walks are equivalent when one can be turned into the other by
//! elementary steps: deleting or introducing a subwalk `e _ e^{-1}`, or
//! replacing a subwalk `v1 v2 _ v2 v3` with `v1 v4 _ v4 v3` across a square.
//! Equivalence classes are never materialized as values; class-level
//! reasoning goes through complete invariants (reduction for square-free
//! graphs, winding for circular cliques) or through the bounded oracle here.

use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::graph::Graph;
use crate::walk::Walk;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomotopyError {
    #[error("({0},{1}) is not an edge of the ambient graph")]
    InvalidEdge(usize, usize),
    #[error("walk lengths {0} and {1} have different parity")]
    ParityMismatch(usize, usize),
    #[error("cannot pad a walk ending at isolated vertex {0}")]
    NoPaddingEdge(usize),
    #[error("walk error: {0}")]
    Walk(#[from] crate::walk::WalkError),
}

/// Which factor of a tensor product a walk or an anchor edge lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftSide {
    Left,
    Right,
}

/// The closed product walk whose projection to one factor is `C _ C` and to
/// the other alternates across the anchor edge. For `side = Left`, `c` is
/// closed in `g` and `edge` is an oriented edge of `h`; the result lives in
/// `g x h` (row-major flats) and has length `2|C|`.
pub fn lift_cycle(
    c: &Walk,
    edge: (usize, usize),
    side: LiftSide,
    g: &Graph,
    h: &Graph,
) -> Result<Walk, HomotopyError> {
    let hn = h.vertex_count();
    match side {
        LiftSide::Left => {
            Walk::new(g, c.vertices().to_vec())?;
            if !h.has_edge(edge.0, edge.1) {
                return Err(HomotopyError::InvalidEdge(edge.0, edge.1));
            }
            Ok(alternating_lift(c, edge, hn, |gv, hv| gv * hn + hv))
        }
        LiftSide::Right => {
            Walk::new(h, c.vertices().to_vec())?;
            if !g.has_edge(edge.0, edge.1) {
                return Err(HomotopyError::InvalidEdge(edge.0, edge.1));
            }
            Ok(alternating_lift(c, edge, hn, |hv, gv| gv * hn + hv))
        }
    }
}

fn alternating_lift(
    c: &Walk,
    edge: (usize, usize),
    _hn: usize,
    flat: impl Fn(usize, usize) -> usize,
) -> Walk {
    let m = c.len();
    if m == 0 {
        return Walk::new_unchecked(vec![flat(c.start(), edge.0)]);
    }
    let verts = (0..=2 * m)
        .map(|t| {
            let cv = c.vertices()[t % m];
            let ev = if t % 2 == 0 { edge.0 } else { edge.1 };
            flat(cv, ev)
        })
        .collect();
    Walk::new_unchecked(verts)
}

/// Zips two parity-matched walks into a product walk, padding the shorter one
/// at its end with back-and-forth repetitions of its final edge. Projections
/// reduce to the reductions of the inputs.
pub fn join(p: &Walk, q: &Walk, g: &Graph, h: &Graph) -> Result<Walk, HomotopyError> {
    Walk::new(g, p.vertices().to_vec())?;
    Walk::new(h, q.vertices().to_vec())?;
    if p.len() % 2 != q.len() % 2 {
        return Err(HomotopyError::ParityMismatch(p.len(), q.len()));
    }
    let target = p.len().max(q.len());
    let pv = pad_to(p, target, g)?;
    let qv = pad_to(q, target, h)?;
    let hn = h.vertex_count();
    let verts = pv.iter().zip(qv.iter()).map(|(&a, &b)| a * hn + b).collect();
    Ok(Walk::new_unchecked(verts))
}

fn pad_to(w: &Walk, target: usize, ambient: &Graph) -> Result<Vec<usize>, HomotopyError> {
    let mut verts = w.vertices().to_vec();
    if w.len() == target {
        return Ok(verts);
    }
    let end = w.end();
    let back = if w.len() > 0 {
        w.vertices()[w.vertices().len() - 2]
    } else {
        *ambient
            .neighbors(end)
            .first()
            .ok_or(HomotopyError::NoPaddingEdge(end))?
    };
    for _ in 0..(target - w.len()) / 2 {
        verts.push(back);
        verts.push(end);
    }
    Ok(verts)
}

/// A BFS spanning tree of the base's component with one based closed walk per
/// non-tree edge. These walks generate the fundamental group at the base, so
/// a property verified on them extends to all closed walks from the base.
#[derive(Debug, Clone)]
pub struct FundamentalCycleBasis {
    pub base: usize,
    pub tree_parent: Vec<Option<usize>>,
    pub cycles: Vec<Walk>,
}

pub fn fundamental_cycles(g: &Graph, base: usize) -> FundamentalCycleBasis {
    let n = g.vertex_count();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut reached = vec![false; n];
    reached[base] = true;
    let mut queue = VecDeque::from([base]);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if !reached[v] {
                reached[v] = true;
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    let tree_path = |mut v: usize| -> Vec<usize> {
        let mut path = vec![v];
        while let Some(p) = parent[v] {
            path.push(p);
            v = p;
        }
        path.reverse();
        path
    };
    let mut cycles = Vec::new();
    for (u, v) in g.edges() {
        if !reached[u] || parent[v] == Some(u) || parent[u] == Some(v) {
            continue;
        }
        let mut verts = tree_path(u);
        let mut back = tree_path(v);
        back.reverse();
        verts.extend(back);
        cycles.push(Walk::new_unchecked(verts));
    }
    FundamentalCycleBasis {
        base,
        tree_parent: parent,
        cycles,
    }
}

/// Verdict of the bounded equivalence search. `Related` carries a replayable
/// chain of walks, each differing from the previous by one elementary step.
/// Definite `NotRelated` comes only from invariant mismatches (endpoints or
/// length parity); exhausting the capped search space is an honest `Unknown`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Related(Vec<Walk>),
    NotRelated,
    Unknown,
}

impl Equivalence {
    pub fn is_related(&self) -> bool {
        matches!(self, Equivalence::Related(_))
    }
}

/// Caps for the equivalence BFS: intermediate walks may grow by at most
/// `length_slack` edges over the longer input, and at most `max_nodes` states
/// are expanded.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub max_nodes: usize,
    pub length_slack: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 100_000,
            length_slack: 6,
        }
    }
}

/// BFS over elementary steps from `w` toward `w2`. Square moves also allow
/// trivial squares.
pub fn equivalent_bounded(g: &Graph, w: &Walk, w2: &Walk, budget: SearchBudget) -> Equivalence {
    if w.start() != w2.start() || w.end() != w2.end() || w.len() % 2 != w2.len() % 2 {
        return Equivalence::NotRelated;
    }
    let cap = w.len().max(w2.len()) + budget.length_slack;
    let start = w.vertices().to_vec();
    let target = w2.vertices().to_vec();
    if start == target {
        return Equivalence::Related(vec![w.clone()]);
    }
    let mut pred: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    let mut expanded = 0;
    while let Some(cur) = queue.pop_front() {
        expanded += 1;
        if expanded > budget.max_nodes {
            return Equivalence::Unknown;
        }
        for next in elementary_steps(g, &cur, cap) {
            if seen.contains(&next) {
                continue;
            }
            pred.insert(next.clone(), cur.clone());
            if next == target {
                let mut chain = vec![Walk::new_unchecked(next)];
                let mut back = &cur;
                loop {
                    chain.push(Walk::new_unchecked(back.clone()));
                    match pred.get(back) {
                        Some(p) => back = p,
                        None => break,
                    }
                }
                chain.reverse();
                return Equivalence::Related(chain);
            }
            seen.insert(next.clone());
            queue.push_back(next);
        }
    }
    Equivalence::Unknown
}

fn elementary_steps(g: &Graph, verts: &[usize], cap: usize) -> Vec<Vec<usize>> {
    let n = verts.len();
    let mut out = Vec::new();
    // Delete a backtracking pair.
    for i in 0..n.saturating_sub(2) {
        if verts[i] == verts[i + 2] {
            let mut next = Vec::with_capacity(n - 2);
            next.extend_from_slice(&verts[..=i]);
            next.extend_from_slice(&verts[i + 3..]);
            out.push(next);
        }
    }
    // Introduce e _ e^{-1} at any position.
    if n + 1 <= cap {
        for i in 0..n {
            for &x in g.neighbors(verts[i]) {
                let mut next = Vec::with_capacity(n + 2);
                next.extend_from_slice(&verts[..=i]);
                next.push(x);
                next.push(verts[i]);
                next.extend_from_slice(&verts[i + 1..]);
                out.push(next);
            }
        }
    }
    // Square replacement of an interior vertex.
    for i in 1..n.saturating_sub(1) {
        let (a, b, c) = (verts[i - 1], verts[i], verts[i + 1]);
        for &x in g.neighbors(a) {
            if x != b && g.has_edge(x, c) {
                let mut next = verts.to_vec();
                next[i] = x;
                out.push(next);
            }
        }
    }
    out
}

/// Checks that consecutive walks in a chain differ by exactly one legal
/// elementary step (or are equal), preserving endpoints and parity. Used to
/// audit traces, including traces mapped through a homomorphism or projected
/// to a factor.
pub fn verify_elementary_chain(g: &Graph, chain: &[Walk]) -> bool {
    chain.windows(2).all(|pair| {
        let (a, b) = (&pair[0], &pair[1]);
        if a.start() != b.start() || a.end() != b.end() || a.len() % 2 != b.len() % 2 {
            return false;
        }
        if a.vertices() == b.vertices() {
            return true;
        }
        let cap = a.len().max(b.len()) + 2;
        elementary_steps(g, a.vertices(), cap)
            .iter()
            .any(|s| s == b.vertices())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Homomorphism;
    use crate::walk::reduce;

    #[test]
    fn lift_cycle_left_example() {
        let g = Graph::clique(3);
        let h = Graph::new(2, &[(0, 1)]).unwrap();
        let c = Walk::new(&g, vec![0, 1, 2, 0]).unwrap();
        let lifted = lift_cycle(&c, (0, 1), LiftSide::Left, &g, &h).unwrap();
        // (0,a) (1,b) (2,a) (0,b) (1,a) (2,b) (0,a) with a=0, b=1.
        assert_eq!(lifted.vertices(), &[0, 3, 4, 1, 2, 5, 0]);
        assert_eq!(lifted.len(), 2 * c.len());
        assert!(lifted.is_closed());
    }

    #[test]
    fn lift_cycle_projections() {
        let g = Graph::cycle(5);
        let h = Graph::cycle(7);
        let c = Walk::new(&g, vec![0, 1, 2, 3, 4, 0]).unwrap();
        let lifted = lift_cycle(&c, (2, 3), LiftSide::Left, &g, &h).unwrap();
        assert_eq!(lifted.len(), 10);
        let left: Vec<usize> = lifted.vertices().iter().map(|v| v / 7).collect();
        let right: Vec<usize> = lifted.vertices().iter().map(|v| v % 7).collect();
        assert_eq!(left, vec![0, 1, 2, 3, 4, 0, 1, 2, 3, 4, 0]);
        assert_eq!(right, vec![2, 3, 2, 3, 2, 3, 2, 3, 2, 3, 2]);

        let d = Walk::new(&h, vec![1, 2, 3, 4, 5, 6, 0, 1]).unwrap();
        let rl = lift_cycle(&d, (3, 4), LiftSide::Right, &g, &h).unwrap();
        assert_eq!(rl.len(), 2 * d.len());
        let left: Vec<usize> = rl.vertices().iter().map(|v| v / 7).collect();
        assert!(left.iter().step_by(2).all(|&x| x == 3));
        assert!(left.iter().skip(1).step_by(2).all(|&x| x == 4));

        assert!(lift_cycle(&c, (0, 2), LiftSide::Left, &g, &h).is_err());
    }

    #[test]
    fn join_equal_lengths_zips() {
        let g = Graph::path(3);
        let h = Graph::new(2, &[(0, 1)]).unwrap();
        let p = Walk::new(&g, vec![0, 1, 2]).unwrap();
        let q = Walk::new(&h, vec![0, 1, 0]).unwrap();
        let j = join(&p, &q, &g, &h).unwrap();
        assert_eq!(j.vertices(), &[0, 3, 4]);
    }

    #[test]
    fn join_pads_shorter_side() {
        let g = Graph::cycle(5);
        let h = Graph::cycle(5);
        let p = Walk::new(&g, vec![0, 1, 2, 3, 4]).unwrap();
        let q = Walk::new(&h, vec![2, 3, 4]).unwrap();
        let j = join(&p, &q, &g, &h).unwrap();
        assert_eq!(j.len(), 4);
        let right: Vec<usize> = j.vertices().iter().map(|v| v % 5).collect();
        assert_eq!(right, vec![2, 3, 4, 3, 4]);
        assert_eq!(reduce(&Walk::new_unchecked(right)).vertices(), &[2, 3, 4]);

        let odd = Walk::new(&h, vec![2, 3]).unwrap();
        assert!(matches!(
            join(&p, &odd, &g, &h),
            Err(HomotopyError::ParityMismatch(4, 1))
        ));
    }

    #[test]
    fn join_reduction_compatibility_random() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let g = Graph::cycle(5);
        let h = Graph::cycle(7);
        let mut done = 0;
        while done < 200 {
            let mut pv = vec![rng.gen_range(0..5)];
            for _ in 0..rng.gen_range(0..10) {
                let cur = *pv.last().unwrap();
                pv.push(g.neighbors(cur)[rng.gen_range(0..2)]);
            }
            let mut qv = vec![rng.gen_range(0..7)];
            for _ in 0..rng.gen_range(0..10) {
                let cur = *qv.last().unwrap();
                qv.push(h.neighbors(cur)[rng.gen_range(0..2)]);
            }
            let p = Walk::new_unchecked(pv);
            let q = Walk::new_unchecked(qv);
            if p.len() % 2 != q.len() % 2 {
                continue;
            }
            let j = join(&p, &q, &g, &h).unwrap();
            let left = Walk::new_unchecked(j.vertices().iter().map(|v| v / 7).collect());
            let right = Walk::new_unchecked(j.vertices().iter().map(|v| v % 7).collect());
            assert_eq!(reduce(&left), reduce(&p));
            assert_eq!(reduce(&right), reduce(&q));
            done += 1;
        }
    }

    #[test]
    fn fundamental_cycle_counts() {
        let tree = Graph::path(6);
        assert!(fundamental_cycles(&tree, 0).cycles.is_empty());

        let basis = fundamental_cycles(&Graph::cycle(5), 0);
        assert_eq!(basis.cycles.len(), 1);
        for c in &basis.cycles {
            assert_eq!(c.start(), 0);
            assert!(c.is_closed());
        }

        assert_eq!(fundamental_cycles(&Graph::clique(4), 0).cycles.len(), 3);
    }

    #[test]
    fn oracle_relates_walk_to_its_reduction() {
        let g = Graph::cycle(5);
        let w = Walk::new(&g, vec![0, 1, 0, 4, 0, 1, 2]).unwrap();
        let r = reduce(&w);
        match equivalent_bounded(&g, &w, r.as_walk(), SearchBudget::default()) {
            Equivalence::Related(chain) => assert!(verify_elementary_chain(&g, &chain)),
            other => panic!("expected related, got {other:?}"),
        }
    }

    #[test]
    fn oracle_square_move_in_c4() {
        let g = Graph::cycle(4);
        let a = Walk::new(&g, vec![0, 1, 2]).unwrap();
        let b = Walk::new(&g, vec![0, 3, 2]).unwrap();
        assert!(equivalent_bounded(&g, &a, &b, SearchBudget::default()).is_related());
    }

    #[test]
    fn oracle_distinct_reductions_in_square_free() {
        let g = Graph::cycle(6);
        let a = Walk::new(&g, vec![0, 1, 2, 3]).unwrap();
        let b = Walk::new(&g, vec![0, 5, 4, 3]).unwrap();
        // Both reduced and unequal; parity differs by 0 but they can never
        // meet, so the capped search must not claim relatedness.
        let verdict = equivalent_bounded(
            &g,
            &a,
            &b,
            SearchBudget {
                max_nodes: 50_000,
                length_slack: 6,
            },
        );
        assert!(!verdict.is_related());
    }

    #[test]
    fn oracle_respects_endpoint_and_parity_invariants() {
        let g = Graph::cycle(5);
        let a = Walk::new(&g, vec![0, 1]).unwrap();
        let b = Walk::new(&g, vec![0, 4]).unwrap();
        assert_eq!(
            equivalent_bounded(&g, &a, &b, SearchBudget::default()),
            Equivalence::NotRelated
        );
        let c = Walk::new(&g, vec![0, 1, 2]).unwrap();
        let d = Walk::new(&g, vec![0, 4, 3, 2, 1, 2]).unwrap();
        assert_eq!(
            equivalent_bounded(&g, &c, &d, SearchBudget::default()),
            Equivalence::NotRelated
        );
    }

    #[test]
    fn functoriality_of_traces_under_homomorphisms() {
        // Map a C_8 trace through a homomorphism onto C_4 and verify the
        // image chain is still made of legal elementary steps.
        let g = Graph::cycle(8);
        let k = Graph::cycle(4);
        let mu = Homomorphism::new((0..8).map(|v| v % 4).collect(), &g, &k).unwrap();
        let w = Walk::new(&g, vec![0, 1, 2, 1, 2, 3, 4]).unwrap();
        let r = reduce(&w);
        if let Equivalence::Related(chain) =
            equivalent_bounded(&g, &w, r.as_walk(), SearchBudget::default())
        {
            let mapped: Vec<Walk> = chain.iter().map(|c| mu.map_walk(c)).collect();
            assert!(verify_elementary_chain(&k, &mapped));
        } else {
            panic!("reduction chain must exist");
        }
    }

    #[test]
    fn projection_compatibility_of_product_traces() {
        let g = Graph::cycle(4);
        let h = Graph::cycle(3);
        let p = g.tensor_product(&h);
        let w = Walk::new(&p, vec![0 * 3 + 0, 1 * 3 + 1, 0 * 3 + 2, 1 * 3 + 0, 0 * 3 + 1]).unwrap();
        let w2v: Vec<usize> = vec![0 * 3 + 0, 3 * 3 + 1, 0 * 3 + 2, 3 * 3 + 0, 0 * 3 + 1];
        let w2 = Walk::new(&p, w2v).unwrap();
        if let Equivalence::Related(chain) = equivalent_bounded(&p, &w, &w2, SearchBudget::default())
        {
            let left: Vec<Walk> = chain
                .iter()
                .map(|c| Walk::new_unchecked(c.vertices().iter().map(|v| v / 3).collect()))
                .collect();
            let right: Vec<Walk> = chain
                .iter()
                .map(|c| Walk::new_unchecked(c.vertices().iter().map(|v| v % 3).collect()))
                .collect();
            assert!(verify_elementary_chain(&g, &left));
            assert!(verify_elementary_chain(&h, &right));
        } else {
            panic!("square moves should relate the two walks");
        }
    }
}
