//! Independent ground-truth generators: brute-force homomorphism search and
//! enumeration, and a recoloring-reachability BFS over the space of
//! colorings. These are deliberately simple and exhaustive so the solvers
//! can be checked against them.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::graph::{Graph, Homomorphism};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration budget exceeded after {found} homomorphisms")]
    BudgetExceeded {
        found: usize,
        partial: Vec<Homomorphism>,
    },
}

/// Caps for enumeration: solutions collected and search-tree nodes visited.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationBudget {
    pub max_solutions: usize,
    pub max_nodes: usize,
}

impl EnumerationBudget {
    pub fn new(max_solutions: usize, max_nodes: usize) -> Self {
        assert!(max_solutions > 0 && max_nodes > 0);
        EnumerationBudget {
            max_solutions,
            max_nodes,
        }
    }
}

/// Finds one homomorphism `domain -> codomain` by backtracking with
/// arc-consistency pruning, or proves there is none. Variable order:
/// descending degree (ties by index); value order: ascending index.
pub fn find_hom(domain: &Graph, codomain: &Graph) -> Option<Homomorphism> {
    let n = domain.vertex_count();
    let k = codomain.vertex_count();
    if n == 0 {
        return Some(Homomorphism::new_unchecked(Vec::new(), k));
    }
    if k == 0 {
        return None;
    }
    let mut domains = vec![vec![true; k]; n];
    if !arc_consistency(domain, codomain, &mut domains) {
        return None;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(domain.degree(v)), v));
    let mut assignment = vec![usize::MAX; n];
    if backtrack_one(domain, codomain, &order, 0, &mut assignment, &domains) {
        Some(Homomorphism::new_unchecked(assignment, k))
    } else {
        None
    }
}

fn backtrack_one(
    domain: &Graph,
    codomain: &Graph,
    order: &[usize],
    depth: usize,
    assignment: &mut Vec<usize>,
    domains: &[Vec<bool>],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    'values: for c in 0..codomain.vertex_count() {
        if !domains[v][c] {
            continue;
        }
        for &u in domain.neighbors(v) {
            if assignment[u] != usize::MAX && !codomain.has_edge(c, assignment[u]) {
                continue 'values;
            }
        }
        assignment[v] = c;
        // Re-establish arc consistency on the reduced domains.
        let mut pruned = domains.to_vec();
        pruned[v] = vec![false; codomain.vertex_count()];
        pruned[v][c] = true;
        if arc_consistency(domain, codomain, &mut pruned)
            && backtrack_one(domain, codomain, order, depth + 1, assignment, &pruned)
        {
            return true;
        }
        assignment[v] = usize::MAX;
    }
    false
}

/// AC-3: repeatedly drops colors without a supporting neighbor color.
/// Returns false on a domain wipeout.
fn arc_consistency(domain: &Graph, codomain: &Graph, domains: &mut [Vec<bool>]) -> bool {
    let mut queue: VecDeque<(usize, usize)> = domain
        .edges()
        .flat_map(|(u, v)| [(u, v), (v, u)])
        .collect();
    while let Some((u, v)) = queue.pop_front() {
        let mut revised = false;
        for c in 0..domains[u].len() {
            if !domains[u][c] {
                continue;
            }
            let supported = codomain
                .neighbors(c)
                .iter()
                .any(|&c2| domains[v][c2]);
            if !supported {
                domains[u][c] = false;
                revised = true;
            }
        }
        if revised {
            if domains[u].iter().all(|&b| !b) {
                return false;
            }
            for &w in domain.neighbors(u) {
                if w != v {
                    queue.push_back((w, u));
                }
            }
        }
    }
    true
}

/// Enumerates homomorphisms in lexicographic order of the map vector, up to
/// the budget. A complete enumeration returns `Ok`; hitting either cap
/// returns the partial list as an error.
pub fn enumerate_homs(
    domain: &Graph,
    codomain: &Graph,
    budget: &EnumerationBudget,
) -> Result<Vec<Homomorphism>, OracleError> {
    let n = domain.vertex_count();
    let mut found: Vec<Homomorphism> = Vec::new();
    let mut nodes = 0usize;
    let mut assignment = vec![0usize; n];
    let complete = enumerate_rec(
        domain,
        codomain,
        0,
        &mut assignment,
        &mut found,
        &mut nodes,
        budget,
    );
    if complete {
        Ok(found)
    } else {
        Err(OracleError::BudgetExceeded {
            found: found.len(),
            partial: found,
        })
    }
}

fn enumerate_rec(
    domain: &Graph,
    codomain: &Graph,
    v: usize,
    assignment: &mut Vec<usize>,
    found: &mut Vec<Homomorphism>,
    nodes: &mut usize,
    budget: &EnumerationBudget,
) -> bool {
    if v == domain.vertex_count() {
        found.push(Homomorphism::new_unchecked(
            assignment.clone(),
            codomain.vertex_count(),
        ));
        return found.len() < budget.max_solutions;
    }
    'values: for c in 0..codomain.vertex_count() {
        *nodes += 1;
        if *nodes > budget.max_nodes {
            return false;
        }
        for &u in domain.neighbors(v) {
            if u < v && !codomain.has_edge(c, assignment[u]) {
                continue 'values;
            }
        }
        assignment[v] = c;
        if !enumerate_rec(domain, codomain, v + 1, assignment, found, nodes, budget) {
            return false;
        }
    }
    true
}

/// One single-vertex recoloring move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecolorMove {
    pub vertex: usize,
    pub to: usize,
}

/// Outcome of the reachability BFS. `Unreachable` is exact: the whole
/// connected component of the start coloring was explored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reachability {
    Reachable(Vec<RecolorMove>),
    Unreachable,
    Unknown,
}

/// BFS over single-vertex recoloring moves between two colorings of `g`
/// into `k`. Colorings are hashed canonically (as their map vectors).
pub fn recolor_reachable(
    from: &Homomorphism,
    to: &Homomorphism,
    g: &Graph,
    k: &Graph,
    budget: &EnumerationBudget,
) -> Reachability {
    if from.map() == to.map() {
        return Reachability::Reachable(Vec::new());
    }
    let start: Vec<usize> = from.map().to_vec();
    let target: Vec<usize> = to.map().to_vec();
    let mut pred: HashMap<Vec<usize>, (Vec<usize>, RecolorMove)> = HashMap::new();
    let mut seen: HashMap<Vec<usize>, ()> = HashMap::from([(start.clone(), ())]);
    let mut queue = VecDeque::from([start.clone()]);
    let mut expanded = 0usize;
    while let Some(cur) = queue.pop_front() {
        expanded += 1;
        if expanded > budget.max_nodes {
            return Reachability::Unknown;
        }
        for v in 0..g.vertex_count() {
            'colors: for c in 0..k.vertex_count() {
                if c == cur[v] {
                    continue;
                }
                for &u in g.neighbors(v) {
                    if !k.has_edge(c, cur[u]) {
                        continue 'colors;
                    }
                }
                let mut next = cur.clone();
                next[v] = c;
                if seen.contains_key(&next) {
                    continue;
                }
                let mv = RecolorMove { vertex: v, to: c };
                pred.insert(next.clone(), (cur.clone(), mv));
                if next == target {
                    let mut moves = Vec::new();
                    let mut state = &next;
                    while let Some((prev, mv)) = pred.get(state) {
                        moves.push(*mv);
                        state = prev;
                    }
                    moves.reverse();
                    return Reachability::Reachable(moves);
                }
                seen.insert(next.clone(), ());
                queue.push_back(next);
            }
        }
    }
    Reachability::Unreachable
}
