//! Immutable graph values, standard families, tensor products, structural
//! predicates, and homomorphism validation.
//!
//! Vertices are dense 0-based integers; anything resembling a label lives in
//! the CLI layer. All values here are immutable after construction and safe
//! to share between threads.

use thiserror::Error;

use crate::walk::Walk;

/// Errors from graph constructors and homomorphism validation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("loop edge at vertex {0}")]
    LoopEdge(usize),
    #[error("vertex {v} out of range (order {n})")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{0} is not an odd integer >= 3")]
    NotOdd(usize),
    #[error("homomorphism size mismatch: map length {map_len}, domain order {domain}")]
    SizeMismatch { map_len: usize, domain: usize },
    #[error("map is not edge-preserving on {{{u},{v}}}")]
    NotEdgePreserving { u: usize, v: usize },
    #[error("component of vertex {0} is bipartite")]
    BipartiteComponent(usize),
}

/// A simple loopless undirected graph with sorted adjacency sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph on `n` vertices from a list of unordered pairs.
    /// Duplicate edges collapse; loops and out-of-range endpoints are errors.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u == v {
                return Err(GraphError::LoopEdge(u));
            }
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { v: w, n });
                }
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        Ok(Graph { adj })
    }

    /// Path on `n` vertices: edges `{i, i+1}`.
    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &edges).expect("path edges are valid")
    }

    /// Cycle on `n >= 3` vertices: edges `{i, i+1 mod n}`.
    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, &edges).expect("cycle edges are valid")
    }

    /// Complete graph on `n` vertices.
    pub fn clique(n: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Graph::new(n, &edges).expect("clique edges are valid")
    }

    /// Circular clique: vertices `Z_p`, edges `{i, i+j}` for `j = q..p-q`.
    /// Requires `p >= 2q >= 2`.
    pub fn circular_clique(p: usize, q: usize) -> Result<Graph, GraphError> {
        if q == 0 || p < 2 * q {
            return Err(GraphError::InvalidParams(format!(
                "circular clique requires p >= 2q >= 2, got p={p}, q={q}"
            )));
        }
        let mut edges = Vec::new();
        for i in 0..p {
            for j in q..=(p - q) {
                edges.push((i, (i + j) % p));
            }
        }
        Graph::new(p, &edges)
    }

    /// The Petersen graph as the Kneser graph on 2-subsets of a 5-set:
    /// vertices are the pairs in lexicographic order, adjacent iff disjoint.
    pub fn petersen() -> Graph {
        let mut pairs = Vec::new();
        for a in 0..5usize {
            for b in (a + 1)..5 {
                pairs.push((a, b));
            }
        }
        let mut edges = Vec::new();
        for i in 0..pairs.len() {
            for j in (i + 1)..pairs.len() {
                let (a, b) = pairs[i];
                let (c, d) = pairs[j];
                if a != c && a != d && b != c && b != d {
                    edges.push((i, j));
                }
            }
        }
        Graph::new(10, &edges).expect("petersen edges are valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as ordered pairs `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn has_isolated_vertex(&self) -> bool {
        self.adj.iter().any(Vec::is_empty)
    }

    /// Tensor (categorical) product. The vertex `(g, h)` is flattened
    /// row-major as `g * |V(H)| + h`; `{(g0,h0),(g1,h1)}` is an edge iff
    /// `g0g1` and `h0h1` both are.
    pub fn tensor_product(&self, other: &Graph) -> Graph {
        let hn = other.vertex_count();
        let mut adj = vec![Vec::new(); self.vertex_count() * hn];
        for g in 0..self.vertex_count() {
            for h in 0..hn {
                let mut nbrs = Vec::with_capacity(self.degree(g) * other.degree(h));
                for &g2 in self.neighbors(g) {
                    for &h2 in other.neighbors(h) {
                        nbrs.push(g2 * hn + h2);
                    }
                }
                nbrs.sort_unstable();
                adj[g * hn + h] = nbrs;
            }
        }
        Graph { adj }
    }

    /// True iff the graph has no non-trivial square `v1 v2 v3 v4` (four edges
    /// with `v1 != v3` and `v2 != v4`). Runs the common-neighbor-pair check.
    pub fn is_square_free(&self) -> bool {
        let n = self.vertex_count();
        for u in 0..n {
            for v in (u + 1)..n {
                let mut common = 0;
                let (a, b) = (&self.adj[u], &self.adj[v]);
                let (mut i, mut j) = (0, 0);
                while i < a.len() && j < b.len() {
                    match a[i].cmp(&b[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            common += 1;
                            i += 1;
                            j += 1;
                        }
                    }
                }
                if common >= 2 {
                    return false;
                }
            }
        }
        true
    }

    /// Connected components as sorted vertex lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &v in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// BFS 2-coloring. Returns either a valid bipartition or an odd closed
    /// walk as witness (based at the BFS root of the offending component).
    pub fn bipartition(&self) -> Bipartiteness {
        let n = self.vertex_count();
        let mut side = vec![u8::MAX; n];
        for root in 0..n {
            if side[root] != u8::MAX {
                continue;
            }
            side[root] = 0;
            let mut parent = vec![usize::MAX; n];
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if side[v] == u8::MAX {
                        side[v] = 1 - side[u];
                        parent[v] = u;
                        queue.push_back(v);
                    } else if side[v] == side[u] {
                        return Bipartiteness::OddWalk(odd_walk_witness(&parent, root, u, v));
                    }
                }
            }
        }
        Bipartiteness::Bipartite(Bipartition {
            side: side.into_iter().map(|s| s == 1).collect(),
        })
    }

    pub fn is_bipartite(&self) -> bool {
        matches!(self.bipartition(), Bipartiteness::Bipartite(_))
    }

    /// A closed walk of odd length based at `v`, chosen minimal among the
    /// conflicts a BFS from `v` detects. Errors if `v`'s component is
    /// bipartite.
    pub fn odd_closed_walk_from(&self, v: usize) -> Result<Walk, GraphError> {
        let n = self.vertex_count();
        let mut depth = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        depth[v] = 0;
        let mut queue = std::collections::VecDeque::from([v]);
        let mut order = Vec::new();
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in self.neighbors(u) {
                if depth[w] == usize::MAX {
                    depth[w] = depth[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        // Conflict edge = same-parity pair; minimize the resulting walk length.
        let mut best: Option<(usize, usize, usize)> = None;
        for &u in &order {
            for &w in self.neighbors(u) {
                if u < w && depth[w] != usize::MAX && (depth[u] + depth[w]) % 2 == 0 {
                    let len = depth[u] + depth[w] + 1;
                    let cand = (len, u, w);
                    if best.map_or(true, |b| cand < b) {
                        best = Some(cand);
                    }
                }
            }
        }
        match best {
            Some((_, u, w)) => Ok(odd_walk_witness(&parent, v, u, w)),
            None => Err(GraphError::BipartiteComponent(v)),
        }
    }

    /// Graph with the given unordered edges deleted.
    pub fn without_edges(&self, removed: &std::collections::HashSet<(usize, usize)>) -> Graph {
        let norm = |u: usize, v: usize| if u < v { (u, v) } else { (v, u) };
        let kept: Vec<_> = self
            .edges()
            .filter(|&(u, v)| !removed.contains(&norm(u, v)))
            .collect();
        Graph::new(self.vertex_count(), &kept).expect("subset of valid edges")
    }

    /// Subgraph induced on `verts` (sorted). Returns the subgraph together
    /// with the map from new indices back to old ones.
    pub fn induced_subgraph(&self, verts: &[usize]) -> (Graph, Vec<usize>) {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in verts.iter().enumerate() {
            index[v] = i;
        }
        let mut edges = Vec::new();
        for &v in verts {
            for &w in self.neighbors(v) {
                if v < w && index[w] != usize::MAX {
                    edges.push((index[v], index[w]));
                }
            }
        }
        (
            Graph::new(verts.len(), &edges).expect("induced edges are valid"),
            verts.to_vec(),
        )
    }
}

/// Reconstructs `path(root->u) _ uv _ path(v->root)` from BFS parents.
fn odd_walk_witness(parent: &[usize], root: usize, u: usize, v: usize) -> Walk {
    let up = |mut x: usize| {
        let mut path = vec![x];
        while x != root {
            x = parent[x];
            path.push(x);
        }
        path
    };
    let mut verts: Vec<usize> = up(u).into_iter().rev().collect();
    verts.extend(up(v));
    Walk::new_unchecked(verts)
}

/// A 2-coloring certificate or an odd closed walk refuting it.
#[derive(Debug, Clone)]
pub enum Bipartiteness {
    Bipartite(Bipartition),
    OddWalk(Walk),
}

/// Per-vertex side bits of a bipartition; every edge crosses sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub side: Vec<bool>,
}

/// A vertex of a tensor product, with its row-major flattening.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProductVertex {
    pub g: usize,
    pub h: usize,
}

impl ProductVertex {
    pub fn flat(&self, h_count: usize) -> usize {
        self.g * h_count + self.h
    }

    pub fn from_flat(flat: usize, h_count: usize) -> ProductVertex {
        ProductVertex {
            g: flat / h_count,
            h: flat % h_count,
        }
    }
}

/// A total vertex map between two graphs. Constructing through [`Homomorphism::new`]
/// certifies edge preservation; [`validate_hom`] re-checks any raw map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    map: Vec<usize>,
    codomain_order: usize,
}

impl Homomorphism {
    /// Validates edge preservation on construction.
    pub fn new(map: Vec<usize>, domain: &Graph, codomain: &Graph) -> Result<Self, GraphError> {
        let hom = Homomorphism {
            map,
            codomain_order: codomain.vertex_count(),
        };
        hom.check(domain, codomain)?;
        Ok(hom)
    }

    /// Wraps a map without validation. Used where validity is ensured by
    /// construction; `validate_hom` remains available for auditing.
    pub fn new_unchecked(map: Vec<usize>, codomain_order: usize) -> Self {
        Homomorphism {
            map,
            codomain_order,
        }
    }

    pub fn identity(g: &Graph) -> Self {
        Homomorphism {
            map: (0..g.vertex_count()).collect(),
            codomain_order: g.vertex_count(),
        }
    }

    pub fn domain_order(&self) -> usize {
        self.map.len()
    }

    pub fn codomain_order(&self) -> usize {
        self.codomain_order
    }

    pub fn apply(&self, v: usize) -> usize {
        self.map[v]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// Image of a walk under the map, vertex-wise.
    pub fn map_walk(&self, w: &Walk) -> Walk {
        Walk::new_unchecked(w.vertices().iter().map(|&v| self.map[v]).collect())
    }

    /// `other` after `self`: domain of `self`, codomain of `other`.
    pub fn then(&self, other: &Homomorphism) -> Homomorphism {
        Homomorphism {
            map: self.map.iter().map(|&v| other.map[v]).collect(),
            codomain_order: other.codomain_order,
        }
    }

    fn check(&self, domain: &Graph, codomain: &Graph) -> Result<(), GraphError> {
        if self.map.len() != domain.vertex_count() {
            return Err(GraphError::SizeMismatch {
                map_len: self.map.len(),
                domain: domain.vertex_count(),
            });
        }
        for (&c, v) in self.map.iter().zip(0..) {
            if c >= codomain.vertex_count() {
                return Err(GraphError::VertexOutOfRange {
                    v: c,
                    n: codomain.vertex_count(),
                });
            }
            let _ = v;
        }
        for (u, v) in domain.edges() {
            if !codomain.has_edge(self.map[u], self.map[v]) {
                return Err(GraphError::NotEdgePreserving { u, v });
            }
        }
        Ok(())
    }
}

/// True iff `mu` is edge-preserving from `domain` to `codomain`.
/// Errors only on size/range mismatches.
pub fn validate_hom(
    mu: &Homomorphism,
    domain: &Graph,
    codomain: &Graph,
) -> Result<bool, GraphError> {
    if mu.map.len() != domain.vertex_count() {
        return Err(GraphError::SizeMismatch {
            map_len: mu.map.len(),
            domain: domain.vertex_count(),
        });
    }
    for &c in &mu.map {
        if c >= codomain.vertex_count() {
            return Err(GraphError::VertexOutOfRange {
                v: c,
                n: codomain.vertex_count(),
            });
        }
    }
    Ok(domain
        .edges()
        .all(|(u, v)| codomain.has_edge(mu.map[u], mu.map[v])))
}

/// The bijection from `C_n` (n odd) onto the circular clique `K_{n/floor(n/2)}`,
/// `j -> j * floor(n/2) mod n`. Its inverse is also a homomorphism.
pub fn cycle_as_circular_iso(n: usize) -> Result<Homomorphism, GraphError> {
    if n < 3 || n % 2 == 0 {
        return Err(GraphError::NotOdd(n));
    }
    let m = n / 2;
    Ok(Homomorphism {
        map: (0..n).map(|j| (j * m) % n).collect(),
        codomain_order: n,
    })
}

/// Inverse of [`cycle_as_circular_iso`] as a map `K_{n/floor(n/2)} -> C_n`.
pub fn circular_as_cycle_iso(n: usize) -> Result<Homomorphism, GraphError> {
    let fwd = cycle_as_circular_iso(n)?;
    let mut inv = vec![0; n];
    for (j, &img) in fwd.map.iter().enumerate() {
        inv[img] = j;
    }
    Ok(Homomorphism {
        map: inv,
        codomain_order: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_graph_families() {
        let c5 = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(c5.edge_count(), 5);
        assert_eq!(c5, Graph::cycle(5));

        let edgeless = Graph::new(2, &[]).unwrap();
        assert_eq!(edgeless.edge_count(), 0);

        let deduped = Graph::new(3, &[(0, 1), (0, 1), (1, 2)]).unwrap();
        assert_eq!(deduped.edge_count(), 2);
    }

    #[test]
    fn build_graph_rejects_bad_edges() {
        assert_eq!(Graph::new(3, &[(1, 1)]), Err(GraphError::LoopEdge(1)));
        assert!(matches!(
            Graph::new(3, &[(0, 3)]),
            Err(GraphError::VertexOutOfRange { v: 3, n: 3 })
        ));
    }

    #[test]
    fn tensor_product_small_cases() {
        let k2 = Graph::clique(2);
        let p = k2.tensor_product(&k2);
        assert_eq!(p.vertex_count(), 4);
        assert_eq!(p.edge_count(), 2);
        assert_eq!(p.components().len(), 2);

        let c3 = Graph::cycle(3);
        let q = c3.tensor_product(&c3);
        assert_eq!(q.vertex_count(), 9);
        assert_eq!(q.edge_count(), 18);
        assert!((0..9).all(|v| q.degree(v) == 4));

        let big = Graph::cycle(6).tensor_product(&Graph::cycle(7));
        assert_eq!(big.vertex_count(), 42);
        assert_eq!(big.edge_count(), 84);
    }

    #[test]
    fn tensor_degree_law() {
        let g = Graph::path(4);
        let h = Graph::cycle(5);
        let p = g.tensor_product(&h);
        for gv in 0..4 {
            for hv in 0..5 {
                assert_eq!(p.degree(gv * 5 + hv), g.degree(gv) * h.degree(hv));
            }
        }
    }

    #[test]
    fn circular_clique_families() {
        let k52 = Graph::circular_clique(5, 2).unwrap();
        // C_5 in the order 0-2-4-1-3-0.
        assert_eq!(k52.edge_count(), 5);
        for v in 0..5 {
            assert!(k52.has_edge(v, (v + 2) % 5));
            assert!(k52.has_edge(v, (v + 3) % 5));
        }

        assert_eq!(Graph::circular_clique(3, 1).unwrap(), Graph::clique(3));

        let k72 = Graph::circular_clique(7, 2).unwrap();
        assert_eq!(k72.vertex_count(), 7);
        assert_eq!(k72.edge_count(), 14);
        // Contains the square 0,2,5,3.
        for (u, v) in [(0, 2), (2, 5), (5, 3), (3, 0)] {
            assert!(k72.has_edge(u, v));
        }
        assert!(!k72.is_square_free());

        assert!(Graph::circular_clique(3, 2).is_err());
    }

    #[test]
    fn cycle_circular_iso_is_valid_both_ways() {
        for n in [3usize, 5, 7, 9] {
            let iso = cycle_as_circular_iso(n).unwrap();
            let cn = Graph::cycle(n);
            let k = Graph::circular_clique(n, n / 2).unwrap();
            assert!(validate_hom(&iso, &cn, &k).unwrap(), "n={n}");
            let inv = circular_as_cycle_iso(n).unwrap();
            assert!(validate_hom(&inv, &k, &cn).unwrap(), "n={n} inverse");
            let round = iso.then(&inv);
            assert_eq!(round.map(), Homomorphism::identity(&cn).map());
        }
        assert!(cycle_as_circular_iso(4).is_err());
        assert_eq!(
            cycle_as_circular_iso(5).unwrap().map(),
            &[0, 2, 4, 1, 3][..]
        );
        assert_eq!(
            cycle_as_circular_iso(7).unwrap().map(),
            &[0, 3, 6, 2, 5, 1, 4][..]
        );
    }

    #[test]
    fn square_free_checks() {
        assert!(!Graph::cycle(4).is_square_free());
        assert!(Graph::cycle(5).is_square_free());
        assert!(Graph::petersen().is_square_free());
        assert!(!Graph::clique(4).is_square_free());
    }

    #[test]
    fn petersen_shape() {
        let p = Graph::petersen();
        assert_eq!(p.vertex_count(), 10);
        assert_eq!(p.edge_count(), 15);
        assert!((0..10).all(|v| p.degree(v) == 3));
        assert!(p.is_connected());
    }

    #[test]
    fn bipartition_and_witnesses() {
        match Graph::cycle(6).bipartition() {
            Bipartiteness::Bipartite(b) => {
                assert!(b.side.iter().enumerate().all(|(i, &s)| s == (i % 2 == 1)));
            }
            Bipartiteness::OddWalk(_) => panic!("C_6 is bipartite"),
        }
        match Graph::cycle(5).bipartition() {
            Bipartiteness::Bipartite(_) => panic!("C_5 is odd"),
            Bipartiteness::OddWalk(w) => {
                assert_eq!(w.len() % 2, 1);
                assert!(w.is_closed());
            }
        }
        let k2k2 = Graph::clique(2).tensor_product(&Graph::clique(2));
        assert!(k2k2.is_bipartite());
    }

    #[test]
    fn odd_closed_walks() {
        let w = Graph::cycle(5).odd_closed_walk_from(0).unwrap();
        assert_eq!(w.len(), 5);
        assert_eq!(w.start(), 0);
        assert!(w.is_closed());

        // C_5 with a pendant vertex 5 attached to 0, starting from the pendant.
        let g = Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5)]).unwrap();
        let w = g.odd_closed_walk_from(5).unwrap();
        assert_eq!(w.len(), 7);
        assert_eq!(w.start(), 5);
        assert_eq!(w.vertices()[1], 0);
        assert!(w.is_closed());

        assert_eq!(
            Graph::cycle(6).odd_closed_walk_from(0),
            Err(GraphError::BipartiteComponent(0))
        );
    }

    #[test]
    fn hom_validation() {
        let c5 = Graph::cycle(5);
        let id = Homomorphism::identity(&c5);
        assert!(validate_hom(&id, &c5, &c5).unwrap());

        let constant = Homomorphism::new_unchecked(vec![0; 5], 5);
        assert!(!validate_hom(&constant, &c5, &c5).unwrap());

        // Projections of a product always validate.
        let g = Graph::cycle(3);
        let h = Graph::cycle(5);
        let p = g.tensor_product(&h);
        let left = Homomorphism::new_unchecked((0..15).map(|v| v / 5).collect(), 3);
        let right = Homomorphism::new_unchecked((0..15).map(|v| v % 5).collect(), 5);
        assert!(validate_hom(&left, &p, &g).unwrap());
        assert!(validate_hom(&right, &p, &h).unwrap());

        let short = Homomorphism::new_unchecked(vec![0; 3], 5);
        assert!(validate_hom(&short, &c5, &c5).is_err());
    }

    #[test]
    fn product_vertex_flattening_roundtrip() {
        for g in 0..7 {
            for h in 0..4 {
                let pv = ProductVertex { g, h };
                assert_eq!(ProductVertex::from_flat(pv.flat(4), 4), pv);
            }
        }
    }

    #[test]
    fn circular_clique_vertex_transitive() {
        let k = Graph::circular_clique(11, 3).unwrap();
        // Relabeling i -> i+1 preserves adjacency.
        for (u, v) in k.edges() {
            assert!(k.has_edge((u + 1) % 11, (v + 1) % 11));
        }
    }

    #[test]
    fn components_and_connectivity() {
        let mut edges = vec![(0, 1), (1, 2), (2, 0)];
        edges.push((3, 4));
        let g = Graph::new(5, &edges).unwrap();
        let comps = g.components();
        assert_eq!(comps, vec![vec![0, 1, 2], vec![3, 4]]);
        assert!(!g.is_connected());

        let (sub, back) = g.induced_subgraph(&comps[0]);
        assert_eq!(sub.vertex_count(), 3);
        assert_eq!(sub.edge_count(), 3);
        assert_eq!(back, vec![0, 1, 2]);
    }

    #[test]
    fn product_connectivity_rule() {
        // Connected iff both connected and at least one non-bipartite.
        let cases = [
            (Graph::cycle(3), Graph::cycle(5), true),
            (Graph::cycle(3), Graph::cycle(4), true),
            (Graph::cycle(4), Graph::cycle(6), false),
            (Graph::path(3), Graph::path(4), false),
            (Graph::cycle(5), Graph::path(2), true),
        ];
        for (g, h, expect) in cases {
            let p = g.tensor_product(&h);
            assert_eq!(p.is_connected(), expect, "{g:?} x {h:?}");
        }
    }
}
