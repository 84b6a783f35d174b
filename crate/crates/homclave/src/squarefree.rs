//! The square-free pipeline: trichotomy over fundamental-cycle images,
//! rebasing to a cyclically reduced root, extension profiles, extremal-set
//! detection, recoloring improvement, and the three extraction routes.
//!
//! The improvement loop recolors a product coloring toward one that factors
//! through a projection or through a cycle. Every committed batch strictly
//! decreases the improvement measure (the number of triples `(g, g', h)`
//! with `g, g'` sharing a neighbor and different colors over `h`), so the
//! loop terminates in polynomially many commits.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::circular::{solve_circular, CircularError};
use crate::graph::{
    circular_as_cycle_iso, cycle_as_circular_iso, validate_hom, Bipartiteness, Graph, GraphError,
    Homomorphism,
};
use crate::homotopy::fundamental_cycles;
use crate::walk::{
    is_power_of, power_prefix_split, primitive_root, reduce, ReducedWalk, RootDecomposition, Walk,
    WalkError,
};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("codomain is not square-free")]
    NotSquareFree,
    #[error("codomain has no edges")]
    CodomainHasNoEdges,
    #[error("graph has an isolated vertex")]
    IsolatedVertex,
    #[error("input map is not a valid coloring: {0}")]
    InvalidColoring(String),
    #[error("a fundamental-cycle image is not a power of the common root")]
    RootMismatch,
    #[error("no odd closed walk with a nonzero image found while rebasing")]
    CannotRebase,
    #[error("extension values disagree across the non-tree edge ({u},{v})")]
    ExtInconsistent { u: usize, v: usize },
    #[error("fiber over {0} is not constant")]
    FiberNotConstant(usize),
    #[error("some extension is non-trivial; the cyclic extraction does not apply")]
    ExtNonTrivial,
    #[error("recoloring cascade derived an invalid set: {0}")]
    CascadeStuck(String),
    #[error("internal contradiction with the guarantees of the construction: {0}")]
    TheoryViolation(String),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Circular(#[from] CircularError),
}

/// Which factor of the product a result or a measure refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    G,
    H,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::G => Side::H,
            Side::H => Side::G,
        }
    }
}

/// One single-vertex recoloring: `vertex` is a product flat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RecolorStep {
    pub vertex: usize,
    pub old: usize,
    pub new: usize,
}

/// Checkpoint written after each committed batch: the steps covered so far
/// and the improvement measure (for the recorded side orientation) before
/// and after the batch. `measure_after < measure_before` always.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CommitRecord {
    pub steps_end: usize,
    pub side: Side,
    pub measure_before: usize,
    pub measure_after: usize,
}

/// The audited recoloring sequence: single-vertex steps partitioned into
/// committed batches. Replaying the steps from the input coloring stays a
/// valid coloring throughout and ends at the improved one.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RecolorTrace {
    pub steps: Vec<RecolorStep>,
    pub commits: Vec<CommitRecord>,
}

/// The intermediate factorization through a cycle: `gamma` maps the product
/// onto `C_n`, `delta` embeds `C_n` into the codomain, and `delta . gamma`
/// equals the final recolored coloring.
#[derive(Debug, Clone)]
pub struct CycleFactorization {
    pub gamma: Homomorphism,
    pub delta: Homomorphism,
}

/// A solved instance: a validated homomorphism from one factor, the
/// recoloring trace that led to it, and the cycle factorization when the
/// cyclic route was taken.
#[derive(Debug, Clone)]
pub struct SplitResult {
    pub side: Side,
    pub hom: Homomorphism,
    pub trace: RecolorTrace,
    pub intermediate: Option<CycleFactorization>,
}

impl SplitResult {
    pub fn plain(side: Side, hom: Homomorphism) -> SplitResult {
        SplitResult {
            side,
            hom,
            trace: RecolorTrace::default(),
            intermediate: None,
        }
    }
}

/// Which of the three cases the fundamental-cycle images fall into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrichotomyCase {
    TrivialLeft,
    TrivialRight,
    CommonRoot,
}

/// The verdict together with the base product vertex, the anchor edges, and
/// (in the common-root case) the root all cycle images are powers of.
#[derive(Debug, Clone)]
pub struct TrichotomyReport {
    pub case: TrichotomyCase,
    pub base: usize,
    pub g_anchor: (usize, usize),
    pub h_anchor: (usize, usize),
    pub root: Option<RootDecomposition>,
}

/// Subgraph of the product induced on `V(G) x {h0, h1}`, kept on the full
/// flat vertex set so walks and colorings index uniformly.
fn left_edge_subgraph(g: &Graph, hn: usize, h0: usize, h1: usize) -> Graph {
    let mut edges = Vec::new();
    for (a, b) in g.edges() {
        edges.push((a * hn + h0, b * hn + h1));
        edges.push((a * hn + h1, b * hn + h0));
    }
    Graph::new(g.vertex_count() * hn, &edges).expect("product subgraph edges are valid")
}

/// Subgraph of the product induced on `{g0, g1} x V(H)`.
fn right_edge_subgraph(h: &Graph, g_count: usize, g0: usize, g1: usize) -> Graph {
    let hn = h.vertex_count();
    let mut edges = Vec::new();
    for (a, b) in h.edges() {
        edges.push((g0 * hn + a, g1 * hn + b));
        edges.push((g1 * hn + a, g0 * hn + b));
    }
    Graph::new(g_count * hn, &edges).expect("product subgraph edges are valid")
}

/// Decides which case the coloring is in by testing fundamental cycles:
/// first those of `G x h0h1`, then of `g0g1 x H`, and otherwise computing
/// the primitive root of the first nonempty cycle image of `G x H` and
/// verifying every other image is one of its powers.
pub fn trichotomy(
    g: &Graph,
    h: &Graph,
    k: &Graph,
    mu: &Homomorphism,
    g_anchor: (usize, usize),
    h_anchor: (usize, usize),
) -> Result<TrichotomyReport, SolveError> {
    let hn = h.vertex_count();
    let base = g_anchor.0 * hn + h_anchor.0;
    let report = |case, root| TrichotomyReport {
        case,
        base,
        g_anchor,
        h_anchor,
        root,
    };

    let left = left_edge_subgraph(g, hn, h_anchor.0, h_anchor.1);
    let left_trivial = fundamental_cycles(&left, base)
        .cycles
        .iter()
        .all(|c| reduce(&mu.map_walk(c)).is_empty());
    if left_trivial {
        return Ok(report(TrichotomyCase::TrivialLeft, None));
    }

    let right = right_edge_subgraph(h, g.vertex_count(), g_anchor.0, g_anchor.1);
    let right_trivial = fundamental_cycles(&right, base)
        .cycles
        .iter()
        .all(|c| reduce(&mu.map_walk(c)).is_empty());
    if right_trivial {
        return Ok(report(TrichotomyCase::TrivialRight, None));
    }

    let product = g.tensor_product(h);
    let images: Vec<ReducedWalk> = fundamental_cycles(&product, base)
        .cycles
        .iter()
        .map(|c| reduce(&mu.map_walk(c)))
        .collect();
    let first = images.iter().find(|x| !x.is_empty()).ok_or_else(|| {
        SolveError::TheoryViolation("nontrivial factor cycles but trivial product cycles".into())
    })?;
    let root = primitive_root(first)?;
    let _ = k;
    for x in &images {
        if is_power_of(x, &root)?.is_none() {
            return Err(SolveError::RootMismatch);
        }
    }
    Ok(report(TrichotomyCase::CommonRoot, Some(root)))
}

/// Moves the base point until the common root is cyclically reduced: while
/// the root's conjugator is nonempty, walk along an odd closed walk from the
/// base to the first vertex whose accumulated reduced image equals the
/// root's first edge, rebase there, and strip that edge off the conjugator.
pub fn rebase_cyclic(
    g: &Graph,
    h: &Graph,
    mu: &Homomorphism,
    report: TrichotomyReport,
) -> Result<TrichotomyReport, SolveError> {
    let mut root = match report.root {
        Some(r) => r,
        None => {
            return Err(SolveError::TheoryViolation(
                "rebase requires a common-root report".into(),
            ))
        }
    };
    let mut base = report.base;
    while !root.is_cyclic() {
        let elem = root.primitive_element();
        let e = (elem.vertices()[0], elem.vertices()[1]);
        let odd = odd_product_walk(g, h, base)?;
        let mut image = ReducedWalk::empty(mu.apply(base));
        let mut landed = None;
        for t in 0..odd.len() {
            let step = Walk::new_unchecked(vec![
                mu.apply(odd.vertices()[t]),
                mu.apply(odd.vertices()[t + 1]),
            ]);
            image = image.product(&reduce(&step))?;
            if image.len() == 1 && image.vertices() == [e.0, e.1] {
                landed = Some(odd.vertices()[t + 1]);
                break;
            }
        }
        base = landed.ok_or(SolveError::CannotRebase)?;
        let stripped = root.conjugator.vertices()[1..].to_vec();
        root = RootDecomposition {
            conjugator: reduce(&Walk::new_unchecked(stripped)),
            core: root.core,
            exponent: root.exponent,
        };
    }
    Ok(TrichotomyReport {
        case: TrichotomyCase::CommonRoot,
        base,
        g_anchor: report.g_anchor,
        h_anchor: report.h_anchor,
        root: Some(root),
    })
}

/// An odd closed walk from a product vertex, zipped from odd closed walks of
/// the two factors repeated to a common length.
fn odd_product_walk(g: &Graph, h: &Graph, base: usize) -> Result<Walk, SolveError> {
    let hn = h.vertex_count();
    let c = g.odd_closed_walk_from(base / hn)?;
    let d = h.odd_closed_walk_from(base % hn)?;
    let cr = c.repeat(d.len())?;
    let dr = d.repeat(c.len())?;
    let verts = cr
        .vertices()
        .iter()
        .zip(dr.vertices())
        .map(|(&a, &b)| a * hn + b)
        .collect();
    Ok(Walk::new_unchecked(verts))
}

/// Per-vertex extension data: the signed position of the walk image along
/// the root repetitions and the suffix extending out of them.
#[derive(Debug, Clone)]
pub struct ExtEntry {
    pub position: i64,
    pub ext: ReducedWalk,
}

/// Extension profile of a connected domain: entries indexed by product flat,
/// `None` for vertices outside the domain's component of the base.
#[derive(Debug, Clone)]
pub struct ExtProfile {
    pub base: usize,
    pub entries: Vec<Option<ExtEntry>>,
}

impl ExtProfile {
    pub fn all_ext_empty(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|e| e.ext.is_empty())
    }
}

/// BFS from the base computing, for every reached vertex, the reduced image
/// of its tree walk split against the root's repetitions (`None` root means
/// the empty root: the whole image is the extension). Walk-independence of
/// the extension is asserted on every non-tree edge.
pub fn ext_profile(
    domain: &Graph,
    mu: &Homomorphism,
    base: usize,
    root: Option<&RootDecomposition>,
) -> Result<ExtProfile, SolveError> {
    if let Some(r) = root {
        if !r.is_cyclic() {
            return Err(SolveError::Walk(WalkError::NotCyclicallyReduced));
        }
    }
    let n = domain.vertex_count();
    let mut images: Vec<Option<ReducedWalk>> = vec![None; n];
    images[base] = Some(ReducedWalk::empty(mu.apply(base)));
    let mut order = vec![base];
    let mut queue = VecDeque::from([base]);
    let mut tree_edge: HashSet<(usize, usize)> = HashSet::new();
    while let Some(u) = queue.pop_front() {
        for &v in domain.neighbors(u) {
            if images[v].is_none() {
                let step = reduce(&Walk::new_unchecked(vec![mu.apply(u), mu.apply(v)]));
                images[v] = Some(images[u].as_ref().unwrap().product(&step)?);
                tree_edge.insert((u.min(v), u.max(v)));
                order.push(v);
                queue.push_back(v);
            }
        }
    }

    let split = |img: &ReducedWalk| -> Result<ExtEntry, SolveError> {
        match root {
            None => Ok(ExtEntry {
                position: 0,
                ext: img.clone(),
            }),
            Some(r) => {
                let s = power_prefix_split(img, r)?;
                Ok(ExtEntry {
                    position: s.position,
                    ext: s.ext,
                })
            }
        }
    };

    let mut entries: Vec<Option<ExtEntry>> = vec![None; n];
    for &v in &order {
        entries[v] = Some(split(images[v].as_ref().unwrap())?);
    }

    // Extension well-definedness across every non-tree edge.
    for (u, v) in domain.edges() {
        if !tree_edge.contains(&(u, v)) && images[u].is_some() && images[v].is_some() {
            for (a, b) in [(u, v), (v, u)] {
                let step = reduce(&Walk::new_unchecked(vec![mu.apply(a), mu.apply(b)]));
                let alt = images[a].as_ref().unwrap().product(&step)?;
                let alt_entry = split(&alt)?;
                if alt_entry.ext != entries[b].as_ref().unwrap().ext {
                    return Err(SolveError::ExtInconsistent { u, v });
                }
            }
        }
    }

    Ok(ExtProfile { base, entries })
}

/// A monochromatic fiber subset with monochromatic neighborhood and a
/// nonempty second neighborhood avoiding the set's color: the unit of
/// improvement. `set` lies in the fiber over `edge.1`; neighborhoods are
/// taken in `G x {edge.0, edge.1}`.
#[derive(Debug, Clone)]
pub struct HExtremalSet {
    pub set: Vec<usize>,
    pub edge: (usize, usize),
    pub color_a: usize,
    pub color_b: usize,
}

/// Which fibers the extension-argmax source may use: the anchor pair (left
/// domain) or all of `H` (full product domain).
#[derive(Debug, Clone, Copy)]
pub enum FiberScope {
    Pair(usize, usize),
    Full,
}

fn pair_neighbors(g: &Graph, hn: usize, set: &[usize], h_from: usize) -> Vec<usize> {
    let mut out: HashSet<usize> = HashSet::new();
    for &s in set {
        for &g2 in g.neighbors(s / hn) {
            out.insert(g2 * hn + h_from);
        }
    }
    let mut v: Vec<usize> = out.into_iter().collect();
    v.sort_unstable();
    v
}

fn pair_second_neighborhood(
    g: &Graph,
    hn: usize,
    set: &[usize],
    n1: &[usize],
    h_star: usize,
) -> Vec<usize> {
    let in_set: HashSet<usize> = set.iter().copied().collect();
    let mut out: HashSet<usize> = HashSet::new();
    for &x in n1 {
        for &g2 in g.neighbors(x / hn) {
            let v = g2 * hn + h_star;
            if !in_set.contains(&v) {
                out.insert(v);
            }
        }
    }
    let mut v: Vec<usize> = out.into_iter().collect();
    v.sort_unstable();
    v
}

/// Restricts a candidate set to one connected component of `S u N(S)` (the
/// one holding a second-neighborhood witness) and checks the extremal-set
/// conditions. Returns `None` when the second neighborhood is empty or a
/// condition fails.
fn restrict_and_validate(
    g: &Graph,
    hn: usize,
    coloring: &[usize],
    s0: &[usize],
    h_from: usize,
    h_star: usize,
) -> Option<HExtremalSet> {
    let n1 = pair_neighbors(g, hn, s0, h_from);
    let n2 = pair_second_neighborhood(g, hn, s0, &n1, h_star);
    let &witness = n2.first()?;
    // The witness's neighbor inside N(S) anchors the component to keep.
    let n1_set: HashSet<usize> = n1.iter().copied().collect();
    let anchor = g
        .neighbors(witness / hn)
        .iter()
        .map(|&g2| g2 * hn + h_from)
        .find(|x| n1_set.contains(x))?;

    let members: HashSet<usize> = s0.iter().copied().chain(n1.iter().copied()).collect();
    let mut comp: HashSet<usize> = HashSet::from([anchor]);
    let mut queue = VecDeque::from([anchor]);
    while let Some(u) = queue.pop_front() {
        let (ug, uh) = (u / hn, u % hn);
        let other = if uh == h_star { h_from } else { h_star };
        for &g2 in g.neighbors(ug) {
            let v = g2 * hn + other;
            if members.contains(&v) && comp.insert(v) {
                queue.push_back(v);
            }
        }
    }

    let set: Vec<usize> = s0.iter().copied().filter(|v| comp.contains(v)).collect();
    if set.is_empty() {
        return None;
    }
    let n1 = pair_neighbors(g, hn, &set, h_from);
    let n2 = pair_second_neighborhood(g, hn, &set, &n1, h_star);
    let color_a = coloring[set[0]];
    let color_b = *n1.first().map(|&x| &coloring[x])?;
    let ok = set.iter().all(|&v| coloring[v] == color_a)
        && n1.iter().all(|&v| coloring[v] == color_b)
        && !n2.is_empty()
        && n2.iter().all(|&v| coloring[v] != color_a);
    if !ok {
        debug_assert!(false, "candidate extremal set failed validation");
        return None;
    }
    Some(HExtremalSet {
        set,
        edge: (h_from, h_star),
        color_a,
        color_b,
    })
}

/// Finds an extremal set from the two constructive sources: the
/// extension-argmax of the profile, then constancy propagation between
/// adjacent fibers. `None` means both sources are exhausted, which is
/// exactly the situation the extraction routines cover.
pub fn find_extremal(
    g: &Graph,
    h: &Graph,
    coloring: &[usize],
    profile: &ExtProfile,
    scope: FiberScope,
) -> Option<HExtremalSet> {
    let hn = h.vertex_count();

    // Source 1: vertices with the longest extension, within their fiber.
    let mut argmax: Option<(usize, usize)> = None; // (len, flat)
    for (flat, entry) in profile.entries.iter().enumerate() {
        if let Some(e) = entry {
            if argmax.map_or(true, |(len, _)| e.ext.len() > len) {
                argmax = Some((e.ext.len(), flat));
            }
        }
    }
    if let Some((max_len, amax)) = argmax {
        if max_len >= 1 {
            let h_star = amax % hn;
            let target = &profile.entries[amax].as_ref().unwrap().ext;
            let s0: Vec<usize> = (0..g.vertex_count())
                .map(|gv| gv * hn + h_star)
                .filter(|&flat| {
                    profile.entries[flat]
                        .as_ref()
                        .map_or(false, |e| e.ext == *target)
                })
                .collect();
            let candidates: Vec<usize> = match scope {
                FiberScope::Pair(h0, h1) => vec![if h_star == h0 { h1 } else { h0 }],
                FiberScope::Full => h.neighbors(h_star).to_vec(),
            };
            for h_from in candidates {
                if let Some(found) =
                    restrict_and_validate(g, hn, coloring, &s0, h_from, h_star)
                {
                    return Some(found);
                }
            }
        }
    }

    // Source 2: a constant fiber next to a non-constant one.
    let fiber_color = |hv: usize| -> Option<usize> {
        let first = coloring[hv];
        (0..g.vertex_count())
            .all(|gv| coloring[gv * hn + hv] == first)
            .then_some(first)
    };
    for h0 in 0..hn {
        if fiber_color(h0).is_none() {
            continue;
        }
        for &h1 in h.neighbors(h0) {
            if fiber_color(h1).is_some() {
                continue;
            }
            let a = (0..g.vertex_count())
                .map(|gv| coloring[gv * hn + h1])
                .min()
                .expect("nonempty fiber");
            let s0: Vec<usize> = (0..g.vertex_count())
                .map(|gv| gv * hn + h1)
                .filter(|&flat| coloring[flat] == a)
                .collect();
            if let Some(found) = restrict_and_validate(g, hn, coloring, &s0, h0, h1) {
                return Some(found);
            }
        }
    }
    None
}

/// Result of one improvement: the new coloring, the single-vertex steps that
/// realize it, and how many cascade levels the conflict resolution took.
#[derive(Debug, Clone)]
pub struct ImproveOutcome {
    pub coloring: Vec<usize>,
    pub steps: Vec<RecolorStep>,
    pub cascade_depth: usize,
}

/// Recolors an extremal set to a color from its second neighborhood. When
/// the tentative recoloring conflicts with a third fiber, the conflicting
/// values form a strictly smaller extremal set and the cascade recurses on
/// it; the committed batch always strictly decreases the improvement
/// measure. Sets within a fiber are independent, so the batch replays as
/// valid single-vertex steps in any order.
pub fn improve(
    g: &Graph,
    h: &Graph,
    k: &Graph,
    mu: &Homomorphism,
    start: &HExtremalSet,
) -> Result<ImproveOutcome, SolveError> {
    let hn = h.vertex_count();
    let coloring = mu.map().to_vec();
    let mut cur = start.clone();
    let mut cur_weight = {
        let n1 = pair_neighbors(g, hn, &cur.set, cur.edge.0);
        cur.set.len() + n1.len()
    };
    let mut depth = 0usize;
    loop {
        let (h_from, h_star) = cur.edge;
        let n1 = pair_neighbors(g, hn, &cur.set, h_from);
        let n2 = pair_second_neighborhood(g, hn, &cur.set, &n1, h_star);
        let a_new = n2
            .iter()
            .map(|&v| coloring[v])
            .filter(|&c| c != cur.color_a)
            .min()
            .ok_or_else(|| SolveError::CascadeStuck("empty second neighborhood".into()))?;

        // Scan all product neighbors of the set for a conflict with the
        // tentative color.
        let in_set: HashSet<usize> = cur.set.iter().copied().collect();
        let mut conflict: Option<usize> = None;
        for &s in &cur.set {
            for &g2 in g.neighbors(s / hn) {
                for &h2 in h.neighbors(h_star) {
                    let x = g2 * hn + h2;
                    if !in_set.contains(&x) && !k.has_edge(a_new, coloring[x]) {
                        conflict = Some(conflict.map_or(x, |c: usize| c.min(x)));
                    }
                }
            }
        }

        match conflict {
            None => {
                let mut new_coloring = coloring.clone();
                let mut steps = Vec::with_capacity(cur.set.len());
                for &s in &cur.set {
                    steps.push(RecolorStep {
                        vertex: s,
                        old: coloring[s],
                        new: a_new,
                    });
                    new_coloring[s] = a_new;
                }
                return Ok(ImproveOutcome {
                    coloring: new_coloring,
                    steps,
                    cascade_depth: depth,
                });
            }
            Some(x) => {
                let h2 = x % hn;
                if h2 == h_from || h2 == h_star {
                    return Err(SolveError::CascadeStuck(format!(
                        "conflict landed on anchor fiber {h2}"
                    )));
                }
                let b_new = coloring[x];
                // The conflicting values across the (h2, h_star) pair.
                let next_s0: Vec<usize> = pair_neighbors(g, hn, &cur.set, h2)
                    .into_iter()
                    .filter(|&v| coloring[v] == b_new)
                    .collect();
                let next = restrict_and_validate(g, hn, &coloring, &next_s0, h_star, h2)
                    .ok_or_else(|| {
                        SolveError::CascadeStuck("derived set is not extremal".into())
                    })?;
                let next_weight = {
                    let n1 = pair_neighbors(g, hn, &next.set, next.edge.0);
                    next.set.len() + n1.len()
                };
                if next_weight >= cur_weight {
                    return Err(SolveError::CascadeStuck(format!(
                        "cascade weight did not decrease ({next_weight} >= {cur_weight})"
                    )));
                }
                cur = next;
                cur_weight = next_weight;
                depth += 1;
            }
        }
    }
}

/// When every fiber is constant, the coloring factors through the projection
/// to `H`; returns that factor coloring.
pub fn extract_constant(
    g: &Graph,
    h: &Graph,
    k: &Graph,
    mu: &Homomorphism,
) -> Result<Homomorphism, SolveError> {
    let hn = h.vertex_count();
    let mut map = Vec::with_capacity(hn);
    for hv in 0..hn {
        let first = mu.apply(hv);
        for gv in 0..g.vertex_count() {
            if mu.apply(gv * hn + hv) != first {
                return Err(SolveError::FiberNotConstant(hv));
            }
        }
        map.push(first);
    }
    let gamma = Homomorphism::new_unchecked(map, k.vertex_count());
    if !validate_hom(&gamma, h, k)? {
        return Err(SolveError::TheoryViolation(
            "constant-fiber projection is not edge-preserving".into(),
        ));
    }
    Ok(gamma)
}

/// When every extension is empty, positions along the root define a
/// homomorphism onto the cycle carried by the root, and the root's vertices
/// embed that cycle back into the codomain. `delta . gamma` reproduces the
/// coloring exactly.
pub fn extract_cyclic(
    product: &Graph,
    k: &Graph,
    mu: &Homomorphism,
    root: &RootDecomposition,
    profile: &ExtProfile,
) -> Result<CycleFactorization, SolveError> {
    if !root.is_cyclic() || root.core.is_empty() {
        return Err(SolveError::Walk(WalkError::NotCyclicallyReduced));
    }
    let n = root.core.len();
    let mut gamma_map = vec![0usize; product.vertex_count()];
    for (flat, entry) in profile.entries.iter().enumerate() {
        match entry {
            Some(e) if e.ext.is_empty() => {
                gamma_map[flat] = e.position.rem_euclid(n as i64) as usize;
            }
            Some(_) => return Err(SolveError::ExtNonTrivial),
            None => {
                return Err(SolveError::TheoryViolation(
                    "cyclic extraction needs a connected profile".into(),
                ))
            }
        }
    }
    let cycle = Graph::cycle(n);
    let gamma = Homomorphism::new_unchecked(gamma_map, n);
    if !validate_hom(&gamma, product, &cycle)? {
        return Err(SolveError::TheoryViolation(
            "position map is not a cycle homomorphism".into(),
        ));
    }
    let delta = Homomorphism::new_unchecked(root.core.vertices()[..n].to_vec(), k.vertex_count());
    if !validate_hom(&delta, &cycle, k)? {
        return Err(SolveError::TheoryViolation(
            "root vertices do not embed the cycle".into(),
        ));
    }
    for v in 0..product.vertex_count() {
        if delta.apply(gamma.apply(v)) != mu.apply(v) {
            return Err(SolveError::TheoryViolation(
                "cycle factorization does not reproduce the coloring".into(),
            ));
        }
    }
    Ok(CycleFactorization { gamma, delta })
}

/// The improvement measure for one orientation: ordered pairs of distinct
/// vertices of the oriented factor sharing a neighbor there, counted against
/// every fiber over the other factor where their colors differ.
pub fn side_measure(g: &Graph, h: &Graph, coloring: &[usize], side: Side) -> usize {
    let hn = h.vertex_count();
    let (factor, other_count) = match side {
        Side::G => (g, hn),
        Side::H => (h, g.vertex_count()),
    };
    let flat = |a: usize, o: usize| match side {
        Side::G => a * hn + o,
        Side::H => o * hn + a,
    };
    let n = factor.vertex_count();
    let mut measure = 0;
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let share = factor
                .neighbors(a)
                .iter()
                .any(|&w| factor.has_edge(w, b));
            if !share {
                continue;
            }
            for o in 0..other_count {
                if coloring[flat(a, o)] != coloring[flat(b, o)] {
                    measure += 1;
                }
            }
        }
    }
    measure
}

/// Solves a square-free instance: given a valid `mu: G x H -> K` with `K`
/// square-free, produces a validated homomorphism from `G` or from `H` into
/// `K`, together with the recoloring trace and, on the cyclic route, the
/// factorization through a cycle.
pub fn solve(
    g: &Graph,
    h: &Graph,
    k: &Graph,
    mu: &Homomorphism,
) -> Result<SplitResult, SolveError> {
    if !k.is_square_free() {
        return Err(SolveError::NotSquareFree);
    }
    if k.edge_count() == 0 {
        return Err(SolveError::CodomainHasNoEdges);
    }
    if g.has_isolated_vertex() || h.has_isolated_vertex() || k.has_isolated_vertex() {
        return Err(SolveError::IsolatedVertex);
    }
    match validate_hom(mu, &g.tensor_product(h), k) {
        Ok(true) => {}
        Ok(false) => {
            return Err(SolveError::InvalidColoring(
                "map does not preserve product edges".into(),
            ))
        }
        Err(e) => return Err(SolveError::InvalidColoring(e.to_string())),
    }
    solve_inner(g, h, k, mu, true)
}

fn solve_inner(
    g: &Graph,
    h: &Graph,
    k: &Graph,
    mu: &Homomorphism,
    allow_swap: bool,
) -> Result<SplitResult, SolveError> {
    if let Bipartiteness::Bipartite(b) = g.bipartition() {
        let (k0, k1) = k.edges().next().expect("codomain has an edge");
        let map = b.side.iter().map(|&s| if s { k1 } else { k0 }).collect();
        return Ok(SplitResult::plain(Side::G, Homomorphism::new(map, g, k)?));
    }
    if let Bipartiteness::Bipartite(b) = h.bipartition() {
        let (k0, k1) = k.edges().next().expect("codomain has an edge");
        let map = b.side.iter().map(|&s| if s { k1 } else { k0 }).collect();
        return Ok(SplitResult::plain(Side::H, Homomorphism::new(map, h, k)?));
    }
    if !g.is_connected() {
        return per_component(g, h, k, mu, Side::G);
    }
    if !h.is_connected() {
        return per_component(g, h, k, mu, Side::H);
    }
    main_loop(g, h, k, mu, allow_swap)
}

fn main_loop(
    g: &Graph,
    h: &Graph,
    k: &Graph,
    mu: &Homomorphism,
    allow_swap: bool,
) -> Result<SplitResult, SolveError> {
    let gn = g.vertex_count();
    let hn = h.vertex_count();
    let g_anchor = g.edges().next().expect("connected non-bipartite factor");
    let h_anchor = h.edges().next().expect("connected non-bipartite factor");
    let mut coloring = mu.map().to_vec();
    let mut trace = RecolorTrace::default();
    let commit_cap = gn * gn * hn + hn * hn * gn + 4;

    loop {
        if trace.commits.len() > commit_cap {
            return Err(SolveError::TheoryViolation(
                "improvement loop exceeded the measure bound".into(),
            ));
        }
        let cur = Homomorphism::new_unchecked(coloring.clone(), k.vertex_count());
        let report = trichotomy(g, h, k, &cur, g_anchor, h_anchor)?;
        match report.case {
            TrichotomyCase::TrivialLeft => {
                let domain = left_edge_subgraph(g, hn, h_anchor.0, h_anchor.1);
                let profile = ext_profile(&domain, &cur, report.base, None)?;
                let scope = FiberScope::Pair(h_anchor.0, h_anchor.1);
                if let Some(xs) = find_extremal(g, h, &coloring, &profile, scope) {
                    commit(g, h, k, &mut coloring, &mut trace, &cur, &xs)?;
                    continue;
                }
                let gamma = extract_constant(g, h, k, &cur)?;
                return Ok(SplitResult {
                    side: Side::H,
                    hom: gamma,
                    trace,
                    intermediate: None,
                });
            }
            TrichotomyCase::TrivialRight => {
                if !allow_swap {
                    return Err(SolveError::TheoryViolation(
                        "swapped instance did not resolve as trivial-left".into(),
                    ));
                }
                let swapped_map: Vec<usize> = (0..hn * gn)
                    .map(|f| coloring[(f % gn) * hn + f / gn])
                    .collect();
                let swapped_mu = Homomorphism::new_unchecked(swapped_map, k.vertex_count());
                let inner = solve_inner(h, g, k, &swapped_mu, false)?;
                let mut result = unswap_result(inner, gn, hn);
                let mut merged = trace;
                append_trace(&mut merged, result.trace);
                rebuild_commit_measures(g, h, mu.map(), &mut merged);
                result.trace = merged;
                return Ok(result);
            }
            TrichotomyCase::CommonRoot => {
                let report = rebase_cyclic(g, h, &cur, report)?;
                let root = report.root.as_ref().expect("common-root report");
                let product = g.tensor_product(h);
                let profile = ext_profile(&product, &cur, report.base, Some(root))?;
                if let Some(xs) =
                    find_extremal(g, h, &coloring, &profile, FiberScope::Full)
                {
                    commit(g, h, k, &mut coloring, &mut trace, &cur, &xs)?;
                    continue;
                }
                if profile.all_ext_empty() {
                    let fact = extract_cyclic(&product, k, &cur, root, &profile)?;
                    let n = root.core.len();
                    if n % 2 == 0 {
                        return Err(SolveError::TheoryViolation(
                            "even root cycle for non-bipartite factors".into(),
                        ));
                    }
                    let iso = cycle_as_circular_iso(n)?;
                    let inner_mu = fact.gamma.then(&iso);
                    let inner = solve_circular(g, h, n, n / 2, &inner_mu)?;
                    let back = circular_as_cycle_iso(n)?;
                    let hom = inner.hom.then(&back).then(&fact.delta);
                    let factor = match inner.side {
                        Side::G => g,
                        Side::H => h,
                    };
                    if !validate_hom(&hom, factor, k)? {
                        return Err(SolveError::TheoryViolation(
                            "composed cyclic-route coloring is not edge-preserving".into(),
                        ));
                    }
                    return Ok(SplitResult {
                        side: inner.side,
                        hom,
                        trace,
                        intermediate: Some(fact),
                    });
                }
                let gamma = extract_constant(g, h, k, &cur)?;
                return Ok(SplitResult {
                    side: Side::H,
                    hom: gamma,
                    trace,
                    intermediate: None,
                });
            }
        }
    }
}

fn commit(
    g: &Graph,
    h: &Graph,
    k: &Graph,
    coloring: &mut Vec<usize>,
    trace: &mut RecolorTrace,
    cur: &Homomorphism,
    xs: &HExtremalSet,
) -> Result<(), SolveError> {
    let before = side_measure(g, h, coloring, Side::G);
    let outcome = improve(g, h, k, cur, xs)?;
    *coloring = outcome.coloring;
    if !validate_hom(
        &Homomorphism::new_unchecked(coloring.clone(), k.vertex_count()),
        &g.tensor_product(h),
        k,
    )? {
        return Err(SolveError::TheoryViolation(
            "committed recoloring broke the coloring".into(),
        ));
    }
    let after = side_measure(g, h, coloring, Side::G);
    if after >= before {
        return Err(SolveError::TheoryViolation(format!(
            "commit did not improve the measure ({after} >= {before})"
        )));
    }
    trace.steps.extend(outcome.steps);
    trace.commits.push(CommitRecord {
        steps_end: trace.steps.len(),
        side: Side::G,
        measure_before: before,
        measure_after: after,
    });
    Ok(())
}

/// Splits a disconnected factor into components: a result from the other
/// factor returns immediately; otherwise the per-component colorings
/// assemble into one. Component traces re-index into the full product, and
/// their commit measures are rebuilt against the full instance.
fn per_component(
    g: &Graph,
    h: &Graph,
    k: &Graph,
    mu: &Homomorphism,
    which: Side,
) -> Result<SplitResult, SolveError> {
    let hn = h.vertex_count();
    let (factor, other_side) = match which {
        Side::G => (g, Side::H),
        Side::H => (h, Side::G),
    };
    let mut assembled = vec![usize::MAX; factor.vertex_count()];
    let mut merged = RecolorTrace::default();
    for comp in factor.components() {
        let (sub, back) = factor.induced_subgraph(&comp);
        let (sub_mu, to_full): (Homomorphism, Box<dyn Fn(usize) -> usize>) = match which {
            Side::G => {
                let map = back
                    .iter()
                    .flat_map(|&gv| (0..hn).map(move |hv| gv * hn + hv))
                    .map(|flat| mu.apply(flat))
                    .collect();
                let back2 = back.clone();
                (
                    Homomorphism::new_unchecked(map, k.vertex_count()),
                    Box::new(move |f: usize| back2[f / hn] * hn + f % hn),
                )
            }
            Side::H => {
                let sub_hn = sub.vertex_count();
                let map = (0..g.vertex_count())
                    .flat_map(|gv| back.iter().map(move |&hv| gv * hn + hv))
                    .map(|flat| mu.apply(flat))
                    .collect();
                let back2 = back.clone();
                (
                    Homomorphism::new_unchecked(map, k.vertex_count()),
                    Box::new(move |f: usize| (f / sub_hn) * hn + back2[f % sub_hn]),
                )
            }
        };
        let result = match which {
            Side::G => solve_inner(&sub, h, k, &sub_mu, true)?,
            Side::H => solve_inner(g, &sub, k, &sub_mu, true)?,
        };
        let remapped = remap_trace(result.trace, &*to_full, false);
        if result.side == other_side {
            let mut trace = remapped;
            rebuild_commit_measures(g, h, mu.map(), &mut trace);
            return Ok(SplitResult {
                side: other_side,
                hom: result.hom,
                trace,
                intermediate: None,
            });
        }
        append_trace(&mut merged, remapped);
        for (local, &orig) in back.iter().enumerate() {
            assembled[orig] = result.hom.apply(local);
        }
    }
    let hom = Homomorphism::new_unchecked(assembled, k.vertex_count());
    if !validate_hom(&hom, factor, k)? {
        return Err(SolveError::TheoryViolation(
            "component assembly is not edge-preserving".into(),
        ));
    }
    rebuild_commit_measures(g, h, mu.map(), &mut merged);
    Ok(SplitResult {
        side: which,
        hom,
        trace: merged,
        intermediate: None,
    })
}

fn remap_trace(
    trace: RecolorTrace,
    to_full: &dyn Fn(usize) -> usize,
    flip_sides: bool,
) -> RecolorTrace {
    RecolorTrace {
        steps: trace
            .steps
            .into_iter()
            .map(|s| RecolorStep {
                vertex: to_full(s.vertex),
                old: s.old,
                new: s.new,
            })
            .collect(),
        commits: trace
            .commits
            .into_iter()
            .map(|c| CommitRecord {
                steps_end: c.steps_end,
                side: if flip_sides { c.side.flipped() } else { c.side },
                measure_before: c.measure_before,
                measure_after: c.measure_after,
            })
            .collect(),
    }
}

fn append_trace(dst: &mut RecolorTrace, src: RecolorTrace) {
    let offset = dst.steps.len();
    dst.steps.extend(src.steps);
    dst.commits.extend(src.commits.into_iter().map(|c| CommitRecord {
        steps_end: c.steps_end + offset,
        ..c
    }));
}

/// Recomputes every commit's before/after measure against this instance by
/// replaying the steps; needed after re-indexing a trace into a larger or
/// swapped instance.
fn rebuild_commit_measures(g: &Graph, h: &Graph, initial: &[usize], trace: &mut RecolorTrace) {
    let mut coloring = initial.to_vec();
    let mut step_idx = 0;
    let mut prev_end = 0;
    for commit in &mut trace.commits {
        debug_assert!(commit.steps_end >= prev_end);
        commit.measure_before = side_measure(g, h, &coloring, commit.side);
        while step_idx < commit.steps_end {
            let s = trace.steps[step_idx];
            coloring[s.vertex] = s.new;
            step_idx += 1;
        }
        commit.measure_after = side_measure(g, h, &coloring, commit.side);
        prev_end = commit.steps_end;
    }
}

fn unswap_result(inner: SplitResult, gn: usize, hn: usize) -> SplitResult {
    let to_full = move |f: usize| (f % gn) * hn + f / gn;
    let intermediate = inner.intermediate.map(|fact| {
        let gamma_map = (0..gn * hn)
            .map(|f| fact.gamma.apply((f % hn) * gn + f / hn))
            .collect();
        CycleFactorization {
            gamma: Homomorphism::new_unchecked(gamma_map, fact.gamma.codomain_order()),
            delta: fact.delta,
        }
    });
    SplitResult {
        side: inner.side.flipped(),
        hom: inner.hom,
        trace: remap_trace(inner.trace, &to_full, true),
        intermediate,
    }
}
