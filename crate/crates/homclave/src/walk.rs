//! Walks, reduction to normal form, groupoid operations, cyclic reduction,
//! primitive roots, and prefix-of-power decomposition.
//!
//! Walks are stored as vertex sequences; reduction is a linear stack scan and
//! edge orientation is implicit. The empty walk carries its base vertex
//! explicitly, so there is a different empty walk for every starting vertex.
//! Reduced walks are the normal forms of the fundamental groupoid of the
//! ambient graph: two walks with no backtracking are equal as groupoid
//! elements iff they are equal as sequences.

use std::fmt;

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WalkError {
    #[error("vertex sequence must be non-empty")]
    Empty,
    #[error("vertices {u} and {v} are not adjacent")]
    NotAdjacent { u: usize, v: usize },
    #[error("vertex {v} out of range (order {n})")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("endpoint mismatch: first walk ends at {end}, second starts at {start}")]
    EndpointMismatch { end: usize, start: usize },
    #[error("walk is not closed (from {start} to {end})")]
    NotClosed { start: usize, end: usize },
    #[error("the class of the walk is empty")]
    EmptyClass,
    #[error("walks are based at different vertices ({0} vs {1})")]
    BaseMismatch(usize, usize),
    #[error("root is not cyclically reduced")]
    NotCyclicallyReduced,
    #[error("cannot parse walk: {0}")]
    Parse(String),
}

/// A walk `v0 v1 ... vn` (`n >= 0`); consecutive vertices are adjacent in the
/// ambient graph. Length is the number of edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Walk {
    verts: Vec<usize>,
}

impl Walk {
    /// Validates the vertex sequence against `graph`.
    pub fn new(graph: &Graph, verts: Vec<usize>) -> Result<Walk, WalkError> {
        if verts.is_empty() {
            return Err(WalkError::Empty);
        }
        for &v in &verts {
            if v >= graph.vertex_count() {
                return Err(WalkError::VertexOutOfRange {
                    v,
                    n: graph.vertex_count(),
                });
            }
        }
        for w in verts.windows(2) {
            if !graph.has_edge(w[0], w[1]) {
                return Err(WalkError::NotAdjacent { u: w[0], v: w[1] });
            }
        }
        Ok(Walk { verts })
    }

    /// Wraps a vertex sequence that is known to be a walk (e.g. the image of
    /// a walk under a validated homomorphism).
    pub fn new_unchecked(verts: Vec<usize>) -> Walk {
        debug_assert!(!verts.is_empty());
        Walk { verts }
    }

    /// The empty walk based at `v`.
    pub fn empty(v: usize) -> Walk {
        Walk { verts: vec![v] }
    }

    pub fn start(&self) -> usize {
        self.verts[0]
    }

    pub fn end(&self) -> usize {
        *self.verts.last().unwrap()
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.verts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.verts.len() == 1
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.verts
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.verts.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn inverse(&self) -> Walk {
        Walk {
            verts: self.verts.iter().rev().copied().collect(),
        }
    }

    /// Concatenation `self _ other`; endpoints must match.
    pub fn concat(&self, other: &Walk) -> Result<Walk, WalkError> {
        if self.end() != other.start() {
            return Err(WalkError::EndpointMismatch {
                end: self.end(),
                start: other.start(),
            });
        }
        let mut verts = self.verts.clone();
        verts.extend_from_slice(&other.verts[1..]);
        Ok(Walk { verts })
    }

    /// `self` repeated `k` times; requires a closed walk.
    pub fn repeat(&self, k: usize) -> Result<Walk, WalkError> {
        if !self.is_closed() {
            return Err(WalkError::NotClosed {
                start: self.start(),
                end: self.end(),
            });
        }
        let mut verts = vec![self.verts[0]];
        for _ in 0..k {
            verts.extend_from_slice(&self.verts[1..]);
        }
        Ok(Walk { verts })
    }

    /// Parses a comma-separated vertex list, the CLI trace format.
    pub fn parse(s: &str) -> Result<Walk, WalkError> {
        let verts: Result<Vec<usize>, _> = s.split(',').map(|t| t.trim().parse()).collect();
        match verts {
            Ok(v) if !v.is_empty() => Ok(Walk { verts: v }),
            Ok(_) => Err(WalkError::Empty),
            Err(e) => Err(WalkError::Parse(e.to_string())),
        }
    }
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.verts.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", strs.join(","))
    }
}

/// A walk with no index `i` such that `v_{i-1} = v_{i+1}`. These are the
/// normal forms of groupoid elements; construct via [`reduce`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReducedWalk {
    inner: Walk,
}

impl std::ops::Deref for ReducedWalk {
    type Target = Walk;

    fn deref(&self) -> &Walk {
        &self.inner
    }
}

impl fmt::Display for ReducedWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.inner.fmt(f)
    }
}

/// Reduces a walk to its unique backtrack-free fixpoint. Endpoints and
/// length parity are preserved.
pub fn reduce(w: &Walk) -> ReducedWalk {
    let mut stack: Vec<usize> = Vec::with_capacity(w.verts.len());
    for &v in &w.verts {
        if stack.len() >= 2 && stack[stack.len() - 2] == v {
            stack.pop();
        } else {
            stack.push(v);
        }
    }
    ReducedWalk {
        inner: Walk { verts: stack },
    }
}

impl ReducedWalk {
    pub fn empty(v: usize) -> ReducedWalk {
        ReducedWalk {
            inner: Walk::empty(v),
        }
    }

    pub fn as_walk(&self) -> &Walk {
        &self.inner
    }

    pub fn into_walk(self) -> Walk {
        self.inner
    }

    /// Groupoid multiplication: concatenation followed by reduction.
    pub fn product(&self, other: &ReducedWalk) -> Result<ReducedWalk, WalkError> {
        Ok(reduce(&self.inner.concat(&other.inner)?))
    }

    pub fn inverse(&self) -> ReducedWalk {
        ReducedWalk {
            inner: self.inner.inverse(),
        }
    }

    /// Reduced `self` repeated `|k|` times, inverted for negative `k`.
    pub fn power(&self, k: i64) -> Result<ReducedWalk, WalkError> {
        let base = if k < 0 { self.inner.inverse() } else { self.inner.clone() };
        Ok(reduce(&base.repeat(k.unsigned_abs() as usize)?))
    }

    /// A closed reduced walk `R` is cyclically reduced when `R _ R` is reduced,
    /// i.e. its first and last edges are not inverse to each other.
    pub fn is_cyclically_reduced(&self) -> bool {
        self.inner.is_closed()
            && (self.inner.len() == 0 || self.inner.verts[1] != self.inner.verts[self.inner.len() - 1])
    }
}

/// Splits a closed reduced walk as `Q _ core _ Q^{-1}` with `core` closed and
/// cyclically reduced. `|Q| = (|W| - |core|) / 2`.
pub fn cyclic_reduce(w: &ReducedWalk) -> Result<(ReducedWalk, ReducedWalk), WalkError> {
    if !w.is_closed() {
        return Err(WalkError::NotClosed {
            start: w.start(),
            end: w.end(),
        });
    }
    let verts = &w.inner.verts;
    let mut lo = 0;
    let mut hi = verts.len() - 1; // verts[lo..=hi] is the current closed core
    while hi - lo >= 2 && verts[lo + 1] == verts[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    let conjugator = ReducedWalk {
        inner: Walk {
            verts: verts[0..=lo].to_vec(),
        },
    };
    let core = ReducedWalk {
        inner: Walk {
            verts: verts[lo..=hi].to_vec(),
        },
    };
    Ok((conjugator, core))
}

/// A closed reduced walk expressed through its primitive root: the input
/// equals `Q _ core^n _ Q^{-1}` literally, `core` is cyclically reduced and
/// not a proper power, and `n >= 1` follows the input's orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootDecomposition {
    pub conjugator: ReducedWalk,
    pub core: ReducedWalk,
    pub exponent: i64,
}

impl RootDecomposition {
    /// Base vertex of the decomposed element.
    pub fn base(&self) -> usize {
        self.conjugator.start()
    }

    /// The primitive root as a based element: `Q _ core _ Q^{-1}` (literal,
    /// already reduced).
    pub fn primitive_element(&self) -> ReducedWalk {
        conjugate(&self.conjugator, &self.core)
    }

    /// Whether the conjugator is empty, i.e. the root itself is cyclically
    /// reduced at the base.
    pub fn is_cyclic(&self) -> bool {
        self.conjugator.is_empty()
    }

    /// A decomposition with empty conjugator around a cyclically reduced core.
    pub fn cyclic(core: ReducedWalk) -> RootDecomposition {
        debug_assert!(core.is_cyclically_reduced());
        RootDecomposition {
            conjugator: ReducedWalk::empty(core.start()),
            core,
            exponent: 1,
        }
    }
}

/// `Q _ w _ Q^{-1}` for a closed `w` based at `Q`'s end. The result is
/// reduced whenever it arises from a cyclic reduction, which is the only way
/// this is used; a final reduce pass keeps it safe regardless.
fn conjugate(q: &ReducedWalk, w: &ReducedWalk) -> ReducedWalk {
    let glued = q
        .as_walk()
        .concat(w.as_walk())
        .and_then(|x| x.concat(&q.as_walk().inverse()))
        .expect("conjugation endpoints match");
    reduce(&glued)
}

/// Computes the primitive root of a non-empty closed reduced walk: the unique
/// decomposition maximizing the exponent. The core's smallest period is found
/// with a KMP failure function after cyclic reduction.
pub fn primitive_root(w: &ReducedWalk) -> Result<RootDecomposition, WalkError> {
    if !w.is_closed() {
        return Err(WalkError::NotClosed {
            start: w.start(),
            end: w.end(),
        });
    }
    if w.is_empty() {
        return Err(WalkError::EmptyClass);
    }
    let (conjugator, core) = cyclic_reduce(w)?;
    let period = smallest_period(&core.inner.verts[..core.inner.verts.len() - 1]);
    let exponent = (core.len() / period) as i64;
    let root = ReducedWalk {
        inner: Walk {
            verts: core.inner.verts[0..=period].to_vec(),
        },
    };
    Ok(RootDecomposition {
        conjugator,
        core: root,
        exponent,
    })
}

/// Smallest `d` dividing `seq.len()` with `seq[i] == seq[i+d]` for all valid
/// `i` and cyclic wraparound (the sequence is one full turn of a closed walk).
fn smallest_period(seq: &[usize]) -> usize {
    let m = seq.len();
    debug_assert!(m >= 1);
    let mut fail = vec![0usize; m + 1];
    let mut k = 0;
    for i in 1..m {
        while k > 0 && seq[i] != seq[k] {
            k = fail[k];
        }
        if seq[i] == seq[k] {
            k += 1;
        }
        fail[i + 1] = k;
    }
    let d = m - fail[m];
    if m % d == 0 {
        d
    } else {
        m
    }
}

/// If `x` equals the `i`-th power of the primitive element of `r`, returns
/// `i` (0 for the empty class, negative for inverse powers); `None` otherwise.
pub fn is_power_of(x: &ReducedWalk, r: &RootDecomposition) -> Result<Option<i64>, WalkError> {
    if x.start() != r.base() {
        return Err(WalkError::BaseMismatch(x.start(), r.base()));
    }
    if !x.is_closed() {
        return Err(WalkError::NotClosed {
            start: x.start(),
            end: x.end(),
        });
    }
    if x.is_empty() {
        return Ok(Some(0));
    }
    let (qx, cx) = cyclic_reduce(x)?;
    if qx != r.conjugator {
        return Ok(None);
    }
    let core_len = r.core.len();
    if core_len == 0 || cx.len() % core_len != 0 {
        return Ok(None);
    }
    let k = (cx.len() / core_len) as i64;
    if cx == reduce(&r.core.as_walk().repeat(k as usize)?) {
        Ok(Some(k))
    } else if cx == reduce(&r.core.as_walk().inverse().repeat(k as usize)?) {
        Ok(Some(-k))
    } else {
        Ok(None)
    }
}

/// Result of matching a reduced walk against the repetitions of a cyclically
/// reduced root: `position` is the signed length of the longest prefix lying
/// on the root's (or its inverse's) infinite repetition, and `ext` is the
/// remaining suffix. `position.signum()` is 0 exactly when the prefix is
/// empty; one full matching edge commits the direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixSplit {
    pub position: i64,
    pub ext: ReducedWalk,
}

impl PrefixSplit {
    pub fn sign(&self) -> i64 {
        self.position.signum()
    }

    pub fn prefix_len(&self) -> usize {
        self.position.unsigned_abs() as usize
    }
}

/// Splits `w` as `pre _ ext` where `pre` is the longest prefix of `w` that is
/// a prefix of some power of the root (forward or inverse repetitions).
/// Requires the root cyclically reduced with empty conjugator, and `w`
/// starting at the root's base.
pub fn power_prefix_split(
    w: &ReducedWalk,
    r: &RootDecomposition,
) -> Result<PrefixSplit, WalkError> {
    if !r.is_cyclic() || !r.core.is_cyclically_reduced() || r.core.is_empty() {
        return Err(WalkError::NotCyclicallyReduced);
    }
    if w.start() != r.base() {
        return Err(WalkError::BaseMismatch(w.start(), r.base()));
    }
    let core = &r.core.inner.verts;
    let n = core.len() - 1;
    let match_len = |forward: bool| -> usize {
        let mut t = 0;
        while t < w.len() {
            let expect = if forward {
                core[(t + 1) % n]
            } else {
                core[n - ((t + 1) % n)]
            };
            if w.inner.verts[t + 1] != expect {
                break;
            }
            t += 1;
        }
        t
    };
    let fwd = match_len(true);
    let bwd = match_len(false);
    debug_assert!(
        fwd == 0 || bwd == 0,
        "a cyclically reduced root cannot share a first edge with its inverse"
    );
    let (position, pre_len) = if fwd >= bwd {
        (fwd as i64, fwd)
    } else {
        (-(bwd as i64), bwd)
    };
    let ext = ReducedWalk {
        inner: Walk {
            verts: w.inner.verts[pre_len..].to_vec(),
        },
    };
    Ok(PrefixSplit { position, ext })
}

/// Canonical representative of the conjugacy class of a closed reduced walk
/// up to rotation and inversion: the lexicographically smallest vertex
/// sequence among all rotations of the cyclically reduced core and of its
/// inverse. Empty for trivial classes.
pub fn cyclic_normal_form(w: &ReducedWalk) -> Result<Vec<usize>, WalkError> {
    let (_, core) = cyclic_reduce(w)?;
    if core.is_empty() {
        return Ok(Vec::new());
    }
    let mut best: Option<Vec<usize>> = None;
    for cand in [core.clone(), core.inverse()] {
        let cyc = &cand.inner.verts[..cand.inner.verts.len() - 1];
        for s in 0..cyc.len() {
            let mut rot: Vec<usize> = cyc[s..].iter().chain(cyc[..s].iter()).copied().collect();
            rot.push(rot[0]);
            if best.as_ref().map_or(true, |b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    Ok(best.unwrap())
}
