//! The winding invariant of circular cliques with odd `p` and `2 < p/q < 4`.
//!
//! Closed walks in `K_{p/q}` form, up to square moves and reduction, a group
//! isomorphic to the integers; the isomorphism is computed by a signed
//! distance sum. The relabeled double cover behind it is never materialized:
//! each edge `(u, v)` of a walk contributes `d(2(v-u) + p)` directly, where
//! `d` picks the representative of a residue mod `2p` in `{-(p-1), ..., p}`.
//! The per-edge term is independent of the edge's position, so additivity
//! under concatenation is immediate, and square moves cancel exactly because
//! `2(p - 2q) < p`.

use thiserror::Error;

use crate::graph::{Graph, Homomorphism};
use crate::homotopy::{lift_cycle, LiftSide};
use crate::walk::Walk;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WindingError {
    #[error("parameters p={p}, q={q} need p odd and 2q < p < 4q")]
    InvalidParams { p: usize, q: usize },
    #[error("({u},{v}) is not an edge of K_{{p/q}}")]
    NotAWalk { u: usize, v: usize },
    #[error("delta {delta} is not a multiple of p={p}; walk not closed or invalid")]
    NonIntegralWinding { delta: i64, p: usize },
    #[error("walk is not closed")]
    NotClosed,
    #[error("walk has even length {0}, expected odd")]
    NotOddLength(usize),
    #[error("winding {0} of the lifted cycle is odd; the coloring violates the half-parity premise")]
    OddWindingHalf(i64),
    #[error(transparent)]
    Homotopy(#[from] crate::homotopy::HomotopyError),
}

/// Parameters of a circular clique in the winding regime: `p` odd,
/// `2q < p < 4q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircularParams {
    p: usize,
    q: usize,
}

impl CircularParams {
    pub fn new(p: usize, q: usize) -> Result<Self, WindingError> {
        if p % 2 == 0 || q == 0 || p <= 2 * q || p >= 4 * q {
            return Err(WindingError::InvalidParams { p, q });
        }
        Ok(CircularParams { p, q })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn graph(&self) -> Graph {
        Graph::circular_clique(self.p, self.q).expect("validated params")
    }
}

/// The representative of `x mod 2p` in `{-(p-1), ..., p-1, p}`. The set
/// contains `+p` and excludes `-p`.
pub fn signed_dist(x: i64, p: usize) -> i64 {
    let m = 2 * p as i64;
    let r = x.rem_euclid(m);
    if r > p as i64 {
        r - m
    } else {
        r
    }
}

/// The winding datum of a walk: the signed distance sum together with the
/// base-parity data that fixes which group the walk's class lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindingValue {
    pub delta: i64,
    pub start: usize,
    pub len_parity: u8,
}

/// Computes the signed distance sum of a walk in `K_{p/q}` in one pass,
/// validating each step. Additive under concatenation and invariant under
/// elementary steps.
pub fn delta_phi(w: &Walk, params: &CircularParams) -> Result<WindingValue, WindingError> {
    let p = params.p;
    let q = params.q;
    let mut delta = 0i64;
    for (u, v) in w.edges() {
        if u >= p || v >= p {
            return Err(WindingError::NotAWalk { u, v });
        }
        let step = (v + p - u) % p;
        if step < q || step > p - q {
            return Err(WindingError::NotAWalk { u, v });
        }
        delta += signed_dist(2 * step as i64 + p as i64, p);
    }
    Ok(WindingValue {
        delta,
        start: w.start(),
        len_parity: (w.len() % 2) as u8,
    })
}

/// The generating closed walk of length `p` from 0: the `(i+1)`-th edge is
/// `(i*ceil(p/2) mod p, (i+1)*ceil(p/2) mod p)`. Its signed distance sum
/// is exactly `p`.
pub fn generator_o(params: &CircularParams) -> Walk {
    let p = params.p;
    let half_up = p.div_ceil(2);
    Walk::new_unchecked((0..=p).map(|i| (i * half_up) % p).collect())
}

/// The winding number of a closed walk: `delta / p`, an exact integer and a
/// complete invariant of the walk's class at a fixed base vertex.
pub fn winding_number(w: &Walk, params: &CircularParams) -> Result<i64, WindingError> {
    if !w.is_closed() {
        return Err(WindingError::NotClosed);
    }
    let value = delta_phi(w, params)?;
    let p = params.p as i64;
    if value.delta % p != 0 {
        return Err(WindingError::NonIntegralWinding {
            delta: value.delta,
            p: params.p,
        });
    }
    Ok(value.delta / p)
}

/// Half-parity of an odd closed walk `c` in a factor, under `mu` into
/// `K_{p/q}`: the lifted cycle's image winds an even number `2i` of times
/// and the half-parity is `i mod 2`. An odd winding means `mu` violates the
/// premise (e.g. is not a valid coloring) and is reported as an error.
pub fn half_parity(
    c: &Walk,
    mu: &Homomorphism,
    anchor: (usize, usize),
    side: LiftSide,
    g: &Graph,
    h: &Graph,
    params: &CircularParams,
) -> Result<u8, WindingError> {
    if c.len() % 2 == 0 {
        return Err(WindingError::NotOddLength(c.len()));
    }
    let lifted = lift_cycle(c, anchor, side, g, h)?;
    let image = mu.map_walk(&lifted);
    let w = winding_number(&image, params)?;
    if w % 2 != 0 {
        return Err(WindingError::OddWindingHalf(w));
    }
    Ok((w / 2).rem_euclid(2) as u8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cycle_as_circular_iso;
    use crate::walk::reduce;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn signed_dist_representatives() {
        assert_eq!(signed_dist(3, 5), 3);
        assert_eq!(signed_dist(7, 5), -3);
        assert_eq!(signed_dist(5, 5), 5);
        assert_eq!(signed_dist(-5, 5), 5);
        assert_eq!(signed_dist(10, 5), 0);
        assert_eq!(signed_dist(-1, 5), -1);
        for p in [5usize, 7, 11] {
            for x in -30i64..30 {
                let d = signed_dist(x, p);
                assert!(d > -(p as i64) && d <= p as i64);
                assert_eq!((d - x).rem_euclid(2 * p as i64), 0);
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(CircularParams::new(5, 2).is_ok());
        assert!(CircularParams::new(7, 2).is_ok());
        assert!(CircularParams::new(7, 3).is_ok());
        assert!(CircularParams::new(11, 3).is_ok());
        assert!(CircularParams::new(6, 2).is_err()); // even p
        assert!(CircularParams::new(9, 2).is_err()); // ratio too large
        assert!(CircularParams::new(5, 3).is_err()); // ratio below 2
    }

    #[test]
    fn generator_walks_and_delta() {
        let params = CircularParams::new(5, 2).unwrap();
        let o = generator_o(&params);
        assert_eq!(o.vertices(), &[0, 3, 1, 4, 2, 0]);
        assert_eq!(delta_phi(&o, &params).unwrap().delta, 5);

        let params = CircularParams::new(7, 3).unwrap();
        let o = generator_o(&params);
        assert_eq!(o.vertices(), &[0, 4, 1, 5, 2, 6, 3, 0]);
        assert_eq!(delta_phi(&o, &params).unwrap().delta, 7);

        for (p, q) in [(5, 2), (7, 2), (7, 3), (11, 3), (9, 4), (11, 4), (13, 5)] {
            let params = CircularParams::new(p, q).unwrap();
            let o = generator_o(&params);
            assert_eq!(
                delta_phi(&o, &params).unwrap().delta,
                p as i64,
                "O winds once for p={p}, q={q}"
            );
            assert_eq!(winding_number(&o, &params).unwrap(), 1);
        }
    }

    #[test]
    fn delta_basics() {
        let params = CircularParams::new(5, 2).unwrap();
        assert_eq!(delta_phi(&Walk::empty(3), &params).unwrap().delta, 0);
        let back_forth = Walk::new_unchecked(vec![0, 2, 0]);
        assert_eq!(delta_phi(&back_forth, &params).unwrap().delta, 0);
        assert_eq!(winding_number(&back_forth, &params).unwrap(), 0);

        let oo = generator_o(&params).repeat(2).unwrap();
        assert_eq!(winding_number(&oo, &params).unwrap(), 2);

        let bad = Walk::new_unchecked(vec![0, 1]);
        assert!(matches!(
            delta_phi(&bad, &params),
            Err(WindingError::NotAWalk { u: 0, v: 1 })
        ));
    }

    fn random_walk_in(k: &Graph, rng: &mut ChaCha8Rng, from: usize, len: usize) -> Walk {
        let mut verts = vec![from];
        for _ in 0..len {
            let cur = *verts.last().unwrap();
            let nbrs = k.neighbors(cur);
            verts.push(nbrs[rng.gen_range(0..nbrs.len())]);
        }
        Walk::new_unchecked(verts)
    }

    #[test]
    fn delta_additivity_random() {
        let params = CircularParams::new(7, 2).unwrap();
        let k = params.graph();
        let mut rng = ChaCha8Rng::seed_from_u64(0xadd);
        for _ in 0..500 {
            let (from, len) = (rng.gen_range(0..7), rng.gen_range(0..12));
            let w = random_walk_in(&k, &mut rng, from, len);
            let len2 = rng.gen_range(0..12);
            let w2 = random_walk_in(&k, &mut rng, w.end(), len2);
            let joined = w.concat(&w2).unwrap();
            assert_eq!(
                delta_phi(&joined, &params).unwrap().delta,
                delta_phi(&w, &params).unwrap().delta + delta_phi(&w2, &params).unwrap().delta
            );
        }
    }

    #[test]
    fn delta_invariant_under_elementary_steps() {
        let params = CircularParams::new(7, 2).unwrap();
        let k = params.graph();
        let mut rng = ChaCha8Rng::seed_from_u64(0x57e9);
        for _ in 0..500 {
            let (from, len) = (rng.gen_range(0..7), rng.gen_range(1..12));
            let w = random_walk_in(&k, &mut rng, from, len);
            let before = delta_phi(&w, &params).unwrap().delta;
            // Random applicable elementary step.
            let mut verts = w.vertices().to_vec();
            match rng.gen_range(0..3) {
                0 => {
                    // insert e _ e^-1
                    let i = rng.gen_range(0..verts.len());
                    let nbrs = k.neighbors(verts[i]);
                    let x = nbrs[rng.gen_range(0..nbrs.len())];
                    verts.insert(i + 1, verts[i]);
                    verts.insert(i + 1, x);
                }
                1 => {
                    // delete a backtrack if one exists
                    if let Some(i) =
                        (0..verts.len().saturating_sub(2)).find(|&i| verts[i] == verts[i + 2])
                    {
                        verts.drain(i + 1..i + 3);
                    }
                }
                _ => {
                    // square replacement at a random interior position
                    if verts.len() >= 3 {
                        let i = rng.gen_range(1..verts.len() - 1);
                        let (a, c) = (verts[i - 1], verts[i + 1]);
                        let cands: Vec<usize> = k
                            .neighbors(a)
                            .iter()
                            .copied()
                            .filter(|&x| k.has_edge(x, c))
                            .collect();
                        if !cands.is_empty() {
                            verts[i] = cands[rng.gen_range(0..cands.len())];
                        }
                    }
                }
            }
            let after = delta_phi(&Walk::new_unchecked(verts), &params).unwrap().delta;
            assert_eq!(before, after);
        }
    }

    #[test]
    fn winding_complete_at_desk_scale() {
        // Closed walks of length <= 8 from vertex 0 in K_{5/2}: equal winding
        // iff the bounded oracle relates them.
        use crate::homotopy::{equivalent_bounded, Equivalence, SearchBudget};
        let params = CircularParams::new(5, 2).unwrap();
        let k = params.graph();
        let mut closed = Vec::new();
        let mut stack = vec![vec![0usize]];
        while let Some(vs) = stack.pop() {
            if vs.len() > 1 && vs[0] == *vs.last().unwrap() {
                closed.push(Walk::new_unchecked(vs.clone()));
            }
            if vs.len() <= 8 {
                for &nb in k.neighbors(*vs.last().unwrap()) {
                    let mut next = vs.clone();
                    next.push(nb);
                    stack.push(next);
                }
            }
        }
        let budget = SearchBudget {
            max_nodes: 60_000,
            length_slack: 4,
        };
        let windings: Vec<i64> = closed
            .iter()
            .map(|w| winding_number(w, &params).unwrap())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0xc0);
        for _ in 0..400 {
            let i = rng.gen_range(0..closed.len());
            let j = rng.gen_range(0..closed.len());
            match equivalent_bounded(&k, &closed[i], &closed[j], budget) {
                Equivalence::Related(_) => assert_eq!(windings[i], windings[j]),
                Equivalence::NotRelated => assert_ne!(windings[i], windings[j]),
                Equivalence::Unknown => {
                    // The capped search may miss a meeting point; it must at
                    // least never contradict equal windings being related.
                    // Equal-winding pairs of these short walks are in fact
                    // always found, so Unknown only happens on distinct ones.
                    assert_ne!(windings[i], windings[j]);
                }
            }
        }
    }

    #[test]
    fn half_parity_projection_instance() {
        // G = H = C_5, codomain K_{5/2} via the relabeling iso; mu = left
        // projection composed with the iso.
        let c5 = Graph::cycle(5);
        let params = CircularParams::new(5, 2).unwrap();
        let iso = cycle_as_circular_iso(5).unwrap();
        let mu = Homomorphism::new_unchecked(
            (0..25).map(|v| iso.apply(v / 5)).collect(),
            5,
        );
        let c = Walk::new(&c5, vec![0, 1, 2, 3, 4, 0]).unwrap();
        let pg = half_parity(&c, &mu, (0, 1), LiftSide::Left, &c5, &c5, &params).unwrap();
        assert_eq!(pg, 1);

        let d = Walk::new(&c5, vec![0, 1, 2, 3, 4, 0]).unwrap();
        let ph = half_parity(&d, &mu, (0, 1), LiftSide::Right, &c5, &c5, &params).unwrap();
        assert_eq!(ph, 0);

        assert_eq!((pg + ph) % 2, 1);
    }

    #[test]
    fn half_parity_rejects_even_cycles() {
        let c5 = Graph::cycle(5);
        let params = CircularParams::new(5, 2).unwrap();
        let iso = cycle_as_circular_iso(5).unwrap();
        let mu =
            Homomorphism::new_unchecked((0..25).map(|v| iso.apply(v / 5)).collect(), 5);
        let even = Walk::new(&c5, vec![0, 1, 0]).unwrap();
        assert!(matches!(
            half_parity(&even, &mu, (0, 1), LiftSide::Left, &c5, &c5, &params),
            Err(WindingError::NotOddLength(2))
        ));
    }

    #[test]
    fn winding_matches_reduction_class_of_generator_conjugates() {
        // Conjugating O by a path leaves the winding at the new base at 1.
        let params = CircularParams::new(7, 3).unwrap();
        let k = params.graph();
        let o = generator_o(&params);
        for v in 1..7usize {
            let path = {
                // any short path 0 -> v
                let mut parent = vec![usize::MAX; 7];
                parent[0] = 0;
                let mut q = std::collections::VecDeque::from([0usize]);
                while let Some(u) = q.pop_front() {
                    for &w in k.neighbors(u) {
                        if parent[w] == usize::MAX {
                            parent[w] = u;
                            q.push_back(w);
                        }
                    }
                }
                let mut path = vec![v];
                let mut cur = v;
                while cur != 0 {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                path
            };
            let pw = Walk::new_unchecked(path);
            let conj = pw
                .inverse()
                .concat(&o)
                .unwrap()
                .concat(&pw)
                .unwrap();
            assert_eq!(winding_number(&conj, &params).unwrap(), 1, "base {v}");
            let red = reduce(&conj);
            assert_eq!(
                winding_number(red.as_walk(), &params).unwrap(),
                1,
                "reduced, base {v}"
            );
        }
    }
}
