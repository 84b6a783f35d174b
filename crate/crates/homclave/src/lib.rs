//! Constructive multiplicativity toolkit for graph homomorphisms.
//!
//! Given a homomorphism `mu: G x H -> K` where `K` is square-free or a
//! circular clique `K_{p/q}` with `2 <= p/q < 4`, the solvers in this crate
//! produce (and verify) a homomorphism from `G` or from `H` into `K`.
//! All the intermediate algebra is exposed as reusable operations:
//!
//! * [`graph`] — immutable graphs, standard families, tensor products,
//!   homomorphism validation;
//! * [`walk`] — walks, reduction to normal form, groupoid operations,
//!   cyclic reduction, primitive roots, prefix-of-power splits;
//! * [`homotopy`] — lifted cycles, the join construction, fundamental cycle
//!   bases, and a bounded square-move equivalence oracle;
//! * [`winding`] — the circular-clique winding invariant and half-parity;
//! * [`circular`] — the side-selection / edge-removal solver for circular
//!   cliques;
//! * [`squarefree`] — the trichotomy, recoloring-improvement loop and the
//!   three extraction routines for square-free codomains;
//! * [`oracle`] — brute-force homomorphism search/enumeration and a
//!   recoloring-reachability BFS, used as independent ground truth.

pub mod circular;
pub mod graph;
pub mod homotopy;
pub mod io;
pub mod oracle;
pub mod squarefree;
pub mod walk;
pub mod winding;

pub use graph::{Bipartiteness, Bipartition, Graph, GraphError, Homomorphism, ProductVertex};
pub use squarefree::{RecolorStep, RecolorTrace, Side, SplitResult};
pub use walk::{ReducedWalk, RootDecomposition, Walk, WalkError};
