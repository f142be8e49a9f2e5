//! Exact construction of the Feynman transform of the homology of the moduli
//! spaces of stable curves through type (1,4), together with a verifier for
//! the higher operations built on top of it.
//!
//! The crate is layered bottom-up:
//!
//! - [`exactq`]: rationals, parameter forms in `e, w, w′`, matrices.
//! - [`symmetric`]: permutations and S_n characters.
//! - [`modgraph`]: stable graphs, canonical forms, automorphisms, nests.
//! - [`strata`]: homology of M̄_{g,n} as strata modulo relations.
//! - [`feynman`]: the bigraded contraction complexes and their duals.
//! - [`verify14`]: the named checks for type (1,4).
//! - [`report`]: check records and rendering.

pub mod exactq;
pub mod feynman;
pub mod modgraph;
pub mod par;
pub mod report;
pub mod strata;
pub mod symmetric;
pub mod verify14;

pub use exactq::{ParamScalar, QMatrix, Rational};
pub use modgraph::{ModularGraph, Nest};
