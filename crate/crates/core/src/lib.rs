//! Sliceness and concordance-order obstructions for odd pretzel knots.
//!
//! The pipeline runs entirely in exact arithmetic:
//!
//! * [`plumbing`] builds the negative-definite plumbing graphs bounded by the
//!   branched double cover of `P(p,q,r)`;
//! * [`donaldson`] searches for embeddings of their intersection lattices in
//!   the standard diagonal lattice;
//! * [`spinc`] computes Heegaard Floer correction terms of plumbed manifolds
//!   and counts the classes on which they vanish;
//! * [`obstruct`] combines everything into certified verdicts.

pub mod donaldson;
pub mod linalg;
pub mod obstruct;
pub mod plumbing;
pub mod pretzel;
pub mod spinc;
