//! Exact-arithmetic invariants of descending HNN extensions of finitely
//! generated free groups: Fox matrices, Alexander polynomials and polytopes,
//! Novikov-series leading terms, the torsion polytope and its seminorm,
//! Sigma-invariant membership tests, and closed forms for unipotent
//! polynomially growing automorphisms.

pub mod alexander;
pub mod fold;
pub mod group_ring;
pub mod hnn;
pub mod l2;
pub mod laurent;
pub mod novikov;
pub mod polytopes;
pub mod selftest;
pub mod smith;
pub mod upg;
pub mod words;
