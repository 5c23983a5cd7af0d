//! Exact-arithmetic kernel for degree-n graded symplectic structures and the
//! higher algebroid structures they induce.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`] — graded-commutative polynomials over exact rationals;
//! * [`symplectic`] — Darboux charts, the graded Poisson bracket, master
//!   equation residuals, and shape decomposition of degree-(n+1) Hamiltonians;
//! * [`brackets`] — finite structure-constant models (L-infinity, Leibniz-2,
//!   metric Lie 2-algebras) and exhaustive axiom verifiers;
//! * [`constructions`] — the constructive theorems: skew-symmetrization into a
//!   Lie 3-algebra, semidirect doubles, derived-bracket extraction from
//!   Q-structures, Schouten calculus, and the Lie 2-bialgebroid double;
//! * [`model`] — the textual model format and report serialization;
//! * [`exec`] — sequential/data-parallel execution strategy for verifier
//!   sweeps (rayon behind the `parallel` feature).

pub mod algebra;
pub mod brackets;
pub mod constructions;
pub mod exec;
pub mod model;
pub mod symplectic;

pub use algebra::{AlgebraError, GPoly, GradedVariable, MonKey, Q, Side, VarEnv, VarId};
