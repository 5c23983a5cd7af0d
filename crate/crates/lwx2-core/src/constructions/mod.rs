//! Constructive functors between the structure kinds: skew-symmetrization of
//! a metric Lie 2-algebra into a Lie 3-algebra, the semidirect-product double
//! of a 2-term L-infinity algebra, derived-bracket extraction of algebroid
//! operations from degree-4 Hamiltonians, Schouten calculus on multisections,
//! and the split 2-bialgebroid checks and double.

mod bialgebroid;
mod derived;
mod lie2;
mod point;
mod schouten;

pub use bialgebroid::{bialgebroid_check, bialgebroid_double, BialgebroidDouble, BialgebroidReport};
pub use derived::{derive_lwx, extract_point, DerivedOperators, ESection};
pub use lie2::{derive_lie2algebroid, mu_from_lie2_algebra, stl2a_lwx, Lie2AlgebroidOps, StL2AOps};
pub use point::{semidirect_double, skew_symmetrize};
pub use schouten::{schouten_dual, schouten_primal, SchoutenCalculus, SchoutenElement, SchoutenView};

use thiserror::Error;

use crate::brackets::BracketError;
use crate::symplectic::SymplecticError;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Bracket(#[from] BracketError),
    #[error("input structure fails verification:\n{0}")]
    InputInvalid(String),
    #[error("expected a 2-term structure on degrees 0 and -1, found degrees {0:?}")]
    NotTwoTerm(Vec<i32>),
    #[error("polynomial is not a {class} section: {reason}")]
    NotASection { class: &'static str, reason: String },
    #[error("master equation fails: residual has {terms} terms")]
    MasterFailure { terms: usize },
    #[error("operation result leaves the expected section class")]
    ClosureFailure,
}
