//! Crystal graphs: the abstract container, modified root operators on graded
//! models, isomorphism search and export.

mod abstract_crystal;
pub mod export;
mod iso;
mod operators;

pub use abstract_crystal::{check_morphism, is_isomorphism, AbstractCrystal, CrystalNode, ExtInt, Violation};
pub use iso::find_isomorphism;
pub use operators::{generate, lattice_basis, GeneratedCrystal, RootOperators};
