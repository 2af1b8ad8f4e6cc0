//! Exact models of quantum generalized Kac-Moody algebras and their
//! highest weight modules, with crystals, global bases and dual perfect bases.
//!
//! The guide in `book/` walks through the pipeline; its listings are
//! compiled as doctests of this crate.

pub mod cartan;
pub mod corpus;
pub mod crystal;
pub mod dual_perfect;
pub mod duality;
pub mod error;
pub mod field;
pub mod global;
pub mod graded;
pub mod half;
pub mod io;
pub mod linalg;
pub mod matcher;
pub mod module;
pub mod report;
pub mod scalar;
pub mod space;
pub mod strings;
pub mod words;

pub use cartan::{CartanDatum, Weight};
pub use error::{Error, Result};
pub use field::Field;
pub use linalg::Matrix;
pub use scalar::{LaurentPoly, Rational, Scalar};
pub use graded::GradedModel;
pub use half::HalfAlgebra;
pub use module::HWModule;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scalars.md")]
    mod scalars {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/crystals.md")]
    mod crystals {}
    #[doc = include_str!("../../../book/src/global.md")]
    mod global {}
    #[doc = include_str!("../../../book/src/dual-perfect.md")]
    mod dual_perfect {}
    #[doc = include_str!("../../../book/src/strings.md")]
    mod strings {}
    #[doc = include_str!("../../../book/src/duality.md")]
    mod duality {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}
