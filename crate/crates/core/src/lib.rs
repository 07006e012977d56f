//! Exact Cayley-Dickson algebras over exact fields.
//!
//! The crate builds algebras by repeated doubling over the rationals, odd
//! prime fields and rational function towers, derives their trace, pure
//! trace and norm forms, decides isotropy where a decision procedure
//! exists, and computes levels and sublevels with machine-checked
//! witnesses. Brown's division towers over `K(X1, ..., Xt)` come with a
//! zero-divisor search and a valuation-parity certificate.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod brown;
pub mod cli;
pub mod error;
pub mod field;
pub mod forms;
pub mod level;

pub use algebra::{Algebra, AlgebraElement, BasisProduct};
pub use brown::{brown_tower, BrownTower, ParityCertificate, ZeroDivisorReport};
pub use error::{Error, Result};
pub use field::{Elem, Field, FieldDescriptor};
pub use forms::{DiagonalForm, GramMatrix, HyperbolicVerdict, SubformVerdict};
