//! Exact linear algebra over prime fields: structured and sparse inversion,
//! certified rank and nullspace, and a few applications built on them.

pub mod apps;
pub mod costmodel;
pub mod counter;
pub mod displacement;
pub mod error;
pub mod field;
pub mod geninv;
pub mod krylov;
pub mod matrix;
pub mod rank;
pub mod structured;

pub use counter::OpCounter;
pub use error::{Error, Result};
pub use field::{FieldElement, PrimeField, SeededRng};
pub use matrix::{BlackBox, BlockView, DenseMatrix, SparseMatrix};
