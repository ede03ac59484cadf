//! The polynomial ring on the abstract generators and everything built on
//! it: generator tables, monomial orders, exact linear algebra and the
//! necklace expression table.

pub mod generators;
pub mod linalg;
pub mod poly;
pub mod table;

pub use generators::{generator_set, Generator, GeneratorSet, MAX_GENS};
pub use linalg::{linear_solve, Certificate, Echelon, Insert, Solution};
pub use poly::{graded_basis, GenPoly, Monomial, MonomialOrder, OrderKind};
pub use table::ExpressionTable;
