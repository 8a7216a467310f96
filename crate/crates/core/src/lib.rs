//! Exact computations with the modular Virasoro and affine vertex algebras.
//!
//! Everything is computed over a prime field `F_p` (`p > 2`) at degree-truncated
//! scale: restricted Lie structures, PBW normal forms, vacuum and Verma
//! modules, vertex operator modes, Zhu algebras and `C_2` quotients.

pub mod c2;
pub mod enveloping;
pub mod liealg;
pub mod linalg;
pub mod modes;
pub mod report;
pub mod scalars;
pub mod suites;
pub mod vacuum;
pub mod zhu;

pub use liealg::{Gen, LieAlgebra, LieElement, StructureConstants};
pub use linalg::Lin;
pub use report::{Check, Report, Status};
pub use scalars::{FpScalar, Prime};
