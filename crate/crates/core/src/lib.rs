//! Weil representations, vector-valued modular forms and Hecke operators on theta spans.

pub mod analytic;
pub mod arith;
pub mod cyclotomic;
pub mod error;
pub mod fqm;
pub mod hecke;
pub mod intmat;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod obstruction;
pub mod poly;
pub mod vvmf;
pub mod weilrep;

pub use cyclotomic::{CycInt, CycScalar, Cyclotomic};
pub use error::{Error, Result};
pub use fqm::{FiniteQuadraticModule, Fqm, FqmElement, FqmIsometry, IsotropicSubgroup};
