//! A small language for analytic functions of `z`, and the built-in catalog.

pub mod ast;
pub mod catalog;
pub mod parser;
pub mod spec;

pub use ast::{complex_literal, Ast, BinOp, Func};
pub use catalog::{catalog_entry, catalog_list, CatalogEntry, Function};
pub use parser::parse;
pub use spec::{parse_complex, FunctionSpec};

use num_complex::Complex64;

use crate::analytic::Analytic;
use crate::error::Result;
use crate::numerics::Jet3;

/// Compiles `spec` and evaluates its jet at `z`.
pub fn eval_jet(spec: &FunctionSpec, z: Complex64) -> Result<Jet3> {
    spec.compile()?.jet(z)
}
