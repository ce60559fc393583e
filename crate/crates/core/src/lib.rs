//! Numerical tools for univalent functions on the unit disk: the integral
//! transforms `J_α` and `I_α`, pre-Schwarzian and Schwarzian norms, the
//! sharp constants of the transforms, subordination checks, Loewner-chain
//! dilatation conditions and an explicit quasiconformal extension of
//! spirallike maps.

pub mod acceptance;
pub mod analytic;
pub mod constants;
pub mod error;
pub mod funclang;
pub mod loewner;
pub mod norms;
pub mod numerics;
pub mod subordination;
pub mod transforms;

pub use analytic::Analytic;
pub use error::{Error, ErrorClass, Result};
pub use funclang::{Function, FunctionSpec};
pub use numerics::{c64, Complex64, Jet3, PowerSeries};
