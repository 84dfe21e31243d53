//! Numerical toolkit for bifurcating and degenerate solutions of
//! `-Delta u + lambda u = lambda u^{q-1}` on `(S^n x S^n, G_delta)`, restricted
//! to functions of `t = <p, q>`.

// `!(x > 0.0)` is used deliberately so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod continuation;
pub mod discretize;
pub mod error;
pub mod geometry;
pub mod model;
pub mod polyspec;

pub use error::{Error, Result};
pub use nalgebra;
