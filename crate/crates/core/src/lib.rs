#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
pub mod error;
pub mod limits;
pub mod quadrature;
pub mod response;
pub mod roots;
pub mod scalar;
pub mod state;
pub mod sweep;
pub mod validation;
