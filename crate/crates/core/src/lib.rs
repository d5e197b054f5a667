#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod besov;
pub mod catalog;
pub mod error;
pub mod io;
pub mod measure;
pub mod operator;
pub mod quadrature;
pub mod smoothness;
pub mod special;
pub mod transform;
pub mod translation;
pub mod verify;

pub use error::{Error, Result};
pub use measure::{integrate, lp_norm, Parity, QuadGrid, SampledFunction};
pub use special::{bessel_j_normalized, dunkl_kernel, gamma, AlphaParameter};
pub use transform::{forward_transform, inverse_transform, Spectrum};
