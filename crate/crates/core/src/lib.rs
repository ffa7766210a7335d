//! Period tripling and quintupling renormalization fixed points for
//! unimodal maps with a quadratic tip whose renormalization limits are
//! `C^{1+Lip}` but not `C^2`.

pub mod affine;
pub mod error;
pub mod extension;
pub mod filler;
pub mod fixed_point;
pub mod quadratic;
pub mod roots;
pub mod horseshoe;
pub mod pwa;
pub mod scaling;
pub mod tower;

pub use error::{Error, Result};
