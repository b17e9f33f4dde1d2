//! Theta functions, elliptic gamma functions, theta hypergeometric series and
//! the root-system beta integrals built from them.
//!
//! Everything is generic over [`Real`], implemented for `f64` and for the
//! double-double type [`Dd`] used for tight-tolerance checks.

#![no_std]

extern crate alloc;

pub mod biorthogonal;
pub mod cx;
pub mod dd;
pub mod error;
pub mod gamma;
pub mod identities;
pub mod integrands;
pub mod quadrature;
pub mod real;
pub mod report;
pub mod series;
pub mod special;

pub use cx::{Cx, C64};
pub use dd::Dd;
pub use error::{Error, Result};
pub use real::Real;
pub use report::VerificationReport;
pub use special::{Moduli, TruncationPolicy};
