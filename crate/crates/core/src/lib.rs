//! Exact and numerical evaluation of the integrals, correction fields, expansion
//! coefficients and Pohozaev fluxes that arise in the blow-up analysis of the
//! boundary Yamabe problem on the half-space.
//!
//! Constants live in `Q + Q*pi` ([`scalars::ExactScalar`]) and are carried as
//! coefficients of a symbolic sphere-area unit. Floating-point paths
//! (adaptive quadrature, surface fluxes, the reduced linear solve) serve as
//! independent cross-checks.

pub mod bubble;
pub mod corrections;
pub mod error;
pub mod exec;
pub mod expansions;
pub mod linsolve;
pub mod pohozaev;
pub mod point;
pub mod quadrature;
pub mod scalars;
pub mod tensors;

pub use error::{Error, Result};
pub use exec::Exec;
pub use scalars::{AsymptoticValue, ExactScalar};
