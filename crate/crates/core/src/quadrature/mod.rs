//! Closed-form Beta-type integrals, adaptive Gauss–Kronrod quadrature,
//! logarithmic cutoff fits, sphere cubature and the reduced-term calculus
//! that turns half-space integrals into products of 1-D closed forms.

mod adaptive;
mod closed;
mod fit;
pub mod qmc;
mod sphere;
mod terms;

pub use adaptive::{
    adaptive, adaptive_2d, gauss_legendre, gk21, Domain1D, QuadOptions, QuadResult,
};
pub use closed::{
    axial_closed, axial_exact, gamma_half, radial_asymptotic, radial_closed, AxialIntegral,
    RadialIntegral,
};
pub use fit::{log_cutoff_fit, log_cutoff_fit_integrand, FitModel, LogFit, DEFAULT_CUTOFFS};
pub use sphere::{SphereRule, SymmetryClass};
pub use terms::{BoundaryMonomial, BoundaryTerms, HalfPlaneTerms, Monomial, ReducedPiece};
