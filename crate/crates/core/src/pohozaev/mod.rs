//! Pohozaev fluxes, the identity residual, the reduced `F` bilinear form and
//! the mass flux integral.

pub mod domain;
pub mod field;
pub mod fform;
pub mod flux;
pub mod mass;

pub use domain::{Estimate, SurfaceQuadrature};
pub use field::{FieldOnHalfSpace, FnField, GaussianBump, PowerField, SumField};
pub use flux::{
    eval_p, eval_p_prime, poho_identity_residual, BoundaryNonlinearity, FluxBreakdown, FluxReport, IdentityData,
    IdentityReport, NormalConvention,
};
pub use fform::{cross_symmetric_sum, f_form, fww_log_fit, fww_richardson, FFormValue, RichardsonReport};
pub use mass::{
    constant_regular_part, mass_flux, mass_flux_a_part_mc, p_prime_mass_relation, random_conformal_jet, FluxDegreeReport, MassFluxReport,
    MassRelation, McEstimate,
};
