//! Pohozaev boundary fluxes `P′`, `P` and the residual of the local
//! Pohozaev identity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::point::{dot, Vector, ZERO_VECTOR};
use crate::quadrature::{SphereRule, SymmetryClass};

use super::domain::{disk_integral, half_ball_integral, half_sphere_integral, ring_integral, SurfaceQuadrature};
use super::field::FieldOnHalfSpace;

/// Direction of `ν` on the curved boundary `{|x| = ρ, x_N > 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalConvention {
    /// Towards the origin.
    #[default]
    Inward,
    Outward,
}

impl NormalConvention {
    fn sign(self) -> f64 {
        match self {
            NormalConvention::Inward => -1.0,
            NormalConvention::Outward => 1.0,
        }
    }
}

/// Per-term values of `P′` and the ring term of `P`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FluxBreakdown {
    /// `−m ∫ U ∂_ν U`.
    pub u_normal: f64,
    /// `−(ρ/2) ∫ |∇U|²`.
    pub gradient: f64,
    /// `ρ ∫ |∂_ν U|²`.
    pub normal_sq: f64,
    /// `ρ/(p+1) ∫_{∂B^n} f U^{p+1}`; zero when no nonlinearity is given.
    pub ring: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FluxReport {
    pub rho: f64,
    pub p_prime: f64,
    pub p: f64,
    pub breakdown: FluxBreakdown,
    /// Gap to a half-resolution evaluation.
    pub error_estimate: f64,
}

type ScalarFn = Box<dyn Fn(&[f64]) -> f64 + Sync + Send>;
type VectorFn = Box<dyn Fn(&[f64]) -> Vector + Sync + Send>;

/// Boundary nonlinearity `f U^p`.
pub struct BoundaryNonlinearity {
    /// `f` at a boundary point `(x̄, 0)`.
    pub f: ScalarFn,
    /// Tangential gradient of `f`.
    pub grad_f: VectorFn,
    pub exponent: f64,
    pub symmetry: SymmetryClass,
}

impl BoundaryNonlinearity {
    /// Constant `f` with exponent `p`.
    pub fn constant(f: f64, exponent: f64) -> Self {
        Self {
            f: Box::new(move |_| f),
            grad_f: Box::new(|_| ZERO_VECTOR),
            exponent,
            symmetry: SymmetryClass::Radial,
        }
    }

    /// `f = N − 2`, `p = N/(N−2)`: the bubble's boundary equation.
    pub fn critical(dim: usize) -> Self {
        let big = dim as f64;
        Self::constant(big - 2.0, big / (big - 2.0))
    }
}

/// Data of the boundary value problem `−ΔU = Q`, `−∂_N U + m H U = f U^p`.
pub struct IdentityData {
    pub interior_source: Option<ScalarFn>,
    pub mean_curvature: Option<ScalarFn>,
    pub nonlinearity: BoundaryNonlinearity,
    /// Angular class shared by `Q` and `H`.
    pub data_symmetry: SymmetryClass,
}

impl IdentityData {
    /// `Q = 0`, `H = 0`, `f = N−2`, `p = N/(N−2)`.
    pub fn bubble(dim: usize) -> Self {
        Self {
            interior_source: None,
            mean_curvature: None,
            nonlinearity: BoundaryNonlinearity::critical(dim),
            data_symmetry: SymmetryClass::Radial,
        }
    }
}

/// Degree of `U^k` in the tangential angle when `k` may be fractional.
fn power_degree(u: SymmetryClass) -> Option<u32> {
    match u {
        SymmetryClass::Radial => Some(0),
        _ => None,
    }
}

/// Sphere rule for a product of factors, falling back to the product rule
/// when the degree budget is exceeded.
fn rule_for(n: usize, degrees: &[Option<u32>], q: &SurfaceQuadrature) -> SphereRule {
    SphereRule::for_classes(n, degrees, q.product_nodes)
        .unwrap_or_else(|_| SphereRule::product(n, q.product_nodes))
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("radius must be positive, got {rho}")))
    }
}

/// `P′(U, ρ)`.
pub fn eval_p_prime<U: FieldOnHalfSpace + ?Sized>(
    u: &U,
    rho: f64,
    normal: NormalConvention,
    q: &SurfaceQuadrature,
) -> Result<FluxReport> {
    check_rho(rho)?;
    let dim = u.dim();
    let m = 0.5 * (dim as f64 - 2.0);
    let deg = u.symmetry().angular_degree();
    let rule = rule_for(dim - 1, &[deg, deg], q);
    let sign = normal.sign();
    let parts = |x: &[f64]| {
        let v = u.value(x);
        let g = u.gradient(x);
        let dn = sign * dot(&g[..dim], x) / rho;
        (v, g, dn)
    };
    let a = half_sphere_integral(dim, rho, &rule, q, |x| {
        let (v, _, dn) = parts(x);
        -m * v * dn
    });
    let b = half_sphere_integral(dim, rho, &rule, q, |x| {
        let (_, g, _) = parts(x);
        -0.5 * rho * dot(&g[..dim], &g[..dim])
    });
    let c = half_sphere_integral(dim, rho, &rule, q, |x| {
        let (_, _, dn) = parts(x);
        rho * dn * dn
    });
    let p_prime = a.value + b.value + c.value;
    Ok(FluxReport {
        rho,
        p_prime,
        p: p_prime,
        breakdown: FluxBreakdown {
            u_normal: a.value,
            gradient: b.value,
            normal_sq: c.value,
            ring: 0.0,
        },
        error_estimate: a.error + b.error + c.error,
    })
}

/// `P(U, ρ) = P′(U, ρ) + ρ/(p+1) ∫_{∂B^n(0,ρ)} f U^{p+1}`.
pub fn eval_p<U: FieldOnHalfSpace + ?Sized>(
    u: &U,
    rho: f64,
    nonlinearity: &BoundaryNonlinearity,
    normal: NormalConvention,
    q: &SurfaceQuadrature,
) -> Result<FluxReport> {
    let mut rep = eval_p_prime(u, rho, normal, q)?;
    let dim = u.dim();
    let p = nonlinearity.exponent;
    let rule = rule_for(
        dim - 1,
        &[nonlinearity.symmetry.angular_degree(), power_degree(u.symmetry())],
        q,
    );
    let ring = rho / (p + 1.0)
        * ring_integral(dim, rho, &rule, |x| (nonlinearity.f)(x) * u.value(x).powf(p + 1.0));
    rep.breakdown.ring = ring;
    rep.p = rep.p_prime + ring;
    Ok(rep)
}

/// Both sides of the local Pohozaev identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub flux: FluxReport,
    /// `−∫_{B⁺} Q (x·∇U + m U)`.
    pub bulk: f64,
    /// `m ∫_{B^n} H (x̄·∇̄U + m U) U`.
    pub curvature: f64,
    /// `−1/(p+1) ∫_{B^n} x̄·∇̄f U^{p+1}`.
    pub gradient_f: f64,
    /// `((N−1)/(p+1) − m) ∫_{B^n} f U^{p+1}`.
    pub power: f64,
    pub rhs: f64,
    /// `P(U, ρ) − rhs`.
    pub residual: f64,
    pub error_estimate: f64,
}

/// `P(U, ρ)` minus the right-hand side of the Pohozaev identity for the
/// given data; near zero exactly when `U` solves the boundary value problem.
pub fn poho_identity_residual<U: FieldOnHalfSpace + ?Sized>(
    u: &U,
    data: &IdentityData,
    rho: f64,
    normal: NormalConvention,
    q: &SurfaceQuadrature,
) -> Result<IdentityReport> {
    let flux = eval_p(u, rho, &data.nonlinearity, normal, q)?;
    let dim = u.dim();
    let n = dim - 1;
    let big = dim as f64;
    let m = 0.5 * (big - 2.0);
    let p = data.nonlinearity.exponent;
    let ud = u.symmetry().angular_degree();
    let dd = data.data_symmetry.angular_degree();
    let scaling = |x: &[f64]| dot(&u.gradient(x)[..dim], x) + m * u.value(x);
    let tangential_scaling = |x: &[f64]| dot(&u.gradient(x)[..n], &x[..n]) + m * u.value(x);

    let (bulk, bulk_err) = match &data.interior_source {
        Some(qf) => {
            let rule = rule_for(n, &[dd, ud], q);
            let e = half_ball_integral(dim, rho, &rule, q, |x| -qf(x) * scaling(x));
            (e.value, e.error)
        }
        None => (0.0, 0.0),
    };
    let (curvature, curv_err) = match &data.mean_curvature {
        Some(hf) => {
            let rule = rule_for(n, &[dd, ud, ud], q);
            let e = disk_integral(dim, rho, &rule, q, |x| m * hf(x) * tangential_scaling(x) * u.value(x));
            (e.value, e.error)
        }
        None => (0.0, 0.0),
    };
    let nl = &data.nonlinearity;
    let prule = rule_for(n, &[nl.symmetry.angular_degree(), power_degree(u.symmetry())], q);
    let gf = disk_integral(dim, rho, &prule, q, |x| {
        let g = (nl.grad_f)(x);
        -dot(&g[..n], &x[..n]) * u.value(x).powf(p + 1.0) / (p + 1.0)
    });
    let pw = disk_integral(dim, rho, &prule, q, |x| (nl.f)(x) * u.value(x).powf(p + 1.0));
    let power = ((big - 1.0) / (p + 1.0) - m) * pw.value;
    let rhs = bulk + curvature + gf.value + power;
    Ok(IdentityReport {
        flux,
        bulk,
        curvature,
        gradient_f: gf.value,
        power,
        rhs,
        residual: flux.p - rhs,
        error_estimate: flux.error_estimate + bulk_err + curv_err + gf.error + pw.error.abs(),
    })
}
