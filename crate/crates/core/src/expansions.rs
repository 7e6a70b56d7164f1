//! Expansion coefficients of the reduced Pohozaev form in `(a₁, a₂)`,
//! assembled exactly from the factored radial/axial integrals.
//!
//! Every coefficient is stated in units of `|S^{N−2}|`, the area of the unit
//! sphere of the boundary variables; `ε` and `‖π‖²` stay symbolic.

use std::fmt;

use num::rational::BigRational;
use num::{Signed, Zero};
use serde::Serialize;

use crate::corrections::{phi_boundary_hat, phi_profile, q_hat};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::quadrature::{
    adaptive, adaptive_2d, axial_exact, radial_closed, BoundaryTerms, Domain1D, HalfPlaneTerms,
    QuadOptions,
};
use crate::scalars::{rat, rat_int, rat_to_f64, sphere_ratio, ExactScalar};
use crate::tensors::quartic_factor;

/// Which power of `ε` (and which logarithm) a coefficient multiplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionOrder {
    /// `ε² ‖π‖²`.
    EpsSquared,
    /// `ε² ‖π‖² log(ρ/ε)`.
    EpsSquaredLog,
    /// `ε³ log(ρ/ε) π_{ij,ij}`.
    EpsCubedLog,
}

/// Index of a monomial in `(a₁, a₂)` up to degree two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamMonomial {
    One,
    A1,
    A1Sq,
    A2,
    A1A2,
    A2Sq,
}

impl ParamMonomial {
    pub const ALL: [ParamMonomial; 6] = [
        ParamMonomial::One,
        ParamMonomial::A1,
        ParamMonomial::A1Sq,
        ParamMonomial::A2,
        ParamMonomial::A1A2,
        ParamMonomial::A2Sq,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ParamMonomial::One => "1",
            ParamMonomial::A1 => "a1",
            ParamMonomial::A1Sq => "a1^2",
            ParamMonomial::A2 => "a2",
            ParamMonomial::A1A2 => "a1*a2",
            ParamMonomial::A2Sq => "a2^2",
        }
    }

    fn eval_rat(self, a1: &BigRational, a2: &BigRational) -> BigRational {
        match self {
            ParamMonomial::One => rat_int(1),
            ParamMonomial::A1 => a1.clone(),
            ParamMonomial::A1Sq => a1 * a1,
            ParamMonomial::A2 => a2.clone(),
            ParamMonomial::A1A2 => a1 * a2,
            ParamMonomial::A2Sq => a2 * a2,
        }
    }

    fn eval_f64(self, a1: f64, a2: f64) -> f64 {
        match self {
            ParamMonomial::One => 1.0,
            ParamMonomial::A1 => a1,
            ParamMonomial::A1Sq => a1 * a1,
            ParamMonomial::A2 => a2,
            ParamMonomial::A1A2 => a1 * a2,
            ParamMonomial::A2Sq => a2 * a2,
        }
    }

    fn product(self, o: ParamMonomial) -> Option<ParamMonomial> {
        use ParamMonomial::*;
        match (self, o) {
            (One, x) | (x, One) => Some(x),
            (A1, A1) => Some(A1Sq),
            (A2, A2) => Some(A2Sq),
            (A1, A2) | (A2, A1) => Some(A1A2),
            _ => None,
        }
    }
}

/// Quadratic polynomial in `(a₁, a₂)` with `Q + Qπ` coefficients in units of
/// `|S^{unit_sphere}|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionPolynomial {
    pub dim: usize,
    pub unit_sphere: u32,
    pub order: ExpansionOrder,
    coeffs: [ExactScalar; 6],
}

impl ExpansionPolynomial {
    pub fn zero(dim: usize, order: ExpansionOrder) -> Self {
        Self {
            dim,
            unit_sphere: dim as u32 - 2,
            order,
            coeffs: Default::default(),
        }
    }

    pub fn constant(dim: usize, order: ExpansionOrder, c: ExactScalar) -> Self {
        let mut p = Self::zero(dim, order);
        p.coeffs[0] = c;
        p
    }

    /// Builds from `(monomial, coefficient)` pairs; repeated monomials add.
    pub fn from_coeffs(
        dim: usize,
        order: ExpansionOrder,
        items: impl IntoIterator<Item = (ParamMonomial, ExactScalar)>,
    ) -> Self {
        let mut p = Self::zero(dim, order);
        for (m, c) in items {
            p.coeffs[m as usize] += &c;
        }
        p
    }

    pub fn coeff(&self, m: ParamMonomial) -> &ExactScalar {
        &self.coeffs[m as usize]
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (ParamMonomial, &ExactScalar)> {
        ParamMonomial::ALL.iter().map(move |&m| (m, &self.coeffs[m as usize]))
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.dim != o.dim || self.order != o.order || self.unit_sphere != o.unit_sphere {
            return Err(Error::InvalidInput(format!(
                "cannot add expansions of (N={}, {:?}) and (N={}, {:?})",
                self.dim, self.order, o.dim, o.order
            )));
        }
        let mut out = self.clone();
        for (c, d) in out.coeffs.iter_mut().zip(&o.coeffs) {
            *c += d;
        }
        Ok(out)
    }

    pub fn eval_exact(&self, a1: &BigRational, a2: &BigRational) -> ExactScalar {
        self.coeffs()
            .map(|(m, c)| c.scale(&m.eval_rat(a1, a2)))
            .sum()
    }

    pub fn eval_f64(&self, a1: f64, a2: f64) -> f64 {
        self.coeffs().map(|(m, c)| c.to_f64() * m.eval_f64(a1, a2)).sum()
    }

    /// Same polynomial in units of `|S^{unit−1}|`.
    pub fn in_lower_unit(&self) -> Result<Self> {
        let ratio = sphere_ratio(self.unit_sphere);
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = c.try_mul(&ratio)?;
        }
        out.unit_sphere -= 1;
        Ok(out)
    }

    /// Rational coefficients and whether they carry a factor `π`; fails if
    /// the coefficients mix rational and `π` parts.
    fn common_kind(&self) -> Result<([BigRational; 6], bool)> {
        let any_rat = self.coeffs.iter().any(|c| !c.rat_part().is_zero());
        let any_pi = self.coeffs.iter().any(|c| !c.pi_part().is_zero());
        if any_rat && any_pi {
            return Err(Error::InvalidInput(
                "coefficients mix rational and pi parts; no common scale".into(),
            ));
        }
        let pick = |c: &ExactScalar| if any_pi { c.pi_part().clone() } else { c.rat_part().clone() };
        Ok((std::array::from_fn(|i| pick(&self.coeffs[i])), any_pi))
    }

    /// Exact maximizer of a polynomial with negative definite quadratic part.
    pub fn maximize(&self) -> Result<Maximum> {
        let (c, _) = self.common_kind()?;
        let (b1, q11, b2, q12, q22) = (&c[1], &c[2], &c[3], &c[4], &c[5]);
        let det = rat_int(4) * q11 * q22 - q12 * q12;
        if !q11.is_negative() || !det.is_positive() {
            return Err(Error::NotNegativeDefinite(format!(
                "a1^2 coefficient {q11}, Hessian determinant/4 {det}"
            )));
        }
        // 2 q11 a1 + q12 a2 = −b1, q12 a1 + 2 q22 a2 = −b2.
        let a1 = (-(rat_int(2) * q22 * b1) + q12 * b2) / &det;
        let a2 = (q12 * b1 - rat_int(2) * q11 * b2) / &det;
        let value = self.eval_exact(&a1, &a2);
        Ok(Maximum {
            argmax: (a1, a2),
            value,
            unit_sphere: self.unit_sphere,
        })
    }
}

impl fmt::Display for ExpansionPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in self.coeffs() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*{}", m.label())?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " [|S^{}|]", self.unit_sphere)
    }
}

/// Critical point of an [`ExpansionPolynomial`] and its value.
#[derive(Clone, Debug, PartialEq)]
pub struct Maximum {
    pub argmax: (BigRational, BigRational),
    pub value: ExactScalar,
    pub unit_sphere: u32,
}

/// Leading coefficient of `F(W, W)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FwwCoefficient {
    pub dim: usize,
    pub value: ExactScalar,
    pub order: ExpansionOrder,
    pub unit_sphere: u32,
}

fn check_dim(dim: usize, allowed: &[usize]) -> Result<()> {
    if allowed.contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

fn half(dim: usize) -> BigRational {
    rat(dim as i64 - 2, 2)
}

/// `W = s^{-m}`.
fn bubble_terms(dim: usize) -> HalfPlaneTerms {
    HalfPlaneTerms::s_pow_half(-(dim as i64 - 2))
}

/// `Z⁰ = x·∇W + m W = m s^{-m−1}(1 − r² − x²)`.
fn kernel_terms(dim: usize) -> HalfPlaneTerms {
    let h = -(dim as i64);
    let m = half(dim);
    HalfPlaneTerms::term(m.clone(), 0, 0, 0, h)
        - HalfPlaneTerms::term(m.clone(), 2, 0, 0, h)
        - HalfPlaneTerms::term(m, 0, 2, 0, h)
}

/// `Δ_x̄ W = −2mn s^{-m−1} + 4m(m+1) r² s^{-m−2}`.
fn tangential_laplacian_terms(dim: usize) -> HalfPlaneTerms {
    let m = half(dim);
    let n = rat_int(dim as i64 - 1);
    let big = dim as i64;
    HalfPlaneTerms::term(-(rat_int(2) * &m * n), 0, 0, 0, -big)
        + HalfPlaneTerms::term(rat_int(4) * &m * (&m + rat_int(1)), 2, 0, 0, -big - 2)
}

/// Integrand of `F(W, W) / (ε² ‖π‖² |S^{N−2}|)` in `(r, x_N)`, Jacobian
/// included.
pub fn fww_integrand(dim: usize) -> HalfPlaneTerms {
    let n = dim as i64 - 1;
    let curvature = rat(-(dim as i64 - 2), 4 * (dim as i64 - 1));
    let metric = rat(-2, n);
    let z = kernel_terms(dim);
    let body = (&bubble_terms(dim) * &z).scale(&curvature)
        + (&(&HalfPlaneTerms::xn_pow(2) * &tangential_laplacian_terms(dim)) * &z).scale(&metric);
    &HalfPlaneTerms::r_pow(n - 1) * &body
}

/// Leading coefficient of `F(W, W)`: `ε²‖π‖²` for `N = 5, 6`, the `log`
/// coefficient for `N = 4`.
pub fn fww_coefficient(dim: usize) -> Result<FwwCoefficient> {
    check_dim(dim, &[4, 5, 6])?;
    let terms = fww_integrand(dim);
    let (value, order) = if dim == 4 {
        (terms.log_coefficient()?, ExpansionOrder::EpsSquaredLog)
    } else {
        (terms.reduce_exact()?, ExpansionOrder::EpsSquared)
    };
    Ok(FwwCoefficient {
        dim,
        value,
        order,
        unit_sphere: dim as u32 - 2,
    })
}

/// One displayed factorisation `prefactor · ∫axial · ∫radial`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredTerm {
    pub prefactor: BigRational,
    pub axial: BigRational,
    pub radial: ExactScalar,
    pub product: ExactScalar,
}

/// `−(1/8)∫ x₅² |∇_x̄ W|²` in five dimensions, as prefactor × axial × radial.
pub fn fww_factored_five() -> Result<FactoredTerm> {
    // |∇_x̄ W|² = 9 r² s^{-5}; with the Jacobian r³ this is r⁵ x² s^{-5}.
    let prefactor = rat(-9, 8);
    let (p, twice_q, a, b) = crate::quadrature::Monomial {
        r_pow: 5,
        xn_pow: 2,
        shift_pow: 0,
        s_half: -10,
    }
    .split();
    let axial = axial_exact(a, b)?;
    let radial = radial_closed(p, twice_q)?;
    let product = radial.scale(&(&prefactor * &axial));
    Ok(FactoredTerm {
        prefactor,
        axial,
        radial,
        product,
    })
}

/// `Φ`'s profile `G` split by parameter: `(G|_{a=0}, ∂_{a₁}G, ∂_{a₂}G)`.
fn profile_parts(dim: usize) -> [(ParamMonomial, HalfPlaneTerms); 3] {
    let big = dim as i64;
    let m = half(dim);
    let base = HalfPlaneTerms::term(m.clone(), 0, 1, 0, -big) - HalfPlaneTerms::term(m, 0, 0, 0, -big);
    let a1 = HalfPlaneTerms::term(rat_int(1), 0, 0, 1, -big - 4);
    let a2 = HalfPlaneTerms::s_pow_half(-big - 2);
    [
        (ParamMonomial::One, base),
        (ParamMonomial::A1, a1),
        (ParamMonomial::A2, a2),
    ]
}

/// `(q̂, φ̂)` split by parameter as functions of `r` on the boundary.
fn boundary_parts(dim: usize) -> [(ParamMonomial, BoundaryTerms, BoundaryTerms); 3] {
    let big = dim as i64;
    let m = half(dim);
    [
        (
            ParamMonomial::One,
            BoundaryTerms::term(m.clone(), 0, big),
            BoundaryTerms::term(-m, 0, big),
        ),
        (
            ParamMonomial::A1,
            BoundaryTerms::term(rat_int(1), 0, big + 4) + BoundaryTerms::term(rat_int(-4), 0, big + 6),
            BoundaryTerms::term(rat_int(1), 0, big + 4),
        ),
        (
            ParamMonomial::A2,
            BoundaryTerms::term(rat_int(-2), 0, big + 4),
            BoundaryTerms::term(rat_int(1), 0, big + 2),
        ),
    ]
}

/// Common prefactor of the bulk piece, `2N(N−2)·2/(n(n+2))`.
pub fn bulk_prefactor(dim: usize) -> BigRational {
    rat_int(2 * dim as i64 * (dim as i64 - 2)) * quartic_factor(dim - 1)
}

/// Bulk piece `2ε π_ij ∫ x_N ∂_ij W Φ` in `(r, x_N)` terms, per parameter.
pub fn bulk_integrands(dim: usize) -> Vec<(ParamMonomial, HalfPlaneTerms)> {
    let n = dim as i64 - 1;
    let weight = HalfPlaneTerms::term(bulk_prefactor(dim), n + 3, 1, 0, -(dim as i64 + 2));
    profile_parts(dim)
        .into_iter()
        .map(|(m, g)| (m, &weight * &g))
        .collect()
}

/// Boundary piece `∫ q Φ` in `r` terms, per parameter monomial.
pub fn boundary_integrands(dim: usize) -> Vec<(ParamMonomial, BoundaryTerms)> {
    let n = dim as i64 - 1;
    let weight = BoundaryTerms::term(quartic_factor(dim - 1), n + 3, 0);
    let parts = boundary_parts(dim);
    let mut out: Vec<(ParamMonomial, BoundaryTerms)> = Vec::new();
    for (mq, q, _) in &parts {
        for (mp, _, p) in &parts {
            let mono = mq.product(*mp).expect("degree two");
            let t = &(&weight * q) * p;
            match out.iter_mut().find(|(m, _)| *m == mono) {
                Some((_, acc)) => *acc = &*acc + &t,
                None => out.push((mono, t)),
            }
        }
    }
    out
}

/// Bulk and boundary pieces of the cross term and their sum.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossPolynomial {
    pub bulk: ExpansionPolynomial,
    pub boundary: ExpansionPolynomial,
    pub total: ExpansionPolynomial,
}

/// Lower-bound polynomial for `F(W, Ψ) + F(Ψ, W)`.
pub fn cross_polynomial(dim: usize) -> Result<CrossPolynomial> {
    if dim == 4 {
        return Err(Error::InvalidInput(
            "the four-dimensional cross term is logarithmic; use delta_gain".into(),
        ));
    }
    check_dim(dim, &[5, 6])?;
    let order = ExpansionOrder::EpsSquared;
    let bulk = bulk_integrands(dim)
        .into_iter()
        .map(|(m, t)| Ok((m, t.reduce_exact()?)))
        .collect::<Result<Vec<_>>>()?;
    let boundary = boundary_integrands(dim)
        .into_iter()
        .map(|(m, t)| Ok((m, t.reduce_exact()?)))
        .collect::<Result<Vec<_>>>()?;
    let bulk = ExpansionPolynomial::from_coeffs(dim, order, bulk);
    let boundary = ExpansionPolynomial::from_coeffs(dim, order, boundary);
    let total = bulk.add(&boundary)?;
    Ok(CrossPolynomial {
        bulk,
        boundary,
        total,
    })
}

/// `F(W, W) + [F(W, Ψ) + F(Ψ, W)]` lower-bound polynomial.
pub fn total_polynomial(dim: usize) -> Result<ExpansionPolynomial> {
    let cross = cross_polynomial(dim)?;
    let fww = fww_coefficient(dim)?;
    cross
        .total
        .add(&ExpansionPolynomial::constant(dim, fww.order, fww.value))
}

/// Value at a caller-chosen point next to the true maximum.
#[derive(Clone, Debug, PartialEq)]
pub struct PointComparison {
    pub point: (BigRational, BigRational),
    pub point_value: ExactScalar,
    pub maximum: Maximum,
    pub is_maximizer: bool,
}

pub fn compare_with_maximum(
    poly: &ExpansionPolynomial,
    a1: BigRational,
    a2: BigRational,
) -> Result<PointComparison> {
    let maximum = poly.maximize()?;
    let point_value = poly.eval_exact(&a1, &a2);
    let is_maximizer = maximum.argmax == (a1.clone(), a2.clone());
    Ok(PointComparison {
        point: (a1, a2),
        point_value,
        maximum,
        is_maximizer,
    })
}

/// The three `δ`-linear pieces of the four-dimensional lower bound.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaGain {
    /// `log` coefficient of `2επ∫x₄∂W Φ_δ` without `δ` (cancels `F(W,W)`).
    pub bulk_base: ExactScalar,
    pub bulk_delta: ExactScalar,
    pub source_delta: ExactScalar,
    pub boundary_delta: ExactScalar,
    pub fww: ExactScalar,
    /// Part of the total independent of `δ`.
    pub base_total: ExactScalar,
    /// Coefficient of `δ`.
    pub delta_total: ExactScalar,
}

/// `δ`-coefficient of the four-dimensional `log` lower bound.
pub fn delta_gain() -> Result<DeltaGain> {
    let dim = 4usize;
    let n = 3i64;
    let c = quartic_factor(3);
    let pref = bulk_prefactor(dim);
    let weight = HalfPlaneTerms::term(pref, n + 3, 1, 0, -6);
    // Φ_δ profile (x−1)s^{-2} + δ s^{-3/2}.
    let base_profile = HalfPlaneTerms::term(rat_int(1), 0, 1, 0, -4) - HalfPlaneTerms::s_pow_half(-4);
    let delta_profile = HalfPlaneTerms::s_pow_half(-3);
    let bulk_base = (&weight * &base_profile).log_coefficient()?;
    let bulk_delta = (&weight * &delta_profile).log_coefficient()?;
    // 9δ ∫ h s^{-5/2} Φ_δ, δ-linear part: 9 c r^{n+3} s^{-5/2}(x−1)s^{-2}.
    let source = HalfPlaneTerms::term(rat_int(9) * &c, n + 3, 0, 0, -5);
    let source_delta = (&source * &base_profile).log_coefficient()?;
    // ∫ q_δ Φ_δ, δ-linear part: R^{-2}·R^{-3/2} − R^{-5/2}·R^{-2}.
    let boundary = BoundaryTerms::term(c.clone(), n + 3, 7) + BoundaryTerms::term(-c, n + 3, 9);
    let boundary_delta = boundary.log_coefficient()?;
    let fww = fww_coefficient(dim)?.value;
    let base_total = &fww + &bulk_base;
    let delta_total = &(&bulk_delta + &source_delta) + &boundary_delta;
    Ok(DeltaGain {
        bulk_base,
        bulk_delta,
        source_delta,
        boundary_delta,
        fww,
        base_total,
        delta_total,
    })
}

/// One `log`-divergent piece of the second-order term.
#[derive(Clone, Debug, PartialEq)]
pub struct LogPiece {
    pub prefactor: BigRational,
    pub integrand: HalfPlaneTerms,
    pub log_coeff: ExactScalar,
}

/// `ε³ log(ρ/ε) π_{ij,ij}` coefficient of `F(W, W)` in five dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondOrderLog {
    pub pieces: Vec<LogPiece>,
    pub total: ExactScalar,
}

impl SecondOrderLog {
    /// The term for a given `π_{ij,ij}`.
    pub fn for_trace(&self, second_trace: &BigRational) -> ExactScalar {
        self.total.scale(second_trace)
    }
}

pub fn second_order_log_coefficient() -> Result<SecondOrderLog> {
    // r³ · r^k x (1 − r² − x²) s^{-j}
    let piece = |k: i64, s_pow: i64| {
        HalfPlaneTerms::term(rat_int(1), 3 + k, 1, 0, -2 * s_pow)
            - HalfPlaneTerms::term(rat_int(1), 5 + k, 1, 0, -2 * s_pow)
            - HalfPlaneTerms::term(rat_int(1), 3 + k, 3, 0, -2 * s_pow)
    };
    let mut pieces = Vec::new();
    for (prefactor, integrand) in [(rat(-15, 8), piece(4, 6)), (rat(9, 4), piece(2, 5))] {
        let log_coeff = integrand.log_coefficient()?;
        pieces.push(LogPiece {
            prefactor,
            integrand,
            log_coeff,
        });
    }
    let total = pieces.iter().map(|p| p.log_coeff.scale(&p.prefactor)).sum();
    Ok(SecondOrderLog { pieces, total })
}

/// Informational check of an intermediate prefactor.
#[derive(Clone, Debug, PartialEq)]
pub struct PrefactorRow {
    pub name: &'static str,
    pub displayed: BigRational,
    pub computed: BigRational,
}

/// The five-dimensional bulk prefactors `2N(N−2)c·m` and `2N(N−2)c`.
pub fn bulk_prefactor_rows() -> Vec<PrefactorRow> {
    let p = bulk_prefactor(5);
    vec![
        PrefactorRow {
            name: "bulk prefactor, a-independent part",
            displayed: rat(15, 4),
            computed: &p * half(5),
        },
        PrefactorRow {
            name: "bulk prefactor, a1 part",
            displayed: rat(5, 2),
            computed: p.clone(),
        },
        PrefactorRow {
            name: "bulk prefactor, a2 part",
            displayed: rat(5, 2),
            computed: p,
        },
    ]
}

/// Direct numerical evaluation of the bulk and boundary pieces at one
/// `(a₁, a₂)`, in units of `|S^{N−2}|`, from the pointwise profiles.
pub fn cross_pieces_quadrature(
    dim: usize,
    a1: f64,
    a2: f64,
    opts: &QuadOptions,
    exec: Exec,
) -> Result<(f64, f64)> {
    check_dim(dim, &[5, 6])?;
    let big = dim as f64;
    let n = big - 1.0;
    let pref = rat_to_f64(&bulk_prefactor(dim));
    let c = rat_to_f64(&quartic_factor(dim - 1));
    let profile = phi_profile(dim, a1, a2);
    let bulk = adaptive_2d(
        |r, x| {
            let s = r * r + (x + 1.0) * (x + 1.0);
            pref * r.powf(n + 3.0) * x * s.powf(-0.5 * (big + 2.0)) * profile.value_rt(r, x)
        },
        Domain1D::SemiInfinite(0.0),
        Domain1D::SemiInfinite(0.0),
        opts,
        exec,
    )?
    .value;
    let boundary = adaptive(
        |r| {
            let big_r = r * r + 1.0;
            c * r.powf(n + 3.0) * q_hat(dim, a1, a2, big_r) * phi_boundary_hat(dim, a1, a2, big_r)
        },
        Domain1D::SemiInfinite(0.0),
        opts,
    )?
    .value;
    Ok((bulk, boundary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    fn q(n: i64, d: i64) -> ExactScalar {
        ExactScalar::frac(n, d)
    }

    fn qpi(n: i64, d: i64) -> ExactScalar {
        ExactScalar::pi_frac(n, d)
    }

    #[test]
    fn fww_values() {
        assert_eq!(fww_coefficient(5).unwrap().value, q(-1, 64));
        assert_eq!(fww_coefficient(6).unwrap().value, ExactScalar::zero());
        let four = fww_coefficient(4).unwrap();
        assert_eq!(four.value, qpi(-1, 24));
        assert_eq!(four.order, ExpansionOrder::EpsSquaredLog);
        assert!(fww_coefficient(7).is_err());
        let f = fww_factored_five().unwrap();
        assert_eq!(f.axial, rat(1, 3));
        assert_eq!(f.radial, q(1, 24));
        assert_eq!(f.product, q(-1, 64));
    }

    #[test]
    fn five_dimensional_cross_polynomial() {
        let c = cross_polynomial(5).unwrap();
        use ParamMonomial::*;
        let bulk = [(One, q(1, 64)), (A1, q(1, 3360)), (A2, q(1, 960))];
        for (m, v) in bulk {
            assert_eq!(c.bulk.coeff(m), &v, "{m:?}");
        }
        for m in [A1Sq, A1A2, A2Sq] {
            assert!(c.bulk.coeff(m).is_zero());
        }
        let bd = [
            (One, q(-3, 128)),
            (A1, q(1, 560)),
            (A1Sq, q(-11, 60480)),
            (A2, q(1, 192)),
            (A1A2, q(-1, 1680)),
            (A2Sq, q(-1, 1680)),
        ];
        for (m, v) in bd {
            assert_eq!(c.boundary.coeff(m), &v, "{m:?}");
        }
        assert_eq!(c.total.coeff(One), &q(-1, 128));
        assert_eq!(c.total.coeff(A1), &q(1, 480));
        assert_eq!(c.total.coeff(A2), &q(1, 160));
    }

    #[test]
    fn five_dimensional_maximum() {
        let p = total_polynomial(5).unwrap();
        assert_eq!(p.coeff(ParamMonomial::One), &q(-3, 128));
        let m = p.maximize().unwrap();
        assert_eq!(m.argmax, (rat(-63, 4), rat(105, 8)));
        assert_eq!(m.value, q(3, 2560));
        let e = rat(1, 1000);
        for (d1, d2) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let v = p.eval_exact(&(&m.argmax.0 + &e * rat_int(d1)), &(&m.argmax.1 + &e * rat_int(d2)));
            assert!(v.rat_part() < m.value.rat_part());
        }
    }

    #[test]
    fn six_dimensional_polynomial() {
        let c = cross_polynomial(6).unwrap();
        use ParamMonomial::*;
        assert_eq!(c.bulk.coeff(A1), &qpi(1, 28672));
        assert_eq!(c.bulk.coeff(A2), &qpi(1, 8960));
        let expect = [
            (One, qpi(-1, 320)),
            (A1, qpi(1, 3584)),
            (A1Sq, qpi(-3, 163840)),
            (A2, qpi(1, 1280)),
            (A1A2, qpi(-1, 16384)),
            (A2Sq, qpi(-1, 16384)),
        ];
        for (m, v) in expect {
            assert_eq!(c.total.coeff(m), &v, "{m:?}");
        }
        let p = total_polynomial(6).unwrap();
        let cmp = compare_with_maximum(&p, rat(-128, 7), rat(544, 35)).unwrap();
        assert_eq!(cmp.point_value, qpi(31, 78400));
        assert!(cmp.is_maximizer);
        let lower = p.in_lower_unit().unwrap();
        assert_eq!(lower.unit_sphere, 3);
        assert_eq!(lower.eval_exact(&rat(-128, 7), &rat(544, 35)), qpi(31, 58800));
    }

    #[test]
    fn trivial_maximum_and_rejections() {
        let p = ExpansionPolynomial::from_coeffs(
            5,
            ExpansionOrder::EpsSquared,
            [(ParamMonomial::A1Sq, q(-1, 1)), (ParamMonomial::A2Sq, q(-1, 1))],
        );
        let m = p.maximize().unwrap();
        assert_eq!(m.argmax, (rat(0, 1), rat(0, 1)));
        assert!(m.value.is_zero());
        let bad = ExpansionPolynomial::from_coeffs(
            5,
            ExpansionOrder::EpsSquared,
            [(ParamMonomial::A1Sq, q(-1, 1)), (ParamMonomial::A2Sq, q(1, 1))],
        );
        assert!(matches!(bad.maximize(), Err(Error::NotNegativeDefinite(_))));
        assert!(cross_polynomial(4).is_err());
    }

    #[test]
    fn delta_pieces() {
        let d = delta_gain().unwrap();
        assert_eq!(d.bulk_base, qpi(1, 24));
        assert_eq!(d.bulk_delta, q(32, 105));
        assert_eq!(d.source_delta, q(6, 35));
        assert_eq!(d.boundary_delta, q(2, 15));
        assert!(d.base_total.is_zero());
        assert_eq!(d.delta_total, q(64, 105));
    }

    #[test]
    fn second_order_log() {
        let s = second_order_log_coefficient().unwrap();
        assert_eq!(s.pieces[0].log_coeff, q(-1, 8));
        assert_eq!(s.pieces[1].log_coeff, q(-1, 6));
        assert_eq!(s.total, q(-9, 64));
        assert!(s.for_trace(&rat(0, 1)).is_zero());
    }

    #[test]
    fn prefactor_rows_match() {
        for row in bulk_prefactor_rows() {
            assert_eq!(row.displayed, row.computed, "{}", row.name);
        }
    }

    #[test]
    fn quadrature_matches_polynomial() {
        let opts = QuadOptions::with_tol(1e-15, 1e-11);
        for dim in [5, 6] {
            let c = cross_polynomial(dim).unwrap();
            for (a1, a2) in [(0.0, 0.0), (-63.0 / 4.0, 105.0 / 8.0), (3.5, -2.25)] {
                let (b, d) = cross_pieces_quadrature(dim, a1, a2, &opts, Exec::Sequential).unwrap();
                let eb = c.bulk.eval_f64(a1, a2);
                let ed = c.boundary.eval_f64(a1, a2);
                assert!((b - eb).abs() <= 1e-8 * eb.abs() + 1e-15, "{dim} bulk {b} {eb}");
                assert!((d - ed).abs() <= 1e-8 * ed.abs() + 1e-15, "{dim} bd {d} {ed}");
            }
        }
    }
}
