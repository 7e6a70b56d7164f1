//! Explicit correction fields `Φ = ε π_ij x_i x_j G(x̄, x_N)` for the
//! linearized boundary problem, their boundary data, the four-dimensional
//! `δ`-variant and the chain of radial potentials they are built from.
//!
//! Every profile is a sum of terms `(c0 + c1 x_N) s^{-k}` (plus at most one
//! `log s`), `s = |x̄|² + (x_N+1)²`, differentiated in closed form.

use crate::bubble::Bubble;
use crate::error::{Error, Result};
use crate::point::{trace, Matrix, Vector, MAX_DIM, ZERO_MATRIX, ZERO_VECTOR};
use crate::tensors::TraceFreePi;

/// `(c0 + c1 x_N) s^{-k}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileTerm {
    pub c0: f64,
    pub c1: f64,
    pub k: f64,
}

impl ProfileTerm {
    pub fn new(c0: f64, c1: f64, k: f64) -> Self {
        Self { c0, c1, k }
    }
}

/// Sum of [`ProfileTerm`]s plus `log_coeff · log s` and a constant.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Profile {
    pub terms: Vec<ProfileTerm>,
    pub log_coeff: f64,
    pub constant: f64,
}

fn shifted(x: &[f64]) -> (Vector, f64) {
    let n = x.len() - 1;
    let mut y = ZERO_VECTOR;
    y[..n].copy_from_slice(&x[..n]);
    y[n] = x[n] + 1.0;
    let s = y[..=n].iter().map(|v| v * v).sum();
    (y, s)
}

impl Profile {
    pub fn from_terms(terms: Vec<ProfileTerm>) -> Self {
        Self {
            terms,
            log_coeff: 0.0,
            constant: 0.0,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let (_, s) = shifted(x);
        let t = x[x.len() - 1];
        let mut v = self.constant + self.log_coeff * s.ln();
        for term in &self.terms {
            v += (term.c0 + term.c1 * t) * s.powf(-term.k);
        }
        v
    }

    /// Value at `(r, t)` for a point with `|x̄| = r`, `x_N = t`.
    pub fn value_rt(&self, r: f64, t: f64) -> f64 {
        let s = r * r + (t + 1.0) * (t + 1.0);
        let mut v = self.constant + self.log_coeff * s.ln();
        for term in &self.terms {
            v += (term.c0 + term.c1 * t) * s.powf(-term.k);
        }
        v
    }

    pub fn gradient(&self, x: &[f64]) -> Vector {
        let dim = x.len();
        let n = dim - 1;
        let (y, s) = shifted(x);
        let t = x[n];
        let mut g = ZERO_VECTOR;
        for term in &self.terms {
            let p = term.c0 + term.c1 * t;
            let sk = s.powf(-term.k);
            let c = -2.0 * term.k * p * sk / s;
            for a in 0..dim {
                g[a] += c * y[a];
            }
            g[n] += term.c1 * sk;
        }
        if self.log_coeff != 0.0 {
            for a in 0..dim {
                g[a] += 2.0 * self.log_coeff * y[a] / s;
            }
        }
        g
    }

    pub fn hessian(&self, x: &[f64]) -> Matrix {
        let dim = x.len();
        let n = dim - 1;
        let (y, s) = shifted(x);
        let t = x[n];
        let mut h = ZERO_MATRIX;
        for term in &self.terms {
            let k = term.k;
            let p = term.c0 + term.c1 * t;
            let s1 = s.powf(-k - 1.0);
            let s2 = s1 / s;
            for a in 0..dim {
                for b in 0..dim {
                    h[a][b] += 4.0 * k * (k + 1.0) * p * s2 * y[a] * y[b];
                }
                h[a][a] -= 2.0 * k * p * s1;
                h[a][n] -= 2.0 * k * term.c1 * s1 * y[a];
                h[n][a] -= 2.0 * k * term.c1 * s1 * y[a];
            }
        }
        if self.log_coeff != 0.0 {
            let c = 2.0 * self.log_coeff;
            for a in 0..dim {
                for b in 0..dim {
                    h[a][b] -= 2.0 * c * y[a] * y[b] / (s * s);
                }
                h[a][a] += c / s;
            }
        }
        h
    }

    pub fn laplacian(&self, x: &[f64]) -> f64 {
        trace(&self.hessian(x), x.len())
    }

    /// `Σ_a |∂_aa f|`, a cancellation-free size for relative residuals.
    pub fn laplacian_scale(&self, x: &[f64]) -> f64 {
        let h = self.hessian(x);
        (0..x.len()).map(|a| h[a][a].abs()).sum()
    }
}

/// Inputs of the correction fields.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionParams {
    pub dim: usize,
    pub eps: f64,
    pub pi: TraceFreePi,
    pub a1: f64,
    pub a2: f64,
    /// Only used by the four-dimensional variant.
    pub delta: f64,
}

impl CorrectionParams {
    pub fn new(dim: usize, eps: f64, pi: TraceFreePi, a1: f64, a2: f64) -> Result<Self> {
        let p = Self {
            dim,
            eps,
            pi,
            a1,
            a2,
            delta: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(4..=MAX_DIM).contains(&self.dim) {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidInput(format!("eps must be positive, got {}", self.eps)));
        }
        if self.pi.dim() != self.dim - 1 {
            return Err(Error::InvalidInput(format!(
                "pi is {}x{}, expected {}x{}",
                self.pi.dim(),
                self.pi.dim(),
                self.dim - 1,
                self.dim - 1
            )));
        }
        if !(self.a1.is_finite() && self.a2.is_finite() && self.delta.is_finite()) {
            return Err(Error::InvalidInput("non-finite correction parameter".into()));
        }
        Ok(())
    }
}

/// Profile `G` of `Φ = ε h G`, `h = π_ij x_i x_j`.
pub fn phi_profile(dim: usize, a1: f64, a2: f64) -> Profile {
    let big = dim as f64;
    let m = 0.5 * (big - 2.0);
    Profile::from_terms(vec![
        ProfileTerm::new(-m, m, 0.5 * big),
        ProfileTerm::new(a1, a1, 0.5 * (big + 4.0)),
        ProfileTerm::new(a2, 0.0, 0.5 * (big + 2.0)),
    ])
}

/// Profile of the four-dimensional variant, `(x_4−1)s^{-2} + δ s^{-3/2}`.
pub fn phi_delta_profile(delta: f64) -> Profile {
    Profile::from_terms(vec![
        ProfileTerm::new(-1.0, 1.0, 2.0),
        ProfileTerm::new(delta, 0.0, 1.5),
    ])
}

/// `q / (ε h)` as a function of `R = |x̄|² + 1`.
pub fn q_hat(dim: usize, a1: f64, a2: f64, big_r: f64) -> f64 {
    let big = dim as f64;
    big_r.powf(-0.5 * big)
        * (0.5 * (big - 2.0) + a1 * (big_r.powi(-2) - 4.0 * big_r.powi(-3)) - 2.0 * a2 * big_r.powi(-2))
}

/// `Φ(x̄, 0) / (ε h)` as a function of `R = |x̄|² + 1`.
pub fn phi_boundary_hat(dim: usize, a1: f64, a2: f64, big_r: f64) -> f64 {
    let big = dim as f64;
    big_r.powf(-0.5 * big) * (-0.5 * (big - 2.0) + a1 * big_r.powi(-2) + a2 / big_r)
}

/// `q_δ / (ε h)` as a function of `R`.
pub fn q_delta_hat(delta: f64, big_r: f64) -> f64 {
    big_r.powi(-2) + delta * big_r.powf(-2.5)
}

/// `ε π_ij x_i x_j · G(x̄, x_N)` with closed-form derivatives.
#[derive(Clone, Debug)]
pub struct Correction {
    params: CorrectionParams,
    profile: Profile,
    variant: Variant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Variant {
    Standard,
    Delta,
}

impl Correction {
    /// The two-parameter correction `Φ(a₁, a₂)`.
    pub fn phi(params: CorrectionParams) -> Result<Self> {
        params.validate()?;
        let profile = phi_profile(params.dim, params.a1, params.a2);
        Ok(Self {
            params,
            profile,
            variant: Variant::Standard,
        })
    }

    /// The four-dimensional `δ`-variant `Φ_δ`.
    pub fn phi_delta(params: CorrectionParams) -> Result<Self> {
        params.validate()?;
        if params.dim != 4 {
            return Err(Error::UnsupportedDimension(params.dim));
        }
        let profile = phi_delta_profile(params.delta);
        Ok(Self {
            params,
            profile,
            variant: Variant::Delta,
        })
    }

    pub fn params(&self) -> &CorrectionParams {
        &self.params
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn dim(&self) -> usize {
        self.params.dim
    }

    fn h_parts(&self, x: &[f64]) -> (f64, Vector) {
        let n = self.params.dim - 1;
        let h = self.params.pi.quad_form(&x[..n]);
        let px = self.params.pi.apply(&x[..n]);
        let mut dh = ZERO_VECTOR;
        for i in 0..n {
            dh[i] = 2.0 * px[i];
        }
        (h, dh)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let n = self.params.dim - 1;
        self.params.eps * self.params.pi.quad_form(&x[..n]) * self.profile.value(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vector {
        let (h, dh) = self.h_parts(x);
        let g = self.profile.value(x);
        let dg = self.profile.gradient(x);
        let mut out = ZERO_VECTOR;
        for a in 0..self.params.dim {
            out[a] = self.params.eps * (dh[a] * g + h * dg[a]);
        }
        out
    }

    pub fn hessian(&self, x: &[f64]) -> Matrix {
        let dim = self.params.dim;
        let n = dim - 1;
        let (h, dh) = self.h_parts(x);
        let g = self.profile.value(x);
        let dg = self.profile.gradient(x);
        let hg = self.profile.hessian(x);
        let mut out = ZERO_MATRIX;
        for a in 0..dim {
            for b in 0..dim {
                let pab = if a < n && b < n { 2.0 * self.params.pi.get(a, b) } else { 0.0 };
                out[a][b] =
                    self.params.eps * (pab * g + dh[a] * dg[b] + dh[b] * dg[a] + h * hg[a][b]);
            }
        }
        out
    }

    pub fn laplacian(&self, x: &[f64]) -> f64 {
        trace(&self.hessian(x), self.params.dim)
    }

    /// Derivative selected by up to two coordinate indices.
    pub fn eval(&self, x: &[f64], deriv: &[usize]) -> Result<f64> {
        match deriv {
            [] => Ok(self.value(x)),
            [a] => Ok(self.gradient(x)[*a]),
            [a, b] => Ok(self.hessian(x)[*a][*b]),
            _ => Err(Error::InvalidInput("derivatives above order 2 are not provided".into())),
        }
    }

    /// Interior source `2ε π_ij x_N ∂_ij W` (plus `9δε h s^{-5/2}` for the
    /// `δ`-variant), the expected value of `−ΔΦ`.
    pub fn interior_source(&self, x: &[f64]) -> f64 {
        let n = self.params.dim - 1;
        let w = Bubble::standard(self.params.dim).expect("validated dimension");
        let hw = w.hessian(x);
        let mut contr = 0.0;
        for i in 0..n {
            for j in 0..n {
                contr += self.params.pi.get(i, j) * hw[i][j];
            }
        }
        let mut src = 2.0 * self.params.eps * x[n] * contr;
        if self.variant == Variant::Delta {
            let (_, s) = shifted(x);
            let h = self.params.pi.quad_form(&x[..n]);
            src += 9.0 * self.params.delta * self.params.eps * h * s.powf(-2.5);
        }
        src
    }

    /// `(−ΔΦ − source, scale)` where `scale` bounds the magnitudes that
    /// cancel.
    pub fn interior_residual(&self, x: &[f64]) -> (f64, f64) {
        let hs = self.hessian(x);
        let lap = trace(&hs, self.params.dim);
        let src = self.interior_source(x);
        let scale = (0..self.params.dim).map(|a| hs[a][a].abs()).sum::<f64>() + src.abs();
        (-lap - src, scale)
    }

    /// Boundary data `q(x̄)` of the remainder `Ψ − Φ`.
    pub fn q(&self, xbar: &[f64]) -> f64 {
        let big_r = 1.0 + xbar.iter().map(|v| v * v).sum::<f64>();
        let h = self.params.pi.quad_form(xbar);
        let hat = match self.variant {
            Variant::Standard => q_hat(self.params.dim, self.params.a1, self.params.a2, big_r),
            Variant::Delta => q_delta_hat(self.params.delta, big_r),
        };
        self.params.eps * h * hat
    }

    /// `∂_N Φ + N w^{2/(N−2)} Φ` at `(x̄, 0)`, which should equal [`Self::q`].
    pub fn q_from_field(&self, xbar: &[f64]) -> f64 {
        let n = self.params.dim - 1;
        let mut x = [0.0; MAX_DIM];
        x[..n].copy_from_slice(xbar);
        let x = &x[..=n];
        let big = self.params.dim as f64;
        let big_r = 1.0 + xbar.iter().map(|v| v * v).sum::<f64>();
        self.gradient(x)[n] + big / big_r * self.value(x)
    }
}

/// Branch of the radial potential `Φ₀`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialBranch {
    /// `s^{-(N−6)/2}` form, `N = 5` or `N ≥ 7`.
    Power,
    /// `log s` form, `N = 6`.
    Log,
}

/// The chain `Φ₀ → Φ₁ = −∂_N Φ₀/(N−4)`, `Φ₂`, and `Φ₁ − Φ₂` with
/// `−Δ(Φ₁ − Φ₂) = x_N W`. Free additive constants are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct AppendixChain {
    pub dim: usize,
    pub a1: f64,
    pub a2: f64,
}

/// Values of the chain at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainValues {
    pub phi0: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub difference: f64,
}

impl AppendixChain {
    pub fn new(dim: usize, a1: f64, a2: f64) -> Result<Self> {
        if !(5..=MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(Self { dim, a1, a2 })
    }

    /// Chain parameters producing `Φ(a₁, a₂) = 2ε π_ij ∂_ij(Φ₁ − Φ₂)`.
    pub fn from_phi_params(dim: usize, a1: f64, a2: f64) -> Result<Self> {
        let big = dim as f64;
        Self::new(dim, a1 / (2.0 * big * (big + 2.0)), -a2 / (2.0 * big * (big - 2.0)))
    }

    /// The `(a₁, a₂)` of `Φ` generated by this chain.
    pub fn phi_params(&self) -> (f64, f64) {
        let big = self.dim as f64;
        (
            2.0 * big * (big + 2.0) * self.a1,
            -2.0 * big * (big - 2.0) * self.a2,
        )
    }

    pub fn natural_branch(&self) -> PotentialBranch {
        if self.dim == 6 {
            PotentialBranch::Log
        } else {
            PotentialBranch::Power
        }
    }

    /// `Φ₀` with `−ΔΦ₀ = s^{-(N−4)/2}`.
    pub fn phi0(&self, branch: PotentialBranch) -> Result<Profile> {
        let big = self.dim as f64;
        if branch != self.natural_branch() {
            return Err(Error::InvalidInput(format!(
                "the {branch:?} branch of the radial potential does not exist for N = {}",
                self.dim
            )));
        }
        // a1 is scaled so that Φ₁ carries exactly a1 (x_N+1) s^{-N/2}.
        let c = self.a1 * (big - 4.0) / (big - 2.0);
        let tail = ProfileTerm::new(c, 0.0, 0.5 * (big - 2.0));
        Ok(match branch {
            PotentialBranch::Power => Profile::from_terms(vec![
                ProfileTerm::new(1.0 / (4.0 * (big - 6.0)), 0.0, 0.5 * (big - 6.0)),
                tail,
            ]),
            PotentialBranch::Log => Profile {
                terms: vec![tail],
                log_coeff: -0.125,
                constant: 0.0,
            },
        })
    }

    /// `Φ₁` with `−ΔΦ₁ = (x_N+1) s^{-(N−2)/2}`.
    pub fn phi1(&self) -> Profile {
        let big = self.dim as f64;
        let c = 1.0 / (4.0 * (big - 4.0));
        Profile::from_terms(vec![
            ProfileTerm::new(c, c, 0.5 * (big - 4.0)),
            ProfileTerm::new(self.a1, self.a1, 0.5 * big),
        ])
    }

    /// `Φ₂` with `−ΔΦ₂ = s^{-(N−2)/2}`.
    pub fn phi2(&self) -> Profile {
        let big = self.dim as f64;
        Profile::from_terms(vec![
            ProfileTerm::new(1.0 / (2.0 * (big - 4.0)), 0.0, 0.5 * (big - 4.0)),
            ProfileTerm::new(self.a2, 0.0, 0.5 * (big - 2.0)),
        ])
    }

    pub fn difference(&self) -> Profile {
        let mut terms = self.phi1().terms;
        terms.extend(self.phi2().terms.iter().map(|t| ProfileTerm::new(-t.c0, -t.c1, t.k)));
        Profile::from_terms(terms)
    }

    pub fn eval(&self, x: &[f64]) -> Result<ChainValues> {
        let phi1 = self.phi1().value(x);
        let phi2 = self.phi2().value(x);
        Ok(ChainValues {
            phi0: self.phi0(self.natural_branch())?.value(x),
            phi1,
            phi2,
            difference: phi1 - phi2,
        })
    }

    /// Relative residuals of the four chain equations at `x`:
    /// `Φ₀`, `Φ₁`, `Φ₂`, and `Φ₁ − Φ₂` against `x_N W`.
    pub fn residuals(&self, x: &[f64]) -> Result<[f64; 4]> {
        let big = self.dim as f64;
        let (_, s) = shifted(x);
        let t = x[self.dim - 1];
        let rel = |p: &Profile, rhs: f64| {
            let r = -p.laplacian(x) - rhs;
            r.abs() / (p.laplacian_scale(x) + rhs.abs()).max(f64::MIN_POSITIVE)
        };
        let w = s.powf(-0.5 * (big - 2.0));
        Ok([
            rel(&self.phi0(self.natural_branch())?, s.powf(-0.5 * (big - 4.0))),
            rel(&self.phi1(), (t + 1.0) * w),
            rel(&self.phi2(), w),
            rel(&self.difference(), t * w),
        ])
    }

    /// `|Φ₁ + ∂_N Φ₀ / (N−4)|` at `x`.
    pub fn derivative_link_error(&self, x: &[f64]) -> Result<f64> {
        let big = self.dim as f64;
        let p0 = self.phi0(self.natural_branch())?;
        Ok((self.phi1().value(x) + p0.gradient(x)[self.dim - 1] / (big - 4.0)).abs())
    }

    /// `2 π_ij ∂_ij (Φ₁ − Φ₂)` at `x`.
    pub fn contracted_hessian(&self, pi: &TraceFreePi, x: &[f64]) -> f64 {
        let h = self.difference().hessian(x);
        let n = self.dim - 1;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += 2.0 * pi.get(i, j) * h[i][j];
            }
        }
        acc
    }

    /// Radial form of `Φ₂` about `(0, −1)`:
    /// `1/(2(N−4) r^{N−4}) + a₂ / r^{N−2}`.
    pub fn phi2_radial(&self, r: f64) -> f64 {
        let big = self.dim as f64;
        1.0 / (2.0 * (big - 4.0) * r.powf(big - 4.0)) + self.a2 / r.powf(big - 2.0)
    }
}
