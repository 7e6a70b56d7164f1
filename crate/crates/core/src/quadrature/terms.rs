//! Half-plane integrands built from monomials
//! `r^p x^a (x+1)^c s^{h/2}`, `s = r^2 + (x+1)^2`, on `r, x > 0`.
//!
//! The substitution `r = (x+1) t` splits each monomial into a radial factor
//! `int t^p (t^2+1)^{h/2} dt` and an axial factor
//! `int x^a (x+1)^{c+p+1+h} dx`, both available in closed form.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num::rational::BigRational;
use num::{One, Zero};

use crate::error::Result;
use crate::scalars::{rat_to_f64, AsymptoticValue, ExactScalar};

use super::closed::{axial_closed, axial_exact, radial_asymptotic, radial_closed};

/// `r^r_pow · x^xn_pow · (x+1)^shift_pow · s^{s_half/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub r_pow: i64,
    pub xn_pow: u32,
    pub shift_pow: i64,
    pub s_half: i64,
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        r_pow: 0,
        xn_pow: 0,
        shift_pow: 0,
        s_half: 0,
    };

    pub fn eval(&self, r: f64, x: f64) -> f64 {
        let s = r * r + (x + 1.0) * (x + 1.0);
        r.powi(self.r_pow as i32)
            * x.powi(self.xn_pow as i32)
            * (x + 1.0).powi(self.shift_pow as i32)
            * s.powf(0.5 * self.s_half as f64)
    }

    fn times(&self, o: &Monomial) -> Monomial {
        Monomial {
            r_pow: self.r_pow + o.r_pow,
            xn_pow: self.xn_pow + o.xn_pow,
            shift_pow: self.shift_pow + o.shift_pow,
            s_half: self.s_half + o.s_half,
        }
    }

    /// `(p, 2q, a, b)` with the monomial integral equal to
    /// `int t^p (t^2+1)^{-q} dt · int x^a (x+1)^{-b} dx`.
    pub fn split(&self) -> (i64, i64, u32, i64) {
        let twice_q = -self.s_half;
        let b = twice_q - self.shift_pow - self.r_pow - 1;
        (self.r_pow, twice_q, self.xn_pow, b)
    }
}

/// One reduced monomial with its factored 1-D integrals.
#[derive(Clone, Debug)]
pub struct ReducedPiece {
    pub coeff: BigRational,
    pub monomial: Monomial,
    pub radial: (i64, i64),
    pub axial: (u32, i64),
    pub radial_value: ExactScalar,
    pub axial_value: AsymptoticValue,
    pub value: AsymptoticValue,
}

/// Rational linear combination of [`Monomial`]s.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HalfPlaneTerms {
    terms: BTreeMap<Monomial, BigRational>,
}

impl HalfPlaneTerms {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(coeff: BigRational, m: Monomial) -> Self {
        let mut t = Self::zero();
        t.push(m, coeff);
        t
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, Monomial::ONE)
    }

    /// `c · r^p x^a (x+1)^c s^{h/2}`.
    pub fn term(coeff: BigRational, r_pow: i64, xn_pow: u32, shift_pow: i64, s_half: i64) -> Self {
        Self::monomial(
            coeff,
            Monomial {
                r_pow,
                xn_pow,
                shift_pow,
                s_half,
            },
        )
    }

    pub fn r_pow(p: i64) -> Self {
        Self::term(BigRational::one(), p, 0, 0, 0)
    }

    pub fn xn_pow(a: u32) -> Self {
        Self::term(BigRational::one(), 0, a, 0, 0)
    }

    pub fn shift_pow(c: i64) -> Self {
        Self::term(BigRational::one(), 0, 0, c, 0)
    }

    /// `s^{h/2}`.
    pub fn s_pow_half(h: i64) -> Self {
        Self::term(BigRational::one(), 0, 0, 0, h)
    }

    fn push(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.push(*m, v * c);
        }
        out
    }

    pub fn eval(&self, r: f64, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| rat_to_f64(c) * m.eval(r, x))
            .sum()
    }

    /// Factored integrals of every monomial over `r, x > 0`.
    pub fn reduce_pieces(&self) -> Result<Vec<ReducedPiece>> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let (p, twice_q, a, b) = m.split();
            let radial_value = radial_closed(p, twice_q)?;
            let axial_value = axial_closed(a, b)?;
            let value = axial_value.try_mul(&radial_value)?.scale(c);
            out.push(ReducedPiece {
                coeff: c.clone(),
                monomial: *m,
                radial: (p, twice_q),
                axial: (a, b),
                radial_value,
                axial_value,
                value,
            });
        }
        Ok(out)
    }

    /// Integral over `r, x > 0`; a logarithmic divergence in `x` is returned
    /// as the coefficient of `log L`.
    pub fn reduce(&self) -> Result<AsymptoticValue> {
        Ok(self
            .reduce_pieces()?
            .into_iter()
            .fold(AsymptoticValue::zero(), |acc, p| acc + p.value))
    }

    /// Exact integral, rejecting logarithmic divergence.
    pub fn reduce_exact(&self) -> Result<ExactScalar> {
        let mut total = ExactScalar::zero();
        for (m, c) in &self.terms {
            let (p, twice_q, a, b) = m.split();
            let ax = axial_exact(a, b)?;
            total += &radial_closed(p, twice_q)?.scale(&(c * ax));
        }
        Ok(total)
    }

    /// Exact coefficient of `log L`.
    pub fn log_coefficient(&self) -> Result<ExactScalar> {
        Ok(self.reduce()?.log_coeff)
    }
}

impl Add for &HalfPlaneTerms {
    type Output = HalfPlaneTerms;
    fn add(self, o: &HalfPlaneTerms) -> HalfPlaneTerms {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.push(*m, c.clone());
        }
        out
    }
}

impl Add for HalfPlaneTerms {
    type Output = HalfPlaneTerms;
    fn add(self, o: HalfPlaneTerms) -> HalfPlaneTerms {
        &self + &o
    }
}

impl Neg for &HalfPlaneTerms {
    type Output = HalfPlaneTerms;
    fn neg(self) -> HalfPlaneTerms {
        self.scale(&-BigRational::one())
    }
}

impl Sub for &HalfPlaneTerms {
    type Output = HalfPlaneTerms;
    fn sub(self, o: &HalfPlaneTerms) -> HalfPlaneTerms {
        self + &(-o)
    }
}

impl Sub for HalfPlaneTerms {
    type Output = HalfPlaneTerms;
    fn sub(self, o: HalfPlaneTerms) -> HalfPlaneTerms {
        &self - &o
    }
}

impl Mul for &HalfPlaneTerms {
    type Output = HalfPlaneTerms;
    fn mul(self, o: &HalfPlaneTerms) -> HalfPlaneTerms {
        let mut out = HalfPlaneTerms::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.push(m1.times(m2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for HalfPlaneTerms {
    type Output = HalfPlaneTerms;
    fn mul(self, o: HalfPlaneTerms) -> HalfPlaneTerms {
        &self * &o
    }
}

/// `r^r_pow (r^2+1)^{-twice_q/2}` on the boundary `x = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryMonomial {
    pub r_pow: i64,
    pub twice_q: i64,
}

impl BoundaryMonomial {
    pub fn eval(&self, r: f64) -> f64 {
        r.powi(self.r_pow as i32) * (r * r + 1.0).powf(-0.5 * self.twice_q as f64)
    }
}

/// Rational linear combination of [`BoundaryMonomial`]s.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundaryTerms {
    terms: BTreeMap<BoundaryMonomial, BigRational>,
}

impl BoundaryTerms {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c · r^p (r^2+1)^{-twice_q/2}`.
    pub fn term(coeff: BigRational, r_pow: i64, twice_q: i64) -> Self {
        let mut t = Self::zero();
        t.push(BoundaryMonomial { r_pow, twice_q }, coeff);
        t
    }

    fn push(&mut self, m: BoundaryMonomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BoundaryMonomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.push(*m, v * c);
        }
        out
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| rat_to_f64(c) * m.eval(r))
            .sum()
    }

    /// Integral over `r > 0`, log-divergent terms reported as `log R`.
    pub fn reduce(&self) -> Result<AsymptoticValue> {
        let mut acc = AsymptoticValue::zero();
        for (m, c) in &self.terms {
            acc = acc + radial_asymptotic(m.r_pow, m.twice_q)?.scale(c);
        }
        Ok(acc)
    }

    /// Exact integral, rejecting divergence.
    pub fn reduce_exact(&self) -> Result<ExactScalar> {
        let mut acc = ExactScalar::zero();
        for (m, c) in &self.terms {
            acc += &radial_closed(m.r_pow, m.twice_q)?.scale(c);
        }
        Ok(acc)
    }

    /// Exact `log R` coefficient; convergent terms are skipped without
    /// computing their constants.
    pub fn log_coefficient(&self) -> Result<ExactScalar> {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            if m.twice_q - m.r_pow == 1 && m.r_pow > -1 {
                acc += c;
            } else if m.twice_q - m.r_pow < 1 {
                radial_closed(m.r_pow, m.twice_q)?;
            }
        }
        Ok(ExactScalar::rational(acc))
    }
}

impl Add for &BoundaryTerms {
    type Output = BoundaryTerms;
    fn add(self, o: &BoundaryTerms) -> BoundaryTerms {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.push(*m, c.clone());
        }
        out
    }
}

impl Add for BoundaryTerms {
    type Output = BoundaryTerms;
    fn add(self, o: BoundaryTerms) -> BoundaryTerms {
        &self + &o
    }
}

impl Mul for &BoundaryTerms {
    type Output = BoundaryTerms;
    fn mul(self, o: &BoundaryTerms) -> BoundaryTerms {
        let mut out = BoundaryTerms::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.push(
                    BoundaryMonomial {
                        r_pow: m1.r_pow + m2.r_pow,
                        twice_q: m1.twice_q + m2.twice_q,
                    },
                    c1 * c2,
                );
            }
        }
        out
    }
}

impl Mul for BoundaryTerms {
    type Output = BoundaryTerms;
    fn mul(self, o: BoundaryTerms) -> BoundaryTerms {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Exec;
    use crate::quadrature::{adaptive_2d, Domain1D, QuadOptions};
    use crate::scalars::rat;

    #[test]
    fn split_matches_numeric_double_integral() {
        // r^3 x^2 (x+1)^{-1} s^{-4}
        let t = HalfPlaneTerms::term(rat(3, 2), 3, 2, -1, -8);
        let exact = t.reduce_exact().unwrap().to_f64();
        let num = adaptive_2d(
            |r, x| t.eval(r, x),
            Domain1D::SemiInfinite(0.0),
            Domain1D::SemiInfinite(0.0),
            &QuadOptions::with_tol(1e-13, 1e-11),
            Exec::Sequential,
        )
        .unwrap()
        .value;
        assert!((exact - num).abs() < 1e-10 * exact.abs(), "{exact} {num}");
    }

    #[test]
    fn algebra_cancels() {
        let a = HalfPlaneTerms::r_pow(2) * HalfPlaneTerms::s_pow_half(-6);
        let b = &a - &a;
        assert!(b.is_zero());
        let c = &HalfPlaneTerms::xn_pow(1) + &HalfPlaneTerms::constant(rat(1, 1));
        let d = &c - &HalfPlaneTerms::shift_pow(1);
        assert!(!d.is_zero()); // x + 1 and (x+1) are distinct monomials
        assert!((d.eval(0.3, 0.7)).abs() < 1e-15);
    }

    #[test]
    fn log_coefficient_from_axial() {
        // r^3 x s^{-3}: radial (3, 6) = 1/4, axial (1, 2) log-divergent
        let t = HalfPlaneTerms::term(rat(1, 1), 3, 1, 0, -6);
        assert_eq!(t.log_coefficient().unwrap(), ExactScalar::frac(1, 4));
        assert!(t.reduce_exact().is_err());
    }

    #[test]
    fn boundary_terms() {
        let b = BoundaryTerms::term(rat(2, 1), 5, 10) * BoundaryTerms::term(rat(1, 1), 0, 0);
        assert_eq!(b.reduce_exact().unwrap(), ExactScalar::frac(1, 12));
        let l = BoundaryTerms::term(rat(3, 1), 3, 4);
        assert_eq!(l.log_coefficient().unwrap(), ExactScalar::frac(3, 1));
        assert_eq!(l.reduce().unwrap().log_coeff, ExactScalar::frac(3, 1));
    }
}
