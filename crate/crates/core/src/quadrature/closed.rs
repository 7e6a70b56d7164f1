use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};

use crate::error::{DivergenceSide, Error, Result};
use crate::scalars::{rat_int, AsymptoticValue, ExactScalar};

use super::adaptive::{adaptive, Domain1D, QuadOptions};

fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `Gamma(k2 / 2)` for `k2 >= 1` as `(c, e)` meaning `c * sqrt(pi)^e`.
pub fn gamma_half(k2: i64) -> (BigRational, u32) {
    assert!(k2 >= 1, "Gamma argument must be positive");
    if k2 % 2 == 0 {
        (BigRational::from_integer(factorial(k2 / 2 - 1)), 0)
    } else {
        // Gamma(m + 1/2) = (2m)! / (4^m m!) sqrt(pi)
        let m = (k2 - 1) / 2;
        let den = BigInt::from(4).pow(m as u32) * factorial(m);
        (BigRational::new(factorial(2 * m), den), 1)
    }
}

/// `int_0^R t^p (t^2+1)^{-q} dt` with `q = twice_q / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RadialIntegral {
    pub p: i64,
    pub twice_q: i64,
}

impl RadialIntegral {
    pub fn integrand(&self, t: f64) -> f64 {
        t.powi(self.p as i32) * (t * t + 1.0).powf(-0.5 * self.twice_q as f64)
    }

    pub fn closed(&self) -> Result<ExactScalar> {
        radial_closed(self.p, self.twice_q)
    }

    pub fn numeric(&self, upper: Option<f64>, opts: &QuadOptions) -> Result<f64> {
        let dom = match upper {
            Some(r) => Domain1D::Finite(0.0, r),
            None => Domain1D::SemiInfinite(0.0),
        };
        Ok(adaptive(|t| self.integrand(t), dom, opts)?.value)
    }
}

/// `int_0^R x^a (x+1)^{-b} dx`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxialIntegral {
    pub a: u32,
    pub b: i64,
}

impl AxialIntegral {
    pub fn integrand(&self, x: f64) -> f64 {
        x.powi(self.a as i32) * (x + 1.0).powi(-(self.b as i32))
    }

    pub fn closed(&self) -> Result<AsymptoticValue> {
        axial_closed(self.a, self.b)
    }
}

/// Exact `int_0^inf t^p (t^2+1)^{-q} dt = B((p+1)/2, q-(p+1)/2) / 2`, `q = twice_q/2`.
///
/// The result is rational when an odd number of the Beta arguments is a half
/// integer and a rational multiple of pi otherwise.
pub fn radial_closed(p: i64, twice_q: i64) -> Result<ExactScalar> {
    if p <= -1 {
        return Err(Error::Divergent {
            side: DivergenceSide::Origin,
            detail: format!("t^{p} is not integrable at 0"),
        });
    }
    if twice_q - p <= 1 {
        return Err(Error::Divergent {
            side: DivergenceSide::Infinity,
            detail: format!("t^{p} (t^2+1)^(-{twice_q}/2) needs 2q - p > 1"),
        });
    }
    let a2 = p + 1;
    let b2 = twice_q - p - 1;
    let (ga, ea) = gamma_half(a2);
    let (gb, eb) = gamma_half(b2);
    let (gab, eab) = gamma_half(a2 + b2);
    let c = ga * gb / gab / rat_int(2);
    match ea + eb - eab {
        0 => Ok(ExactScalar::rational(c)),
        2 => Ok(ExactScalar::pi_multiple(c)),
        e => unreachable!("sqrt(pi) power {e} cannot occur"),
    }
}

/// Radial integral that may be logarithmically divergent (`2q - p = 1`).
///
/// In the log case the coefficient of `log R` is 1 and the constant is
/// computed numerically as `int_0^1 f + int_1^inf (f - 1/t)`.
pub fn radial_asymptotic(p: i64, twice_q: i64) -> Result<AsymptoticValue> {
    if twice_q - p != 1 {
        return radial_closed(p, twice_q).map(AsymptoticValue::convergent);
    }
    if p <= -1 {
        return radial_closed(p, twice_q).map(AsymptoticValue::convergent);
    }
    let ri = RadialIntegral { p, twice_q };
    let opts = QuadOptions::default();
    let head = adaptive(|t| ri.integrand(t), Domain1D::Finite(0.0, 1.0), &opts)?;
    let tail = adaptive(
        |t| ri.integrand(t) - 1.0 / t,
        Domain1D::SemiInfinite(1.0),
        &opts,
    )?;
    let mut v = AsymptoticValue::log(
        ExactScalar::rational(BigRational::one()),
        head.value + tail.value,
        true,
    );
    v.error_band = head.error + tail.error;
    Ok(v)
}

/// Exact `(log coefficient, constant)` of `int_0^R x^a (x+1)^{-b} dx` as `R -> inf`.
fn axial_parts(a: u32, b: i64) -> Result<(BigRational, BigRational)> {
    let a_i = a as i64;
    if b - a_i < 1 {
        return Err(Error::Divergent {
            side: DivergenceSide::Infinity,
            detail: format!("x^{a} (x+1)^(-{b}) grows polynomially"),
        });
    }
    // x^a = sum_k C(a,k) u^k (-1)^{a-k};  int_1^inf u^{k-b} du = 1/(b-k-1)
    let mut constant = BigRational::zero();
    let mut log_coeff = BigRational::zero();
    let mut binom = BigInt::one();
    for k in 0..=a_i {
        if k > 0 {
            binom = binom * BigInt::from(a_i - k + 1) / BigInt::from(k);
        }
        let sign = if (a_i - k) % 2 == 0 { 1 } else { -1 };
        let c = BigRational::from_integer(&binom * BigInt::from(sign));
        if b - k - 1 == 0 {
            log_coeff += c;
        } else {
            constant += c / rat_int(b - k - 1);
        }
    }
    Ok((log_coeff, constant))
}

/// `int_0^inf x^a (x+1)^{-b} dx` via `u = x + 1` and the binomial expansion.
///
/// Convergent when `b - a > 1`; log-divergent with coefficient 1 and an
/// exact constant when `b - a = 1`.
pub fn axial_closed(a: u32, b: i64) -> Result<AsymptoticValue> {
    let (log_coeff, constant) = axial_parts(a, b)?;
    if log_coeff.is_zero() {
        Ok(AsymptoticValue::convergent(ExactScalar::rational(constant)))
    } else {
        Ok(AsymptoticValue::log(
            ExactScalar::rational(log_coeff),
            crate::scalars::rat_to_f64(&constant),
            true,
        ))
    }
}

/// Convergent axial integral as an exact rational.
pub fn axial_exact(a: u32, b: i64) -> Result<BigRational> {
    let (log_coeff, constant) = axial_parts(a, b)?;
    if !log_coeff.is_zero() {
        return Err(Error::Divergent {
            side: DivergenceSide::Infinity,
            detail: format!("x^{a} (x+1)^(-{b}) is log-divergent"),
        });
    }
    Ok(constant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    #[test]
    fn radial_examples() {
        assert_eq!(radial_closed(5, 10).unwrap(), ExactScalar::frac(1, 24));
        assert_eq!(radial_closed(7, 12).unwrap(), ExactScalar::frac(1, 40));
        assert_eq!(radial_closed(0, 2).unwrap(), ExactScalar::pi_frac(1, 2));
        assert_eq!(radial_closed(6, 10).unwrap(), ExactScalar::pi_frac(5, 256));
        assert_eq!(radial_closed(6, 9).unwrap(), ExactScalar::frac(1, 7));
    }

    #[test]
    fn radial_divergence_side_named() {
        match radial_closed(5, 6) {
            Err(Error::Divergent { side, .. }) => assert_eq!(side, DivergenceSide::Infinity),
            other => panic!("unexpected {other:?}"),
        }
        match radial_closed(-1, 6) {
            Err(Error::Divergent { side, .. }) => assert_eq!(side, DivergenceSide::Origin),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn beta_recursion_exact() {
        for p in 0..10 {
            for q2 in (p + 4)..26 {
                let lhs = radial_closed(p, q2).unwrap();
                let rhs = &radial_closed(p, q2 - 2).unwrap() - &radial_closed(p + 2, q2).unwrap();
                assert_eq!(lhs, rhs, "p={p} 2q={q2}");
            }
        }
    }

    fn axial_beta(a: u32, b: i64) -> BigRational {
        let a = a as i64;
        BigRational::new(factorial(a) * factorial(b - a - 2), factorial(b - 1))
    }

    #[test]
    fn axial_examples() {
        let v = axial_closed(2, 4).unwrap();
        assert!(v.is_convergent());
        assert_eq!(axial_exact(2, 4).unwrap(), rat(1, 3));
        assert!((v.const_part - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(axial_exact(1, 7).unwrap(), rat(1, 30));
        let l = axial_closed(1, 2).unwrap();
        assert_eq!(l.log_coeff, ExactScalar::frac(1, 1));
        assert_eq!(l.const_part, -1.0);
        assert!(axial_closed(3, 3).is_err());
    }

    #[test]
    fn binomial_route_matches_beta_route() {
        for a in 0..8u32 {
            for b in (a as i64 + 2)..(a as i64 + 10) {
                assert_eq!(axial_exact(a, b).unwrap(), axial_beta(a, b), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn radial_log_case() {
        // t / (t^2+1): log coefficient 1, constant 0
        let v = radial_asymptotic(1, 2).unwrap();
        assert_eq!(v.log_coeff, ExactScalar::frac(1, 1));
        assert!(v.const_part.abs() < 1e-12);
        // t^6 (t^2+1)^(-7/2)
        let v = radial_asymptotic(6, 7).unwrap();
        assert_eq!(v.log_coeff, ExactScalar::frac(1, 1));
        let r = 1e6;
        let direct = RadialIntegral { p: 6, twice_q: 7 }
            .numeric(Some(r), &QuadOptions::default())
            .unwrap();
        assert!((direct - v.at_cutoff(r)).abs() < 1e-9);
    }
}
