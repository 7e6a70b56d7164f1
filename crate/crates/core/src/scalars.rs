//! The field `Q + Q*pi`, sphere areas as symbolic units, and cutoff-dependent
//! values with an exact logarithmic coefficient.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Builds a rational from a numerator and a nonzero denominator.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Very large numerator/denominator pairs: divide in f64 after scaling.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Parses "p", "p/q", or "-p/q".
pub fn parse_rat(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

/// `rat + pi * pi_coeff` with arbitrary-precision rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    rat: BigRational,
    pi: BigRational,
}

impl Default for ExactScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl ExactScalar {
    pub fn new(rat: BigRational, pi: BigRational) -> Self {
        Self { rat, pi }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn rational(r: BigRational) -> Self {
        Self::new(r, BigRational::zero())
    }

    pub fn pi_multiple(r: BigRational) -> Self {
        Self::new(BigRational::zero(), r)
    }

    pub fn frac(num: i64, den: i64) -> Self {
        Self::rational(rat(num, den))
    }

    pub fn pi_frac(num: i64, den: i64) -> Self {
        Self::pi_multiple(rat(num, den))
    }

    pub fn rat_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn pi_part(&self) -> &BigRational {
        &self.pi
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.pi.is_zero()
    }

    /// True when the pi part vanishes.
    pub fn is_rational(&self) -> bool {
        self.pi.is_zero()
    }

    /// True when the rational part vanishes.
    pub fn is_pure_pi(&self) -> bool {
        self.rat.is_zero()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(&self.rat * r, &self.pi * r)
    }

    /// Product in `Q + Q*pi`; fails when both factors carry pi.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if !self.pi.is_zero() && !other.pi.is_zero() {
            return Err(Error::PiSquared);
        }
        Ok(Self::new(
            &self.rat * &other.rat,
            &self.rat * &other.pi + &self.pi * &other.rat,
        ))
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.rat) + std::f64::consts::PI * rat_to_f64(&self.pi)
    }
}

pub fn exact_add(a: &ExactScalar, b: &ExactScalar) -> ExactScalar {
    a + b
}

pub fn exact_scale(a: &ExactScalar, r: &BigRational) -> ExactScalar {
    a.scale(r)
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, o: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.rat + &o.rat, &self.pi + &o.pi)
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(self, o: ExactScalar) -> ExactScalar {
        &self + &o
    }
}

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, o: &ExactScalar) {
        self.rat += &o.rat;
        self.pi += &o.pi;
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, o: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.rat - &o.rat, &self.pi - &o.pi)
    }
}

impl Sub for ExactScalar {
    type Output = ExactScalar;
    fn sub(self, o: ExactScalar) -> ExactScalar {
        &self - &o
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-&self.rat, -&self.pi)
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

impl Mul<&BigRational> for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, r: &BigRational) -> ExactScalar {
        self.scale(r)
    }
}

impl std::iter::Sum for ExactScalar {
    fn sum<I: Iterator<Item = ExactScalar>>(iter: I) -> Self {
        iter.fold(ExactScalar::zero(), |acc, x| &acc + &x)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pi.is_negative() {
            write!(f, "{} - {}*pi", self.rat, -&self.pi)
        } else {
            write!(f, "{} + {}*pi", self.rat, self.pi)
        }
    }
}

impl FromStr for ExactScalar {
    type Err = Error;

    /// Accepts the canonical "a + b*pi" / "a - b*pi" form, a bare rational,
    /// or a bare "b*pi".
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let split = s
            .char_indices()
            .skip(1)
            .find(|&(i, c)| (c == '+' || c == '-') && s[..i].ends_with(' '));
        let (rat_str, pi_str, negate) = match split {
            Some((i, c)) => (s[..i].trim(), s[i + 1..].trim(), c == '-'),
            None if s.ends_with("*pi") => ("0", s, false),
            None => (s, "0*pi", false),
        };
        let pi_body = pi_str
            .strip_suffix("*pi")
            .ok_or_else(|| Error::Parse(format!("missing *pi term in {s:?}")))?;
        let mut pi = parse_rat(pi_body)?;
        if negate {
            pi = -pi;
        }
        Ok(Self::new(parse_rat(rat_str)?, pi))
    }
}

#[derive(Serialize, Deserialize)]
struct ExactScalarJson {
    rat: String,
    pi: String,
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExactScalarJson {
            rat: self.rat.to_string(),
            pi: self.pi.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ExactScalarJson::deserialize(d)?;
        let r = parse_rat(&j.rat).map_err(serde::de::Error::custom)?;
        let p = parse_rat(&j.pi).map_err(serde::de::Error::custom)?;
        Ok(ExactScalar::new(r, p))
    }
}

/// `coeff * pi^pi_power`, the closed form of a sphere area.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereArea {
    pub k: u32,
    pub coeff: BigRational,
    pub pi_power: u32,
    pub value: f64,
    /// `Some` only when `pi_power <= 1`.
    pub exact: Option<ExactScalar>,
}

impl SphereArea {
    pub fn is_representable(&self) -> bool {
        self.exact.is_some()
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Surface area of the unit `k`-sphere in `R^{k+1}`.
pub fn sphere_area(k: u32) -> SphereArea {
    assert!(k >= 1, "sphere_area needs k >= 1");
    let (coeff, pi_power) = if k % 2 == 1 {
        // 2 pi^j / (j-1)!, j = (k+1)/2
        let j = (k as u64 + 1) / 2;
        (
            BigRational::new(BigInt::from(2), factorial(j - 1)),
            j as u32,
        )
    } else {
        // 2^{2j+1} j! pi^j / (2j)!, j = k/2
        let j = k as u64 / 2;
        (
            BigRational::new(
                BigInt::from(2).pow(2 * j as u32 + 1) * factorial(j),
                factorial(2 * j),
            ),
            j as u32,
        )
    };
    let value = rat_to_f64(&coeff) * std::f64::consts::PI.powi(pi_power as i32);
    let exact = match pi_power {
        0 => Some(ExactScalar::rational(coeff.clone())),
        1 => Some(ExactScalar::pi_multiple(coeff.clone())),
        _ => None,
    };
    SphereArea {
        k,
        coeff,
        pi_power,
        value,
        exact,
    }
}

/// `|S^k| / |S^{k-1}|` as an exact scalar (rational for even `k`, rational
/// times pi for odd `k`). `|S^0|` counts the two points of `S^0`.
pub fn sphere_ratio(k: u32) -> ExactScalar {
    assert!(k >= 1);
    let upper = sphere_area(k);
    let (lower_coeff, lower_pow) = if k == 1 {
        (rat_int(2), 0)
    } else {
        let l = sphere_area(k - 1);
        (l.coeff, l.pi_power)
    };
    let c = &upper.coeff / &lower_coeff;
    match upper.pi_power - lower_pow {
        0 => ExactScalar::rational(c),
        1 => ExactScalar::pi_multiple(c),
        d => unreachable!("sphere ratio with pi power {d}"),
    }
}

/// Cutoff-dependent value `log_coeff * log R + const_part`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticValue {
    pub log_coeff: ExactScalar,
    pub const_part: f64,
    pub const_known: bool,
    /// Absolute uncertainty of `const_part`, when it was computed numerically.
    pub error_band: f64,
}

impl AsymptoticValue {
    pub fn convergent(value: ExactScalar) -> Self {
        Self {
            const_part: value.to_f64(),
            log_coeff: ExactScalar::zero(),
            const_known: true,
            error_band: 0.0,
        }
    }

    pub fn log(log_coeff: ExactScalar, const_part: f64, const_known: bool) -> Self {
        Self {
            log_coeff,
            const_part,
            const_known,
            error_band: 0.0,
        }
    }

    pub fn zero() -> Self {
        Self::convergent(ExactScalar::zero())
    }

    pub fn is_convergent(&self) -> bool {
        self.log_coeff.is_zero()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self {
            log_coeff: self.log_coeff.scale(r),
            const_part: self.const_part * rat_to_f64(r),
            const_known: self.const_known,
            error_band: self.error_band * rat_to_f64(r).abs(),
        }
    }

    /// Multiplies by an exact scalar; the log coefficient must stay in `Q + Q*pi`.
    pub fn try_mul(&self, s: &ExactScalar) -> Result<Self> {
        let f = s.to_f64();
        Ok(Self {
            log_coeff: self.log_coeff.try_mul(s)?,
            const_part: self.const_part * f,
            const_known: self.const_known,
            error_band: self.error_band * f.abs(),
        })
    }

    /// Value at a finite cutoff, ignoring the vanishing tail.
    pub fn at_cutoff(&self, r: f64) -> f64 {
        self.log_coeff.to_f64() * r.ln() + self.const_part
    }
}

impl Add for &AsymptoticValue {
    type Output = AsymptoticValue;
    fn add(self, o: &AsymptoticValue) -> AsymptoticValue {
        AsymptoticValue {
            log_coeff: &self.log_coeff + &o.log_coeff,
            const_part: self.const_part + o.const_part,
            const_known: self.const_known && o.const_known,
            error_band: self.error_band + o.error_band,
        }
    }
}

impl Add for AsymptoticValue {
    type Output = AsymptoticValue;
    fn add(self, o: AsymptoticValue) -> AsymptoticValue {
        &self + &o
    }
}
