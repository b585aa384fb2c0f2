//! Fixed-precision scalars backed by MPFR.
//!
//! Every [`Scalar`] carries its precision in bits. Arithmetic between two
//! scalars requires equal precision; the result keeps that precision and is
//! correctly rounded (round to nearest), so identical inputs produce
//! bit-identical results.

use rug::float::Round;
use rug::ops::{DivAssignRound, MulAssignRound, PowAssignRound};
use rug::{Float, Integer, Rational};
use std::ops::{AddAssign, SubAssign};
use std::cmp::Ordering;
use std::fmt;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

/// Arbitrary-precision real number with explicit precision.
#[derive(Clone, PartialEq)]
pub struct Scalar(Float);

impl Scalar {
    pub fn zero(prec: u32) -> Self {
        Scalar(Float::with_val(prec, 0))
    }

    pub fn one(prec: u32) -> Self {
        Scalar(Float::with_val(prec, 1))
    }

    pub fn from_u64(v: u64, prec: u32) -> Self {
        Scalar(Float::with_val(prec, v))
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Scalar(Float::with_val(prec, v))
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        Scalar(Float::with_val(prec, v))
    }

    pub fn from_integer(v: &Integer, prec: u32) -> Self {
        Scalar(Float::with_val(prec, v))
    }

    pub fn from_rational(v: &Rational, prec: u32) -> Self {
        Scalar(Float::with_val(prec, v))
    }

    /// 2^exp at the given precision (exact for any exponent in range).
    pub fn exp2(exp: i32, prec: u32) -> Self {
        let mut f = Float::with_val(prec, 1);
        f <<= exp;
        Scalar(f)
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Self {
        Scalar(self.0.clone().sqrt())
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn recip(&self) -> Self {
        let prec = self.prec();
        Scalar(Float::with_val(prec, self.0.recip_ref()))
    }

    pub fn neg(&self) -> Self {
        Scalar(Float::with_val(self.prec(), -&self.0))
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut r = self.0.clone();
        r.pow_assign_round(e, Round::Nearest);
        Scalar(r)
    }

    /// self^(p/q) for integer p and positive integer q, via correctly rounded
    /// MPFR exp/log. Requires self > 0.
    pub fn pow_frac(&self, p: i64, q: u64) -> Self {
        assert!(self.0.is_sign_positive() && !self.0.is_zero());
        let prec = self.prec();
        let e = Float::with_val(prec, Rational::from((p, q)));
        let mut r = self.0.clone();
        r.pow_assign_round(&e, Round::Nearest);
        Scalar(r)
    }

    pub fn ln(&self) -> Self {
        Scalar(self.0.clone().ln())
    }

    pub fn min(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Nearest integer, as i64. Panics when out of range or non-finite.
    pub fn round_i64(&self) -> i64 {
        let r = self.0.clone().round();
        r.to_integer().expect("non-finite scalar").to_i64().expect("out of i64 range")
    }

    /// Formats in scientific notation with `digits` significant digits,
    /// e.g. `-1.234e-5`. Deterministic across runs.
    pub fn to_sci_string(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return "0.0".to_string();
        }
        let (sign, mantissa, exp) = {
            let s = self.0.to_string_radix(10, Some(digits));
            // rug formats like "-1.234e5" or "1.234" (exp optional)
            parse_radix10(&s)
        };
        let mut out = String::new();
        if sign {
            out.push('-');
        }
        out.push_str(&mantissa);
        out.push('e');
        out.push_str(&exp.to_string());
        out
    }

}

fn parse_radix10(s: &str) -> (bool, String, i64) {
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let (mant, exp) = match rest.split_once('e') {
        Some((m, e)) => (m.to_string(), e.parse::<i64>().unwrap()),
        None => (rest.to_string(), 0),
    };
    // normalize mantissa to d.ddd form
    if let Some(dot) = mant.find('.') {
        let digits: String = mant.chars().filter(|c| *c != '.').collect();
        let first_nonzero = digits.find(|c| c != '0').unwrap_or(0);
        let shift = dot as i64 - 1 - first_nonzero as i64;
        let digits = &digits[first_nonzero..];
        let m = if digits.len() > 1 {
            format!("{}.{}", &digits[..1], &digits[1..])
        } else {
            format!("{}.0", digits)
        };
        (sign, m, exp + shift)
    } else {
        (sign, format!("{}.0", mant), exp)
    }
}

fn check_prec(a: &Scalar, b: &Scalar) {
    assert_eq!(
        a.prec(),
        b.prec(),
        "scalar precision mismatch: {} vs {}",
        a.prec(),
        b.prec()
    );
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $assign_method:ident) => {
        impl std::ops::$trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                check_prec(self, rhs);
                let mut r = self.0.clone();
                r.$assign_method(&rhs.0);
                Scalar(r)
            }
        }
        impl std::ops::$trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                std::ops::$trait::$method(&self, &rhs)
            }
        }
        impl std::ops::$trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                std::ops::$trait::$method(&self, rhs)
            }
        }
    };
}

scalar_binop!(Add, add, add_assign);
scalar_binop!(Sub, sub, sub_assign);

impl std::ops::Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        check_prec(self, rhs);
        let mut r = self.0.clone();
        r.mul_assign_round(&rhs.0, Round::Nearest);
        Scalar(r)
    }
}

impl std::ops::Mul<Scalar> for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl std::ops::Mul<&Scalar> for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        &self * rhs
    }
}

impl std::ops::Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        check_prec(self, rhs);
        let mut r = self.0.clone();
        r.div_assign_round(&rhs.0, Round::Nearest);
        Scalar(r)
    }
}

impl std::ops::Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(&self)
    }
}

impl std::ops::AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        check_prec(self, rhs);
        self.0 += &rhs.0;
    }
}

impl std::ops::SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        check_prec(self, rhs);
        self.0 -= &rhs.0;
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_f64())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci_string(20))
    }
}

/// Complex number as a pair of equal-precision scalars.
#[derive(Clone, PartialEq)]
pub struct CScalar {
    pub re: Scalar,
    pub im: Scalar,
}

impl CScalar {
    pub fn new(re: Scalar, im: Scalar) -> Self {
        assert_eq!(re.prec(), im.prec(), "re/im precision mismatch");
        CScalar { re, im }
    }

    pub fn from_real(re: Scalar) -> Self {
        let prec = re.prec();
        CScalar { re, im: Scalar::zero(prec) }
    }

    pub fn zero(prec: u32) -> Self {
        CScalar { re: Scalar::zero(prec), im: Scalar::zero(prec) }
    }

    pub fn one(prec: u32) -> Self {
        CScalar { re: Scalar::one(prec), im: Scalar::zero(prec) }
    }

    pub fn i(prec: u32) -> Self {
        CScalar { re: Scalar::zero(prec), im: Scalar::one(prec) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn conj(&self) -> Self {
        CScalar { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// max(|re|, |im|); cheap magnitude bound used for drop tolerances.
    pub fn mag(&self) -> Scalar {
        self.re.abs().max(&self.im.abs())
    }

    pub fn neg(&self) -> Self {
        CScalar { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        CScalar { re: &self.re * s, im: &self.im * s }
    }
}

impl std::ops::Add<&CScalar> for &CScalar {
    type Output = CScalar;
    fn add(self, rhs: &CScalar) -> CScalar {
        CScalar { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl std::ops::Sub<&CScalar> for &CScalar {
    type Output = CScalar;
    fn sub(self, rhs: &CScalar) -> CScalar {
        CScalar { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl std::ops::Mul<&CScalar> for &CScalar {
    type Output = CScalar;
    fn mul(self, rhs: &CScalar) -> CScalar {
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        CScalar { re, im }
    }
}

impl std::ops::AddAssign<&CScalar> for CScalar {
    fn add_assign(&mut self, rhs: &CScalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl fmt::Debug for CScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}+{:?}i)", self.re, self.im)
    }
}

/// Exact factorial as an arbitrary-precision integer.
pub fn factorial(n: u32) -> Integer {
    let mut r = Integer::from(1);
    for k in 2..=n {
        r *= k;
    }
    r
}

/// Binomial coefficient as an exact integer.
pub fn binomial(n: u64, k: u64) -> Integer {
    if k > n {
        return Integer::from(0);
    }
    let k = k.min(n - k);
    let mut num = Integer::from(1);
    for j in 0..k {
        num *= n - j;
    }
    num / factorial(k as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_deterministic() {
        let a = Scalar::from_u64(2, 256).sqrt();
        let b = Scalar::from_u64(2, 256).sqrt();
        assert_eq!(a, b);
        let c = &a * &b;
        assert!((&c - &Scalar::from_u64(2, 256)).abs() <= Scalar::exp2(-250, 256));
    }

    #[test]
    #[should_panic(expected = "precision mismatch")]
    fn mixed_precision_panics() {
        let a = Scalar::one(256);
        let b = Scalar::one(128);
        let _ = &a + &b;
    }

    #[test]
    fn sci_format_round_trips() {
        let x = Scalar::from_f64(-0.001234, 256);
        let s = x.to_sci_string(10);
        assert!(s.starts_with("-1.23") && s.ends_with("e-3"), "{}", s);
        let y: f64 = s.parse().unwrap();
        assert!((y + 0.001234).abs() < 1e-12);
        assert_eq!(Scalar::zero(64).to_sci_string(10), "0.0");
        let one = Scalar::one(64).to_sci_string(5);
        let v: f64 = one.parse().unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn complex_multiplication() {
        let prec = 128;
        let i = CScalar::i(prec);
        let m = &i * &i;
        assert!(m.im.is_zero());
        assert_eq!(m.re, Scalar::from_i64(-1, prec));
    }

    #[test]
    fn factorials_and_binomials() {
        assert_eq!(factorial(5), Integer::from(120));
        assert_eq!(binomial(12, 6), Integer::from(924));
        assert_eq!(binomial(6, 8), Integer::from(0));
    }
}
