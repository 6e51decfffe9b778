use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 256;
/// Smallest precision accepted by the public constructors of run configurations.
pub const MIN_PREC: u32 = 128;

/// Binary floating-point real with a fixed precision, rounded to nearest.
///
/// Binary operations return a value at the larger of the two operand precisions.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct ExtReal(Float);

impl ExtReal {
    pub fn from_float(f: Float) -> Self {
        ExtReal(f)
    }

    pub fn zero(prec: u32) -> Self {
        ExtReal(Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        ExtReal(Float::with_val(prec, v))
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        ExtReal(Float::with_val(prec, v))
    }

    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Self {
        ExtReal(Float::with_val(prec, Rational::from((num, den))))
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        ExtReal(Float::with_val(prec, r))
    }

    pub fn from_integer(i: &Integer, prec: u32) -> Self {
        ExtReal(Float::with_val(prec, i))
    }

    /// Parses a decimal string such as `"1e-3"` or `"0.25"`, rounding once to `prec`.
    pub fn parse(s: &str, prec: u32) -> Result<Self> {
        let t = s.trim();
        let inc = Float::parse(t).map_err(|e| Error::Parse(format!("{t:?}: {e}")))?;
        let v = Float::with_val(prec, inc);
        if !v.is_finite() {
            return Err(Error::Parse(format!("{t:?} is not a finite real")));
        }
        Ok(ExtReal(v))
    }

    pub fn pi(prec: u32) -> Self {
        ExtReal(Float::with_val(prec, Constant::Pi))
    }

    /// The constant 1/(16 pi^2).
    pub fn coupling_c(prec: u32) -> Self {
        let pi = Self::pi(prec);
        (&pi * &pi * 16i64).recip()
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        ExtReal(Float::with_val(prec, &self.0))
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

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Fails with `NonFinite` unless the value is finite.
    pub fn finite(self, what: &'static str) -> Result<Self> {
        if self.0.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFinite(what))
        }
    }

    pub fn abs(&self) -> Self {
        ExtReal(self.0.clone().abs())
    }

    pub fn recip(&self) -> Self {
        ExtReal(self.0.clone().recip())
    }

    pub fn sqrt(&self) -> Self {
        ExtReal(self.0.clone().sqrt())
    }

    pub fn exp(&self) -> Self {
        ExtReal(self.0.clone().exp())
    }

    pub fn exp_m1(&self) -> Self {
        ExtReal(self.0.clone().exp_m1())
    }

    pub fn ln(&self) -> Self {
        ExtReal(self.0.clone().ln())
    }

    pub fn ln_1p(&self) -> Self {
        ExtReal(self.0.clone().ln_1p())
    }

    pub fn powi(&self, e: i32) -> Self {
        ExtReal(self.0.clone().pow(e))
    }

    pub fn pow(&self, e: &ExtReal) -> Self {
        let p = self.prec().max(e.prec());
        ExtReal(Float::with_val(p, (&self.0).pow(&e.0)))
    }

    pub fn floor(&self) -> Self {
        ExtReal(self.0.clone().floor())
    }

    pub fn ceil(&self) -> Self {
        ExtReal(self.0.clone().ceil())
    }

    pub fn to_integer(&self) -> Option<Integer> {
        self.0.to_integer()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.0.to_rational()
    }

    pub fn max(&self, other: &ExtReal) -> ExtReal {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn min(&self, other: &ExtReal) -> ExtReal {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn total_cmp(&self, other: &ExtReal) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    /// Unit in the last place of `self` at its own precision. Zero has ulp equal to the
    /// smallest positive normal of the working exponent range.
    pub fn ulp(&self) -> ExtReal {
        let p = self.prec();
        match self.0.get_exp() {
            Some(e) => {
                let mut u = Float::with_val(p, 1);
                u <<= e - p as i32;
                ExtReal(u)
            }
            None => {
                let mut u = Float::with_val(p, 1);
                u <<= rug::float::exp_min();
                ExtReal(u)
            }
        }
    }

    /// Distance between `self` and `other` in units of the larger operand's ulp.
    pub fn ulps_from(&self, other: &ExtReal) -> f64 {
        let scale = self.abs().max(&other.abs());
        if scale.is_zero() {
            return 0.0;
        }
        ((self - other).abs() / scale.ulp()).to_f64()
    }

    /// |self − other| / max(|self|, |other|), zero when both vanish.
    pub fn rel_diff(&self, other: &ExtReal) -> ExtReal {
        let scale = self.abs().max(&other.abs());
        if scale.is_zero() {
            return ExtReal::zero(self.prec());
        }
        (self - other).abs() / scale
    }

    /// Decimal significant digits that represent the precision.
    pub fn decimal_digits(prec: u32) -> usize {
        ((prec as f64) * std::f64::consts::LOG10_2).ceil() as usize + 1
    }

    /// Scientific notation with `digits` significant digits, e.g. `-1.2500e-3`.
    pub fn to_sci(&self, digits: usize) -> String {
        let digits = digits.max(2);
        if self.0.is_zero() {
            return format!("0.{}e0", "0".repeat(digits - 1));
        }
        let (neg, d, exp) = self.0.to_sign_string_exp(10, Some(digits));
        let exp = exp.unwrap_or(1) - 1;
        let sign = if neg { "-" } else { "" };
        format!("{sign}{}.{}e{exp}", &d[..1], &d[1..])
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f
            .precision()
            .unwrap_or_else(|| ExtReal::decimal_digits(self.prec()));
        f.write_str(&self.to_sci(digits))
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci(24))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr<&ExtReal> for &ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: &ExtReal) -> ExtReal {
                let p = self.0.prec().max(rhs.0.prec());
                ExtReal(Float::with_val(p, (&self.0).$m(&rhs.0)))
            }
        }
        impl $tr<ExtReal> for ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: ExtReal) -> ExtReal {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&ExtReal> for ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: &ExtReal) -> ExtReal {
                (&self).$m(rhs)
            }
        }
        impl $tr<ExtReal> for &ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: ExtReal) -> ExtReal {
                self.$m(&rhs)
            }
        }
        impl $tr<i64> for &ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: i64) -> ExtReal {
                ExtReal(Float::with_val(self.0.prec(), (&self.0).$m(rhs)))
            }
        }
        impl $tr<i64> for ExtReal {
            type Output = ExtReal;
            fn $m(self, rhs: i64) -> ExtReal {
                ExtReal(self.0.$m(rhs))
            }
        }
        impl $atr<&ExtReal> for ExtReal {
            fn $am(&mut self, rhs: &ExtReal) {
                if rhs.0.prec() > self.0.prec() {
                    self.0.set_prec(rhs.0.prec());
                }
                self.0.$am(&rhs.0);
            }
        }
        impl $atr<ExtReal> for ExtReal {
            fn $am(&mut self, rhs: ExtReal) {
                self.$am(&rhs);
            }
        }
        impl $atr<i64> for ExtReal {
            fn $am(&mut self, rhs: i64) {
                self.0.$am(rhs);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign);
binop!(Sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, MulAssign, mul_assign);
binop!(Div, div, DivAssign, div_assign);

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal(-self.0)
    }
}

impl Neg for &ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal(-self.0.clone())
    }
}

impl PartialEq<i64> for ExtReal {
    fn eq(&self, other: &i64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<i64> for ExtReal {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

/// Sum of a sequence at the precision of `prec`.
pub fn sum<'a, I: IntoIterator<Item = &'a ExtReal>>(items: I, prec: u32) -> ExtReal {
    let mut acc = ExtReal::zero(prec);
    for x in items {
        acc += x;
    }
    acc
}

/// Exact binomial coefficient as an integer.
pub fn binomial(n: u32, k: u32) -> Integer {
    if k > n {
        return Integer::new();
    }
    Integer::from(Integer::binomial_u(n, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_is_decimal_exact_then_rounded() {
        let a = ExtReal::parse("0.1", 256).unwrap();
        let b = ExtReal::from_ratio(1, 10, 256);
        assert_eq!(a, b);
        assert!(ExtReal::parse("nan", 256).is_err());
        assert!(ExtReal::parse("abc", 256).is_err());
    }

    #[test]
    fn mixed_precision_uses_the_wider_operand() {
        let a = ExtReal::from_i64(1, 128);
        let b = ExtReal::from_i64(3, 256);
        assert_eq!((&a / &b).prec(), 256);
    }

    #[test]
    fn sci_formatting() {
        let x = ExtReal::from_ratio(-1, 800, 256);
        assert_eq!(x.to_sci(4), "-1.250e-3");
        assert_eq!(ExtReal::from_i64(120, 256).to_sci(3), "1.20e2");
        assert_eq!(ExtReal::zero(256).to_sci(3), "0.00e0");
        assert_eq!(ExtReal::from_f64(0.5, 64).to_sci(2), "5.0e-1");
    }

    #[test]
    fn ulp_of_one() {
        let one = ExtReal::one(128);
        let u = one.ulp();
        let expect = ExtReal::from_i64(2, 128).powi(-127);
        assert_eq!(u, expect);
    }
}
