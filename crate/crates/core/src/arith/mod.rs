//! Exact scalars: arbitrary-precision rationals, elements of cyclotomic
//! fields, and the small exact exponent types used as series keys.

mod cyclotomic;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

pub use cyclotomic::{cyclotomic_polynomial, euler_phi, root_of_unity, CycQ};

/// Arbitrary-precision rational; always normalised (positive denominator,
/// coprime parts).
pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

pub(crate) fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("integer exceeds i64 range")
}

/// A small exact rational with `i64` parts, used for exponents of `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QExp {
    num: i64,
    den: i64,
}

impl QExp {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = num.gcd(&den);
        let s = if den < 0 { -1 } else { 1 };
        QExp {
            num: s * num / g,
            den: s * den / g,
        }
    }

    pub fn int(n: i64) -> Self {
        QExp { num: n, den: 1 }
    }

    pub fn zero() -> Self {
        QExp::int(0)
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    pub fn from_rational(x: &Rational) -> Self {
        QExp::new(to_i64(x.numer()), to_i64(x.denom()))
    }

    pub fn to_rational(self) -> Rational {
        rat(self.num, self.den)
    }

    /// Largest integer `k` with `k / scale <= self`.
    pub fn floor_at(self, scale: i64) -> i64 {
        Integer::div_floor(&(self.num * scale), &self.den)
    }

    /// Smallest integer `k` with `k / scale >= self`.
    pub fn ceil_at(self, scale: i64) -> i64 {
        Integer::div_ceil(&(self.num * scale), &self.den)
    }

    pub fn floor(self) -> i64 {
        Integer::div_floor(&self.num, &self.den)
    }

    pub fn is_negative(self) -> bool {
        self.num < 0
    }
}

impl Ord for QExp {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        ((self.num as i128) * (other.den as i128)).cmp(&((other.num as i128) * (self.den as i128)))
    }
}

impl PartialOrd for QExp {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for QExp {
    type Output = QExp;
    fn add(self, o: QExp) -> QExp {
        QExp::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }
}

impl Sub for QExp {
    type Output = QExp;
    fn sub(self, o: QExp) -> QExp {
        self + (-o)
    }
}

impl Neg for QExp {
    type Output = QExp;
    fn neg(self) -> QExp {
        QExp {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Mul for QExp {
    type Output = QExp;
    fn mul(self, o: QExp) -> QExp {
        QExp::new(self.num * o.num, self.den * o.den)
    }
}

impl Mul<i64> for QExp {
    type Output = QExp;
    fn mul(self, k: i64) -> QExp {
        QExp::new(self.num * k, self.den)
    }
}

impl fmt::Display for QExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl std::str::FromStr for QExp {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        Ok(QExp::from_rational(&crate::error::parse_rational(s)?))
    }
}

/// An element of `Z/2`, stored as twice its value. Used for `y`-exponents,
/// theta indices `m` and labels `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt {
    pub num2: i64,
}

pub type YExp = HalfInt;

impl HalfInt {
    pub const fn from_num2(num2: i64) -> Self {
        HalfInt { num2 }
    }

    pub const fn int(n: i64) -> Self {
        HalfInt { num2: 2 * n }
    }

    pub fn is_integral(self) -> bool {
        self.num2 % 2 == 0
    }

    pub fn to_qexp(self) -> QExp {
        QExp::new(self.num2, 2)
    }

    pub fn to_rational(self) -> Rational {
        rat(self.num2, 2)
    }

    pub fn from_rational(x: &Rational) -> crate::Result<Self> {
        let twice = x * int(2);
        if !twice.is_integer() {
            return Err(crate::Error::Parse(format!("{x} is not a half-integer")));
        }
        Ok(HalfInt::from_num2(to_i64(twice.numer())))
    }

    pub fn abs(self) -> Self {
        HalfInt::from_num2(self.num2.abs())
    }

    pub fn is_positive(self) -> bool {
        self.num2 > 0
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt::from_num2(self.num2 + o.num2)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt::from_num2(self.num2 - o.num2)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_num2(-self.num2)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num2 % 2 == 0 {
            write!(f, "{}", self.num2 / 2)
        } else {
            write!(f, "{}/2", self.num2)
        }
    }
}

impl std::str::FromStr for HalfInt {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        HalfInt::from_rational(&crate::error::parse_rational(s)?)
    }
}

pub(crate) fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}



#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qexp_normalises_and_orders() {
        assert_eq!(QExp::new(6, -4), QExp::new(-3, 2));
        assert!(QExp::new(1, 8) < QExp::new(1, 6));
        assert_eq!(QExp::new(1, 24) + QExp::new(1, 8), QExp::new(1, 6));
        assert_eq!(QExp::new(17, 8).floor_at(1), 2);
        assert_eq!(QExp::new(-1, 8).floor_at(24), -3);
        assert_eq!(QExp::new(-1, 8).floor(), -1);
    }

    #[test]
    fn half_integers_parse() {
        assert_eq!("5/2".parse::<HalfInt>().unwrap(), HalfInt::from_num2(5));
        assert_eq!("-3".parse::<HalfInt>().unwrap(), HalfInt::int(-3));
        assert!("1/3".parse::<HalfInt>().is_err());
        assert_eq!(HalfInt::from_num2(-7).to_string(), "-7/2");
    }
}
