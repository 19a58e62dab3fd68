//! Ground-field arithmetic.
//!
//! Every kernel in the crate is generic over [`Scalar`]. Two fields are
//! provided: [`Rational`], exact arbitrary-precision rationals used for all
//! verification work, and `f64`, a diagnostic mode for studying how the same
//! computations degrade in binary floating point.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A field of characteristic zero.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + AddAssign
    + SubAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    /// `true` when arithmetic is exact and equality to zero is decidable.
    const EXACT: bool;
    /// Name of the mode in external formats.
    const MODE: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(value: i64) -> Self;
    fn from_rational(value: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    /// Absolute value as a float, used for tolerance bookkeeping.
    fn magnitude(&self) -> f64;
    fn checked_div(&self, rhs: &Self) -> Result<Self>;
    /// Parses the external string form (`"p/q"`, `"p"`, decimal for floats).
    fn parse(text: &str) -> Result<Self>;

    fn recip(&self) -> Result<Self> {
        Self::one().checked_div(self)
    }

    /// `1/k!`.
    fn inverse_factorial(k: u32) -> Self {
        let mut fact = Self::one();
        for j in 2..=k {
            fact = fact * Self::from_i64(j as i64);
        }
        fact.recip().expect("k! is nonzero in characteristic zero")
    }

    /// `(-1)^k`.
    fn sign(k: usize) -> Self {
        if k % 2 == 0 {
            Self::one()
        } else {
            -Self::one()
        }
    }
}

/// Exact rational number in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), denom.into())))
    }

    pub fn integer(value: i64) -> Self {
        Rational(BigRational::from_integer(value.into()))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    /// Parses a plain decimal literal such as `-1.25` or `3e-2` exactly.
    ///
    /// This is how JSON numbers are admitted in rational mode.
    pub fn from_decimal_str(text: &str) -> Result<Self> {
        let bad = |reason| Error::ParseScalar {
            input: text.to_string(),
            reason,
        };
        let (mantissa, exponent) = match text.find(['e', 'E']) {
            Some(pos) => {
                let exp: i64 = text[pos + 1..]
                    .parse()
                    .map_err(|_| bad("invalid exponent"))?;
                (&text[..pos], exp)
            }
            None => (text, 0),
        };
        let (negative, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa),
        };
        let (int_part, frac_part) = match digits.split_once('.') {
            Some((i, f)) => (i, f),
            None => (digits, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad("no digits"));
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(bad("non-digit character"));
        }
        if exponent.unsigned_abs() > 4096 {
            return Err(bad("exponent out of range"));
        }
        let all_digits = format!("{int_part}{frac_part}");
        let mut numer = BigInt::from_str(&all_digits).map_err(|_| bad("no digits"))?;
        if negative {
            numer = -numer;
        }
        let scale = exponent - frac_part.len() as i64;
        let ten = BigInt::from(10u32);
        let value = if scale >= 0 {
            BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
        };
        Ok(Rational(value))
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Strict external form: optional `-`, decimal digits, optional `/`
    /// followed by a positive decimal denominator.
    fn from_str(text: &str) -> Result<Self> {
        let bad = |reason| Error::ParseScalar {
            input: text.to_string(),
            reason,
        };
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let (num, den) = match body.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (body, None),
        };
        let digits_only = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        if !digits_only(num) {
            return Err(bad("expected decimal digits"));
        }
        let mut numer = BigInt::from_str(num).map_err(|_| bad("expected decimal digits"))?;
        if negative {
            numer = -numer;
        }
        let denom = match den {
            Some(d) if digits_only(d) => {
                BigInt::from_str(d).map_err(|_| bad("expected decimal denominator"))?
            }
            Some(_) => return Err(bad("expected decimal denominator")),
            None => BigInt::one(),
        };
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational::integer(value)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $assign_trait for Rational {
            fn $assign_method(&mut self, rhs: Rational) {
                self.0.$assign_method(rhs.0);
            }
        }
        impl<'a> $assign_trait<&'a Rational> for Rational {
            fn $assign_method(&mut self, rhs: &'a Rational) {
                self.0.$assign_method(&rhs.0);
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign);
forward_binop!(Sub, sub, SubAssign, sub_assign);
forward_binop!(Mul, mul, MulAssign, mul_assign);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const MODE: &'static str = "rational";

    fn zero() -> Self {
        Rational(BigRational::zero())
    }

    fn one() -> Self {
        Rational(BigRational::one())
    }

    fn from_i64(value: i64) -> Self {
        Rational::integer(value)
    }

    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn magnitude(&self) -> f64 {
        self.0.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.0.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    fn parse(text: &str) -> Result<Self> {
        text.trim().parse()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_i64(value: i64) -> Self {
        value as f64
    }

    fn from_rational(value: &Rational) -> Self {
        value.to_f64()
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    // IEEE semantics apart from the explicit zero check.
    fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if *rhs == 0.0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self / rhs)
    }

    fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Ok(r) = text.parse::<Rational>() {
            return Ok(r.to_f64());
        }
        text.parse::<f64>().map_err(|_| Error::ParseScalar {
            input: text.to_string(),
            reason: "not a rational or float literal",
        })
    }
}
