//! Exact currency arithmetic.
//!
//! Budget accounting must be exact: the scheduler compares accumulated
//! reserves against VM costs, and float drift would flip affordability
//! decisions near the boundary. Amounts are kept as reduced `i64`
//! rationals; display rounding never feeds back into the arithmetic.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

/// A currency amount (or any exact decimal quantity, e.g. a budget factor).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Money(Rational64);

impl Money {
    pub const ZERO: Money = Money(Rational64::new_raw(0, 1));

    pub fn from_int(n: i64) -> Self {
        Money(Rational64::from_integer(n))
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Money(Rational64::new(numer, denom))
    }

    /// Parses a plain decimal literal such as `"0.0116"` or `"42"` exactly.
    pub fn parse_decimal(s: &str) -> Result<Self, MoneyParseError> {
        let s = s.trim();
        let (sign, digits) = match s.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1i64, s),
        };
        let (int_part, frac_part) = match digits.split_once('.') {
            Some((i, f)) => (i, f),
            None => (digits, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(MoneyParseError(s.to_string()));
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || frac_part.len() > 12
        {
            return Err(MoneyParseError(s.to_string()));
        }
        let int: i64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| MoneyParseError(s.to_string()))?
        };
        let mut numer = int;
        let mut denom = 1i64;
        for c in frac_part.chars() {
            numer = numer
                .checked_mul(10)
                .and_then(|n| n.checked_add((c as u8 - b'0') as i64))
                .ok_or_else(|| MoneyParseError(s.to_string()))?;
            denom *= 10;
        }
        Ok(Money(Rational64::new(sign * numer, denom)))
    }

    /// Recovers the decimal an `f64` was parsed from, up to 9 fractional
    /// digits. Good enough for catalog prices; exact literals should go
    /// through [`Money::parse_decimal`].
    pub fn from_f64_decimal(v: f64) -> Result<Self, MoneyParseError> {
        if !v.is_finite() || v.abs() > 4.0e15 {
            return Err(MoneyParseError(v.to_string()));
        }
        let scaled = (v * 1.0e9).round();
        Ok(Money(Rational64::new(scaled as i64, 1_000_000_000)))
    }

    pub fn to_f64(self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_negative(self) -> bool {
        self.0.is_negative()
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn min(self, other: Money) -> Money {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Money) -> Money {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Round half away from zero to a whole unit; display policy only.
    pub fn round_half_up(self) -> i64 {
        let doubled = self.0 * Rational64::from_integer(2);
        let floor2 = doubled.floor().to_integer();
        if self.0.is_negative() {
            -Money((-self.0).into()).round_half_up()
        } else {
            // floor((2x + 1) / 2) implements half-up for x >= 0
            (floor2 + 1).div_euclid(2)
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid decimal amount: {0}")]
pub struct MoneyParseError(String);

impl fmt::Display for Money {
    /// Exact decimal when the denominator divides a power of ten,
    /// otherwise rounded to 6 fractional digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.0.reduced();
        let mut denom = *r.denom();
        if denom == 1 {
            return write!(f, "{}", r.numer());
        }
        let mut digits = 0u32;
        while denom % 2 == 0 {
            denom /= 2;
            digits += 1;
        }
        let mut pow5 = 0u32;
        while denom % 5 == 0 {
            denom /= 5;
            pow5 += 1;
        }
        if denom == 1 && digits.max(pow5) <= 12 {
            let digits = digits.max(pow5);
            let scale = 10i64.pow(digits);
            let scaled = (r * Rational64::from_integer(scale)).to_integer();
            let sign = if scaled < 0 { "-" } else { "" };
            let abs = scaled.abs();
            let int = abs / scale;
            let frac = abs % scale;
            let frac_str = format!("{:0>width$}", frac, width = digits as usize);
            let frac_str = frac_str.trim_end_matches('0');
            if frac_str.is_empty() {
                write!(f, "{sign}{int}")
            } else {
                write!(f, "{sign}{int}.{frac_str}")
            }
        } else {
            write!(f, "{:.6}", self.to_f64())
        }
    }
}

impl FromStr for Money {
    type Err = MoneyParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Money::parse_decimal(s)
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl Mul for Money {
    type Output = Money;
    fn mul(self, rhs: Money) -> Money {
        Money(self.0 * rhs.0)
    }
}

impl Mul<u64> for Money {
    type Output = Money;
    fn mul(self, rhs: u64) -> Money {
        Money(self.0 * Rational64::from_integer(rhs as i64))
    }
}

impl Div<u64> for Money {
    type Output = Money;
    fn div(self, rhs: u64) -> Money {
        Money(self.0 / Rational64::from_integer(rhs as i64))
    }
}

impl Div for Money {
    type Output = Money;
    fn div(self, rhs: Money) -> Money {
        Money(self.0 / rhs.0)
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Money {
    fn sub_assign(&mut self, rhs: Money) {
        self.0 -= rhs.0;
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, |a, b| a + b)
    }
}

impl From<i64> for Money {
    fn from(n: i64) -> Money {
        Money::from_int(n)
    }
}

impl Serialize for Money {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.to_f64())
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Money, D::Error> {
        struct MoneyVisitor;
        impl Visitor<'_> for MoneyVisitor {
            type Value = Money;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a decimal number or string")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Money, E> {
                Ok(Money::from_int(v as i64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Money, E> {
                Ok(Money::from_int(v))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Money, E> {
                Money::from_f64_decimal(v).map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Money, E> {
                Money::parse_decimal(v).map_err(E::custom)
            }
        }
        deserializer.deserialize_any(MoneyVisitor)
    }
}
