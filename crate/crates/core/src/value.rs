//! Exact nonnegative rational values.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// Literals with exponents beyond this are refused rather than expanded.
const MAX_EXPONENT: i64 = 4096;

/// A nonnegative rational number with arbitrary-precision numerator and
/// denominator. Every valuation, bundle value and maximin share in the crate
/// is a `Value`; nothing is ever rounded.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Value(BigRational);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueError {
    Empty,
    Negative,
    Malformed,
    ZeroDenominator,
    ExponentTooLarge,
}

impl fmt::Display for ValueError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            ValueError::Empty => "empty numeric literal",
            ValueError::Negative => "value must be nonnegative",
            ValueError::Malformed => "expected an integer, decimal, or p/q literal",
            ValueError::ZeroDenominator => "zero denominator",
            ValueError::ExponentTooLarge => "exponent out of range",
        };
        f.write_str(msg)
    }
}

impl std::error::Error for ValueError {}

impl Value {
    pub fn zero() -> Self {
        Value(BigRational::zero())
    }

    pub fn one() -> Self {
        Value(BigRational::one())
    }

    pub fn from_integer(n: u64) -> Self {
        Value(BigRational::from_integer(BigInt::from(n)))
    }

    /// `numer / denom`. Panics if `denom` is zero.
    pub fn from_ratio(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "zero denominator");
        Value(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_biguint_ratio(numer: BigUint, denom: BigUint) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        Value(BigRational::new(
            BigInt::from_biguint(Sign::Plus, numer),
            BigInt::from_biguint(Sign::Plus, denom),
        ))
    }

    /// Wraps a rational, refusing negatives.
    pub fn from_rational(r: BigRational) -> Option<Self> {
        if r.is_negative() {
            None
        } else {
            Some(Value(r))
        }
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn numer_biguint(&self) -> BigUint {
        self.0.numer().magnitude().clone()
    }

    pub fn denom_biguint(&self) -> BigUint {
        self.0.denom().magnitude().clone()
    }

    /// Machine form `p/q`, always with an explicit denominator.
    pub fn to_ratio_string(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }

    /// Display form rounded half-up to `sig` significant digits. Never used
    /// in comparisons.
    pub fn to_decimal(&self, sig: usize) -> String {
        let sig = sig.max(1);
        if self.0.is_zero() {
            return "0".to_string();
        }
        let ten = BigInt::from(10u32);
        let numer = self.0.numer();
        let denom = self.0.denom();

        // exponent e with 10^e <= x < 10^(e+1)
        let mut e = numer.to_string().len() as i64 - denom.to_string().len() as i64;
        let pow10 = |k: i64| -> BigRational {
            if k >= 0 {
                BigRational::from_integer(Pow::pow(&ten, k as u64))
            } else {
                BigRational::new(BigInt::one(), Pow::pow(&ten, (-k) as u64))
            }
        };
        while pow10(e) > self.0 {
            e -= 1;
        }
        while pow10(e + 1) <= self.0 {
            e += 1;
        }

        let shift = sig as i64 - 1 - e;
        let scaled = &self.0 * pow10(shift);
        let (q, r) = scaled.numer().div_rem(scaled.denom());
        let mut digits = q;
        if r * BigInt::from(2u32) >= *scaled.denom() {
            digits += BigInt::one();
        }
        if digits.to_string().len() > sig {
            digits /= &ten;
            e += 1;
        }
        let digits = digits.to_string();
        debug_assert_eq!(digits.len(), sig);

        let mut out = if e < 0 {
            let mut s = String::from("0.");
            for _ in 0..(-e - 1) {
                s.push('0');
            }
            s.push_str(&digits);
            s
        } else if (e as usize) + 1 >= sig {
            let mut s = digits.clone();
            for _ in 0..(e as usize + 1 - sig) {
                s.push('0');
            }
            return s;
        } else {
            let split = e as usize + 1;
            format!("{}.{}", &digits[..split], &digits[split..])
        };
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }

    /// `self * k` for a small integer `k`.
    pub fn scale(&self, k: u64) -> Value {
        Value(&self.0 * BigRational::from_integer(BigInt::from(k)))
    }

    /// Parses a nonnegative literal: an integer (`3`), a decimal with an
    /// optional exponent (`0.98`, `2.5e-3`), or a fraction (`1/100`).
    pub fn parse_literal(text: &str) -> Result<Value, ValueError> {
        let s = text.trim();
        if s.is_empty() {
            return Err(ValueError::Empty);
        }
        if s.starts_with('-') {
            // "-0" and friends are still rejected; negatives are never valid input.
            return Err(ValueError::Negative);
        }
        if let Some((p, q)) = s.split_once('/') {
            let p = parse_digits(p)?;
            let q = parse_digits(q)?;
            if q.is_zero() {
                return Err(ValueError::ZeroDenominator);
            }
            return Ok(Value(BigRational::new(p, q)));
        }

        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(pos) => {
                let exp_text = &s[pos + 1..];
                let (neg, digits) = match exp_text.as_bytes().first() {
                    Some(b'-') => (true, &exp_text[1..]),
                    Some(b'+') => (false, &exp_text[1..]),
                    _ => (false, exp_text),
                };
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(ValueError::Malformed);
                }
                let mag: i64 = digits
                    .trim_start_matches('0')
                    .parse::<i64>()
                    .or_else(|_| {
                        if digits.trim_start_matches('0').is_empty() {
                            Ok(0)
                        } else {
                            Err(ValueError::ExponentTooLarge)
                        }
                    })?;
                if mag > MAX_EXPONENT {
                    return Err(ValueError::ExponentTooLarge);
                }
                (&s[..pos], if neg { -mag } else { mag })
            }
            None => (s, 0),
        };

        let (int_part, frac_part) = match mantissa.split_once('.') {
            Some((i, f)) => (i, f),
            None => (mantissa, ""),
        };
        if int_part.is_empty() || (mantissa.contains('.') && frac_part.is_empty()) {
            return Err(ValueError::Malformed);
        }
        let mut all_digits = String::with_capacity(int_part.len() + frac_part.len());
        all_digits.push_str(int_part);
        all_digits.push_str(frac_part);
        let numer = parse_digits(&all_digits)?;
        let shift = exponent - frac_part.len() as i64;
        if shift.abs() > MAX_EXPONENT + 64 && !numer.is_zero() {
            return Err(ValueError::ExponentTooLarge);
        }
        let ten = BigInt::from(10u32);
        let r = if shift >= 0 {
            BigRational::from_integer(numer * Pow::pow(&ten, shift as u64))
        } else {
            BigRational::new(numer, Pow::pow(&ten, (-shift) as u64))
        };
        Ok(Value(r))
    }
}

fn parse_digits(s: &str) -> Result<BigInt, ValueError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ValueError::Malformed);
    }
    BigInt::parse_bytes(s.as_bytes(), 10).ok_or(ValueError::Malformed)
}

impl FromStr for Value {
    type Err = ValueError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Value::parse_literal(s)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Add for Value {
    type Output = Value;
    fn add(self, rhs: Value) -> Value {
        Value(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Value> for &'a Value {
    type Output = Value;
    fn add(self, rhs: &'a Value) -> Value {
        Value(&self.0 + &rhs.0)
    }
}

impl<'a> Sum<&'a Value> for Value {
    fn sum<I: Iterator<Item = &'a Value>>(iter: I) -> Value {
        iter.cloned().sum()
    }
}

/// Pairwise reduction; a left fold over many unrelated denominators grows
/// the running sum at every step and turns quadratic.
impl Sum for Value {
    fn sum<I: Iterator<Item = Value>>(iter: I) -> Value {
        let mut level: Vec<Value> = iter.collect();
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            let mut it = level.into_iter();
            while let Some(a) = it.next() {
                next.push(match it.next() {
                    Some(b) => a + b,
                    None => a,
                });
            }
            level = next;
        }
        level.pop().unwrap_or_else(Value::zero)
    }
}

/// Saturating at zero; a `Value` can never go negative.
impl<'a> Sub<&'a Value> for &'a Value {
    type Output = Value;
    fn sub(self, rhs: &'a Value) -> Value {
        if rhs.0 >= self.0 {
            Value::zero()
        } else {
            Value(&self.0 - &rhs.0)
        }
    }
}

impl<'a> Mul<&'a Value> for &'a Value {
    type Output = Value;
    fn mul(self, rhs: &'a Value) -> Value {
        Value(&self.0 * &rhs.0)
    }
}

/// Panics on division by zero.
impl<'a> Div<&'a Value> for &'a Value {
    type Output = Value;
    fn div(self, rhs: &'a Value) -> Value {
        assert!(!rhs.is_zero(), "division by zero value");
        Value(&self.0 / &rhs.0)
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_ratio_string())
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(ValueVisitor)
    }
}

struct ValueVisitor;

impl<'de> Visitor<'de> for ValueVisitor {
    type Value = Value;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a nonnegative integer or a decimal/fraction string")
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Value, E> {
        Ok(Value::from_integer(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Value, E> {
        if v < 0 {
            Err(E::custom(ValueError::Negative))
        } else {
            Ok(Value::from_integer(v as u64))
        }
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Value, E> {
        Value::parse_literal(v).map_err(E::custom)
    }

    fn visit_f64<E: de::Error>(self, _v: f64) -> Result<Value, E> {
        Err(E::custom(
            "binary floating point values are not accepted; quote the decimal",
        ))
    }
}
