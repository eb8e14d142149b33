//! Exact rational scalars and their canonical text form.
//!
//! All polytope data in this crate is exact: scalars are [`BigRational`]
//! values, and every serialized scalar is the canonical string `"p/q"` in
//! lowest terms with positive denominator (just `"p"` when the value is an
//! integer). This module holds the parse/format pair plus the few numeric
//! helpers shared by the rest of the crate.

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use thiserror::Error;

/// Error produced when a string is not a canonical rational.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {text:?}: {reason}")]
pub struct ParseRatError {
    pub text: String,
    pub reason: String,
}

/// Parses `"p/q"` or `"p"` into an exact rational.
///
/// # Example
/// ```
/// use transpoly::rat;
/// let half = rat::parse("3/6").unwrap();
/// assert_eq!(rat::format(&half), "1/2");
/// ```
pub fn parse(s: &str) -> Result<BigRational, ParseRatError> {
    let err = |reason: &str| ParseRatError {
        text: s.to_string(),
        reason: reason.to_string(),
    };
    let t = s.trim();
    if t.is_empty() {
        return Err(err("empty string"));
    }
    match t.split('/').collect::<Vec<_>>().as_slice() {
        [num] => {
            let p: BigInt = num
                .parse()
                .map_err(|_| err("numerator is not an integer"))?;
            Ok(BigRational::from_integer(p))
        }
        [num, den] => {
            let p: BigInt = num
                .parse()
                .map_err(|_| err("numerator is not an integer"))?;
            let q: BigInt = den
                .parse()
                .map_err(|_| err("denominator is not an integer"))?;
            if q.is_zero() {
                return Err(err("denominator is zero"));
            }
            Ok(BigRational::new(p, q))
        }
        _ => Err(err("expected \"p\" or \"p/q\"")),
    }
}

/// Formats a rational in lowest terms: `"p/q"`, or `"p"` for integers.
pub fn format(r: &BigRational) -> String {
    r.to_string()
}

/// Convenience constructor for small rationals.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Convenience constructor for small integers as rationals.
pub fn int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

/// Least common multiple of the denominators of the given rationals
/// (all in lowest terms, so this is the least `K` with `K * x` integral
/// for every `x`). Returns 1 for an empty iterator.
pub fn lcm_of_denominators<'a, I: IntoIterator<Item = &'a BigRational>>(values: I) -> BigInt {
    let mut acc = BigInt::one();
    for v in values {
        acc = acc.lcm(v.denom());
    }
    acc
}

/// Exact integer power of a nonzero rational, allowing negative exponents.
///
/// # Panics
/// Panics if `base` is zero and `exp` is negative.
pub fn pow(base: &BigRational, exp: i64) -> BigRational {
    if exp == 0 {
        return BigRational::one();
    }
    let mag =
        base.pow(u32::try_from(exp.unsigned_abs()).expect("exponent magnitude exceeds u32") as i32);
    if exp > 0 {
        mag
    } else {
        assert!(!mag.is_zero(), "negative power of zero");
        mag.recip()
    }
}

/// True when the rational is an integer.
pub fn is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}

/// Exact factorial as a big integer.
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// Floor of a rational as a rational (largest integer `<= r`).
pub fn floor(r: &BigRational) -> BigRational {
    r.floor()
}

/// Ceiling of a rational as a rational (smallest integer `>= r`).
pub fn ceil(r: &BigRational) -> BigRational {
    r.ceil()
}

/// Sign of a rational as -1, 0, or +1.
pub fn signum(r: &BigRational) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// True when `r` is strictly positive.
pub fn is_positive(r: &BigRational) -> bool {
    r.is_positive()
}

/// Serde adapter: a `BigRational` field as a canonical `"p/q"` string.
pub mod serde_rat {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigRational, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(de)?;
        parse(&s).map_err(D::Error::custom)
    }
}

/// Serde adapter: a `Vec<BigRational>` field as canonical strings.
pub mod serde_rat_vec {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[BigRational], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(values.iter().map(format))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<BigRational>, D::Error> {
        let strings = Vec::<String>::deserialize(de)?;
        strings
            .iter()
            .map(|s| parse(s).map_err(D::Error::custom))
            .collect()
    }
}

/// Serde adapter: a row-major `Vec<Vec<BigRational>>` field as canonical strings.
pub mod serde_rat_matrix {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        values: &[Vec<BigRational>],
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        ser.collect_seq(
            values
                .iter()
                .map(|row| row.iter().map(format).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<Vec<Vec<BigRational>>, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(de)?;
        rows.iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse(s).map_err(D::Error::custom))
                    .collect()
            })
            .collect()
    }
}
