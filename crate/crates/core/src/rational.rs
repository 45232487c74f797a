//! Exact rationals. `BigRational` keeps lowest terms and a positive
//! denominator, so this module only adds parsing, printing and a few
//! shorthands.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Accepts `7`, `-7`, `3/4`, `-3/4`, `0.125`, `-.5`, `2.`. Decimals are exact.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let bad = || Error::Parse(format!("malformed rational {text:?}"));
    let s = text.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_int(p.trim()).ok_or_else(bad)?;
        let q = parse_int(q.trim()).ok_or_else(bad)?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let (neg, whole) = match whole.strip_prefix('-') {
            Some(w) => (true, w),
            None => (false, whole.strip_prefix('+').unwrap_or(whole)),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !whole.bytes().all(|c| c.is_ascii_digit()) || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{whole}{frac}");
        let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    parse_int(s).map(Rational::from_integer).ok_or_else(bad)
}

fn parse_int(s: &str) -> Option<BigInt> {
    let body = s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// `"p/q"`, or just `"p"` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn from_json(v: &serde_json::Value) -> Result<Rational, Error> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(BigInt::from(i)))
            } else if let Some(u) = n.as_u64() {
                Ok(Rational::from_integer(BigInt::from(u)))
            } else {
                Err(Error::Parse(format!(
                    "non-integer JSON number {n}; write fractions as strings like \"1/3\" or \"0.25\""
                )))
            }
        }
        other => Err(Error::Parse(format!("expected a rational, got {other}"))),
    }
}

pub fn to_json(r: &Rational) -> serde_json::Value {
    serde_json::Value::String(fmt_rational(r))
}

pub fn floor(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn ceil(r: &Rational) -> BigInt {
    r.numer().div_ceil(r.denom())
}

pub fn is_nonneg(r: &Rational) -> bool {
    !r.is_negative()
}

pub fn sum<'a>(it: impl IntoIterator<Item = &'a Rational>) -> Rational {
    it.into_iter().fold(Rational::zero(), |acc, x| acc + x)
}

pub fn min(a: Rational, b: Rational) -> Rational {
    if a <= b { a } else { b }
}

pub fn max(a: Rational, b: Rational) -> Rational {
    if a >= b { a } else { b }
}

/// Usize view of a small non-negative integer; panics otherwise.
pub fn to_usize(n: &BigInt) -> usize {
    use num_traits::ToPrimitive;
    n.to_usize().expect("integer out of usize range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational(" -3/6 ").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("-.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("2.").unwrap(), int(2));
        assert_eq!(parse_rational("0.3").unwrap(), rat(3, 10));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "/", "1/0", "1//2", "a", "1.2.3", "1e5", ".", "--1", "1/-", "0x10"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn prints_lowest_terms() {
        assert_eq!(fmt_rational(&rat(6, -4)), "-3/2");
        assert_eq!(fmt_rational(&int(5)), "5");
        assert_eq!(parse_rational(&fmt_rational(&rat(22, 7))).unwrap(), rat(22, 7));
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(floor(&rat(-1, 2)), BigInt::from(-1));
        assert_eq!(ceil(&rat(-1, 2)), BigInt::from(0));
        assert_eq!(floor(&rat(7, 2)), BigInt::from(3));
        assert_eq!(ceil(&int(3)), BigInt::from(3));
    }
}
