//! Exact rational helpers shared by every module.
//!
//! All objective values, weights and parameter vectors are [`Q`]
//! (arbitrary-precision rationals). Floats appear only as logarithm
//! estimates that are always corrected by an exact comparison.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"-0.125"` or `"1e6"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let t = s.trim();
    let bad = || Error::Schema(format!("not a rational number: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = t[pos + 1..].parse().map_err(|_| bad())?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all = format!("{int_part}{frac_part}");
    let n: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| bad())? };
    let scale = exp - frac_part.len() as i32;
    let ten = Q::from_integer(BigInt::from(10));
    let mut v = Q::from_integer(n) * pow_q(&ten, scale as i64);
    if neg {
        v = -v;
    }
    Ok(v)
}

/// Canonical `"p/q"` rendering used in every serialized document.
pub fn fmt_q(v: &Q) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

pub fn pow_q(base: &Q, exp: i64) -> Q {
    if exp == 0 {
        return Q::one();
    }
    let mut result = Q::one();
    let mut b = if exp < 0 { base.recip() } else { base.clone() };
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    result
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn ln_bigint(v: &BigInt) -> f64 {
    debug_assert!(v.sign() == Sign::Plus);
    let bits = v.bits();
    if bits <= 1000 {
        v.to_f64().map(f64::ln).unwrap_or(f64::NAN)
    } else {
        let shift = bits - 64;
        let top: BigInt = v >> shift;
        top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Natural logarithm of a positive rational, accurate for huge numerators
/// and denominators.
pub fn ln_q(v: &Q) -> f64 {
    assert!(v.is_positive(), "ln of non-positive rational");
    ln_bigint(v.numer()) - ln_bigint(v.denom())
}

/// Lossy conversion; `None` when the value is outside the finite f64 range.
pub fn to_f64(v: &Q) -> Option<f64> {
    let f = v.to_f64()?;
    if f.is_finite() {
        Some(f)
    } else {
        None
    }
}

/// Exact value of a finite float.
pub fn from_f64(f: f64) -> Q {
    Q::from_float(f).expect("finite float")
}

/// Largest integer `m` with `base^m <= x` (exact). `base > 1`, `x > 0`.
pub fn floor_log(x: &Q, base: &Q) -> i64 {
    assert!(x.is_positive() && *base > Q::one());
    let est = (ln_q(x) / ln_q(base)).floor();
    let mut m = if est.is_finite() { est as i64 } else { 0 };
    let mut p = pow_q(base, m);
    while p > *x {
        m -= 1;
        p /= base;
    }
    loop {
        let next = &p * base;
        if next > *x {
            break;
        }
        p = next;
        m += 1;
    }
    m
}

/// A rational lower approximation `r` of `sqrt(x)`; exact when `x` is the
/// square of a rational, otherwise `sqrt(x) - 10^-digits < r < sqrt(x)`.
pub fn sqrt_floor(x: &Q, digits: u32) -> Q {
    assert!(!x.is_negative());
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        return Q::new(rn, rd);
    }
    let scale = BigInt::from(10).pow(digits);
    // sqrt(n/d) = sqrt(n*d)/d
    let nd = n * d * &scale * &scale;
    let root = nd.sqrt();
    Q::new(root, d * scale)
}

pub fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Q>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Serde adapter writing rationals as `"p/q"` strings. Accepts strings or
/// JSON integers when reading.
pub mod serde_q {
    use super::*;
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(v))
    }

    pub(crate) struct QVisitor;

    impl<'de> Visitor<'de> for QVisitor {
        type Value = Q;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a rational as \"p/q\" string or integer")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Q, E> {
            parse_q(v).map_err(E::custom)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Q, E> {
            Ok(q(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Q, E> {
            Ok(Q::from_integer(BigInt::from(v)))
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Q, E> {
            // Decimal literals go through their shortest representation.
            parse_q(&v.to_string()).map_err(E::custom)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        d.deserialize_any(QVisitor)
    }
}

/// Optional rational as `"p/q"` or absent.
pub mod serde_q_opt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_some(&fmt_q(x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Q>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super::serde_q")] Q);
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

pub mod serde_q_vec {
    use super::*;
    use serde::de::{Deserializer, SeqAccess, Visitor};
    use serde::ser::{SerializeSeq, Serializer};

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&fmt_q(x))?;
        }
        seq.end()
    }

    struct Elem(Q);

    impl<'de> serde::Deserialize<'de> for Elem {
        fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
            d.deserialize_any(super::serde_q::QVisitor).map(Elem)
        }
    }

    struct VecVisitor;

    impl<'de> Visitor<'de> for VecVisitor {
        type Value = Vec<Q>;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a list of rationals")
        }

        fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Vec<Q>, A::Error> {
            let mut out = Vec::new();
            while let Some(Elem(v)) = seq.next_element()? {
                out.push(v);
            }
            Ok(out)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        d.deserialize_seq(VecVisitor)
    }
}
