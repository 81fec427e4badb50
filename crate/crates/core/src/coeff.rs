//! Coefficient rings: exact rationals and Laurent polynomials in one formal variable `n`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Formats a rational as `p/q` (or `p` when integral), never with a decimal point.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not an exact fraction: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// The operations an [`Element`](crate::element::Element) needs from its coefficients.
pub trait Coeff:
    Clone
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_q(x: Q) -> Self;
    fn scale(&self, x: &Q) -> Self;
    /// Name used in serialized elements.
    fn ring_name() -> &'static str;
    fn to_json(&self) -> serde_json::Value;
    fn from_json(v: &serde_json::Value) -> Result<Self>;
}

impl Coeff for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_q(x: Q) -> Self {
        x
    }
    fn scale(&self, x: &Q) -> Self {
        self * x
    }
    fn ring_name() -> &'static str {
        "Q"
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(fmt_q(self))
    }
    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::String(s) => parse_q(s),
            other => Err(Error::Parse(format!("expected fraction string, got {other}"))),
        }
    }
}

/// A Laurent polynomial `sum_k c_k n^k` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Laurent {
    terms: BTreeMap<i32, Q>,
}

impl Laurent {
    pub fn monomial(c: Q, power: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !Zero::is_zero(&c) {
            terms.insert(power, c);
        }
        Laurent { terms }
    }

    /// The formal variable `n`.
    pub fn var() -> Self {
        Self::monomial(One::one(), 1)
    }

    pub fn coeff(&self, power: i32) -> Q {
        self.terms.get(&power).cloned().unwrap_or_else(Zero::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Q)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn min_power(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn pow_var(power: i32) -> Self {
        Self::monomial(One::one(), power)
    }

    /// Substitutes a concrete nonzero rational for `n`.
    pub fn eval(&self, n: &Q) -> Q {
        let mut acc = <Q as Zero>::zero();
        for (k, c) in &self.terms {
            let p = if *k >= 0 {
                num_traits::pow(n.clone(), *k as usize)
            } else {
                num_traits::pow(n.recip(), (-*k) as usize)
            };
            acc += c * p;
        }
        acc
    }

    fn add_term(&mut self, k: i32, c: Q) {
        let e = self.terms.entry(k).or_insert_with(Zero::zero);
        *e += c;
        if Zero::is_zero(e) {
            self.terms.remove(&k);
        }
    }
}

impl Add for Laurent {
    type Output = Laurent;
    fn add(mut self, rhs: Laurent) -> Laurent {
        for (k, c) in rhs.terms {
            self.add_term(k, c);
        }
        self
    }
}

impl Sub for Laurent {
    type Output = Laurent;
    fn sub(self, rhs: Laurent) -> Laurent {
        self + (-rhs)
    }
}

impl Neg for Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent { terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect() }
    }
}

impl Mul for Laurent {
    type Output = Laurent;
    fn mul(self, rhs: Laurent) -> Laurent {
        let mut out = Laurent::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a + b, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            write!(f, "{}", fmt_q(&c.abs()))?;
            if *k != 0 {
                write!(f, "*n^{k}")?;
            }
        }
        Ok(())
    }
}

impl Coeff for Laurent {
    fn zero() -> Self {
        Laurent::default()
    }
    fn one() -> Self {
        Laurent::monomial(One::one(), 0)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_q(x: Q) -> Self {
        Laurent::monomial(x, 0)
    }
    fn scale(&self, x: &Q) -> Self {
        if Zero::is_zero(x) {
            return Laurent::default();
        }
        Laurent { terms: self.terms.iter().map(|(k, c)| (*k, c * x)).collect() }
    }
    fn ring_name() -> &'static str {
        "Laurent(n)"
    }
    fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .terms
            .iter()
            .map(|(k, c)| (k.to_string(), serde_json::Value::String(fmt_q(c))))
            .collect();
        serde_json::json!({ "laurent": map })
    }
    fn from_json(v: &serde_json::Value) -> Result<Self> {
        let map = v
            .get("laurent")
            .and_then(|m| m.as_object())
            .ok_or_else(|| Error::Parse(format!("expected {{\"laurent\": ...}}, got {v}")))?;
        let mut out = Laurent::default();
        for (k, c) in map {
            let k: i32 = k.parse().map_err(|_| Error::Parse(format!("bad exponent {k:?}")))?;
            let c = c
                .as_str()
                .ok_or_else(|| Error::Parse("laurent coefficient must be a string".into()))?;
            out.add_term(k, parse_q(c)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_strings_round_trip() {
        for s in ["1/48", "-1/5760", "0", "7", "-3/2"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert!(parse_q("0.5").is_err());
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn laurent_arithmetic() {
        let n = Laurent::var();
        let inv = Laurent::pow_var(-1);
        let p = (n.clone() + inv.clone()) * (n.clone() - inv);
        assert_eq!(p.coeff(2), qi(1));
        assert_eq!(p.coeff(0), qi(0));
        assert_eq!(p.coeff(-2), qi(-1));
        assert_eq!(p.eval(&qi(2)), q(15, 4));
        let j = p.to_json();
        assert_eq!(Laurent::from_json(&j).unwrap(), p);
    }
}
