//! Truncated power series in one variable with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::coeff::{factorial, fmt_q, Q};
use crate::error::{Error, Result};

/// `sum_{k <= order} c_k x^k`; coefficients past `order` are unknown.
#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    coeffs: Vec<Q>,
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(fmt_q).collect();
        write!(f, "Series[{}]", parts.join(", "))
    }
}

impl Series {
    pub fn zero(order: usize) -> Self {
        Series { coeffs: vec![Q::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Q::one(), order)
    }

    pub fn constant(c: Q, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The variable `x`.
    pub fn x(order: usize) -> Self {
        Self::monomial(Q::one(), 1, order)
    }

    pub fn monomial(c: Q, power: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    pub fn from_coeffs(coeffs: Vec<Q>, order: usize) -> Self {
        let mut s = Self::zero(order);
        for (k, c) in coeffs.into_iter().enumerate().take(order + 1) {
            s.coeffs[k] = c;
        }
        s
    }

    /// Coefficients from a function of the exponent.
    pub fn from_fn(order: usize, f: impl Fn(usize) -> Q) -> Self {
        Series { coeffs: (0..=order).map(f).collect() }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        Series::from_coeffs(self.coeffs.clone(), order.min(self.order()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        Series { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// `f(c x)`.
    pub fn scale_var(&self, c: &Q) -> Self {
        let mut p = Q::one();
        let mut out = self.clone();
        for x in out.coeffs.iter_mut() {
            *x = &*x * &p;
            p = &p * c;
        }
        out
    }

    /// `f(x^k)`, with the order multiplied by `k`.
    pub fn substitute_power(&self, k: usize) -> Self {
        assert!(k >= 1);
        let mut out = Series::zero(self.order() * k);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[i * k] = c.clone();
        }
        out
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        if n == 0 {
            return Series::zero(0);
        }
        Series::from_fn(n - 1, |k| &self.coeffs[k + 1] * Q::from_integer(BigInt::from(k + 1)))
    }

    /// Antiderivative with zero constant term; the order grows by one.
    pub fn integral(&self) -> Self {
        Series::from_fn(self.order() + 1, |k| {
            if k == 0 {
                Q::zero()
            } else {
                &self.coeffs[k - 1] / Q::from_integer(BigInt::from(k))
            }
        })
    }

    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = self.coeffs[0].clone();
        if a0.is_zero() {
            return Err(Error::Precondition("reciprocal of a series with zero constant term".into()));
        }
        let n = self.order();
        let mut b = vec![Q::zero(); n + 1];
        b[0] = Q::one() / &a0;
        for k in 1..=n {
            let mut s = Q::zero();
            for j in 1..=k {
                s += &self.coeffs[j] * &b[k - j];
            }
            b[k] = -s / &a0;
        }
        Ok(Series { coeffs: b })
    }

    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Precondition("exp of a series with nonzero constant term".into()));
        }
        // y' = f' y
        let n = self.order();
        let d = self.derivative();
        let mut y = vec![Q::zero(); n + 1];
        y[0] = Q::one();
        for k in 1..=n {
            let mut s = Q::zero();
            for j in 0..k {
                s += d.coeff(j) * &y[k - 1 - j];
            }
            y[k] = s / Q::from_integer(BigInt::from(k));
        }
        Ok(Series { coeffs: y })
    }

    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::Precondition("log of a series with constant term other than 1".into()));
        }
        let n = self.order();
        let q = (&self.derivative() * &self.reciprocal()?).integral();
        Ok(q.truncate(n))
    }

    /// `self(inner(x))`; `inner` must have zero constant term.
    pub fn compose(&self, inner: &Series) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::Precondition("composition with a series with nonzero constant term".into()));
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        let mut acc = Series::zero(n);
        for c in self.coeffs.iter().take(n + 1).rev() {
            acc = &(&acc * &inner) + &Series::constant(c.clone(), n);
        }
        Ok(acc)
    }

    /// Square root with constant term 1, by Newton iteration `y <- (y + f/y)/2` with doubling
    /// precision.
    pub fn sqrt(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::Precondition("sqrt of a series with constant term other than 1".into()));
        }
        let n = self.order();
        let half = Q::new(BigInt::from(1), BigInt::from(2));
        let mut y = Series::one(0);
        let mut prec = 0;
        while prec < n {
            prec = (2 * prec + 1).min(n);
            let y2 = Series::from_coeffs(y.coeffs.clone(), prec);
            let f = self.truncate(prec);
            y = (&y2 + &(&f * &y2.reciprocal()?)).scale(&half);
        }
        Ok(y.truncate(n))
    }

    /// `sinh(x/2)/(x/2) = sum_k x^{2k} / (4^k (2k+1)!)`.
    pub fn sinhc_half(order: usize) -> Self {
        Series::from_fn(order, |k| {
            if k % 2 == 1 {
                Q::zero()
            } else {
                let m = k / 2;
                Q::new(BigInt::one(), BigInt::from(4).pow(m as u32) * factorial(2 * m as u64 + 1))
            }
        })
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, o: &Series) -> Series {
        let n = self.order().min(o.order());
        Series::from_fn(n, |k| &self.coeffs[k] + &o.coeffs[k])
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        let n = self.order().min(o.order());
        Series::from_fn(n, |k| &self.coeffs[k] - &o.coeffs[k])
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        let n = self.order().min(o.order());
        let mut out = vec![Q::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Series { coeffs: out }
    }
}

/// The modified Bernoulli numbers `b_{2k}`, `k = 0..=n`, defined by
/// `sum b_{2k} x^{2k} = (1/2) log(sinh(x/2)/(x/2))`.
pub fn modified_bernoulli(n: usize) -> Vec<Q> {
    let half = Q::new(BigInt::one(), BigInt::from(2));
    let l = Series::sinhc_half(2 * n).log().expect("constant term is one").scale(&half);
    (0..=n).map(|k| l.coeff(2 * k)).collect()
}

/// `f(x) = sinh(sqrt(x)/2)/(sqrt(x)/2)`, with `f_k = 1/(4^k (2k+1)!)`.
pub fn appendix_f(n: usize) -> Series {
    Series::from_fn(n, |k| Q::new(BigInt::one(), BigInt::from(4).pow(k as u32) * factorial(2 * k as u64 + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{q, qi};

    #[test]
    fn exp_log_round_trip() {
        let one_plus_x = &Series::one(10) + &Series::x(10);
        assert_eq!(one_plus_x.log().unwrap().exp().unwrap(), one_plus_x);
        let l = one_plus_x.log().unwrap();
        assert_eq!(l.coeff(3), q(1, 3));
        assert_eq!(l.coeff(4), q(-1, 4));
    }

    #[test]
    fn sqrt_and_compose() {
        let f = &Series::one(12) + &Series::x(12);
        let r = f.sqrt().unwrap();
        assert_eq!(&r * &r, f);
        assert_eq!(r.coeff(2), q(-1, 8));
        let x = Series::x(8);
        let e = x.exp().unwrap();
        let em1 = &e - &Series::one(8);
        let back = (&Series::one(8) + &em1).log().unwrap();
        assert_eq!(back, x);
        // log(1+y) composed with y = e^x - 1 gives x
        let log1p = (&Series::one(8) + &Series::x(8)).log().unwrap();
        assert_eq!(log1p.compose(&em1).unwrap(), x);
        assert!(log1p.compose(&e).is_err());
    }

    #[test]
    fn sinhc_coefficients() {
        let s = Series::sinhc_half(6);
        assert_eq!(s.coeff(2), q(1, 24));
        let l = s.log().unwrap();
        for k in (1..=6).step_by(2) {
            assert_eq!(l.coeff(k), qi(0));
        }
        assert_eq!(l.coeff(0), qi(0));
    }

    #[test]
    fn bernoulli_values() {
        let b = modified_bernoulli(3);
        assert_eq!(b, vec![qi(0), q(1, 48), q(-1, 5760), q(1, 362880)]);
    }

    #[test]
    fn appendix_f_matches_bernoulli() {
        let n = 6;
        let b = modified_bernoulli(n);
        let g = Series::from_fn(n, |k| &b[k] * qi(2));
        assert_eq!(g.exp().unwrap(), appendix_f(n));
        assert_eq!(appendix_f(n).substitute_power(2), Series::sinhc_half(2 * n));
    }
}
