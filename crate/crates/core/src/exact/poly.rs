//! Dense univariate polynomials in α with exact coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};

/// Coefficients stored constant term first; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<C> {
    coeffs: Vec<C>,
}

pub type IntegerPolynomial = Poly<BigInt>;
pub type RationalPolynomial = Poly<BigRational>;

impl<C: Clone + Num + Neg<Output = C>> Poly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    /// `c0 + c1·α`.
    pub fn linear(c0: C, c1: C) -> Self {
        Self::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> C {
        self.coeffs.last().cloned().unwrap_or_else(C::zero)
    }

    pub fn scale(&self, k: &C) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * k.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        let mut k = C::one();
        for c in self.coeffs.iter().skip(1) {
            out.push(c.clone() * k.clone());
            k = k + C::one();
        }
        Self::new(out)
    }

    /// Multiply by α^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C::zero(); k];
        out.extend(self.coeffs.iter().cloned());
        Self { coeffs: out }
    }

    /// Horner evaluation in the coefficient ring.
    pub fn eval(&self, x: &C) -> C {
        self.coeffs
            .iter()
            .rev()
            .fold(C::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(C::one());
        for _ in 0..e {
            out = out * self.clone();
        }
        out
    }
}

impl<C: Clone + Num + Neg<Output = C>> Add for Poly<C> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<C: Clone + Num + Neg<Output = C>> Sub for Poly<C> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<C: Clone + Num + Neg<Output = C>> Neg for Poly<C> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<C: Clone + Num + Neg<Output = C>> Mul for Poly<C> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }
}

impl IntegerPolynomial {
    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Exact value at a rational point.
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| {
            acc * x + BigRational::from_integer(c.clone())
        })
    }

    /// Sign (-1, 0, 1) at a rational point, without building the full rational.
    pub fn sign_at(&self, x: &BigRational) -> i8 {
        // p/q with q > 0: sign of Σ c_k p^k q^(d-k)
        let Some(d) = self.degree() else { return 0 };
        let (p, q) = (x.numer(), x.denom());
        let mut total = BigInt::zero();
        let mut ppow = BigInt::one();
        let mut qpows = vec![BigInt::one(); d + 1];
        for k in 1..=d {
            qpows[k] = &qpows[k - 1] * q;
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            total += c * &ppow * &qpows[d - k];
            ppow *= p;
        }
        sign_of(&total)
    }

    pub fn to_rational(&self) -> RationalPolynomial {
        RationalPolynomial::new(
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Pseudo-remainder: lc(d)^(deg a - deg d + 1)·a mod d, always with
    /// exactly that power of lc(d).
    pub fn pseudo_rem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("pseudo_rem by zero polynomial");
        let Some(da) = self.degree() else { return Self::zero() };
        if da < dd {
            return self.clone();
        }
        let lc = d.leading();
        let mut r = self.clone();
        for k in (0..=da - dd).rev() {
            let t = r.coeff(dd + k);
            r = r.scale(&lc) - d.scale(&t).shift(k);
        }
        r
    }

    /// Exact quotient self / d over Q, returned as a primitive integer polynomial.
    pub fn primitive_quotient(&self, d: &Self) -> Self {
        let (q, _) = self.to_rational().div_rem(&d.to_rational());
        q.clear_denominators().primitive()
    }

    /// Primitive gcd via the primitive remainder sequence.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.primitive(), other.primitive());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive();
            a = b;
            b = r;
        }
        a.primitive()
    }

    /// Same roots, each with multiplicity one.
    pub fn squarefree(&self) -> Self {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            self.primitive()
        } else {
            self.primitive_quotient(&g)
        }
    }

    /// Integer bound strictly exceeding every root modulus (Cauchy).
    pub fn root_bound(&self) -> BigInt {
        let lc = self.leading().abs();
        let m = self
            .coeffs
            .iter()
            .take(self.coeffs.len().saturating_sub(1))
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero);
        BigInt::one() + m.div_ceil(&lc) + BigInt::one()
    }

    /// Display with a named variable, highest power first.
    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if k == 0 {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}*{mono}"));
            }
        }
        out
    }
}

impl RationalPolynomial {
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.leading();
        let mut r = self.clone();
        let mut q = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while let Some(dr) = r.degree() {
            if dr < dd {
                break;
            }
            let t = r.leading() / lc.clone();
            q[dr - dd] = t.clone();
            r = r - d.scale(&t).shift(dr - dd);
        }
        (Self::new(q), r)
    }

    /// Multiply by the lcm of the denominators (a positive integer).
    pub fn clear_denominators(&self) -> IntegerPolynomial {
        let l = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        IntegerPolynomial::new(
            self.coeffs
                .iter()
                .map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
                .collect(),
        )
    }
}

pub(crate) fn sign_of(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl fmt::Debug for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.display_with("a"))
    }
}

impl fmt::Display for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("alpha"))
    }
}

impl fmt::Debug for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "Poly[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntegerPolynomial {
        IntegerPolynomial::from_i64(c)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn arithmetic_and_eval() {
        let a = p(&[3, 8, 1]);
        let b = p(&[1, 1]);
        assert_eq!((a.clone() * b.clone()).coeffs(), p(&[3, 11, 9, 1]).coeffs());
        assert_eq!((a.clone() - a.clone()).degree(), None);
        assert_eq!(a.eval_rational(&q(-1, 2)), q(-3, 4));
        assert_eq!(a.derivative(), p(&[8, 2]));
        assert_eq!(a.display_with("x"), "x^2 + 8*x + 3");
        assert_eq!(p(&[-3, 0, -2]).display_with("x"), "-2*x^2 - 3");
    }

    #[test]
    fn sign_at_rational_points() {
        let a = p(&[3, 8, 1]); // roots -4 ± √13
        for (n, d) in [(-1, 1), (-1, 3), (0, 1), (-8, 1), (7, 5), (-15, 2)] {
            let x = q(n, d);
            let v = a.eval_rational(&x);
            let expect = if v.is_positive() { 1 } else if v.is_negative() { -1 } else { 0 };
            assert_eq!(a.sign_at(&x), expect, "at {x}");
        }
        assert_eq!(p(&[-1, 2]).sign_at(&q(1, 2)), 0);
    }

    #[test]
    fn gcd_and_squarefree() {
        let f = p(&[1, 1]) * p(&[1, 1]) * p(&[-2, 0, 1]);
        let g = f.gcd(&f.derivative());
        assert_eq!(g, p(&[1, 1]));
        assert_eq!(f.squarefree(), p(&[-2, -2, 1, 1]));
        let h = p(&[6, 4, 0, 2]);
        assert_eq!(h.primitive(), p(&[3, 2, 0, 1]));
        assert_eq!((-h).primitive(), p(&[3, 2, 0, 1]));
    }

    #[test]
    fn root_bound_exceeds_roots() {
        let f = p(&[-100, 0, 1]);
        assert!(f.root_bound() > BigInt::from(10));
    }
}
