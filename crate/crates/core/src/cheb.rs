//! Chebyshev polynomials of the first and second kind.
//!
//! Floating evaluation always goes through the three-term recurrences, so it
//! is valid for arguments outside `[-1, 1]` as well. Exact coefficient
//! vectors are kept as [`IntPoly`] for sign-exact work at rational points.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Polynomial with arbitrary-precision integer coefficients, `coeffs[k]`
/// multiplying `x^k`. The zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPoly { coeffs };
        p.trim();
        p
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::from_i64s(&[0, 1])
    }

    /// `a + b x`.
    pub fn linear(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        Self::new(vec![a.into(), b.into()])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Coefficients as `i64`, when they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| c.to_i64()).collect()
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| {
            acc * x + BigRational::from_integer(c.clone())
        })
    }

    /// `q^deg * p(num/q)`, an integer with the sign of `p(num/q)` for `q > 0`.
    pub fn eval_homogeneous(&self, num: &BigInt, den: &BigInt) -> BigInt {
        let Some(deg) = self.degree() else {
            return BigInt::zero();
        };
        let mut acc = self.coeffs[deg].clone();
        let mut den_pow = BigInt::one();
        for c in self.coeffs[..deg].iter().rev() {
            den_pow *= den;
            acc = acc * num + c * &den_pow;
        }
        acc
    }

    /// Sign of `p(num/den)` for `den > 0`, computed exactly.
    pub fn sign_at(&self, num: &BigInt, den: &BigInt) -> i8 {
        debug_assert!(den.is_positive());
        let v = self.eval_homogeneous(num, den);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Composition `self(inner(x))`.
    pub fn compose(&self, inner: &IntPoly) -> IntPoly {
        self.coeffs.iter().rev().fold(IntPoly::zero(), |acc, c| {
            &(&acc * inner) + &IntPoly::constant(c.clone())
        })
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigInt::zero();
        IntPoly::new(
            (0..len)
                .map(|k| {
                    self.coeffs.get(k).unwrap_or(&zero) + rhs.coeffs.get(k).unwrap_or(&zero)
                })
                .collect(),
        )
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self + &(-rhs)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChebKind {
    First,
    Second,
}

/// `T_k(t)` by the three-term recurrence.
pub fn eval_t(k: usize, t: f64) -> f64 {
    recurrence(1.0, t, k, t)
}

/// `U_k(t)` by the three-term recurrence.
pub fn eval_u(k: usize, t: f64) -> f64 {
    recurrence(1.0, 2.0 * t, k, t)
}

fn recurrence(p0: f64, p1: f64, k: usize, t: f64) -> f64 {
    if k == 0 {
        return p0;
    }
    let (mut prev, mut cur) = (p0, p1);
    for _ in 1..k {
        let next = 2.0 * t * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `(P_j(t), Q_j(t))` with `P_j = 2T_j - U_j`, `Q_j = U_{j-1}` and `Q_0 = 0`.
pub fn eval_pq(j: usize, t: f64) -> (f64, f64) {
    let p = 2.0 * eval_t(j, t) - eval_u(j, t);
    let q = if j == 0 { 0.0 } else { eval_u(j - 1, t) };
    (p, q)
}

/// Exact coefficients of `T_k` or `U_k`.
pub fn cheb_coeffs(kind: ChebKind, k: usize) -> IntPoly {
    cheb_of(kind, k, &IntPoly::x())
}

/// `T_k(inner(x))` or `U_k(inner(x))` as an exact polynomial in `x`.
pub fn cheb_of(kind: ChebKind, k: usize, inner: &IntPoly) -> IntPoly {
    let two_inner = inner.scale(&BigInt::from(2));
    let p0 = IntPoly::constant(1);
    if k == 0 {
        return p0;
    }
    let p1 = match kind {
        ChebKind::First => inner.clone(),
        ChebKind::Second => two_inner.clone(),
    };
    let (mut prev, mut cur) = (p0, p1);
    for _ in 1..k {
        let next = &(&two_inner * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}
