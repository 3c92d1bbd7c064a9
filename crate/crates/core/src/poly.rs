//! Dense univariate polynomials with arbitrary-precision integer coefficients.
//!
//! Every generating function in the crate lives here: g- and h-polynomials,
//! edge-count series of sub-multigraph families, fiber Poincaré polynomials and
//! Hilbert functions. The zero polynomial is the empty coefficient list.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    /// `c * t^d`.
    pub fn monomial(c: impl Into<BigInt>, d: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); d + 1];
        coeffs[d] = c.into();
        Self::new(coeffs)
    }

    /// Builds from coefficients, lowest degree first, trimming trailing zeros.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn from_u64s(coeffs: &[u64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `t^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        IntPoly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Returns `q` with `q(t) = p(t + a)`.
    pub fn shift(&self, a: i64) -> Self {
        if a == 0 || self.coeffs.len() <= 1 {
            return self.clone();
        }
        // Horner in the shifted variable: acc <- acc * (t + a) + c
        let a = BigInt::from(a);
        let mut acc: Vec<BigInt> = Vec::with_capacity(self.coeffs.len());
        for c in self.coeffs.iter().rev() {
            acc.push(BigInt::zero());
            for i in (1..acc.len()).rev() {
                let prev = std::mem::take(&mut acc[i]);
                acc[i] = prev * &a + &acc[i - 1];
            }
            acc[0] = &acc[0] * &a + c;
        }
        Self::new(acc)
    }

    /// Divides by `t^d`; fails if any coefficient below degree `d` is nonzero.
    pub fn div_t_power(&self, d: usize) -> Result<Self> {
        if self.coeffs.iter().take(d).any(|c| !c.is_zero()) {
            return Err(Error::Internal(format!(
                "polynomial {self} is not divisible by t^{d}"
            )));
        }
        Ok(IntPoly { coeffs: self.coeffs.iter().skip(d).cloned().collect() })
    }

    pub fn mul_t_power(&self, d: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); d];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs }
    }

    /// Substitutes `t -> t^2`.
    pub fn in_t_squared(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); 2 * self.coeffs.len() - 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[2 * i] = c.clone();
        }
        IntPoly { coeffs }
    }

    /// Inverse of [`IntPoly::in_t_squared`]; `None` if an odd coefficient is nonzero.
    pub fn from_t_squared(&self) -> Option<Self> {
        if self.coeffs.iter().skip(1).step_by(2).any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::new(self.coeffs.iter().step_by(2).cloned().collect()))
    }

    pub fn is_palindromic(&self) -> bool {
        self.coeffs.iter().eq(self.coeffs.iter().rev())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }
}

/// `p(m, t) = 1 + t + ... + t^(m-1)`; `p(0, t) = 0`.
pub fn p_poly(m: usize) -> IntPoly {
    IntPoly::new(vec![BigInt::one(); m])
}

/// Truncated difference `sum_{i <= floor(D/2)} (h_i - h_{i-1}) t^i`, the
/// g-polynomial attached to an h-polynomial of a `D`-dimensional polytope.
pub fn g_from_h(h: &IntPoly, dim: i64) -> Result<IntPoly> {
    if let Some(deg) = h.degree() {
        if dim < deg as i64 {
            return Err(Error::InvalidInput(format!(
                "h-polynomial of degree {deg} exceeds the dimension {dim}"
            )));
        }
    }
    if dim < 0 {
        // empty face
        return Ok(IntPoly::one());
    }
    let top = (dim / 2) as usize;
    let coeffs = (0..=top)
        .map(|i| {
            let prev = if i == 0 { BigInt::zero() } else { h.coeff(i - 1) };
            h.coeff(i) - prev
        })
        .collect();
    Ok(IntPoly::new(coeffs))
}

/// `(t + a)^e` written out with binomial coefficients.
pub fn linear_power(a: i64, e: u32) -> IntPoly {
    IntPoly::from_i64s(&[a, 1]).pow(e)
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let unit = abs.is_one();
            match i {
                0 => write!(f, "{abs}")?,
                1 if unit => f.write_str("t")?,
                1 => write!(f, "{abs}t")?,
                _ if unit => write!(f, "t^{i}")?,
                _ => write!(f, "{abs}t^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add<&IntPoly> for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (a, b) in coeffs.iter_mut().zip(&short.coeffs) {
            *a += b;
        }
        IntPoly::new(coeffs)
    }
}

impl Add for IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: IntPoly) -> IntPoly {
        &self + &rhs
    }
}

impl AddAssign<&IntPoly> for IntPoly {
    fn add_assign(&mut self, rhs: &IntPoly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), BigInt::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub<&IntPoly> for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self + &(-rhs)
    }
}

impl Sub for IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: IntPoly) -> IntPoly {
        &self - &rhs
    }
}

impl Mul<&IntPoly> for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPoly::new(coeffs)
    }
}

impl Mul for IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: IntPoly) -> IntPoly {
        &self * &rhs
    }
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    var: String,
    coeffs: Vec<String>,
}

impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            var: "t".to_owned(),
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        if repr.var != "t" {
            return Err(D::Error::custom(format!("unexpected variable {:?}", repr.var)));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|c| c.parse::<BigInt>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(IntPoly::new(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn add_examples() {
        assert_eq!(&p(&[1, 2]) + &p(&[0, 1]), p(&[1, 3]));
        assert_eq!(&p(&[4, 0, 7]) + &IntPoly::zero(), p(&[4, 0, 7]));
        assert!((&p(&[1, 1]) + &p(&[-1, -1])).is_zero());
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&p(&[1, 1]) * &p(&[1, 1]), p(&[1, 2, 1]));
        assert_eq!(&p(&[3, -2, 5]) * &IntPoly::one(), p(&[3, -2, 5]));
        let p2 = p_poly(2);
        assert_eq!(&(&p2 * &p2) * &p2, p(&[1, 3, 3, 1]));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(p(&[3, 2]).shift(-1), p(&[1, 2]));
        assert_eq!(p(&[5, -1, 2]).shift(0), p(&[5, -1, 2]));
        assert_eq!(p(&[0, 0, 1]).shift(1), p(&[1, 2, 1]));
        assert_eq!(p(&[0, 0, 0, 1]).shift(2), p(&[8, 12, 6, 1]));
    }

    #[test]
    fn p_poly_examples() {
        assert_eq!(p_poly(1), IntPoly::one());
        assert_eq!(p_poly(3), p(&[1, 1, 1]));
        assert!(p_poly(0).is_zero());
    }

    #[test]
    fn palindromes() {
        assert!(p(&[1, 3, 3, 1]).is_palindromic());
        assert!(!p(&[1, 2]).is_palindromic());
        assert!(IntPoly::zero().is_palindromic());
    }

    #[test]
    fn g_from_h_examples() {
        assert_eq!(g_from_h(&p(&[1, 3, 3, 1]), 3).unwrap(), p(&[1, 2]));
        assert_eq!(g_from_h(&IntPoly::one(), 0).unwrap(), IntPoly::one());
        assert_eq!(g_from_h(&p(&[1, 2, 1]), 2).unwrap(), p(&[1, 1]));
        assert!(g_from_h(&p(&[1, 3, 3, 1]), 2).is_err());
    }

    #[test]
    fn zero_has_no_degree() {
        assert_eq!(IntPoly::zero().degree(), None);
        assert_eq!(p(&[0, 0, 2, 0]).degree(), Some(2));
    }

    #[test]
    fn t_power_helpers() {
        let q = p(&[0, 0, 3, 2]);
        assert_eq!(q.div_t_power(2).unwrap(), p(&[3, 2]));
        assert!(q.div_t_power(3).is_err());
        assert_eq!(p(&[3, 2]).mul_t_power(2), q);
        assert_eq!(p(&[1, 2]).in_t_squared(), p(&[1, 0, 2]));
        assert_eq!(p(&[1, 0, 2]).from_t_squared(), Some(p(&[1, 2])));
        assert_eq!(p(&[1, 1]).from_t_squared(), None);
    }

    #[test]
    fn json_form() {
        let q = p(&[1, 2]);
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"{"var":"t","coeffs":["1","2"]}"#);
        let back: IntPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
        assert_eq!(serde_json::to_string(&IntPoly::zero()).unwrap(), r#"{"var":"t","coeffs":[]}"#);
    }

    #[test]
    fn display() {
        assert_eq!(p(&[1, -2, 0, 1]).to_string(), "1 - 2t + t^3");
        assert_eq!(p(&[0, 3]).to_string(), "3t");
    }

    fn arb_poly() -> impl Strategy<Value = IntPoly> {
        prop::collection::vec(-50i64..50, 0..7).prop_map(|c| IntPoly::from_i64s(&c))
    }

    proptest! {
        #[test]
        fn shift_roundtrip(q in arb_poly(), a in -6i64..6) {
            prop_assert_eq!(q.shift(a).shift(-a), q);
        }

        #[test]
        fn shift_matches_evaluation(q in arb_poly(), a in -4i64..4, x in -5i64..5) {
            let lhs = q.shift(a).eval(&BigInt::from(x));
            let rhs = q.eval(&BigInt::from(x + a));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            let mut acc = a.clone();
            acc += &b;
            prop_assert_eq!(acc, &a + &b);
        }
    }
}
