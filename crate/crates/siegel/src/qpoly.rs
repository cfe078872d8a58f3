//! Exact polynomials in the two formal symbols `k` and `s`, and univariate
//! polynomials in `s`.
//!
//! `CoeffPoly` carries the coefficients of the link-operator expansion: a
//! sparse map from `(k-exponent, s-exponent)` to a rational, with no zero
//! entries stored so equality is term-wise map equality.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rat::{parse_ratio, qi, ratio_to_f64, ratio_to_string};

/// Sparse exact polynomial in `k` and `s`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CoeffPoly {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl CoeffPoly {
    pub fn zero() -> Self {
        CoeffPoly::default()
    }

    pub fn one() -> Self {
        CoeffPoly::constant(qi(1))
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = CoeffPoly::default();
        p.add_term(0, 0, c);
        p
    }

    /// Monomial `c * k^ke * s^se`.
    pub fn monomial(ke: u32, se: u32, c: BigRational) -> Self {
        let mut p = CoeffPoly::default();
        p.add_term(ke, se, c);
        p
    }

    /// The symbol `k`.
    pub fn k() -> Self {
        CoeffPoly::monomial(1, 0, qi(1))
    }

    /// The symbol `s`.
    pub fn s() -> Self {
        CoeffPoly::monomial(0, 1, qi(1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, ke: u32, se: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((ke, se)).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(ke, se));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(ke, se), c) in &other.terms {
            out.add_term(ke, se, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(ke, se), c) in &other.terms {
            out.add_term(ke, se, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        CoeffPoly::zero().sub(self)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = CoeffPoly::default();
        for (&(ka, sa), ca) in &self.terms {
            for (&(kb, sb), cb) in &other.terms {
                out.add_term(ka + kb, sa + sb, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = CoeffPoly::default();
        for (&(ke, se), v) in &self.terms {
            out.add_term(ke, se, v * c);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    /// Exact substitution of a rational value for `k`; the result is a
    /// univariate polynomial in `s`.
    pub fn eval_k(&self, k: &BigRational) -> UniPoly {
        let mut out = UniPoly::zero();
        for (&(ke, se), c) in &self.terms {
            let mut pw = BigRational::one();
            for _ in 0..ke {
                pw *= k;
            }
            out.add_term(se as usize, c * pw);
        }
        out
    }

    /// Numeric evaluation at `(k, s)`.
    pub fn eval(&self, k: Complex64, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(ke, se), c) in &self.terms {
            acc += ratio_to_f64(c) * k.powu(ke) * s.powu(se);
        }
        acc
    }

    /// True when every stored term carries a positive power of `s`.
    pub fn divisible_by_s(&self) -> bool {
        self.terms.keys().all(|&(_, se)| se >= 1)
    }

    /// Coefficient extraction used by tests.
    pub fn coeff(&self, ke: u32, se: u32) -> BigRational {
        self.terms
            .get(&(ke, se))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }
}

impl fmt::Display for CoeffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(ke, se), c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", ratio_to_string(c))?;
            if ke > 0 {
                write!(f, "*k^{ke}")?;
            }
            if se > 0 {
                write!(f, "*s^{se}")?;
            }
        }
        Ok(())
    }
}

/// JSON form of one `CoeffPoly` term: exponents plus `"num"`/`"den"` strings.
#[derive(Serialize, Deserialize)]
pub struct CoeffTermDto {
    pub k: u32,
    pub s: u32,
    pub num: String,
    pub den: String,
}

impl CoeffPoly {
    pub fn to_dto(&self) -> Vec<CoeffTermDto> {
        self.terms
            .iter()
            .map(|(&(ke, se), c)| CoeffTermDto {
                k: ke,
                s: se,
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect()
    }

    pub fn from_dto(dto: &[CoeffTermDto]) -> Result<Self, String> {
        let mut p = CoeffPoly::default();
        for t in dto {
            let r = parse_ratio(&format!("{}/{}", t.num, t.den))?;
            p.add_term(t.k, t.s, r);
        }
        Ok(p)
    }
}

/// Dense exact univariate polynomial in `s`, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: Vec<BigRational>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = UniPoly::zero();
        p.add_term(0, c);
        p
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        let mut p = UniPoly { coeffs };
        p.trim();
        p
    }

    /// `c0 + c1*s` as a convenience for building products of linear factors.
    pub fn linear(c0: BigRational, c1: BigRational) -> Self {
        UniPoly::from_coeffs(vec![c0, c1])
    }

    fn trim(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn add_term(&mut self, deg: usize, c: BigRational) {
        if c.is_zero() {
            return;
        }
        if self.coeffs.len() <= deg {
            self.coeffs.resize(deg + 1, BigRational::zero());
        }
        self.coeffs[deg] += c;
        self.trim();
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; zero for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, deg: usize) -> BigRational {
        self.coeffs
            .get(deg)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, c) in other.coeffs.iter().enumerate() {
            out.add_term(i, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, c) in other.coeffs.iter().enumerate() {
            out.add_term(i, -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        UniPoly::from_coeffs(self.coeffs.iter().map(|v| v * c).collect())
    }

    /// Exact composition with `s -> a + b*s`.
    pub fn compose_affine(&self, a: &BigRational, b: &BigRational) -> Self {
        let mut out = UniPoly::zero();
        let lin = UniPoly::linear(a.clone(), b.clone());
        let mut pw = UniPoly::constant(qi(1));
        for c in &self.coeffs {
            out = out.add(&pw.scale(c));
            pw = pw.mul(&lin);
        }
        out
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + ratio_to_f64(c);
        }
        acc
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", ratio_to_string(c))?;
            if i > 0 {
                write!(f, "*s^{i}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qr;

    #[test]
    fn coeffpoly_arithmetic() {
        // (-k-s)^2 = k^2 + 2ks + s^2
        let m = CoeffPoly::k().add(&CoeffPoly::s()).neg();
        let sq = m.mul(&m);
        assert_eq!(sq.coeff(2, 0), qi(1));
        assert_eq!(sq.coeff(1, 1), qi(2));
        assert_eq!(sq.coeff(0, 2), qi(1));
        assert!(sq.sub(&sq).is_zero());
    }

    #[test]
    fn zero_terms_are_not_stored() {
        let mut p = CoeffPoly::zero();
        p.add_term(1, 0, qi(3));
        p.add_term(1, 0, qi(-3));
        assert!(p.is_zero());
    }

    #[test]
    fn eval_k_specializes() {
        // k*s + k^2 at k=2 -> 2s + 4
        let p = CoeffPoly::k()
            .mul(&CoeffPoly::s())
            .add(&CoeffPoly::k().mul(&CoeffPoly::k()));
        let u = p.eval_k(&qi(2));
        assert_eq!(u.coeff(0), qi(4));
        assert_eq!(u.coeff(1), qi(2));
    }

    #[test]
    fn unipoly_compose_affine() {
        // p(s) = s^2 - s, p(1-s) = s^2 - s
        let p = UniPoly::from_coeffs(vec![qi(0), qi(-1), qi(1)]);
        let q = p.compose_affine(&qi(1), &qi(-1));
        assert_eq!(p, q);
        assert_eq!(p.eval_rational(&qr(1, 2)), qr(-1, 4));
    }

    #[test]
    fn dto_round_trip() {
        let m = CoeffPoly::k().scale(&qr(-7, 3)).add(&CoeffPoly::s());
        let back = CoeffPoly::from_dto(&m.to_dto()).unwrap();
        assert_eq!(m, back);
    }
}
