//! Internal sparse multivariate polynomials over the rationals.
//!
//! Used by the harmonic layer to expand link monomials into explicit
//! matrix entries `x1[i,kappa]`, `x2[i,kappa]` and tensor coordinates
//! `e*[i,copy]`, `e_[i,copy]`, and to apply block Laplacians exactly.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

/// A variable of the expanded polynomial ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// Entry `(row, col)` of the first block matrix.
    X1(u16, u16),
    /// Entry `(row, col)` of the second block matrix.
    X2(u16, u16),
    /// Component `row` of the starred tensor coordinate of copy `copy`.
    EStar(u16, u16),
    /// Component `row` of the substarred tensor coordinate of copy `copy`.
    ESub(u16, u16),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X1(i, j) => write!(f, "x1[{i},{j}]"),
            Var::X2(i, j) => write!(f, "x2[{i},{j}]"),
            Var::EStar(i, c) => write!(f, "e*[{i},{c}]"),
            Var::ESub(i, c) => write!(f, "e_[{i},{c}]"),
        }
    }
}

/// Monomial: sorted (variable, exponent) pairs, exponents positive.
pub type Monomial = Vec<(Var, u32)>;

/// Sparse polynomial, no zero coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn one() -> Self {
        MPoly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = MPoly::default();
        p.add_monomial(Vec::new(), c);
        p
    }

    pub fn var(v: Var) -> Self {
        let mut p = MPoly::default();
        p.add_monomial(vec![(v, 1)], BigRational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn add_monomial(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        debug_assert!(m.windows(2).all(|w| w[0].0 < w[1].0));
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_monomial(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_monomial(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return MPoly::zero();
        }
        let mut out = MPoly::default();
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = MPoly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_monomial(merge_monomials(ma, mb), ca * cb);
            }
        }
        out
    }

    /// Exact partial derivative.
    pub fn partial(&self, v: Var) -> Self {
        let mut out = MPoly::default();
        for (m, c) in &self.terms {
            if let Some(pos) = m.iter().position(|&(w, _)| w == v) {
                let (_, e) = m[pos];
                let mut nm = m.clone();
                if e == 1 {
                    nm.remove(pos);
                } else {
                    nm[pos].1 = e - 1;
                }
                out.add_monomial(nm, c * BigRational::from_integer(e.into()));
            }
        }
        out
    }
}

fn merge_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", crate::rat::ratio_to_string(c))?;
            for (v, e) in m {
                write!(f, "*{v}")?;
                if *e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qi;

    #[test]
    fn product_and_derivative() {
        let x = MPoly::var(Var::X1(1, 1));
        let y = MPoly::var(Var::X1(2, 1));
        // d/dx (x^2 y) = 2 x y
        let p = x.mul(&x).mul(&y);
        let d = p.partial(Var::X1(1, 1));
        let want = x.mul(&y).scale(&qi(2));
        assert_eq!(d, want);
        // second derivative in x: 2y
        assert_eq!(d.partial(Var::X1(1, 1)), y.scale(&qi(2)));
        // derivative in an absent var: 0
        assert!(p.partial(Var::X2(1, 1)).is_zero());
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = MPoly::var(Var::EStar(1, 1));
        let p = x.add(&x.scale(&qi(-1)));
        assert!(p.is_zero());
    }
}
