//! Standard-L machinery for the elliptic case: local Euler factors over
//! the squared Satake parameter, the Dirichlet series obtained by clearing
//! the zeta factors, numeric partial Euler products with rigorous tail
//! bounds, gamma factors, and pole tables.
//!
//! The degree-3 local factor at `p` is
//!
//!   (1 - p^{-s}) (1 - alpha^2 p^{-s}) (1 - alpha^{-2} p^{-s})
//!
//! with `alpha` the normalized root attached to `a_p`; the symmetric
//! combination `tau = alpha^2 + alpha^{-2} = a_p^2 / p^{k-1} - 2` is
//! rational, so the factor expands exactly. The inverse-root convention
//! (1, alpha^2, alpha^{-2}) is pinned by the double-coset cross-check: the
//! Dirichlet coefficients produced by clearing `zeta(s) zeta(2s-2)` equal
//! the `diag(t, 1/t)` eigenvalues exactly, and the tests enforce this.

pub mod gamma;
pub mod poles;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::modular::SatakeData;
use crate::qpoly::UniPoly;
use crate::rat::{qi, ratio_to_f64};

#[derive(Debug, Error)]
pub enum LFunctionError {
    #[error("numeric evaluation needs Re(s) > 1, got {0}")]
    OutsideConvergence(f64),
    #[error("missing Satake data for prime {0}")]
    MissingSatake(u64),
}

/// Exact degree-`2n+1` local denominator of the standard L-function at a
/// prime, as a polynomial in `x = p^{-s}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerFactor {
    pub p: u64,
    pub degree_n: u32,
    /// Denominator polynomial in `x = p^{-s}`, lowest degree first.
    pub denominator: UniPoly,
}

/// Local factor from Satake data (degree n = 1).
pub fn euler_factor_standard(sat: &SatakeData) -> EulerFactor {
    // (1 - x)(1 - tau x + x^2)
    let quad = UniPoly::from_coeffs(vec![qi(1), -sat.tau.clone(), qi(1)]);
    let lin = UniPoly::from_coeffs(vec![qi(1), qi(-1)]);
    EulerFactor {
        p: sat.p,
        degree_n: 1,
        denominator: lin.mul(&quad),
    }
}

impl EulerFactor {
    /// Multiset of inverse roots is stable under inversion: the
    /// denominator equals plus-or-minus its own reversal.
    pub fn is_palindromic(&self) -> bool {
        let c = self.denominator.coeffs();
        let deg = self.denominator.degree();
        (0..=deg).all(|i| c[i] == c[deg - i] || c[i] == -c[deg - i].clone())
    }

    /// Numeric value of the reciprocal factor at `s`, `Re(s) > 1`.
    pub fn value(&self, s: Complex64) -> Result<Complex64, LFunctionError> {
        if s.re <= 1.0 {
            return Err(LFunctionError::OutsideConvergence(s.re));
        }
        let x = Complex64::new(self.p as f64, 0.0).powc(-s);
        Ok(1.0 / self.denominator.eval(x))
    }
}

/// Dirichlet coefficients of the zeta-cleared series, exactly.
///
/// The local series at `p` is
/// `(1 - x)(1 - p^2 x^2) / [(1 - p x)(1 - tau p x + p^2 x^2)]`
/// in `x = p^{-s}`; coefficients at `t = prod p^{e_p}` multiply.
pub fn dirichlet_coefficients(
    weight: u32,
    ap: &dyn Fn(u64) -> Option<BigRational>,
    max_t: u64,
) -> Result<Vec<BigRational>, LFunctionError> {
    let mut coeffs = vec![BigRational::one(); max_t as usize + 1];
    if max_t == 0 {
        return Ok(vec![BigRational::one()]);
    }
    for p in crate::modular::primes_up_to(max_t) {
        let a = ap(p).ok_or(LFunctionError::MissingSatake(p))?;
        let local = local_dirichlet_series(weight, p, &a, max_t.ilog(p) as usize);
        // spread over t = p^j * m with p coprime to m
        let mut t = p;
        let mut j = 1usize;
        while t <= max_t {
            let mut m = 1u64;
            while m * t <= max_t {
                if m % p != 0 {
                    let idx = (m * t) as usize;
                    coeffs[idx] = &coeffs[idx] * &local[j];
                }
                m += 1;
            }
            match t.checked_mul(p) {
                Some(next) => t = next,
                None => break,
            }
            j += 1;
        }
    }
    coeffs[0] = BigRational::zero();
    Ok(coeffs)
}

/// Power-series coefficients (in `x = p^{-s}`) of the local factor of the
/// zeta-cleared series, up to degree `j_max`.
fn local_dirichlet_series(weight: u32, p: u64, ap: &BigRational, j_max: usize) -> Vec<BigRational> {
    let pr = BigRational::from_integer(BigInt::from(p));
    let pk = BigRational::from_integer(BigInt::from(p).pow(weight - 1));
    let tau = ap * ap / pk - qi(2);
    // denominator (1 - p x)(1 - tau p x + p^2 x^2)
    let lin = UniPoly::from_coeffs(vec![qi(1), -pr.clone()]);
    let quad = UniPoly::from_coeffs(vec![qi(1), -(&tau * &pr), &pr * &pr]);
    let den = lin.mul(&quad);
    // numerator (1 - x)(1 - p^2 x^2)
    let num = UniPoly::from_coeffs(vec![qi(1), qi(-1)]).mul(&UniPoly::from_coeffs(vec![
        qi(1),
        qi(0),
        -(&pr * &pr),
    ]));
    // series inversion of den, then multiply by num
    let mut inv = vec![BigRational::zero(); j_max + 1];
    inv[0] = BigRational::one();
    for j in 1..=j_max {
        let mut acc = BigRational::zero();
        for i in 1..=j.min(den.degree()) {
            acc += den.coeff(i) * &inv[j - i];
        }
        inv[j] = -acc;
    }
    let mut out = vec![BigRational::zero(); j_max + 1];
    for j in 0..=j_max {
        let mut acc = BigRational::zero();
        for i in 0..=j.min(num.degree()) {
            acc += num.coeff(i) * &inv[j - i];
        }
        out[j] = acc;
    }
    out
}

/// Partial Euler product of `L(s, f, St)` over primes up to `cutoff`, with
/// a rigorous bound on the omitted tail.
///
/// Each omitted reciprocal factor is within `(1 - p^{-Re s})^{-3}` of 1,
/// so the log of the tail is at most
/// `3 / (1 - P^{-sigma}) * P^{1-sigma} / (sigma - 1)` for `sigma = Re(s)`.
pub struct PartialLValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub cutoff: u64,
}

/// Numeric partial product from Satake traces `(p, a_p)` as floats.
pub fn lvalue_numeric(
    weight: u32,
    traces: &[(u64, f64)],
    s: Complex64,
    cutoff: u64,
) -> Result<PartialLValue, LFunctionError> {
    let sigma = s.re;
    if sigma <= 1.0 {
        return Err(LFunctionError::OutsideConvergence(sigma));
    }
    let mut value = Complex64::new(1.0, 0.0);
    for &(p, ap) in traces.iter().filter(|&&(p, _)| p <= cutoff) {
        let tau = ap * ap / (p as f64).powi(weight as i32 - 1) - 2.0;
        let x = Complex64::new(p as f64, 0.0).powc(-s);
        let den = (1.0 - x) * (1.0 - tau * x + x * x);
        value /= den;
    }
    Ok(PartialLValue {
        value,
        tail_bound: tail_bound(sigma, cutoff, value.norm()),
        cutoff,
    })
}

/// Same partial product with prescribed symmetric parameters
/// `tau_p = alpha_p^2 + alpha_p^{-2}` (degenerate comparisons in tests).
pub fn lvalue_from_taus(
    taus: &[(u64, f64)],
    s: Complex64,
    cutoff: u64,
) -> Result<PartialLValue, LFunctionError> {
    let sigma = s.re;
    if sigma <= 1.0 {
        return Err(LFunctionError::OutsideConvergence(sigma));
    }
    let mut value = Complex64::new(1.0, 0.0);
    for &(p, tau) in taus.iter().filter(|&&(p, _)| p <= cutoff) {
        let x = Complex64::new(p as f64, 0.0).powc(-s);
        value /= (1.0 - x) * (1.0 - tau * x + x * x);
    }
    Ok(PartialLValue {
        value,
        tail_bound: tail_bound(sigma, cutoff, value.norm()),
        cutoff,
    })
}

fn tail_bound(sigma: f64, cutoff: u64, magnitude: f64) -> f64 {
    let pf = cutoff as f64;
    let tail_sum = pf.powf(1.0 - sigma) / (sigma - 1.0);
    let log_bound = 3.0 / (1.0 - pf.powf(-sigma)) * tail_sum;
    magnitude * log_bound.exp_m1()
}
