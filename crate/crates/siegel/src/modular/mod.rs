//! Exact Fourier-coefficient infrastructure for degree-1 level-one modular
//! forms: Bernoulli numbers, Eisenstein q-expansions, the Hecke eigenbasis
//! built from the two generators by exact echelon reduction, Satake
//! parameters, and a fast integer coefficient table for the weight-12 cusp
//! form.

pub mod cohen;
pub mod eisenstein2;
pub mod hecke;
pub mod petersson;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{rref, QMatrix};
use crate::rat::{parse_ratio, qi, ratio_to_f64, ratio_to_string};

#[derive(Debug, Error)]
pub enum ModularError {
    #[error("weight {0} is not supported (even weights 4..=22)")]
    UnsupportedWeight(u32),
    #[error("truncation {have} too small, need at least {need}")]
    TruncationTooSmall { have: usize, need: usize },
    #[error("input is not a Hecke eigenform: T_{t} fails at q^{n}")]
    NotEigenform { t: u64, n: usize },
    #[error("missing coefficient a({0})")]
    MissingCoefficient(usize),
    #[error("requested entry outside the table bounds: {0}")]
    OutOfRange(String),
    #[error("tolerance {0} unachievable at this truncation")]
    ToleranceUnachievable(f64),
}

// ---------------------------------------------------------------------------
// Bernoulli numbers and divisor sums
// ---------------------------------------------------------------------------

/// Bernoulli numbers `B_0 ..= B_n` (B_1 = -1/2 convention).
pub fn bernoulli_list(n: u32) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n as usize + 1);
    b.push(BigRational::one());
    for m in 1..=n {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += BigRational::from_integer(crate::rat::binomial(m + 1, j as u32)) * bj;
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// Single Bernoulli number.
pub fn bernoulli(n: u32) -> BigRational {
    bernoulli_list(n).pop().unwrap()
}

/// Exact `zeta(1 - 2r) = -B_{2r} / (2r)` for `r >= 1`.
pub fn zeta_neg_odd(r: u32) -> BigRational {
    -bernoulli(2 * r) / BigRational::from_integer(BigInt::from(2 * r))
}

/// Divisor power sum `sigma_e(n)`.
pub fn sigma(n: u64, e: u32) -> BigInt {
    let mut acc = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            acc += BigInt::from(d).pow(e);
            let other = n / d;
            if other != d {
                acc += BigInt::from(other).pow(e);
            }
        }
        d += 1;
    }
    acc
}

/// Primes up to `limit` inclusive.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2usize;
    while p * p <= n {
        if sieve[p] {
            for m in (p * p..=n).step_by(p) {
                sieve[m] = false;
            }
        }
        p += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

// ---------------------------------------------------------------------------
// q-expansions
// ---------------------------------------------------------------------------

/// Exact q-expansion of a degree-1 form: coefficients `a(0) ..= a(N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion1 {
    pub weight: u32,
    coeffs: Vec<BigRational>,
}

impl QExpansion1 {
    pub fn new(weight: u32, coeffs: Vec<BigRational>) -> Self {
        QExpansion1 { weight, coeffs }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, n: usize) -> Result<&BigRational, ModularError> {
        self.coeffs.get(n).ok_or(ModularError::MissingCoefficient(n))
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        QExpansion1::new(self.weight, self.coeffs.iter().map(|v| v * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.weight, other.weight);
        let n = self.coeffs.len().min(other.coeffs.len());
        QExpansion1::new(
            self.weight,
            (0..n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(),
        )
    }

    /// Product; weights add, truncation is the shorter of the two.
    /// Integer-coefficient inputs take an integer convolution fast path.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        let weight = self.weight + other.weight;
        let is_int = |f: &QExpansion1| f.coeffs.iter().all(|c| c.denom().is_one());
        if is_int(self) && is_int(other) {
            let a: Vec<BigInt> = self.coeffs[..n].iter().map(|c| c.numer().clone()).collect();
            let b: Vec<BigInt> = other.coeffs[..n].iter().map(|c| c.numer().clone()).collect();
            let mut out = vec![BigInt::zero(); n];
            for (i, ai) in a.iter().enumerate() {
                if ai.is_zero() {
                    continue;
                }
                for (j, bj) in b.iter().enumerate().take(n - i) {
                    if !bj.is_zero() {
                        out[i + j] += ai * bj;
                    }
                }
            }
            return QExpansion1 {
                weight,
                coeffs: out.into_iter().map(BigRational::from_integer).collect(),
            };
        }
        let mut coeffs = vec![BigRational::zero(); n];
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if !other.coeffs[j].is_zero() {
                    coeffs[i + j] += &self.coeffs[i] * &other.coeffs[j];
                }
            }
        }
        QExpansion1 {
            weight,
            coeffs,
        }
    }

    /// Classical normalized Hecke operator `T_p` on q-expansions:
    /// `(T_p f)(n) = a(pn) + p^{k-1} a(n/p)`.
    pub fn hecke_tp(&self, p: u64) -> Self {
        let k = self.weight;
        let n_out = self.truncation() / p as usize;
        let pk = BigRational::from_integer(BigInt::from(p).pow(k - 1));
        let mut coeffs = Vec::with_capacity(n_out + 1);
        for n in 0..=n_out {
            let mut v = self.coeffs[n * p as usize].clone();
            if n % p as usize == 0 {
                v += &pk * &self.coeffs[n / p as usize];
            }
            coeffs.push(v);
        }
        QExpansion1 {
            weight: k,
            coeffs,
        }
    }
}

/// Weight-k Eisenstein series `1 - (2k/B_k) sum sigma_{k-1}(n) q^n`.
pub fn eisenstein_q(k: u32, n: usize) -> QExpansion1 {
    let factor = -BigRational::from_integer(BigInt::from(2 * k)) / bernoulli(k);
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(BigRational::one());
    for m in 1..=n {
        coeffs.push(&factor * BigRational::from_integer(sigma(m as u64, k - 1)));
    }
    QExpansion1::new(k, coeffs)
}

/// Role of a basis member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormTag {
    Eisenstein,
    CuspEigenform,
}

/// A Hecke eigenbasis member with its `T_p` eigenvalues for primes up to
/// the truncation.
#[derive(Clone, Debug)]
pub struct BasisForm {
    pub tag: FormTag,
    pub form: QExpansion1,
    pub eigenvalues: Vec<(u64, BigRational)>,
}

/// Supported weights: even, 4 through 22 (where the cusp space has
/// dimension at most one and the eigenbasis is rational).
pub fn supported_weight(k: u32) -> bool {
    (4..=22).contains(&k) && k % 2 == 0
}

/// Hecke eigenbasis of `M_k(SL_2(Z))`: the Eisenstein series followed by
/// the normalized cuspidal eigenform when the cusp space is nonzero. Cusp
/// forms are carved out of monomials in the weight-4 and weight-6
/// Eisenstein series by exact echelon reduction.
pub fn qexp_basis(k: u32, n: usize) -> Result<Vec<BasisForm>, ModularError> {
    if !supported_weight(k) {
        return Err(ModularError::UnsupportedWeight(k));
    }
    let primes = primes_up_to(n as u64);
    let eis = eisenstein_q(k, n);
    let eis_eigen: Vec<(u64, BigRational)> = primes
        .iter()
        .map(|&p| {
            (
                p,
                BigRational::from_integer(BigInt::one() + BigInt::from(p).pow(k - 1)),
            )
        })
        .collect();
    let mut out = vec![BasisForm {
        tag: FormTag::Eisenstein,
        form: eis,
        eigenvalues: eis_eigen,
    }];
    if let Some(cusp) = cusp_eigenform(k, n)? {
        let eigen: Vec<(u64, BigRational)> = primes
            .iter()
            .map(|&p| (p, cusp.coeffs[p as usize].clone()))
            .collect();
        out.push(BasisForm {
            tag: FormTag::CuspEigenform,
            form: cusp,
            eigenvalues: eigen,
        });
    }
    Ok(out)
}

/// Monomial exponents `(a, b)` with `4a + 6b = k`, lexicographically
/// decreasing; the count equals `dim M_k`.
fn weight_monomials(k: u32) -> Vec<(u32, u32)> {
    let mut v = Vec::new();
    for a in (0..=(k / 4)).rev() {
        let rem = k - 4 * a;
        if rem % 6 == 0 {
            v.push((a, rem / 6));
        }
    }
    v
}

/// The normalized cusp eigenform of weight k, or `None` when the cusp
/// space is trivial. For weights up to 22 the cusp space has dimension at
/// most 1, so echelon reduction alone diagonalizes the Hecke action.
pub fn cusp_eigenform(k: u32, n: usize) -> Result<Option<QExpansion1>, ModularError> {
    if !supported_weight(k) {
        return Err(ModularError::UnsupportedWeight(k));
    }
    let monos = weight_monomials(k);
    if monos.len() < 2 {
        return Ok(None);
    }
    if n < monos.len() {
        return Err(ModularError::TruncationTooSmall {
            have: n,
            need: monos.len(),
        });
    }
    let e4 = eisenstein_q(4, n);
    let e6 = eisenstein_q(6, n);
    let one = {
        let mut c = vec![BigRational::zero(); n + 1];
        c[0] = BigRational::one();
        QExpansion1::new(0, c)
    };
    let mut rows: QMatrix = Vec::new();
    for &(a, b) in &monos {
        let mut acc = one.clone();
        for _ in 0..a {
            acc = acc.mul(&e4);
        }
        for _ in 0..b {
            acc = acc.mul(&e6);
        }
        rows.push(acc.coeffs);
    }
    let pivots = rref(&mut rows);
    // Echelon vector with pivot at q^1 is the normalized cusp form.
    let cusp_row = pivots.iter().position(|&p| p == 1).expect("cusp pivot");
    Ok(Some(QExpansion1::new(k, rows[cusp_row].clone())))
}

// ---------------------------------------------------------------------------
// Satake parameters
// ---------------------------------------------------------------------------

/// Degree-1 Satake data at a prime: the normalized trace
/// `alpha + alpha^{-1} = a_p / p^{(k-1)/2}` written exactly as
/// `c * sqrt(p)` with rational `c`, plus numeric roots.
#[derive(Clone, Debug)]
pub struct SatakeData {
    pub p: u64,
    pub weight: u32,
    pub ap: BigRational,
    /// Rational `c` with `alpha + alpha^{-1} = c * sqrt(p)`.
    pub trace_sqrtp_coeff: BigRational,
    /// Exact square of the trace, `a_p^2 / p^{k-1}`.
    pub trace_sq: BigRational,
    /// Exact `alpha^2 + alpha^{-2} = trace_sq - 2`.
    pub tau: BigRational,
    /// Numeric root of `X^2 - (a_p / p^{(k-1)/2}) X + 1`.
    pub alpha: Complex64,
}

/// Builds Satake data from a stored Hecke eigenvalue.
pub fn satake(weight: u32, p: u64, ap: &BigRational) -> SatakeData {
    let pk = BigRational::from_integer(BigInt::from(p).pow(weight - 1));
    let trace_sq = ap * ap / &pk;
    let tau = &trace_sq - qi(2);
    // a_p / p^{(k-1)/2} = (a_p / p^{k/2}) sqrt(p)
    let trace_sqrtp_coeff = ap / BigRational::from_integer(BigInt::from(p).pow(weight / 2));
    let t = ratio_to_f64(&trace_sq).sqrt() * ratio_to_f64(ap).signum();
    let disc = t * t - 4.0;
    let alpha = if disc <= 0.0 {
        Complex64::new(t / 2.0, (-disc).sqrt() / 2.0)
    } else {
        Complex64::new((t + disc.sqrt()) / 2.0, 0.0)
    };
    SatakeData {
        p,
        weight,
        ap: ap.clone(),
        trace_sqrtp_coeff,
        trace_sq,
        tau,
        alpha,
    }
}

// ---------------------------------------------------------------------------
// Fast integer coefficients for the weight-12 cusp form
// ---------------------------------------------------------------------------

/// Coefficients `tau(1) ..= tau(limit)` of the weight-12 cusp form, via the
/// eighth power of the cube of the Euler product (sparse by the pentagonal
/// expansion of the cube). Independent of the echelon route, so the two can
/// be cross-checked.
pub fn tau_table(limit: usize) -> Vec<i128> {
    // prod (1-q^n)^3 = sum_{m>=0} (-1)^m (2m+1) q^{m(m+1)/2}
    let mut cube: Vec<(usize, i128)> = Vec::new();
    let mut m = 0usize;
    loop {
        let off = m * (m + 1) / 2;
        if off >= limit {
            break;
        }
        let c = (2 * m + 1) as i128;
        cube.push((off, if m % 2 == 0 { c } else { -c }));
        m += 1;
    }
    let mut acc = vec![0i128; limit];
    acc[0] = 1;
    for _ in 0..8 {
        let mut next = vec![0i128; limit];
        for (off, c) in &cube {
            for i in 0..limit - off {
                if acc[i] != 0 {
                    next[i + off] += acc[i] * c;
                }
            }
        }
        acc = next;
    }
    // tau(n) is the coefficient of q^{n-1} in the product
    acc
}

/// Coefficient `tau(n)`, 1-based, from a precomputed table.
pub fn tau_from_table(table: &[i128], n: usize) -> i128 {
    table[n - 1]
}

/// Numeric Satake traces `(p, a_p as f64)` of the weight-12 cusp form for
/// all primes up to `cutoff`.
pub fn delta_satake_traces(cutoff: u64) -> Vec<(u64, f64)> {
    let table = tau_table(cutoff as usize);
    primes_up_to(cutoff)
        .into_iter()
        .map(|p| (p, tau_from_table(&table, p as usize).to_f64().unwrap()))
        .collect()
}

// ---------------------------------------------------------------------------
// Serialization of the q-expansion table
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct QExpansionDto {
    weight: u32,
    coeffs: Vec<String>,
}

impl Serialize for QExpansion1 {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        QExpansionDto {
            weight: self.weight,
            coeffs: self.coeffs.iter().map(ratio_to_string).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for QExpansion1 {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let dto = QExpansionDto::deserialize(de)?;
        let coeffs = dto
            .coeffs
            .iter()
            .map(|s| parse_ratio(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Ok(QExpansion1::new(dto.weight, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qr;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_list(12);
        assert_eq!(b[2], qr(1, 6));
        assert_eq!(b[4], qr(-1, 30));
        assert_eq!(b[12], qr(-691, 2730));
        assert_eq!(zeta_neg_odd(1), qr(-1, 12));
        assert_eq!(zeta_neg_odd(3), qr(-1, 252)); // zeta(-5)
    }

    #[test]
    fn eisenstein_coefficients() {
        let e4 = eisenstein_q(4, 5);
        assert_eq!(*e4.coeff(0).unwrap(), qi(1));
        assert_eq!(*e4.coeff(1).unwrap(), qi(240));
        assert_eq!(*e4.coeff(2).unwrap(), qi(2160));
        let e6 = eisenstein_q(6, 2);
        assert_eq!(*e6.coeff(1).unwrap(), qi(-504));
    }

    #[test]
    fn delta_from_echelon() {
        let d = cusp_eigenform(12, 30).unwrap().unwrap();
        assert_eq!(*d.coeff(0).unwrap(), qi(0));
        assert_eq!(*d.coeff(1).unwrap(), qi(1));
        assert_eq!(*d.coeff(2).unwrap(), qi(-24));
        assert_eq!(*d.coeff(3).unwrap(), qi(252));
        assert_eq!(*d.coeff(4).unwrap(), qi(-1472));
    }

    #[test]
    fn delta_matches_eta_route() {
        let d = cusp_eigenform(12, 200).unwrap().unwrap();
        let table = tau_table(200);
        for n in 1..=200usize {
            assert_eq!(
                *d.coeff(n).unwrap(),
                BigRational::from_integer(BigInt::from(tau_from_table(&table, n)))
            );
        }
    }

    #[test]
    fn no_cusp_form_below_twelve() {
        for k in [4u32, 6, 8, 10, 14] {
            assert!(cusp_eigenform(k, 20).unwrap().is_none());
        }
        for k in [12u32, 16, 18, 20, 22] {
            assert!(cusp_eigenform(k, 20).unwrap().is_some());
        }
    }

    #[test]
    fn eigenform_multiplicativity() {
        for k in [12u32, 16, 18, 20, 22] {
            let f = cusp_eigenform(k, 100).unwrap().unwrap();
            // coprime multiplicativity
            assert_eq!(
                f.coeff(6).unwrap(),
                &(f.coeff(2).unwrap() * f.coeff(3).unwrap())
            );
            assert_eq!(
                f.coeff(15).unwrap(),
                &(f.coeff(3).unwrap() * f.coeff(5).unwrap())
            );
            // prime power recursion a(p^{r+1}) = a(p) a(p^r) - p^{k-1} a(p^{r-1})
            for p in [2usize, 3] {
                let pk = BigRational::from_integer(BigInt::from(p as u64).pow(k - 1));
                for r in 1..3 {
                    let lhs = f.coeff(p.pow(r + 1)).unwrap().clone();
                    let rhs = f.coeff(p).unwrap() * f.coeff(p.pow(r)).unwrap()
                        - &pk * f.coeff(p.pow(r - 1)).unwrap();
                    assert_eq!(lhs, rhs, "k={k} p={p} r={r}");
                }
            }
        }
    }

    #[test]
    fn hecke_operator_eigenvalue() {
        let f = cusp_eigenform(12, 50).unwrap().unwrap();
        let tf = f.hecke_tp(2);
        // eigenvalue -24 read off the first coefficients
        for n in 1..=tf.truncation() {
            assert_eq!(
                *tf.coeff(n).unwrap(),
                f.coeff(n).unwrap() * qi(-24),
                "n = {n}"
            );
        }
    }

    #[test]
    fn basis_contents() {
        let basis = qexp_basis(12, 20).unwrap();
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0].tag, FormTag::Eisenstein);
        assert_eq!(basis[1].tag, FormTag::CuspEigenform);
        // Eisenstein T_2 eigenvalue 1 + 2^11
        let (_, ev) = &basis[0].eigenvalues[0];
        assert_eq!(*ev, qi(2049));
        assert!(qexp_basis(13, 20).is_err());
        assert!(qexp_basis(24, 20).is_err());
    }

    #[test]
    fn satake_unit_circle() {
        let f = cusp_eigenform(12, 10).unwrap().unwrap();
        let sd = satake(12, 2, f.coeff(2).unwrap());
        assert!((sd.alpha.norm() - 1.0).abs() < 1e-12);
        // alpha + 1/alpha = a_2 / 2^{11/2}
        let lhs = sd.alpha + 1.0 / sd.alpha;
        let want = -24.0 / 2f64.powf(5.5);
        assert!((lhs.re - want).abs() < 1e-12 && lhs.im.abs() < 1e-12);
        // tau = trace^2 - 2 exactly
        assert_eq!(sd.tau, qr(9, 32) - qi(2));
        // trace written as c sqrt(p): c = a_p / p^{k/2}
        assert_eq!(sd.trace_sqrtp_coeff, qr(-24, 64));
        let num = ratio_to_f64(&sd.trace_sqrtp_coeff) * 2f64.sqrt();
        assert!((num - want).abs() < 1e-12);
    }

    #[test]
    fn satake_symmetric_point() {
        // hypothetical a_p = 0: alpha = i
        let sd = satake(12, 2, &qi(0));
        assert!((sd.alpha - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(sd.tau, qi(-2));
    }

    #[test]
    fn qexp_serde_round_trip() {
        let f = cusp_eigenform(16, 12).unwrap().unwrap();
        let json = serde_json::to_string(&f).unwrap();
        let back: QExpansion1 = serde_json::from_str(&json).unwrap();
        assert_eq!(f, back);
    }
}
