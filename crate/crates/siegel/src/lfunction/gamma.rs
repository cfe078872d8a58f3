//! Gamma-side factors: numeric completed-zeta and gamma products, and the
//! exact polynomial ratio of half-integral gamma factors with its
//! functional equation.
//!
//! Numeric pieces: `xi(s) = pi^{-s/2} Gamma(s/2) zeta(s)`, the product
//! `Gamma_n(s) = prod_j Gamma(s - (j-1)/2)`, the Eisenstein normalizer
//! `gamma^n_k(s) = Gamma_n(s + k/2)/Gamma_n(s) xi(2s) prod xi(4s - 2j)`,
//! and the completed-L factor
//! `Gamma_rho(s) = Gamma_R(s + eps_q) prod_j Gamma_C(s + k + lambda_j - j)`.
//!
//! Exact piece: the gamma ratio
//!
//!   gamma_{p,q}(s) = Gamma_p((s+q)/2) / Gamma_p(s/2)            (q even)
//!                  = Gamma_{p-1}((s+q)/2) / Gamma_{p-1}((s-1)/2) (q odd)
//!
//! is a polynomial in `s` of degree `pq/2` (q even) or `(p-1)(q+1)/2`
//! (q odd) and satisfies
//! `gamma_{p,q}(s) = (-1)^{deg} gamma_{p,q}(p - q + 1 - s)`.

use num_complex::Complex64;
use thiserror::Error;

use crate::qpoly::UniPoly;
use crate::rat::{qi, qr};

#[derive(Debug, Error)]
pub enum GammaError {
    #[error("gamma factor has a pole at the requested point (argument {0})")]
    PoleAtPoint(Complex64),
    #[error("zeta pole at s = 1 hit by the requested point")]
    ZetaPole,
    #[error("parameters out of range: {0}")]
    BadParameters(String),
}

const PI: f64 = std::f64::consts::PI;

/// Lanczos coefficients (g = 7, n = 9).
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

fn near_nonpositive_integer(z: Complex64) -> bool {
    z.im.abs() < 1e-9 && z.re < 0.5 && (z.re - z.re.round()).abs() < 1e-9
}

/// Principal-branch log-gamma, Lanczos with reflection.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z)
        let pi_z = Complex64::new(PI, 0.0) * z;
        return (Complex64::new(PI, 0.0) / pi_z.sin()).ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let zm = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (zm + i as f64);
    }
    let t = zm + 7.5;
    0.5 * (2.0 * PI).ln() + (zm + 0.5) * t.ln() - t + acc.ln()
}

/// Complex gamma function.
pub fn gamma_fn(z: Complex64) -> Result<Complex64, GammaError> {
    if near_nonpositive_integer(z) {
        return Err(GammaError::PoleAtPoint(z));
    }
    Ok(ln_gamma(z).exp())
}

/// Riemann zeta by Euler-Maclaurin with reflection for far-left arguments.
pub fn zeta(s: Complex64) -> Result<Complex64, GammaError> {
    if (s - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
        return Err(GammaError::ZetaPole);
    }
    if s.re < -4.0 {
        // zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1-s) zeta(1-s)
        let one_minus = Complex64::new(1.0, 0.0) - s;
        let z = zeta(one_minus)?;
        let g = gamma_fn(one_minus)?;
        let factor = Complex64::new(2.0, 0.0).powc(s)
            * Complex64::new(PI, 0.0).powc(s - 1.0)
            * (Complex64::new(PI, 0.0) * s / 2.0).sin();
        return Ok(factor * g * z);
    }
    let n = 40usize;
    let j_max = 15usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 1..=n {
        acc += Complex64::new(m as f64, 0.0).powc(-s);
    }
    let nf = n as f64;
    let n_pow = Complex64::new(nf, 0.0).powc(-s);
    acc -= n_pow * 0.5;
    acc += Complex64::new(nf, 0.0).powc(Complex64::new(1.0, 0.0) - s) / (s - 1.0);
    // Bernoulli corrections: B_{2j}/(2j)! * s (s+1) ... (s+2j-2) * N^{-s-2j+1}
    let b = crate::modular::bernoulli_list(2 * j_max as u32);
    let mut rising = s; // s rising factorial of length 2j-1
    let mut fact = 1.0f64;
    for j in 1..=j_max {
        let two_j = 2 * j;
        fact *= (two_j - 1) as f64 * if two_j >= 2 { two_j as f64 } else { 1.0 };
        // extend rising factorial to length 2j - 1
        if j > 1 {
            rising = rising * (s + (two_j as f64 - 3.0)) * (s + (two_j as f64 - 2.0));
        }
        let bj = crate::rat::ratio_to_f64(&b[two_j]);
        let term = bj / fact * rising * Complex64::new(nf, 0.0).powc(-s - (two_j as f64 - 1.0));
        acc += term;
    }
    Ok(acc)
}

/// Completed zeta `xi(s) = pi^{-s/2} Gamma(s/2) zeta(s)`.
pub fn xi(s: Complex64) -> Result<Complex64, GammaError> {
    let g = gamma_fn(s / 2.0)?;
    let z = zeta(s)?;
    Ok(Complex64::new(PI, 0.0).powc(-s / 2.0) * g * z)
}

/// `Gamma_n(s) = prod_{j=1}^n Gamma(s - (j-1)/2)`.
pub fn gamma_n(n: u32, s: Complex64) -> Result<Complex64, GammaError> {
    let mut acc = Complex64::new(1.0, 0.0);
    for j in 1..=n {
        acc *= gamma_fn(s - (j as f64 - 1.0) / 2.0)?;
    }
    Ok(acc)
}

/// Eisenstein normalizer `gamma^n_k(s)`.
pub fn gamma_nk(n: u32, k: u32, s: Complex64) -> Result<Complex64, GammaError> {
    let mut acc = gamma_n(n, s + k as f64 / 2.0)? / gamma_n(n, s)?;
    acc *= xi(2.0 * s)?;
    for j in 1..=(n / 2) {
        acc *= xi(4.0 * s - 2.0 * j as f64)?;
    }
    Ok(acc)
}

/// `Gamma_R(s) = pi^{-s/2} Gamma(s/2)`.
pub fn gamma_r(s: Complex64) -> Result<Complex64, GammaError> {
    Ok(Complex64::new(PI, 0.0).powc(-s / 2.0) * gamma_fn(s / 2.0)?)
}

/// `Gamma_C(s) = 2 (2 pi)^{-s} Gamma(s)`.
pub fn gamma_c(s: Complex64) -> Result<Complex64, GammaError> {
    Ok(2.0 * Complex64::new(2.0 * PI, 0.0).powc(-s) * gamma_fn(s)?)
}

/// Parity constant: 0 for even q, 1 for odd q.
pub fn epsilon_q(q: u32) -> u32 {
    q % 2
}

/// Completed-L gamma factor
/// `Gamma_rho(s) = Gamma_R(s + eps_q) prod_{j=1}^q Gamma_C(s + k + lambda_j - j)`.
pub fn gamma_rho(q: u32, k: u32, lambdas: &[i64], s: Complex64) -> Result<Complex64, GammaError> {
    if lambdas.len() != q as usize {
        return Err(GammaError::BadParameters(format!(
            "need {q} highest-weight entries, got {}",
            lambdas.len()
        )));
    }
    let mut acc = gamma_r(s + epsilon_q(q) as f64)?;
    for (j, &l) in lambdas.iter().enumerate() {
        acc *= gamma_c(s + k as f64 + l as f64 - (j as f64 + 1.0))?;
    }
    Ok(acc)
}

/// Exact polynomial `gamma_{p,q}(s)`.
pub fn gamma_pq_poly(p: u32, q: u32) -> Result<UniPoly, GammaError> {
    if q < 1 || p < q || p > 8 {
        return Err(GammaError::BadParameters(format!(
            "need 1 <= q <= p <= 8, got p = {p}, q = {q}"
        )));
    }
    let mut acc = UniPoly::constant(qi(1));
    if q % 2 == 0 {
        // Gamma(z + q/2)/Gamma(z) with z = (s - j + 1)/2 for j = 1..=p
        for j in 1..=p {
            for i in 0..(q / 2) {
                // factor (s - j + 1)/2 + i
                let c0 = qr(1 - j as i64, 2) + qi(i as i64);
                acc = acc.mul(&UniPoly::linear(c0, qr(1, 2)));
            }
        }
    } else {
        // Gamma(z + (q+1)/2)/Gamma(z) with z = (s - j)/2 for j = 1..=p-1
        for j in 1..=(p - 1) {
            for i in 0..((q + 1) / 2) {
                let c0 = qr(-(j as i64), 2) + qi(i as i64);
                acc = acc.mul(&UniPoly::linear(c0, qr(1, 2)));
            }
        }
    }
    Ok(acc)
}

/// Degree predicted for `gamma_{p,q}`.
pub fn gamma_pq_degree(p: u32, q: u32) -> usize {
    if q % 2 == 0 {
        (p * q / 2) as usize
    } else {
        ((p - 1) * (q + 1) / 2) as usize
    }
}

/// Exact check of `gamma_{p,q}(s) = (-1)^{deg} gamma_{p,q}(p - q + 1 - s)`;
/// returns the difference polynomial, zero on success.
pub fn gamma_pq_functional_residual(p: u32, q: u32) -> Result<UniPoly, GammaError> {
    let g = gamma_pq_poly(p, q)?;
    let deg = gamma_pq_degree(p, q);
    let reflected = g.compose_affine(&qi(p as i64 - q as i64 + 1), &qi(-1));
    let signed = if deg % 2 == 0 {
        reflected
    } else {
        reflected.scale(&qi(-1))
    };
    Ok(g.sub(&signed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_known_values() {
        assert!((gamma_fn(c(5.0, 0.0)).unwrap().re - 24.0).abs() < 1e-10);
        assert!((gamma_fn(c(0.5, 0.0)).unwrap().re - PI.sqrt()).abs() < 1e-12);
        // reflection region
        let g = gamma_fn(c(-1.5, 0.0)).unwrap().re;
        assert!((g - 4.0 * PI.sqrt() / 3.0).abs() < 1e-11);
        assert!(gamma_fn(c(-2.0, 0.0)).is_err());
        assert!(gamma_fn(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn zeta_known_values() {
        assert!((zeta(c(2.0, 0.0)).unwrap().re - PI * PI / 6.0).abs() < 1e-13);
        assert!((zeta(c(0.0, 0.0)).unwrap().re + 0.5).abs() < 1e-13);
        // negative axis loses a couple of digits to cancellation
        assert!((zeta(c(-1.0, 0.0)).unwrap().re + 1.0 / 12.0).abs() < 1e-11);
        // reflection region, zeta(-5) = -1/252
        assert!((zeta(c(-5.0, 0.0)).unwrap().re + 1.0 / 252.0).abs() < 1e-11);
        assert!(zeta(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn xi_functional_equation_sample() {
        for &(re, im) in &[(0.3, 0.0), (0.5, 1.0), (0.7, -2.0), (0.1, 0.4)] {
            let s = c(re, im);
            let lhs = xi(s).unwrap();
            let rhs = xi(c(1.0, 0.0) - s).unwrap();
            assert!(
                (lhs - rhs).norm() < 1e-10 * lhs.norm().max(1.0),
                "xi asymmetric at {s}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn gamma_pq_small_cases() {
        // gamma_{2,2}(s) = s(s-1)/4
        let g22 = gamma_pq_poly(2, 2).unwrap();
        assert_eq!(g22.coeffs(), &[qi(0), qr(-1, 4), qr(1, 4)]);
        assert_eq!(g22.degree(), 2);
        // gamma_{1,1} is the empty product
        let g11 = gamma_pq_poly(1, 1).unwrap();
        assert_eq!(g11.degree(), 0);
        assert_eq!(g11.coeff(0), qi(1));
        // gamma_{3,1}(s) = (s-1)(s-2)/4, degree (p-1)(q+1)/2 = 2
        let g31 = gamma_pq_poly(3, 1).unwrap();
        assert_eq!(g31.degree(), 2);
        assert_eq!(g31.eval_rational(&qi(1)), qi(0));
        assert_eq!(g31.eval_rational(&qi(2)), qi(0));
        assert_eq!(g31.eval_rational(&qi(3)), qr(1, 2));
    }

    #[test]
    fn gamma_pq_degree_and_functional_equation() {
        for p in 1..=8u32 {
            for q in 1..=p {
                let g = gamma_pq_poly(p, q).unwrap();
                assert_eq!(g.degree(), gamma_pq_degree(p, q), "degree p={p} q={q}");
                let res = gamma_pq_functional_residual(p, q).unwrap();
                assert!(res.is_zero(), "functional equation fails at p={p} q={q}");
            }
        }
        assert!(gamma_pq_poly(2, 3).is_err());
        assert!(gamma_pq_poly(9, 1).is_err());
    }

    #[test]
    fn gamma_pq_matches_numeric_gamma_ratio() {
        // cross-check the polynomial against the Gamma product it encodes
        for &(p, q) in &[(2u32, 2u32), (3, 1), (4, 2), (5, 3)] {
            let poly = gamma_pq_poly(p, q).unwrap();
            for &s0 in &[2.3f64, 3.7, 5.1] {
                let s = c(s0, 0.0);
                let numeric = if q % 2 == 0 {
                    gamma_n(p, (s + q as f64) / 2.0).unwrap() / gamma_n(p, s / 2.0).unwrap()
                } else {
                    gamma_n(p - 1, (s + q as f64) / 2.0).unwrap()
                        / gamma_n(p - 1, (s - 1.0) / 2.0).unwrap()
                };
                let exact = poly.eval(s);
                assert!(
                    (numeric - exact).norm() < 1e-9 * exact.norm().max(1.0),
                    "p={p} q={q} s={s0}: {numeric} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn epsilon_parity() {
        assert_eq!(epsilon_q(2), 0);
        assert_eq!(epsilon_q(3), 1);
    }

    #[test]
    fn gamma_rho_positive_on_real_axis() {
        let v = gamma_rho(1, 12, &[0], c(3.0, 0.0)).unwrap();
        assert!(v.re > 0.0 && v.im.abs() < 1e-12);
        assert!(gamma_rho(2, 12, &[1], c(3.0, 0.0)).is_err());
    }

    #[test]
    fn gamma_nk_runs_at_generic_point() {
        let v = gamma_nk(2, 6, c(1.3, 0.2)).unwrap();
        assert!(v.norm() > 0.0);
    }
}
