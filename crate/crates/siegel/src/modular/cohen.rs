//! Cohen's class-number function `H(r, N)`, computed exactly.
//!
//! For `N = 0`, `H(r, 0) = zeta(1 - 2r)`. For `N >= 1` with
//! `(-1)^r N = D0 f^2` (`D0` a fundamental discriminant),
//!
//!   H(r, N) = L(1-r, chi_{D0}) sum_{g | f} mu(g) chi_{D0}(g) g^{r-1} sigma_{2r-1}(f/g),
//!
//! and `H(r, N) = 0` when `(-1)^r N` is not congruent to 0 or 1 mod 4.
//! `L(1-r, chi)` comes from the generalized Bernoulli number
//! `B_{r,chi} = |D|^{r-1} sum_a chi(a) B_r(a/|D|)` as `-B_{r,chi}/r`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{bernoulli_list, sigma, zeta_neg_odd};
use crate::rat::binomial;

/// Kronecker symbol `(a | n)` extended to all integers.
pub fn kronecker(a: i64, n: i64) -> i64 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut a = a;
    let mut n = n;
    let mut result = 1i64;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    // factor out 2s from n
    if n % 2 == 0 {
        if a % 2 == 0 {
            return 0;
        }
        while n % 2 == 0 {
            n /= 2;
            match a.rem_euclid(8) {
                3 | 5 => result = -result,
                _ => {}
            }
        }
    }
    a = a.rem_euclid(n);
    // Jacobi symbol by reciprocity
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            match n.rem_euclid(8) {
                3 | 5 => result = -result,
                _ => {}
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.rem_euclid(4) == 3 && n.rem_euclid(4) == 3 {
            result = -result;
        }
        a = a.rem_euclid(n);
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// True for fundamental discriminants (including 1).
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    let m = d.rem_euclid(4);
    if m == 1 {
        squarefree(d.unsigned_abs())
    } else if m == 0 {
        let q = d / 4;
        let qm = q.rem_euclid(4);
        (qm == 2 || qm == 3) && squarefree(q.unsigned_abs())
    } else {
        false
    }
}

fn squarefree(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        while n % p == 0 {
            n /= p;
        }
        p += 1;
    }
    true
}

/// Writes a discriminant `d ≡ 0,1 (mod 4)` as `d0 * f^2` with `d0`
/// fundamental.
pub fn fundamental_decomposition(d: i64) -> (i64, u64) {
    assert!(d.rem_euclid(4) <= 1, "not a discriminant: {d}");
    let mut f = 1u64;
    let mut best = (d, 1u64);
    while (f * f) as i64 <= d.abs() {
        if d % ((f * f) as i64) == 0 {
            let d0 = d / ((f * f) as i64);
            if d0.rem_euclid(4) <= 1 && is_fundamental_discriminant(d0) {
                best = (d0, f);
            }
        }
        f += 1;
    }
    best
}

/// Bernoulli polynomial `B_n(x)` evaluated exactly.
pub fn bernoulli_poly(n: u32, x: &BigRational) -> BigRational {
    let b = bernoulli_list(n);
    let mut acc = BigRational::zero();
    let mut xpow = BigRational::one();
    // B_n(x) = sum_i C(n,i) B_i x^{n-i}; accumulate from i = n down so the
    // power of x grows with the loop.
    for i in (0..=n).rev() {
        acc += BigRational::from_integer(binomial(n, i)) * &b[i as usize] * &xpow;
        xpow *= x;
    }
    acc
}

/// Generalized Bernoulli number `B_{n, chi_d}` for the Kronecker character
/// of discriminant `d`.
pub fn generalized_bernoulli(n: u32, d: i64) -> BigRational {
    let f = d.unsigned_abs();
    // coefficients of B_n(x), highest power first, computed once
    let b = bernoulli_list(n);
    let poly: Vec<BigRational> = (0..=n)
        .map(|i| BigRational::from_integer(binomial(n, i)) * &b[i as usize])
        .collect();
    let mut acc = BigRational::zero();
    for a in 1..=f {
        let chi = kronecker(d, a as i64);
        if chi == 0 {
            continue;
        }
        let x = BigRational::new(BigInt::from(a), BigInt::from(f));
        let mut v = BigRational::zero();
        for c in &poly {
            v = v * &x + c;
        }
        acc += BigRational::from_integer(BigInt::from(chi)) * v;
    }
    acc * BigRational::from_integer(BigInt::from(f)).pow(n as i32 - 1)
}

/// `L(1 - n, chi_d) = -B_{n, chi_d} / n` exactly.
pub fn dirichlet_l_neg(n: u32, d: i64) -> BigRational {
    -generalized_bernoulli(n, d) / BigRational::from_integer(BigInt::from(n))
}

fn moebius(mut n: u64) -> i64 {
    let mut cnt = 0;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            cnt += 1;
        }
        p += 1;
    }
    if n > 1 {
        cnt += 1;
    }
    if cnt % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Cohen's function `H(r, N)` for `r >= 1`, `N >= 0`.
pub fn cohen_h(r: u32, n: u64) -> BigRational {
    assert!(r >= 1);
    if n == 0 {
        return zeta_neg_odd(r);
    }
    let sign = if r % 2 == 0 { 1i64 } else { -1 };
    let d = sign * n as i64;
    if d.rem_euclid(4) > 1 {
        return BigRational::zero();
    }
    let (d0, f) = fundamental_decomposition(d);
    let lead = dirichlet_l_neg(r, d0);
    let mut acc = BigRational::zero();
    for g in 1..=f {
        if f % g != 0 {
            continue;
        }
        let mu = moebius(g);
        if mu == 0 {
            continue;
        }
        let chi = kronecker(d0, g as i64);
        if chi == 0 {
            continue;
        }
        let term = BigRational::from_integer(BigInt::from(mu * chi))
            * BigRational::from_integer(BigInt::from(g).pow(r - 1))
            * BigRational::from_integer(sigma(f / g, 2 * r - 1));
        acc += term;
    }
    lead * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{qi, qr};

    #[test]
    fn kronecker_small_values() {
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-4, 5), 1);
        assert_eq!(kronecker(-3, 3), 0);
        assert_eq!(kronecker(5, 5), 0);
        assert_eq!(kronecker(8, 3), -1);
        assert_eq!(kronecker(-8, 7), -1);
        assert_eq!(kronecker(-8, 3), 1);
    }

    #[test]
    fn fundamental_discriminants() {
        for d in [-3i64, -4, -7, -8, -11, -15, -19, -20, -23, -24, 5, 8, 12] {
            assert!(is_fundamental_discriminant(d), "{d}");
        }
        for d in [-9i64, -12, -16, -25, -27, -28, 9] {
            assert!(!is_fundamental_discriminant(d), "{d}");
        }
        assert_eq!(fundamental_decomposition(-12), (-3, 2));
        assert_eq!(fundamental_decomposition(-16), (-4, 2));
        assert_eq!(fundamental_decomposition(-27), (-3, 3));
        assert_eq!(fundamental_decomposition(-7), (-7, 1));
    }

    #[test]
    fn cohen_h_r1_table() {
        // Hurwitz class numbers
        let cases = [
            (0u64, qr(-1, 12)),
            (3, qr(1, 3)),
            (4, qr(1, 2)),
            (7, qi(1)),
            (8, qi(1)),
            (11, qi(1)),
            (12, qr(4, 3)),
            (15, qi(2)),
            (16, qr(3, 2)),
            (19, qi(1)),
            (20, qi(2)),
            (23, qi(3)),
        ];
        for (n, want) in cases {
            assert_eq!(cohen_h(1, n), want, "H(1,{n})");
        }
        for n in [1u64, 2, 5, 6, 9, 10, 13] {
            assert!(cohen_h(1, n).is_zero(), "H(1,{n}) should vanish");
        }
    }

    #[test]
    fn cohen_h_r1_matches_reduced_form_count() {
        // Brute-force oracle: weighted count of reduced positive definite
        // binary quadratic forms of discriminant -N.
        fn hurwitz_brute(n: u64) -> BigRational {
            let ni = n as i64;
            let mut acc = BigRational::zero();
            for a in 1..=(ni) {
                for b in -(a as i64)..=(a as i64) {
                    if (b * b + ni) % (4 * a) != 0 {
                        continue;
                    }
                    let c = (b * b + ni) / (4 * a);
                    if c < a {
                        continue;
                    }
                    // reduced: |b| <= a <= c with b >= 0 when |b| = a or a = c
                    if (b.abs() == a || a == c) && b < 0 {
                        continue;
                    }
                    if a > c {
                        continue;
                    }
                    let w = if a == b && b == c {
                        qr(1, 3)
                    } else if a == c && b == 0 {
                        qr(1, 2)
                    } else {
                        qi(1)
                    };
                    acc += w;
                }
            }
            acc
        }
        for n in 1..=60u64 {
            let h = cohen_h(1, n);
            if n % 4 == 1 || n % 4 == 2 {
                assert!(h.is_zero());
            } else {
                assert_eq!(h, hurwitz_brute(n), "H(1,{n})");
            }
        }
    }

    #[test]
    fn cohen_h_r3_values() {
        // hand-computed via generalized Bernoulli numbers
        assert_eq!(cohen_h(3, 0), qr(-1, 252));
        assert_eq!(cohen_h(3, 3), qr(-2, 9));
        assert_eq!(cohen_h(3, 4), qr(-1, 2));
        assert_eq!(cohen_h(3, 7), qr(-16, 7));
        assert_eq!(cohen_h(3, 12), qr(-74, 9));
        assert!(cohen_h(3, 5).is_zero());
        assert!(cohen_h(3, 6).is_zero());
    }

    #[test]
    fn bernoulli_poly_values() {
        // B_3(x) = x^3 - 3/2 x^2 + 1/2 x
        assert_eq!(bernoulli_poly(3, &qr(1, 3)), qr(1, 27));
        assert_eq!(bernoulli_poly(3, &qr(2, 3)), qr(-1, 27));
        assert_eq!(bernoulli_poly(1, &qr(1, 4)), qr(-1, 4));
    }
}
