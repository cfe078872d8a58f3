//! Exact rational scalars and their `"num/den"` text form.
//!
//! Every exact quantity in this crate is a `BigRational`. For interchange
//! (JSON payloads, CSV tables, the cache) rationals are rendered as decimal
//! strings `"num/den"`, with the `/den` part omitted when the denominator
//! is one, so no consumer ever sees a rounded value.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Shorthand for an integer rational.
pub fn qi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`.
pub fn qr(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a rational as `"num"` or `"num/den"`.
pub fn ratio_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"num"` or `"num/den"` decimal strings.
pub fn parse_ratio(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| format!("invalid numerator in rational {s:?}"))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| format!("invalid denominator in rational {s:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in rational {s:?}"));
    }
    Ok(BigRational::new(n, d))
}

/// Exact binomial coefficient.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Nearest f64 to an exact rational; numerator and denominator are scaled
/// independently so arbitrarily large values convert without overflow.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    let num = r.numer();
    let den = r.denom();
    let shift_n = num.bits().saturating_sub(128);
    let shift_d = den.bits().saturating_sub(128);
    let n = big_to_f64(&(num >> shift_n));
    let d = big_to_f64(&(den >> shift_d));
    (n / d) * (shift_n as f64 - shift_d as f64).exp2()
}

fn big_to_f64(x: &BigInt) -> f64 {
    let (_, digits) = x.to_u64_digits();
    let mut acc = 0.0f64;
    for d in digits.iter().rev() {
        acc = acc * 1.8446744073709552e19 + *d as f64;
    }
    if x.is_negative() {
        -acc
    } else {
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_strings() {
        for r in [qi(0), qi(7), qr(-3, 4), qr(22, 7)] {
            assert_eq!(parse_ratio(&ratio_to_string(&r)).unwrap(), r);
        }
        assert_eq!(ratio_to_string(&qi(5)), "5");
        assert_eq!(ratio_to_string(&qr(-1, 4)), "-1/4");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("a/b").is_err());
    }

    #[test]
    fn f64_conversion() {
        assert_eq!(ratio_to_f64(&qr(1, 2)), 0.5);
        let big = BigRational::new(BigInt::from(10).pow(40), BigInt::from(3));
        let approx = ratio_to_f64(&big);
        assert!((approx / 3.333333333333333e39 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(6, 2), BigInt::from(15));
        assert_eq!(binomial(5, 7), BigInt::zero());
    }
}
