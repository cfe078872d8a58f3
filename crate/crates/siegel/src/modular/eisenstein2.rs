//! Degree-2 Siegel Eisenstein Fourier coefficients at the holomorphic
//! point, as exact rationals.
//!
//! Half-integral matrices are written as triples `(a, b, c)` standing for
//! `[[a, b/2], [b/2, c]]`. Coefficients are constant on GL2(Z) classes, so
//! the table stores one value per reduced representative
//! `0 <= b <= a <= c`. With `D = 4ac - b^2` and `e = gcd(a, b, c)` the
//! stored value is
//!
//!   a(T) = (-2k / B_k) / zeta(3 - 2k) * sum_{g | e} g^{k-1} H(k-1, D / g^2),
//!
//! normalized so that `a(0) = 1`. Rank-one entries collapse to the degree-1
//! Eisenstein coefficients of the content (the degree-lowering consistency
//! that the tests pin), and the rank-two values are cross-validated through
//! the diagonal-restriction product identity at weight 4.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::cohen::cohen_h;
use super::{bernoulli, zeta_neg_odd, ModularError};
use crate::rat::{parse_ratio, ratio_to_string};

/// GL2(Z)-reduction of a positive semidefinite integral triple to the
/// canonical representative with `0 <= b <= a <= c` (or `(0, 0, e)` for
/// rank <= 1).
pub fn reduce_form(a: i64, b: i64, c: i64) -> (u64, u64, u64) {
    assert!(4 * a * c - b * b >= 0 && a >= 0 && c >= 0, "form must be PSD");
    let (mut a, mut b, mut c) = (a, b, c);
    loop {
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
        }
        if a == 0 {
            // PSD forces b = 0 once a = 0
            debug_assert_eq!(b, 0);
            return (0, 0, c as u64);
        }
        // translate b into (-a, a]
        let r = b.rem_euclid(2 * a);
        let nb = if r > a { r - 2 * a } else { r };
        let t = (nb - b) / (2 * a);
        c += a * t * t + b * t;
        b = nb;
        if a <= c {
            break;
        }
    }
    (a as u64, b.unsigned_abs(), c as u64)
}

/// Exact rational Fourier table of the degree-2 Eisenstein series of even
/// weight `k >= 4`, covering all classes with `det T <= max_det` (and
/// rank-one classes of content up to `isqrt(max_det)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierTable2 {
    pub weight: u32,
    pub max_det: u64,
    entries: BTreeMap<(u64, u64, u64), BigRational>,
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    while r * r > n {
        r -= 1;
    }
    r
}

/// Builds the coefficient table.
pub fn siegel_eisenstein2(k: u32, max_det: u64) -> Result<FourierTable2, ModularError> {
    if k < 4 || k % 2 != 0 {
        return Err(ModularError::UnsupportedWeight(k));
    }
    // -2k/B_k divided by zeta(3-2k)
    let norm = (-BigRational::from_integer(BigInt::from(2 * k)) / bernoulli(k))
        / zeta_neg_odd(k - 1);
    let coefficient = |a: u64, b: u64, c: u64| -> BigRational {
        let d4 = 4 * a * c - b * b;
        let content = a.gcd(&b).gcd(&c);
        let mut acc = BigRational::zero();
        for g in 1..=content {
            if content % g != 0 {
                continue;
            }
            acc += BigRational::from_integer(BigInt::from(g).pow(k - 1))
                * cohen_h(k - 1, d4 / (g * g));
        }
        &norm * acc
    };
    let mut entries = BTreeMap::new();
    entries.insert((0, 0, 0), BigRational::from_integer(1.into()));
    // rank 1: (0, 0, e)
    for e in 1..=isqrt(max_det) {
        entries.insert((0, 0, e), coefficient(0, 0, e));
    }
    // rank 2 reduced: 1 <= a, 0 <= b <= a <= c, 4ac - b^2 <= 4 max_det
    let mut a = 1u64;
    while 3 * a * a <= 4 * max_det {
        for b in 0..=a {
            let mut c = a;
            while 4 * a * c - b * b <= 4 * max_det {
                entries.insert((a, b, c), coefficient(a, b, c));
                c += 1;
            }
        }
        a += 1;
    }
    Ok(FourierTable2 {
        weight: k,
        max_det,
        entries,
    })
}

impl FourierTable2 {
    /// Coefficient at any half-integral `T = (a, b, c)`, looked up through
    /// the reduced representative.
    pub fn coefficient(&self, a: i64, b: i64, c: i64) -> Result<BigRational, ModularError> {
        if a < 0 || c < 0 || 4 * a * c - b * b < 0 {
            return Err(ModularError::OutOfRange(format!(
                "({a},{b},{c}) is not positive semidefinite"
            )));
        }
        let key = reduce_form(a, b, c);
        self.entries.get(&key).cloned().ok_or_else(|| {
            ModularError::OutOfRange(format!(
                "({a},{b},{c}) reduces to {key:?}, outside max_det {}",
                self.max_det
            ))
        })
    }

    /// Reduced representatives and their values, in key order.
    pub fn entries(&self) -> impl Iterator<Item = (&(u64, u64, u64), &BigRational)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// CSV export with an `a,b,c,value` header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,b,c,value\n");
        for (&(a, b, c), v) in &self.entries {
            out.push_str(&format!("{a},{b},{c},{}\n", ratio_to_string(v)));
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct TableDto {
    weight: u32,
    max_det: u64,
    entries: Vec<(u64, u64, u64, String)>,
}

impl Serialize for FourierTable2 {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        TableDto {
            weight: self.weight,
            max_det: self.max_det,
            entries: self
                .entries
                .iter()
                .map(|(&(a, b, c), v)| (a, b, c, ratio_to_string(v)))
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for FourierTable2 {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let dto = TableDto::deserialize(de)?;
        let mut entries = BTreeMap::new();
        for (a, b, c, s) in &dto.entries {
            entries.insert((*a, *b, *c), parse_ratio(s).map_err(D::Error::custom)?);
        }
        Ok(FourierTable2 {
            weight: dto.weight,
            max_det: dto.max_det,
            entries,
        })
    }
}
