//! Numeric Petersson norms of degree-1 cusp forms.
//!
//! The norm is the integral of `|f(z)|^2 y^{k-2}` over the standard
//! fundamental domain `|x| <= 1/2, |z| >= 1`. Two routes are provided:
//!
//! * [`petersson_norm_qexp`]: evaluate `f` from its truncated q-expansion
//!   and integrate with Gauss-Legendre panels in `x` and adaptive Simpson
//!   in `y`;
//! * [`petersson_norm_eta`]: weight 12 only — evaluate through the Euler
//!   product directly and integrate in the variable `u = exp(-2 pi y)`
//!   with fixed high-order Gauss-Legendre rules.
//!
//! The two share no evaluation code or quadrature layout, so their
//! agreement is a real cross-check.

use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::{ModularError, QExpansion1};
use crate::rat::ratio_to_f64;

const TWO_PI: f64 = std::f64::consts::TAU;

/// 16-point Gauss-Legendre nodes and weights on [-1, 1].
const GL16: [(f64, f64); 16] = [
    (-0.9894009349916499, 0.027152459411754095),
    (-0.9445750230732326, 0.062253523938647894),
    (-0.8656312023878318, 0.09515851168249278),
    (-0.755404408355003, 0.12462897125553387),
    (-0.6178762444026438, 0.14959598881657673),
    (-0.45801677765722737, 0.16915651939500254),
    (-0.2816035507792589, 0.18260341504492358),
    (-0.09501250983763744, 0.1894506104550685),
    (0.09501250983763744, 0.1894506104550685),
    (0.2816035507792589, 0.18260341504492358),
    (0.45801677765722737, 0.16915651939500254),
    (0.6178762444026438, 0.14959598881657673),
    (0.755404408355003, 0.12462897125553387),
    (0.8656312023878318, 0.09515851168249278),
    (0.9445750230732326, 0.062253523938647894),
    (0.9894009349916499, 0.027152459411754095),
];

fn gl16<F: Fn(f64) -> f64>(a: f64, b: f64, f: &F) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GL16.iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    let whole = simpson(f, a, b);
    let m = 0.5 * (a + b);
    let left = simpson(f, a, m);
    let right = simpson(f, m, b);
    if depth == 0 || (left + right - whole).abs() < 15.0 * tol {
        left + right + (left + right - whole) / 15.0
    } else {
        adaptive_simpson(f, a, m, tol / 2.0, depth - 1)
            + adaptive_simpson(f, m, b, tol / 2.0, depth - 1)
    }
}

/// Evaluates a truncated q-expansion at `z = x + iy`.
fn eval_qexp(coeffs: &[f64], x: f64, y: f64) -> Complex64 {
    let q = Complex64::from_polar((-TWO_PI * y).exp(), TWO_PI * x);
    // Horner in q from the top coefficient
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * q + c;
    }
    acc * q // q-expansions here start at q^1 (cusp forms)
}

/// Integrand `|f|^2 y^{k-2}` from floating-point coefficients `a(1)..a(N)`.
fn integrand(coeffs: &[f64], k: u32, x: f64, y: f64) -> f64 {
    let v = eval_qexp(coeffs, x, y);
    v.norm_sqr() * y.powi(k as i32 - 2)
}

fn float_coeffs(f: &QExpansion1) -> Vec<f64> {
    f.coeffs()[1..].iter().map(ratio_to_f64).collect()
}

/// Truncation error bound for `|f|^2` at the domain bottom `y >= sqrt(3)/2`:
/// dominated by the first omitted coefficient against geometric decay.
fn truncation_bound(coeffs: &[f64], k: u32) -> f64 {
    let n = coeffs.len() as f64;
    let qmin: f64 = (-TWO_PI * 0.866).exp();
    // crude coefficient growth envelope |a(n)| <= C n^k
    let cmax = coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| c.abs() / ((i + 1) as f64).powi(k as i32))
        .fold(0.0f64, f64::max);
    cmax * (n + 1.0).powi(k as i32) * qmin.powf(n + 1.0) / (1.0 - qmin)
}

/// Petersson norm from the q-expansion; `tol` is a relative tolerance and
/// the returned pair is `(value, absolute error estimate)`.
pub fn petersson_norm_qexp(f: &QExpansion1, tol: f64) -> Result<(f64, f64), ModularError> {
    let k = f.weight;
    let coeffs = float_coeffs(f);
    let y_top = 8.0;
    let x_panels = [-0.5, -0.25, 0.0, 0.25, 0.5];
    // Coarse pass fixes the scale for the adaptive pass and the
    // achievability check.
    let rough: f64 = {
        let inner = |x: f64| -> f64 {
            let y0 = (1.0 - x * x).sqrt();
            gl16(y0, 2.0, &|y| integrand(&coeffs, k, x, y))
                + gl16(2.0, y_top, &|y| integrand(&coeffs, k, x, y))
        };
        x_panels
            .windows(2)
            .map(|w| gl16(w[0], w[1], &inner))
            .sum()
    };
    let scale = rough.abs().max(f64::MIN_POSITIVE);
    let abs_tol = tol * scale;
    let trunc_err = truncation_bound(&coeffs, k);
    if trunc_err > abs_tol {
        return Err(ModularError::ToleranceUnachievable(tol));
    }
    let inner = |x: f64| -> f64 {
        let y0 = (1.0 - x * x).sqrt();
        adaptive_simpson(&|y| integrand(&coeffs, k, x, y), y0, y_top, abs_tol / 8.0, 24)
    };
    // x-integral over [-1/2, 1/2]; the integrand is even in x for real
    // coefficients but both halves are integrated anyway.
    let mut acc = 0.0;
    for w in x_panels.windows(2) {
        acc += gl16(w[0], w[1], &inner);
    }
    Ok((acc, trunc_err + abs_tol))
}

/// Weight-12 norm through the Euler product, on the `u = exp(-2 pi y)`
/// chart. `terms` controls the product truncation.
pub fn petersson_norm_eta(terms: usize, tol: f64) -> Result<(f64, f64), ModularError> {
    let eval = |x: f64, y: f64| -> Complex64 {
        let q = Complex64::from_polar((-TWO_PI * y).exp(), TWO_PI * x);
        let mut acc = q;
        let mut qn = Complex64::new(1.0, 0.0);
        for _ in 1..=terms {
            qn *= q;
            let factor = Complex64::new(1.0, 0.0) - qn;
            // 24th power by squaring
            let f2 = factor * factor;
            let f4 = f2 * f2;
            let f8 = f4 * f4;
            let f16 = f8 * f8;
            acc *= f16 * f8;
            if qn.norm() < 1e-18 {
                break;
            }
        }
        acc
    };
    let qmin: f64 = (-TWO_PI * 0.866).exp();
    let trunc_err_rel = 24.0 * qmin.powi(terms as i32 + 1) / (1.0 - qmin);
    if trunc_err_rel > tol {
        return Err(ModularError::ToleranceUnachievable(tol));
    }
    let inner = |x: f64| -> f64 {
        let y0 = (1.0 - x * x).sqrt();
        let u0 = (-TWO_PI * y0).exp();
        // int_{y0}^inf g dy = int_0^{u0} g(y(u)) du / (2 pi u)
        let h = |u: f64| -> f64 {
            if u <= 0.0 {
                return 0.0;
            }
            let y = -u.ln() / TWO_PI;
            let v = eval(x, y);
            v.norm_sqr() * y.powi(10) / (TWO_PI * u)
        };
        // geometric panels toward u = 0 where y(u) varies logarithmically
        let mut acc = 0.0;
        let mut hi = u0;
        for _ in 0..24 {
            let lo = 0.5 * hi;
            acc += gl16(lo, hi, &h);
            hi = lo;
        }
        acc + gl16(0.0, hi, &h)
    };
    let mut acc = 0.0;
    let panels = [-0.5, -0.375, -0.25, -0.125, 0.0, 0.125, 0.25, 0.375, 0.5];
    for w in panels.windows(2) {
        acc += gl16(w[0], w[1], &inner);
    }
    Ok((acc, (trunc_err_rel + tol) * acc.abs()))
}

/// Convenience wrapper returning the weight-12 coefficients as floats from
/// the integer table.
pub fn delta_float_coeffs(n: usize) -> Vec<f64> {
    super::tau_table(n)
        .into_iter()
        .map(|v| v.to_f64().unwrap())
        .collect()
}
