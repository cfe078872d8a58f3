//! Pullback structure of the degree-2 Eisenstein series on the diagonal,
//! and the numeric disk integral behind its spectral normalization.
//!
//! Restricting the degree-2 series to `diag(z, w)` at the holomorphic
//! point gives a double q-expansion `b(m, n) = sum_{b^2 <= 4mn} a(m, b, n)`.
//! Expanded over the Hecke eigenbasis `h_i` of the weight, the table must
//! decompose as `b(m, n) = sum_i c_i h_i(m) h_i(n)` — diagonally, with the
//! Eisenstein coefficient pinned to 1 by the `n = 0` column. The
//! decomposition here solves the full bilinear system exactly and reports
//! the off-diagonal entries and the residual instead of assuming either.
//!
//! The disk integral (`q = 1`): for the degree-lambda harmonic polynomial
//! `P` with `d = 2k` and its pure `(Delta - E)` polynomial `Q`,
//!
//!   c(s) = int_{|S| < 1} conj(Q(R(S), conj(s))) (1 - |S|^2)^{k + lambda}
//!          (1 - |S|^2)^{s - 2} dA(S),
//!
//! with `R(S) = -(1/2i) [[S, -2i], [-2i, 4 conj(S) (1 - |S|^2)^{-1}]]`
//! contracted entry-wise over the split index classes. Lebesgue measure on
//! the real and imaginary parts; the degree-1 closed form `c(s) = -pi`
//! pins the convention.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::harmonic::{
    check_pluriharmonic, compute_q, mixed_degree_one, project_harmonic, HarmonicError,
    HarmonicPolynomial, QPolynomial, SplitShape,
};
use crate::lfunction::gamma::ln_gamma;
use crate::linalg::{solve_overdetermined, QMatrix};
use crate::link::{Index, LinkSet, Mark};
use crate::modular::eisenstein2::FourierTable2;
use crate::modular::{qexp_basis, BasisForm, FormTag, ModularError};
use crate::rat::ratio_to_string;

#[derive(Debug, Error)]
pub enum PullbackError {
    #[error("table max_det {max_det} insufficient for truncation {n} (need >= n^2)")]
    InsufficientMaxDet { max_det: u64, n: u64 },
    #[error("system is overdetermined by only {surplus} equations, need >= 20")]
    NotOverdetermined { surplus: i64 },
    #[error("parameters outside the convergent range: Re(s) + k + lambda = {0} <= 1")]
    Divergent(f64),
    #[error("quadrature error {got} above requested tolerance {want}")]
    QuadratureTolerance { got: f64, want: f64 },
    #[error("unsupported weight of the standard block: {0} (use 1 or 2)")]
    UnsupportedLambda(u32),
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
}

// ---------------------------------------------------------------------------
// Diagonal restriction and eigenbasis decomposition
// ---------------------------------------------------------------------------

/// Double q-expansion `b(m, n)` of the diagonal restriction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleQExpansion {
    pub weight: u32,
    pub trunc: u64,
    coeffs: BTreeMap<(u64, u64), BigRational>,
}

impl DoubleQExpansion {
    /// Builds a table from explicit entries (tests and degenerate inputs).
    pub fn from_entries(
        weight: u32,
        trunc: u64,
        coeffs: BTreeMap<(u64, u64), BigRational>,
    ) -> Self {
        DoubleQExpansion {
            weight,
            trunc,
            coeffs,
        }
    }

    pub fn coeff(&self, m: u64, n: u64) -> BigRational {
        self.coeffs
            .get(&(m, n))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(u64, u64), &BigRational)> {
        self.coeffs.iter()
    }
}

/// `b(m, n) = sum over b^2 <= 4mn of a(m, b, n)`, for `m, n <= trunc`.
pub fn restrict_diagonal(
    table: &FourierTable2,
    trunc: u64,
) -> Result<DoubleQExpansion, PullbackError> {
    if table.max_det < trunc * trunc {
        return Err(PullbackError::InsufficientMaxDet {
            max_det: table.max_det,
            n: trunc,
        });
    }
    let mut coeffs = BTreeMap::new();
    for m in 0..=trunc {
        for n in 0..=trunc {
            let mut acc = BigRational::zero();
            let bound = isqrt_u64(4 * m * n);
            for b in -(bound as i64)..=(bound as i64) {
                acc += table
                    .coefficient(m as i64, b, n as i64)
                    .map_err(PullbackError::Modular)?;
            }
            if !acc.is_zero() {
                coeffs.insert((m, n), acc);
            }
        }
    }
    Ok(DoubleQExpansion {
        weight: table.weight,
        trunc,
        coeffs,
    })
}

fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    while r * r > n {
        r -= 1;
    }
    r
}

/// Result of the exact bilinear solve over the eigenbasis.
#[derive(Clone, Debug, Serialize)]
pub struct PullbackDecomposition {
    /// Basis member names, Eisenstein first.
    pub basis: Vec<String>,
    /// Coefficient matrix `c[i][j]` as `"num/den"` strings, row i = left
    /// factor.
    pub coefficients: Vec<Vec<String>>,
    /// Number of inconsistent rows of the overdetermined system.
    pub residual_rank: usize,
    /// First `(m, n)` equation witnessing inconsistency, if any.
    pub first_failure: Option<(u64, u64)>,
    /// Surplus equations beyond the unknown count.
    pub surplus: i64,
}

impl PullbackDecomposition {
    pub fn coefficient(&self, i: usize, j: usize) -> BigRational {
        crate::rat::parse_ratio(&self.coefficients[i][j]).expect("stored rational")
    }
}

fn form_name(tag: FormTag, weight: u32) -> String {
    match tag {
        FormTag::Eisenstein => format!("E{weight}"),
        FormTag::CuspEigenform => {
            if weight == 12 {
                "Delta".to_string()
            } else {
                format!("Cusp{weight}")
            }
        }
    }
}

/// Solves `b(m, n) = sum_{i,j} c_{ij} h_i(m) h_j(n)` exactly over the
/// Hecke eigenbasis and reports the full coefficient matrix plus the
/// consistency data of the overdetermined system.
pub fn decompose_pullback(
    dq: &DoubleQExpansion,
    k: u32,
    trunc: u64,
) -> Result<PullbackDecomposition, PullbackError> {
    let basis: Vec<BasisForm> = qexp_basis(k, trunc as usize)?;
    let dim = basis.len();
    let unknowns = dim * dim;
    let n_eq = ((trunc + 1) * (trunc + 1)) as i64;
    let surplus = n_eq - unknowns as i64;
    if surplus < 20 {
        return Err(PullbackError::NotOverdetermined { surplus });
    }
    let mut rows: QMatrix = Vec::with_capacity(n_eq as usize);
    let mut rhs: Vec<BigRational> = Vec::with_capacity(n_eq as usize);
    let mut eq_index: Vec<(u64, u64)> = Vec::with_capacity(n_eq as usize);
    for m in 0..=trunc {
        for n in 0..=trunc {
            let mut row = Vec::with_capacity(unknowns);
            for i in 0..dim {
                for j in 0..dim {
                    let hi = basis[i].form.coeff(m as usize)?;
                    let hj = basis[j].form.coeff(n as usize)?;
                    row.push(hi * hj);
                }
            }
            rows.push(row);
            rhs.push(dq.coeff(m, n));
            eq_index.push((m, n));
        }
    }
    let out = solve_overdetermined(&rows, &rhs);
    let coeff_strings = match &out.solution {
        Some(x) => (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| ratio_to_string(&x[i * dim + j]))
                    .collect()
            })
            .collect(),
        None => vec![vec!["0".to_string(); dim]; dim],
    };
    Ok(PullbackDecomposition {
        basis: basis.iter().map(|b| form_name(b.tag, k)).collect(),
        coefficients: coeff_strings,
        residual_rank: out.residual_rank,
        first_failure: out.first_bad_row.map(|r| eq_index[r]),
        surplus,
    })
}

// ---------------------------------------------------------------------------
// The disk integral
// ---------------------------------------------------------------------------

/// One numeric sample of the disk integral.
#[derive(Clone, Debug)]
pub struct CIntegralSample {
    pub s: Complex64,
    pub k: u32,
    pub lambda: u32,
    pub value: Complex64,
    pub quadrature_error: f64,
}

/// The degree-lambda pluri-harmonic polynomial over the 1+1 split with
/// `d = 2k`: the mixed link for lambda = 1, the projected degree-2
/// combination for lambda = 2.
pub fn standard_harmonic(lambda: u32, k: u32) -> Result<HarmonicPolynomial, PullbackError> {
    let d = (2 * k) as u16;
    match lambda {
        1 => Ok(mixed_degree_one(SplitShape::new(1, 1, d, 1)?)?),
        2 => {
            let shape = SplitShape::new(1, 1, d, 2)?;
            let seed = HarmonicPolynomial::new(
                shape,
                vec![(
                    LinkSet::from_pairs(&[
                        (Index::star(1), Index::sub(1)),
                        (Index::star(2), Index::sub(2)),
                    ])
                    .map_err(HarmonicError::from)?,
                    crate::rat::qi(1),
                )],
            )?;
            let proj = project_harmonic(&seed)?;
            debug_assert!(proj.harmonic_found);
            debug_assert!(check_pluriharmonic(&proj.projected).is_ok());
            Ok(proj.projected)
        }
        other => Err(PullbackError::UnsupportedLambda(other)),
    }
}

/// Entry of the contraction matrix for one link class at the point `S`.
fn link_value(link_marks: (Mark, Mark), s_pt: Complex64) -> Complex64 {
    let half_i = Complex64::new(0.0, 0.5);
    match link_marks {
        (Mark::Star, Mark::Star) => half_i * s_pt,
        (Mark::Sub, Mark::Sub) => {
            let r2 = s_pt.norm_sqr();
            4.0 * half_i * s_pt.conj() / (1.0 - r2)
        }
        _ => Complex64::new(1.0, 0.0),
    }
}

/// Value of the pure `(Delta - E)` polynomial contracted with `R(S)` at
/// coefficient arguments `(k, sigma)`.
fn q_value(q: &QPolynomial, k: u32, sigma: Complex64, s_pt: Complex64) -> Complex64 {
    let kc = Complex64::new(k as f64, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (links, coeff) in q.terms() {
        let mut prod = coeff.eval(kc, sigma);
        for l in links.links() {
            prod *= link_value((l.first().mark, l.second().mark), s_pt);
        }
        acc += prod;
    }
    acc
}

fn adaptive_simpson<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    fn simpson<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
        (f(a) + 4.0 * f(0.5 * (a + b)) + f(b)) * ((b - a) / 6.0)
    }
    let whole = simpson(f, a, b);
    let m = 0.5 * (a + b);
    let fine = simpson(f, a, m) + simpson(f, m, b);
    if depth == 0 || (fine - whole).norm() < 15.0 * tol {
        fine + (fine - whole) / 15.0
    } else {
        adaptive_simpson(f, a, m, tol / 2.0, depth - 1)
            + adaptive_simpson(f, m, b, tol / 2.0, depth - 1)
    }
}

/// Numeric disk integral for `q = 1`; `lambda` in {1, 2}, convergence
/// requires `Re(s) + k + lambda > 1`.
pub fn c_integral_numeric(
    lambda: u32,
    k: u32,
    s: Complex64,
    tol: f64,
) -> Result<CIntegralSample, PullbackError> {
    let conv = s.re + k as f64 + lambda as f64;
    if conv <= 1.0 {
        return Err(PullbackError::Divergent(conv));
    }
    let p = standard_harmonic(lambda, k)?;
    let q = compute_q(&p, false)?;
    c_integral_of_q(&q, lambda, k, s, tol)
}

/// Disk integral of an explicit pure `(Delta - E)` polynomial; separated
/// out so the degenerate zero polynomial can be exercised directly.
pub fn c_integral_of_q(
    q: &QPolynomial,
    lambda: u32,
    k: u32,
    s: Complex64,
    tol: f64,
) -> Result<CIntegralSample, PullbackError> {
    if q.is_zero() {
        return Ok(CIntegralSample {
            s,
            k,
            lambda,
            value: Complex64::new(0.0, 0.0),
            quadrature_error: 0.0,
        });
    }
    let sigma = s.conj();
    let rho_exp = (k + lambda) as f64;
    let integrand = |r: f64, theta: f64| -> Complex64 {
        let s_pt = Complex64::from_polar(r, theta);
        let w = q_value(q, k, sigma, s_pt).conj();
        let base = 1.0 - r * r;
        // (1 - r^2)^{k + lambda} (1 - r^2)^{s - 2}, principal branch on a
        // positive base
        let weight = Complex64::new(base, 0.0).powc(s - 2.0 + rho_exp);
        w * weight * r
    };
    // The substar-substar contraction carries a factor 1/(1 - r^2); the
    // integrand still vanishes toward r = 1 but evaluates as 0 * inf at the
    // exact endpoint, so stop just short of it.
    let r_top = 1.0 - 1e-12;
    let radial = |theta: f64, rtol: f64| -> Complex64 {
        adaptive_simpson(&|r| integrand(r, theta), 0.0, r_top, rtol, 22)
    };
    let polar = |m: usize, rtol: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let theta = std::f64::consts::TAU * j as f64 / m as f64;
            acc += radial(theta, rtol);
        }
        acc * std::f64::consts::TAU / m as f64
    };
    let rtol = tol / 30.0;
    let coarse = polar(16, rtol);
    let fine = polar(32, rtol);
    let err = (fine - coarse).norm() + rtol * 30.0;
    if err > tol.max(1e-14) * (1.0 + fine.norm()) {
        return Err(PullbackError::QuadratureTolerance {
            got: err,
            want: tol,
        });
    }
    Ok(CIntegralSample {
        s,
        k,
        lambda,
        value: fine,
        quadrature_error: err,
    })
}

/// Constancy report for the gamma-normalized disk integral.
#[derive(Clone, Debug)]
pub struct ConjectureReport {
    pub lambda: u32,
    pub k: u32,
    /// Per-sample `(s, integral value, gamma-normalized quotient)`.
    pub samples: Vec<(Complex64, Complex64, Complex64)>,
    /// Mean quotient, the fitted constant.
    pub constant: Complex64,
    pub max_rel_deviation: f64,
    pub max_quadrature_error: f64,
}

/// Evaluates `c((s + 1 - k)/2)` on the grid, divides by
/// `Gamma(s + k + lambda - 1)/Gamma(s + k)`, and reports how constant the
/// quotient is.
pub fn conjecture61_check(
    lambda: u32,
    k: u32,
    s_grid: &[Complex64],
    tol: f64,
) -> Result<ConjectureReport, PullbackError> {
    assert!(!s_grid.is_empty());
    let mut samples = Vec::with_capacity(s_grid.len());
    let mut max_err = 0.0f64;
    for &s in s_grid {
        let sigma = (s + 1.0 - k as f64) / 2.0;
        let sample = c_integral_numeric(lambda, k, sigma, tol)?;
        let ratio =
            (ln_gamma(s + k as f64 + lambda as f64 - 1.0) - ln_gamma(s + k as f64)).exp();
        let quotient = sample.value / ratio;
        max_err = max_err.max(sample.quadrature_error);
        samples.push((s, sample.value, quotient));
    }
    let mean = samples.iter().map(|&(_, _, q)| q).sum::<Complex64>() / samples.len() as f64;
    let max_rel_deviation = samples
        .iter()
        .map(|&(_, _, q)| (q - mean).norm() / mean.norm())
        .fold(0.0, f64::max);
    Ok(ConjectureReport {
        lambda,
        k,
        samples,
        constant: mean,
        max_rel_deviation,
        max_quadrature_error: max_err,
    })
}
