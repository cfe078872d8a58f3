//! Pluri-harmonic polynomials over a split index set.
//!
//! Labels come in two families, starred (`1*`, `2*`, ...) and substarred
//! (`1_`, `2_`, ...). A harmonic polynomial is a rational combination of
//! link monomials `X^L` whose link sets all match the same underlying set.
//! Each symbol expands into explicit matrix entries through
//!
//!   X^{a* b*} = sum_{mu,nu <= p} e*[mu,a] e*[nu,b] (X1 X1^t)[mu,nu]
//!   X^{a* b_} = sum_{mu <= p, nu <= q} e*[mu,a] e_[nu,b] (X1 X2^t)[mu,nu]
//!   X^{a_ b_} = sum_{mu,nu <= q} e_[mu,a] e_[nu,b] (X2 X2^t)[mu,nu]
//!
//! with `X1` of size p x d and `X2` of size q x d. Pluri-harmonic means all
//! block Laplacians `sum_kappa d^2/dx[mu,kappa] dx[nu,kappa]` annihilate
//! the expansion, each e-monomial coefficient separately.
//!
//! `compute_q` feeds the monomials through the link cascade and keeps the
//! pure `(Delta - E)` part; for pluri-harmonic input the discarded part is
//! constrained to vanish whenever its `E`-links contain no mixed pair, and
//! the validator checks exactly that.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{kernel_basis, solve_overdetermined, QMatrix};
use crate::link::{expand_operator, Index, LinkSet, Mark};
use crate::mpoly::{MPoly, Var};
use crate::qpoly::CoeffPoly;
use crate::rat::{parse_ratio, qi, ratio_to_string};

/// Block sizes of the split: `X1` is `p x d`, `X2` is `q x d`, and `l`
/// bounds the copy indices of the tensor coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitShape {
    pub p: u16,
    pub q: u16,
    pub d: u16,
    pub l: u16,
}

impl SplitShape {
    pub fn new(p: u16, q: u16, d: u16, l: u16) -> Result<Self, HarmonicError> {
        if p == 0 || q == 0 || d == 0 || l == 0 {
            return Err(HarmonicError::BadShape(
                "all shape parameters must be positive".into(),
            ));
        }
        Ok(SplitShape { p, q, d, l })
    }
}

/// Rational combination of link monomials over a split index set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarmonicPolynomial {
    shape: SplitShape,
    underlying: Vec<Index>,
    terms: BTreeMap<LinkSet, BigRational>,
}

/// Pure `(Delta - E)` polynomial attached to a harmonic input; coefficients
/// are exact polynomials in `k` and `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPolynomial {
    underlying: Vec<Index>,
    terms: BTreeMap<LinkSet, CoeffPoly>,
}

impl QPolynomial {
    pub fn underlying(&self) -> &[Index] {
        &self.underlying
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LinkSet, &CoeffPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, l: &LinkSet) -> CoeffPoly {
        self.terms.get(l).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn zero() -> Self {
        QPolynomial {
            underlying: Vec::new(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        QPolynomial {
            underlying: self.underlying.clone(),
            terms: self
                .terms
                .iter()
                .map(|(l, p)| (l.clone(), p.scale(c)))
                .filter(|(_, p)| !p.is_zero())
                .collect(),
        }
    }
}

/// Failure witness of the harmonicity check: the first block Laplacian
/// with a nonzero residual.
#[derive(Clone, Debug)]
pub struct Witness {
    pub block: u8,
    pub mu: u16,
    pub nu: u16,
    pub residual: MPoly,
}

#[derive(Debug, Error)]
pub enum HarmonicError {
    #[error("invalid shape: {0}")]
    BadShape(String),
    #[error("label {0} is out of range for the shape")]
    LabelOutOfRange(String),
    #[error("monomials do not share one underlying set")]
    NotHomogeneous,
    #[error("polynomial is not pluri-harmonic: block {} Laplacian ({}, {}) residual {}", .0.block, .0.mu, .0.nu, .0.residual)]
    NotPluriharmonic(Witness),
    #[error("degree {0} exceeds the desk-scale projection bound 3")]
    DegreeTooLarge(usize),
    #[error("validation needs d even (d = 2k), got d = {0}")]
    OddColumnCount(u16),
    #[error("validation needs min(p,q) >= degree, got p = {p}, q = {q}, degree {l}")]
    ValidatorNotApplicable { p: u16, q: u16, l: usize },
    #[error("vanishing violated at (L1, L2) = ({l1}, {l2}): coefficient {coeff} (k = {k})")]
    VanishingViolation {
        l1: String,
        l2: String,
        coeff: String,
        k: u32,
    },
    #[error(transparent)]
    Link(#[from] crate::link::LinkError),
    #[error("serialization: {0}")]
    Serde(String),
}

impl HarmonicPolynomial {
    /// Builds and validates a polynomial from (link set, coefficient) pairs.
    pub fn new(
        shape: SplitShape,
        terms: Vec<(LinkSet, BigRational)>,
    ) -> Result<Self, HarmonicError> {
        let mut map: BTreeMap<LinkSet, BigRational> = BTreeMap::new();
        for (l, c) in terms {
            if c.is_zero() {
                continue;
            }
            let entry = map.entry(l).or_insert_with(BigRational::zero);
            *entry += c;
        }
        map.retain(|_, c| !c.is_zero());
        let mut underlying: Option<Vec<Index>> = None;
        for l in map.keys() {
            for idx in l.underlying() {
                check_label(&shape, idx)?;
            }
            match &underlying {
                None => underlying = Some(l.underlying()),
                Some(u) => {
                    if *u != l.underlying() {
                        return Err(HarmonicError::NotHomogeneous);
                    }
                }
            }
        }
        Ok(HarmonicPolynomial {
            shape,
            underlying: underlying.unwrap_or_default(),
            terms: map,
        })
    }

    pub fn zero(shape: SplitShape) -> Self {
        HarmonicPolynomial {
            shape,
            underlying: Vec::new(),
            terms: BTreeMap::new(),
        }
    }

    pub fn shape(&self) -> SplitShape {
        self.shape
    }

    pub fn underlying(&self) -> &[Index] {
        &self.underlying
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LinkSet, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, l: &LinkSet) -> BigRational {
        self.terms.get(l).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of links of each monomial.
    pub fn degree(&self) -> usize {
        self.underlying.len() / 2
    }

    pub fn add_scaled(&self, other: &Self, c: &BigRational) -> Result<Self, HarmonicError> {
        let mut terms: Vec<(LinkSet, BigRational)> =
            self.terms.iter().map(|(l, v)| (l.clone(), v.clone())).collect();
        for (l, v) in &other.terms {
            terms.push((l.clone(), v * c));
        }
        HarmonicPolynomial::new(self.shape, terms)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = self.clone();
        if c.is_zero() {
            out.terms.clear();
            out.underlying.clear();
            return out;
        }
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    /// Expansion into explicit matrix entries and tensor coordinates.
    pub fn expand(&self) -> MPoly {
        let mut acc = MPoly::zero();
        for (l, c) in &self.terms {
            let mut prod = MPoly::constant(c.clone());
            for link in l.links() {
                prod = prod.mul(&link_symbol(&self.shape, link.first(), link.second()));
            }
            acc = acc.add(&prod);
        }
        acc
    }
}

fn check_label(shape: &SplitShape, idx: Index) -> Result<(), HarmonicError> {
    let ok = match idx.mark {
        Mark::Star | Mark::Sub => idx.id >= 1 && idx.id <= shape.l as u32,
        Mark::Plain => false,
    };
    if ok {
        Ok(())
    } else {
        Err(HarmonicError::LabelOutOfRange(idx.to_string()))
    }
}

/// Expansion of one symbol `X^{ab}`.
fn link_symbol(shape: &SplitShape, a: Index, b: Index) -> MPoly {
    let mut acc = MPoly::zero();
    let rows = |idx: Index| -> u16 {
        match idx.mark {
            Mark::Star => shape.p,
            _ => shape.q,
        }
    };
    let evar = |idx: Index, comp: u16| -> Var {
        match idx.mark {
            Mark::Star => Var::EStar(comp, idx.id as u16),
            _ => Var::ESub(comp, idx.id as u16),
        }
    };
    let xvar = |idx: Index, comp: u16, kappa: u16| -> Var {
        match idx.mark {
            Mark::Star => Var::X1(comp, kappa),
            _ => Var::X2(comp, kappa),
        }
    };
    for mu in 1..=rows(a) {
        for nu in 1..=rows(b) {
            for kappa in 1..=shape.d {
                let mono = MPoly::var(evar(a, mu))
                    .mul(&MPoly::var(evar(b, nu)))
                    .mul(&MPoly::var(xvar(a, mu, kappa)))
                    .mul(&MPoly::var(xvar(b, nu, kappa)));
                acc = acc.add(&mono);
            }
        }
    }
    acc
}

/// One block Laplacian `sum_kappa d^2/dx[mu,kappa] dx[nu,kappa]` applied to
/// an expanded polynomial.
pub fn laplacian(expanded: &MPoly, shape: &SplitShape, block: u8, mu: u16, nu: u16) -> MPoly {
    let mut acc = MPoly::zero();
    for kappa in 1..=shape.d {
        let (u, v) = match block {
            1 => (Var::X1(mu, kappa), Var::X1(nu, kappa)),
            _ => (Var::X2(mu, kappa), Var::X2(nu, kappa)),
        };
        acc = acc.add(&expanded.partial(u).partial(v));
    }
    acc
}

/// Applies every block Laplacian; `Ok(())` means pluri-harmonic, otherwise
/// the first nonzero residual is reported. Pairs are scanned block 1 first,
/// (mu, nu) lexicographic with mu <= nu.
pub fn check_pluriharmonic(p: &HarmonicPolynomial) -> Result<(), Witness> {
    let expanded = p.expand();
    let shape = p.shape();
    for (block, size) in [(1u8, shape.p), (2u8, shape.q)] {
        for mu in 1..=size {
            for nu in mu..=size {
                let res = laplacian(&expanded, &shape, block, mu, nu);
                if !res.is_zero() {
                    return Err(Witness {
                        block,
                        mu,
                        nu,
                        residual: res,
                    });
                }
            }
        }
    }
    Ok(())
}

/// All perfect matchings of an even-sized index set.
pub fn perfect_matchings(indices: &[Index]) -> Vec<LinkSet> {
    fn go(rest: &[Index], acc: &mut Vec<(Index, Index)>, out: &mut Vec<LinkSet>) {
        if rest.is_empty() {
            out.push(LinkSet::from_pairs(acc).expect("matching"));
            return;
        }
        let first = rest[0];
        for j in 1..rest.len() {
            let partner = rest[j];
            let mut next: Vec<Index> = Vec::with_capacity(rest.len() - 2);
            next.extend(rest[1..j].iter().copied());
            next.extend(rest[j + 1..].iter().copied());
            acc.push((first, partner));
            go(&next, acc, out);
            acc.pop();
        }
    }
    assert!(indices.len() % 2 == 0, "underlying set must have even size");
    let mut out = Vec::new();
    if indices.is_empty() {
        out.push(LinkSet::empty());
        return out;
    }
    go(indices, &mut Vec::new(), &mut out);
    out
}

/// Result of the harmonic projection.
pub struct Projection {
    pub projected: HarmonicPolynomial,
    /// False when no nonzero harmonic component exists in the span of
    /// matchings of the underlying set; the projected value is then zero.
    pub harmonic_found: bool,
}

/// Component of `p` in the kernel of all block Laplacians, computed by
/// exact linear algebra on the span of perfect matchings of the underlying
/// set. The complement is taken along monomials containing a star-star or
/// substar-substar link, which is where the `1/d`-weighted trace
/// corrections live.
pub fn project_harmonic(p: &HarmonicPolynomial) -> Result<Projection, HarmonicError> {
    if p.is_zero() {
        return Ok(Projection {
            projected: p.clone(),
            harmonic_found: true,
        });
    }
    if p.degree() > 3 {
        return Err(HarmonicError::DegreeTooLarge(p.degree()));
    }
    if check_pluriharmonic(p).is_ok() {
        return Ok(Projection {
            projected: p.clone(),
            harmonic_found: true,
        });
    }
    let shape = p.shape();
    let basis = perfect_matchings(p.underlying());
    // Rows of the Laplacian matrix: one per (block, mu, nu, residual
    // monomial); columns: the matchings.
    let mut row_index: BTreeMap<(u8, u16, u16, crate::mpoly::Monomial), usize> = BTreeMap::new();
    let mut columns: Vec<BTreeMap<usize, BigRational>> = Vec::new();
    for mono in &basis {
        let poly = HarmonicPolynomial::new(shape, vec![(mono.clone(), qi(1))])?;
        let expanded = poly.expand();
        let mut col = BTreeMap::new();
        for (block, size) in [(1u8, shape.p), (2u8, shape.q)] {
            for mu in 1..=size {
                for nu in mu..=size {
                    let res = laplacian(&expanded, &shape, block, mu, nu);
                    for (m, c) in res.terms() {
                        let next = row_index.len();
                        let row = *row_index
                            .entry((block, mu, nu, m.clone()))
                            .or_insert(next);
                        col.insert(row, c.clone());
                    }
                }
            }
        }
        columns.push(col);
    }
    let rows = row_index.len();
    let mut mat: QMatrix = vec![vec![BigRational::zero(); basis.len()]; rows.max(1)];
    for (j, col) in columns.iter().enumerate() {
        for (&i, c) in col {
            mat[i][j] = c.clone();
        }
    }
    let kernel = kernel_basis(mat, basis.len());
    if kernel.is_empty() {
        return Ok(Projection {
            projected: HarmonicPolynomial::zero(shape),
            harmonic_found: false,
        });
    }
    // Solve p = (kernel combination) + (trace-monomial combination).
    let trace_cols: Vec<usize> = basis
        .iter()
        .enumerate()
        .filter(|(_, m)| m.links().iter().any(|l| !l.is_mixed()))
        .map(|(i, _)| i)
        .collect();
    let ncols = kernel.len() + trace_cols.len();
    let mut a: QMatrix = vec![vec![BigRational::zero(); ncols]; basis.len()];
    for (j, kv) in kernel.iter().enumerate() {
        for (i, c) in kv.iter().enumerate() {
            a[i][j] = c.clone();
        }
    }
    for (j, &tc) in trace_cols.iter().enumerate() {
        a[tc][kernel.len() + j] = qi(1);
    }
    let b: Vec<BigRational> = basis.iter().map(|m| p.coeff(m)).collect();
    let out = solve_overdetermined(&a, &b);
    let Some(x) = out.solution else {
        return Ok(Projection {
            projected: HarmonicPolynomial::zero(shape),
            harmonic_found: false,
        });
    };
    let mut terms: Vec<(LinkSet, BigRational)> = Vec::new();
    for (j, kv) in kernel.iter().enumerate() {
        for (i, c) in kv.iter().enumerate() {
            terms.push((basis[i].clone(), c * &x[j]));
        }
    }
    let projected = HarmonicPolynomial::new(shape, terms)?;
    if projected.is_zero() {
        return Ok(Projection {
            projected,
            harmonic_found: false,
        });
    }
    debug_assert!(check_pluriharmonic(&projected).is_ok());
    Ok(Projection {
        projected,
        harmonic_found: true,
    })
}

/// Full `(Delta - E, E)` expansion of `P(d)` applied to the prefactor:
/// the sum of the link-cascade expansions of the monomials, weighted by
/// their coefficients.
pub fn full_expansion(p: &HarmonicPolynomial) -> BTreeMap<(LinkSet, LinkSet), CoeffPoly> {
    let mut acc: BTreeMap<(LinkSet, LinkSet), CoeffPoly> = BTreeMap::new();
    for (l, c) in &p.terms {
        let e = expand_operator(l);
        for (key, poly) in e.terms() {
            let entry = acc.entry(key.clone()).or_insert_with(CoeffPoly::zero);
            *entry = entry.add(&poly.scale(c));
        }
    }
    acc.retain(|_, c| !c.is_zero());
    acc
}

/// Pure `(Delta - E)` part of the expansion, with optional verification of
/// the vanishing constraint on the discarded terms.
///
/// With `validate` set the shape must have `d = 2k` for an even `k`; the
/// polynomial is checked to be pluri-harmonic, and every coefficient
/// `c(L1, L2)` with nonempty `L2` containing no mixed link must vanish
/// identically in `s` after substituting that `k`. The constraint is only
/// claimed for `min(p, q) >= degree`, and validation refuses to run
/// otherwise.
pub fn compute_q(p: &HarmonicPolynomial, validate: bool) -> Result<QPolynomial, HarmonicError> {
    if validate {
        let shape = p.shape();
        if shape.d % 2 != 0 {
            return Err(HarmonicError::OddColumnCount(shape.d));
        }
        let k = (shape.d / 2) as u32;
        let l = p.degree();
        if (shape.p as usize) < l || (shape.q as usize) < l {
            return Err(HarmonicError::ValidatorNotApplicable {
                p: shape.p,
                q: shape.q,
                l,
            });
        }
        check_pluriharmonic(p).map_err(HarmonicError::NotPluriharmonic)?;
        let full = full_expansion(p);
        for ((l1, l2), c) in &full {
            if l2.is_empty() || l2.links().iter().any(|lk| lk.is_mixed()) {
                continue;
            }
            let at_k = c.eval_k(&qi(k as i64));
            if !at_k.is_zero() {
                return Err(HarmonicError::VanishingViolation {
                    l1: l1.to_string(),
                    l2: l2.to_string(),
                    coeff: at_k.to_string(),
                    k,
                });
            }
        }
    }
    let mut terms: BTreeMap<LinkSet, CoeffPoly> = BTreeMap::new();
    for ((l1, l2), c) in full_expansion(p) {
        if l2.is_empty() {
            terms.insert(l1, c);
        }
    }
    Ok(QPolynomial {
        underlying: p.underlying().to_vec(),
        terms,
    })
}

// ---------------------------------------------------------------------------
// JSON interchange
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct HarmonicTermDto {
    links: Vec<[String; 2]>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct HarmonicDto {
    p: u16,
    q: u16,
    d: u16,
    l: u16,
    terms: Vec<HarmonicTermDto>,
}

impl Serialize for HarmonicPolynomial {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let dto = HarmonicDto {
            p: self.shape.p,
            q: self.shape.q,
            d: self.shape.d,
            l: self.shape.l,
            terms: self
                .terms
                .iter()
                .map(|(l, c)| HarmonicTermDto {
                    links: l
                        .links()
                        .iter()
                        .map(|lk| [lk.first().to_string(), lk.second().to_string()])
                        .collect(),
                    coeff: ratio_to_string(c),
                })
                .collect(),
        };
        dto.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for HarmonicPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let dto = HarmonicDto::deserialize(de)?;
        let shape = SplitShape::new(dto.p, dto.q, dto.d, dto.l).map_err(D::Error::custom)?;
        let mut terms = Vec::new();
        for t in &dto.terms {
            let mut pairs = Vec::new();
            for [a, b] in &t.links {
                let ai: Index = a.parse().map_err(D::Error::custom)?;
                let bi: Index = b.parse().map_err(D::Error::custom)?;
                pairs.push((ai, bi));
            }
            let ls = LinkSet::from_pairs(&pairs).map_err(D::Error::custom)?;
            terms.push((ls, parse_ratio(&t.coeff).map_err(D::Error::custom)?));
        }
        HarmonicPolynomial::new(shape, terms).map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Canonical constructions used across the crate
// ---------------------------------------------------------------------------

/// The single mixed link `X^{1* 1_}`.
pub fn mixed_degree_one(shape: SplitShape) -> Result<HarmonicPolynomial, HarmonicError> {
    let l = LinkSet::from_pairs(&[(Index::star(1), Index::sub(1))])?;
    HarmonicPolynomial::new(shape, vec![(l, qi(1))])
}

/// Matching `X^{1*1_} X^{2*2_}`.
pub fn mixed_pair_diagonal() -> Result<LinkSet, HarmonicError> {
    Ok(LinkSet::from_pairs(&[
        (Index::star(1), Index::sub(1)),
        (Index::star(2), Index::sub(2)),
    ])?)
}

/// Matching `X^{1*2_} X^{2*1_}`.
pub fn mixed_pair_crossed() -> Result<LinkSet, HarmonicError> {
    Ok(LinkSet::from_pairs(&[
        (Index::star(1), Index::sub(2)),
        (Index::star(2), Index::sub(1)),
    ])?)
}

/// Matching `X^{1*2*} X^{1_2_}`.
pub fn non_mixed_pair() -> Result<LinkSet, HarmonicError> {
    Ok(LinkSet::from_pairs(&[
        (Index::star(1), Index::star(2)),
        (Index::sub(1), Index::sub(2)),
    ])?)
}

/// The degree-2 antisymmetric combination
/// `X^{1*1_} X^{2*2_} - X^{1*2_} X^{2*1_}`; pluri-harmonic for every shape.
pub fn antisymmetric_degree_two(shape: SplitShape) -> Result<HarmonicPolynomial, HarmonicError> {
    HarmonicPolynomial::new(
        shape,
        vec![(mixed_pair_diagonal()?, qi(1)), (mixed_pair_crossed()?, qi(-1))],
    )
}

/// The degree-2 symmetric seed `X^{1*1_} X^{2*2_} + X^{1*2_} X^{2*1_}`,
/// which needs a trace correction to become pluri-harmonic.
pub fn symmetric_degree_two_seed(shape: SplitShape) -> Result<HarmonicPolynomial, HarmonicError> {
    HarmonicPolynomial::new(
        shape,
        vec![(mixed_pair_diagonal()?, qi(1)), (mixed_pair_crossed()?, qi(1))],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qr;

    fn shape(p: u16, q: u16, d: u16, l: u16) -> SplitShape {
        SplitShape::new(p, q, d, l).unwrap()
    }

    #[test]
    fn mixed_degree_one_is_harmonic() {
        for p in [1u16, 2] {
            for q in [1u16, 2] {
                for d in [4u16, 9] {
                    let h = mixed_degree_one(shape(p, q, d, 1)).unwrap();
                    assert!(check_pluriharmonic(&h).is_ok());
                }
            }
        }
    }

    #[test]
    fn star_star_link_fails_with_block_one_witness() {
        let l = LinkSet::from_pairs(&[(Index::star(1), Index::star(2))]).unwrap();
        let h = HarmonicPolynomial::new(shape(2, 1, 5, 2), vec![(l, qi(1))]).unwrap();
        let w = check_pluriharmonic(&h).unwrap_err();
        assert_eq!(w.block, 1);
        // The (1,2) Laplacian residual is d * (e*[1,1] e*[2,2] + e*[2,1] e*[1,2]).
        let expanded = h.expand();
        let res = laplacian(&expanded, &h.shape(), 1, 1, 2);
        let d = qi(5);
        let mut want = MPoly::zero();
        want.add_monomial(
            vec![(Var::EStar(1, 1), 1), (Var::EStar(2, 2), 1)],
            d.clone(),
        );
        want.add_monomial(vec![(Var::EStar(1, 2), 1), (Var::EStar(2, 1), 1)], d);
        assert_eq!(res, want);
    }

    #[test]
    fn antisymmetric_combination_is_harmonic() {
        let h = antisymmetric_degree_two(shape(2, 2, 8, 2)).unwrap();
        assert!(check_pluriharmonic(&h).is_ok());
    }

    #[test]
    fn projection_fixes_symmetric_combination() {
        let d = 8u16;
        let seed = symmetric_degree_two_seed(shape(2, 2, d, 2)).unwrap();
        assert!(check_pluriharmonic(&seed).is_err());
        let proj = project_harmonic(&seed).unwrap();
        assert!(proj.harmonic_found);
        let h = proj.projected;
        assert!(check_pluriharmonic(&h).is_ok());
        // The mixed monomials keep coefficient 1, the trace correction is -2/d.
        assert_eq!(h.coeff(&mixed_pair_diagonal().unwrap()), qi(1));
        assert_eq!(h.coeff(&mixed_pair_crossed().unwrap()), qi(1));
        assert_eq!(h.coeff(&non_mixed_pair().unwrap()), qr(-2, 8));
    }

    #[test]
    fn projection_is_identity_on_harmonic_input() {
        let h = antisymmetric_degree_two(shape(2, 2, 12, 2)).unwrap();
        let proj = project_harmonic(&h).unwrap();
        assert!(proj.harmonic_found);
        assert_eq!(proj.projected, h);
    }

    #[test]
    fn projection_flags_hopeless_span() {
        let l = LinkSet::from_pairs(&[(Index::star(1), Index::star(2))]).unwrap();
        let h = HarmonicPolynomial::new(shape(2, 1, 6, 2), vec![(l, qi(1))]).unwrap();
        let proj = project_harmonic(&h).unwrap();
        assert!(!proj.harmonic_found);
        assert!(proj.projected.is_zero());
    }

    #[test]
    fn q_of_mixed_degree_one() {
        let h = mixed_degree_one(shape(1, 1, 8, 1)).unwrap();
        let q = compute_q(&h, true).unwrap();
        let l = LinkSet::from_pairs(&[(Index::star(1), Index::sub(1))]).unwrap();
        assert_eq!(q.coeff(&l), CoeffPoly::k().add(&CoeffPoly::s()).neg());
        assert_eq!(q.underlying(), h.underlying());
    }

    #[test]
    fn q_of_antisymmetric_combination() {
        let h = antisymmetric_degree_two(shape(2, 2, 8, 2)).unwrap();
        let q = compute_q(&h, true).unwrap();
        // (k+s)(k+s-1/2) on the diagonal matching, negated on the crossed one.
        let kps = CoeffPoly::k().add(&CoeffPoly::s());
        let want = kps.mul(&kps.add(&CoeffPoly::constant(qr(-1, 2))));
        assert_eq!(q.coeff(&mixed_pair_diagonal().unwrap()), want);
        assert_eq!(
            q.coeff(&mixed_pair_crossed().unwrap()),
            want.neg()
        );
        assert_eq!(q.coeff(&non_mixed_pair().unwrap()), CoeffPoly::zero());
    }

    #[test]
    fn q_is_linear() {
        let s = shape(2, 2, 8, 2);
        let h1 = antisymmetric_degree_two(s).unwrap();
        let h2 = project_harmonic(&symmetric_degree_two_seed(s).unwrap())
            .unwrap()
            .projected;
        let a = qr(3, 2);
        let b = qr(-5, 7);
        let combo = h1.scale(&a).add_scaled(&h2, &b).unwrap();
        let lhs = compute_q(&combo, false).unwrap();
        let q1 = compute_q(&h1, false).unwrap();
        let q2 = compute_q(&h2, false).unwrap();
        for (l, c) in lhs.terms() {
            let want = q1.coeff(l).scale(&a).add(&q2.coeff(l).scale(&b));
            assert_eq!(*c, want);
        }
    }

    #[test]
    fn q_of_zero_is_zero() {
        let h = HarmonicPolynomial::zero(shape(1, 1, 8, 1));
        let q = compute_q(&h, false).unwrap();
        assert!(q.is_zero());
    }

    #[test]
    fn validator_refuses_small_blocks() {
        // degree 2 but q = 1: the vanishing claim is out of range
        let h = antisymmetric_degree_two(shape(2, 1, 8, 2)).unwrap();
        assert!(matches!(
            compute_q(&h, true),
            Err(HarmonicError::ValidatorNotApplicable { .. })
        ));
    }

    #[test]
    fn validator_rejects_non_harmonic_input() {
        let seed = symmetric_degree_two_seed(shape(2, 2, 8, 2)).unwrap();
        assert!(matches!(
            compute_q(&seed, true),
            Err(HarmonicError::NotPluriharmonic(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let s = shape(2, 2, 8, 2);
        let h = project_harmonic(&symmetric_degree_two_seed(s).unwrap())
            .unwrap()
            .projected;
        let json = serde_json::to_string(&h).unwrap();
        assert!(json.contains("\"links\""));
        let back: HarmonicPolynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(h, back);
    }

    #[test]
    fn rejects_inhomogeneous_terms() {
        let l1 = LinkSet::from_pairs(&[(Index::star(1), Index::sub(1))]).unwrap();
        let l2 = LinkSet::from_pairs(&[(Index::star(1), Index::sub(2))]).unwrap();
        assert!(matches!(
            HarmonicPolynomial::new(shape(1, 1, 4, 2), vec![(l1, qi(1)), (l2, qi(1))]),
            Err(HarmonicError::NotHomogeneous)
        ));
    }

    #[test]
    fn rejects_labels_outside_shape() {
        let l = LinkSet::from_pairs(&[(Index::star(1), Index::sub(3))]).unwrap();
        assert!(matches!(
            HarmonicPolynomial::new(shape(1, 1, 4, 2), vec![(l, qi(1))]),
            Err(HarmonicError::LabelOutOfRange(_))
        ));
    }
}
