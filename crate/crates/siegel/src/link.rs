//! Link calculus: the closed differential-operator system on the symbols
//! `delta`, `epsilon`, `Delta`, `E`.
//!
//! A link is an unordered pair of distinct index labels; a link set is a
//! partial matching. The operator `d^{ab}` attached to a link obeys
//!
//!   (D1)  Leibniz product rule,
//!   (D2)  d^{ab} (delta^-k |delta|^-2s eps^s)
//!           = delta^-k |delta|^-2s eps^s ((-k-s) Delta^{ab} + s E^{ab}),
//!   (D3)  d^{ab} Delta^{cd} = -1/2 (Delta^{ac} Delta^{bd} + Delta^{ad} Delta^{bc}),
//!   (D4)  d^{ab} E^{cd}     = -1/2 (E^{ac} E^{bd} + E^{ad} E^{bc}),
//!
//! with (D3)/(D4) only ever invoked on four distinct indices. Applying the
//! full operator `d^{L0}` of a matching `L0` to the prefactor and dividing
//! it back out leaves an exact polynomial in the `Delta`/`E` symbols with
//! coefficients in Q[k,s]; re-expressed in the `(Delta - E, E)` monomial
//! basis this is the expansion produced by [`expand_operator`].
//!
//! All operations are pure functions on immutable values.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qpoly::{CoeffPoly, CoeffTermDto};

/// Suffix class of an index label: `1`, `1*`, `1_`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Mark {
    Plain,
    Star,
    Sub,
}

/// An index label. Stars and substars matter only to the harmonic layer;
/// the link engine treats labels as opaque.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Index {
    pub id: u32,
    pub mark: Mark,
}

impl Index {
    pub fn plain(id: u32) -> Self {
        Index { id, mark: Mark::Plain }
    }

    pub fn star(id: u32) -> Self {
        Index { id, mark: Mark::Star }
    }

    pub fn sub(id: u32) -> Self {
        Index { id, mark: Mark::Sub }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mark {
            Mark::Plain => write!(f, "{}", self.id),
            Mark::Star => write!(f, "{}*", self.id),
            Mark::Sub => write!(f, "{}_", self.id),
        }
    }
}

impl FromStr for Index {
    type Err = LinkError;

    fn from_str(s: &str) -> Result<Self, LinkError> {
        let s = s.trim();
        let (body, mark) = if let Some(b) = s.strip_suffix('*') {
            (b, Mark::Star)
        } else if let Some(b) = s.strip_suffix('_') {
            (b, Mark::Sub)
        } else {
            (s, Mark::Plain)
        };
        let id: u32 = body
            .parse()
            .map_err(|_| LinkError::BadLabel(s.to_string()))?;
        Ok(Index { id, mark })
    }
}

/// Unordered pair of distinct indices, stored with the smaller label first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    lo: Index,
    hi: Index,
}

impl Link {
    pub fn new(a: Index, b: Index) -> Result<Self, LinkError> {
        if a == b {
            return Err(LinkError::DegenerateLink(a.to_string()));
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        Ok(Link { lo, hi })
    }

    pub fn first(&self) -> Index {
        self.lo
    }

    pub fn second(&self) -> Index {
        self.hi
    }

    /// True when the endpoints carry one star and one substar mark.
    pub fn is_mixed(&self) -> bool {
        matches!(
            (self.lo.mark, self.hi.mark),
            (Mark::Star, Mark::Sub) | (Mark::Sub, Mark::Star)
        )
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.lo, self.hi)
    }
}

/// A set of links whose indices are pairwise distinct (a partial matching).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LinkSet {
    links: Vec<Link>,
}

impl LinkSet {
    pub fn empty() -> Self {
        LinkSet::default()
    }

    /// Builds a link set, rejecting repeated indices.
    pub fn new(mut links: Vec<Link>) -> Result<Self, LinkError> {
        links.sort();
        let mut seen = Vec::with_capacity(2 * links.len());
        for l in &links {
            for idx in [l.first(), l.second()] {
                if seen.contains(&idx) {
                    return Err(LinkError::RepeatedIndex(idx.to_string()));
                }
                seen.push(idx);
            }
        }
        Ok(LinkSet { links })
    }

    pub fn from_pairs(pairs: &[(Index, Index)]) -> Result<Self, LinkError> {
        let links = pairs
            .iter()
            .map(|&(a, b)| Link::new(a, b))
            .collect::<Result<Vec<_>, _>>()?;
        LinkSet::new(links)
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Sorted list of all indices used by the links.
    pub fn underlying(&self) -> Vec<Index> {
        let mut v: Vec<Index> = self
            .links
            .iter()
            .flat_map(|l| [l.first(), l.second()])
            .collect();
        v.sort();
        v
    }

    /// Disjoint union; errors if an index would repeat.
    pub fn union(&self, other: &Self) -> Result<Self, LinkError> {
        let mut links = self.links.clone();
        links.extend_from_slice(&other.links);
        LinkSet::new(links)
    }

    fn with_link(&self, l: Link) -> Result<Self, LinkError> {
        let mut links = self.links.clone();
        links.push(l);
        LinkSet::new(links)
    }

    /// Applies a relabeling to every index.
    pub fn relabel(&self, map: &dyn Fn(Index) -> Index) -> Result<Self, LinkError> {
        let links = self
            .links
            .iter()
            .map(|l| Link::new(map(l.first()), map(l.second())))
            .collect::<Result<Vec<_>, _>>()?;
        LinkSet::new(links)
    }
}

impl fmt::Display for LinkSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.links.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Error)]
pub enum LinkError {
    #[error("cannot parse index label {0:?}")]
    BadLabel(String),
    #[error("a link needs two distinct indices, got {0} twice")]
    DegenerateLink(String),
    #[error("index {0} appears more than once")]
    RepeatedIndex(String),
    #[error("(L1, L2) does not split a perfect matching of the underlying set")]
    NotAMatching,
    #[error("CZ + D is singular at the requested point")]
    SingularAutomorphy,
    #[error("Im(Z) is not positive definite")]
    NotPositiveDefinite,
    #[error("missing vector for index {0}")]
    MissingVector(String),
    #[error("vector for index {0} has wrong dimension")]
    BadVectorDimension(String),
    #[error("g is not a real symplectic matrix of size 2n")]
    NotSymplectic,
}

/// Parses `"(1,2),(3,4)"`-style link lists.
pub fn parse_links(s: &str) -> Result<LinkSet, LinkError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(LinkSet::empty());
    }
    let mut links = Vec::new();
    for chunk in s.split(')') {
        let chunk = chunk.trim().trim_start_matches(',').trim();
        if chunk.is_empty() {
            continue;
        }
        let body = chunk
            .strip_prefix('(')
            .ok_or_else(|| LinkError::BadLabel(chunk.to_string()))?;
        let mut parts = body.split(',');
        let a: Index = parts
            .next()
            .ok_or_else(|| LinkError::BadLabel(chunk.to_string()))?
            .parse()?;
        let b: Index = parts
            .next()
            .ok_or_else(|| LinkError::BadLabel(chunk.to_string()))?
            .parse()?;
        if parts.next().is_some() {
            return Err(LinkError::BadLabel(chunk.to_string()));
        }
        links.push(Link::new(a, b)?);
    }
    LinkSet::new(links)
}

/// Expansion of `d^{L0}(delta^-k |delta|^-2s eps^s)` divided by the
/// prefactor, in the `(Delta - E, E)` monomial basis. The prefactor itself
/// is implicit and never expanded; every stored term is indexed by a pair
/// `(L1, L2)` whose disjoint union is a perfect matching of the underlying
/// set, `L1` tagged `Delta - E` and `L2` tagged `E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    underlying: Vec<Index>,
    terms: BTreeMap<(LinkSet, LinkSet), CoeffPoly>,
}

impl Expansion {
    pub fn underlying(&self) -> &[Index] {
        &self.underlying
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(LinkSet, LinkSet), &CoeffPoly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Stored coefficient of `(Delta-E)^{L1} E^{L2}`, or the zero
    /// polynomial. The pair must split a perfect matching of the
    /// underlying set.
    pub fn coefficient_lookup(&self, l1: &LinkSet, l2: &LinkSet) -> Result<CoeffPoly, LinkError> {
        let joined = l1.union(l2)?;
        if joined.underlying() != self.underlying {
            return Err(LinkError::NotAMatching);
        }
        Ok(self
            .terms
            .get(&(l1.clone(), l2.clone()))
            .cloned()
            .unwrap_or_default())
    }

    /// Applies an index relabeling to every term.
    pub fn relabel(&self, map: &dyn Fn(Index) -> Index) -> Result<Self, LinkError> {
        let mut terms = BTreeMap::new();
        for ((l1, l2), c) in &self.terms {
            terms.insert((l1.relabel(map)?, l2.relabel(map)?), c.clone());
        }
        let mut underlying: Vec<Index> = self.underlying.iter().map(|&i| map(i)).collect();
        underlying.sort();
        Ok(Expansion { underlying, terms })
    }
}

/// Raw `(Delta, E)`-basis polynomial: map from (Delta-links, E-links) to a
/// coefficient. Kept public for the specialization checks; [`expand_operator`]
/// is the `(Delta-E, E)` form.
pub type DeltaETable = BTreeMap<(LinkSet, LinkSet), CoeffPoly>;

/// Runs the (D1)-(D4) cascade over the links of `l0` in canonical order.
pub fn expand_operator(l0: &LinkSet) -> Expansion {
    expand_operator_ordered(l0.links())
}

/// Same cascade, applying links in the order given. The result does not
/// depend on the order; the canonical entry point sorts first.
pub fn expand_operator_ordered(order: &[Link]) -> Expansion {
    // order is required to form a matching
    let l0 = LinkSet::new(order.to_vec()).expect("operator links must form a matching");
    let raw = expand_delta_e_ordered(order);
    let underlying = l0.underlying();
    let mut terms: BTreeMap<(LinkSet, LinkSet), CoeffPoly> = BTreeMap::new();
    // Change of basis Delta = (Delta - E) + E: each Delta-link splits over
    // the two summands.
    for ((ld, le), c) in &raw {
        let dlinks = ld.links();
        let n = dlinks.len();
        for mask in 0u32..(1 << n) {
            let mut a_part = Vec::new();
            let mut extra_e = Vec::new();
            for (i, l) in dlinks.iter().enumerate() {
                if mask & (1 << i) == 0 {
                    a_part.push(*l);
                } else {
                    extra_e.push(*l);
                }
            }
            let l1 = LinkSet::new(a_part).expect("subset of a matching");
            let mut e_links = le.links().to_vec();
            e_links.extend(extra_e);
            let l2 = LinkSet::new(e_links).expect("subset of a matching");
            let entry = terms.entry((l1, l2)).or_insert_with(CoeffPoly::zero);
            *entry = entry.add(c);
        }
    }
    terms.retain(|_, c| !c.is_zero());
    Expansion { underlying, terms }
}

/// The cascade output in the raw `(Delta, E)` basis.
pub fn expand_delta_e(l0: &LinkSet) -> DeltaETable {
    expand_delta_e_ordered(l0.links())
}

fn expand_delta_e_ordered(order: &[Link]) -> DeltaETable {
    LinkSet::new(order.to_vec()).expect("operator links must form a matching");
    let mut state: DeltaETable = BTreeMap::new();
    state.insert((LinkSet::empty(), LinkSet::empty()), CoeffPoly::one());
    for link in order {
        state = apply_one_link(&state, *link);
    }
    state
}

/// One step of the cascade:
///   d^{ab}(prefactor * M) = prefactor * [((-k-s) Delta^{ab} + s E^{ab}) M + d^{ab} M].
fn apply_one_link(state: &DeltaETable, link: Link) -> DeltaETable {
    let mut next: DeltaETable = BTreeMap::new();
    let minus_k_minus_s = CoeffPoly::k().add(&CoeffPoly::s()).neg();
    let s_sym = CoeffPoly::s();
    let half = crate::rat::qr(-1, 2);
    for ((ld, le), c) in state {
        // D2 contribution from the prefactor.
        add_term(
            &mut next,
            ld.with_link(link).expect("fresh indices"),
            le.clone(),
            c.mul(&minus_k_minus_s),
        );
        add_term(
            &mut next,
            ld.clone(),
            le.with_link(link).expect("fresh indices"),
            c.mul(&s_sym),
        );
        // D1 + D3 over the Delta factors of the monomial.
        for (i, tgt) in ld.links().iter().enumerate() {
            let rest: Vec<Link> = ld
                .links()
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, l)| *l)
                .collect();
            for (x, y) in split_products(link, *tgt) {
                let mut new_d = rest.clone();
                new_d.push(x);
                new_d.push(y);
                add_term(
                    &mut next,
                    LinkSet::new(new_d).expect("distinct by cascade invariant"),
                    le.clone(),
                    c.scale(&half),
                );
            }
        }
        // D1 + D4 over the E factors.
        for (i, tgt) in le.links().iter().enumerate() {
            let rest: Vec<Link> = le
                .links()
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, l)| *l)
                .collect();
            for (x, y) in split_products(link, *tgt) {
                let mut new_e = rest.clone();
                new_e.push(x);
                new_e.push(y);
                add_term(
                    &mut next,
                    ld.clone(),
                    LinkSet::new(new_e).expect("distinct by cascade invariant"),
                    c.scale(&half),
                );
            }
        }
    }
    next.retain(|_, c| !c.is_zero());
    next
}

/// The two re-pairings of (D3)/(D4): `(ac,bd)` and `(ad,bc)`. All four
/// indices are distinct inside a single cascade; assert and abort otherwise.
fn split_products(applied: Link, target: Link) -> [(Link, Link); 2] {
    let (a, b) = (applied.first(), applied.second());
    let (c, d) = (target.first(), target.second());
    assert!(
        a != c && a != d && b != c && b != d,
        "rules (D3)/(D4) require four distinct indices"
    );
    [
        (
            Link::new(a, c).expect("distinct"),
            Link::new(b, d).expect("distinct"),
        ),
        (
            Link::new(a, d).expect("distinct"),
            Link::new(b, c).expect("distinct"),
        ),
    ]
}

fn add_term(table: &mut DeltaETable, ld: LinkSet, le: LinkSet, c: CoeffPoly) {
    if c.is_zero() {
        return;
    }
    let entry = table.entry((ld, le)).or_insert_with(CoeffPoly::zero);
    *entry = entry.add(&c);
}

// ---------------------------------------------------------------------------
// JSON interchange
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ExpansionTermDto {
    #[serde(rename = "A")]
    a: Vec<[String; 2]>,
    #[serde(rename = "E")]
    e: Vec<[String; 2]>,
    coeff: Vec<CoeffTermDto>,
}

#[derive(Serialize, Deserialize)]
struct ExpansionDto {
    underlying: Vec<String>,
    terms: Vec<ExpansionTermDto>,
}

fn linkset_to_dto(ls: &LinkSet) -> Vec<[String; 2]> {
    ls.links()
        .iter()
        .map(|l| [l.first().to_string(), l.second().to_string()])
        .collect()
}

fn linkset_from_dto(dto: &[[String; 2]]) -> Result<LinkSet, LinkError> {
    let mut links = Vec::new();
    for [a, b] in dto {
        links.push(Link::new(a.parse()?, b.parse()?)?);
    }
    LinkSet::new(links)
}

impl Serialize for Expansion {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let dto = ExpansionDto {
            underlying: self.underlying.iter().map(|i| i.to_string()).collect(),
            terms: self
                .terms
                .iter()
                .map(|((l1, l2), c)| ExpansionTermDto {
                    a: linkset_to_dto(l1),
                    e: linkset_to_dto(l2),
                    coeff: c.to_dto(),
                })
                .collect(),
        };
        dto.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Expansion {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let dto = ExpansionDto::deserialize(de)?;
        let mut underlying = Vec::new();
        for s in &dto.underlying {
            underlying.push(Index::from_str(s).map_err(D::Error::custom)?);
        }
        underlying.sort();
        let mut terms = BTreeMap::new();
        for t in &dto.terms {
            let l1 = linkset_from_dto(&t.a).map_err(D::Error::custom)?;
            let l2 = linkset_from_dto(&t.e).map_err(D::Error::custom)?;
            let c = CoeffPoly::from_dto(&t.coeff).map_err(D::Error::custom)?;
            if !c.is_zero() {
                terms.insert((l1, l2), c);
            }
        }
        Ok(Expansion { underlying, terms })
    }
}

// ---------------------------------------------------------------------------
// Numeric instantiation
// ---------------------------------------------------------------------------

/// Formula pieces of the degree-n setting at a point: `delta = det(CZ+D)`,
/// `Delta = (CZ+D)^{-1} C`, `eps = det(Im Z)`, `E = (1/2i) (Im Z)^{-1}`.
pub struct PointData {
    pub delta: Complex64,
    pub delta_mat: DMatrix<Complex64>,
    pub eps: f64,
    pub e_mat: DMatrix<Complex64>,
}

/// Splits a real symplectic `g` of size `2n` into its `C`, `D` blocks and
/// evaluates the symbol matrices at `z`.
pub fn point_data(g: &DMatrix<f64>, z: &DMatrix<Complex64>) -> Result<PointData, LinkError> {
    let n = z.nrows();
    if g.nrows() != 2 * n || g.ncols() != 2 * n {
        return Err(LinkError::NotSymplectic);
    }
    let im = z.map(|v| v.im);
    let eps = real_symmetric_det_pd(&im)?;
    let c = g.view((n, 0), (n, n)).map(Complex64::from);
    let d = g.view((n, n), (n, n)).map(Complex64::from);
    let cz_d = &c * z + d;
    let delta = complex_det(&cz_d);
    if delta.norm() < 1e-300 {
        return Err(LinkError::SingularAutomorphy);
    }
    let inv = cz_d
        .clone()
        .try_inverse()
        .ok_or(LinkError::SingularAutomorphy)?;
    let delta_mat = inv * c;
    let im_inv = im
        .map(Complex64::from)
        .try_inverse()
        .ok_or(LinkError::NotPositiveDefinite)?;
    let e_mat = im_inv * Complex64::new(0.0, -0.5); // 1/(2i) = -i/2
    Ok(PointData {
        delta,
        delta_mat,
        eps,
        e_mat,
    })
}

fn complex_det(m: &DMatrix<Complex64>) -> Complex64 {
    m.clone().lu().determinant()
}

/// Determinant of a real symmetric matrix, rejecting non-positive-definite
/// input (checked through leading principal minors).
fn real_symmetric_det_pd(m: &DMatrix<f64>) -> Result<f64, LinkError> {
    let n = m.nrows();
    for k in 1..=n {
        let minor = m.view((0, 0), (k, k)).into_owned().determinant();
        if minor <= 0.0 {
            return Err(LinkError::NotPositiveDefinite);
        }
    }
    Ok(m.determinant())
}

/// Numeric value of an expansion: every symbol `M^{ab}` becomes the
/// bilinear contraction `v_a^T M v_b`, coefficients are evaluated at
/// `(k, s)`, and everything is summed. The implicit prefactor is *not*
/// included.
pub fn evaluate_expansion(
    e: &Expansion,
    g: &DMatrix<f64>,
    z: &DMatrix<Complex64>,
    k: u32,
    s: Complex64,
    vectors: &BTreeMap<Index, Vec<Complex64>>,
) -> Result<Complex64, LinkError> {
    let n = z.nrows();
    for idx in &e.underlying {
        let v = vectors
            .get(idx)
            .ok_or_else(|| LinkError::MissingVector(idx.to_string()))?;
        if v.len() != n {
            return Err(LinkError::BadVectorDimension(idx.to_string()));
        }
    }
    let pd = point_data(g, z)?;
    let a_mat = &pd.delta_mat - &pd.e_mat;
    let kc = Complex64::new(k as f64, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for ((l1, l2), c) in &e.terms {
        let mut prod = c.eval(kc, s);
        for l in l1.links() {
            prod *= contract(&a_mat, &vectors[&l.first()], &vectors[&l.second()]);
        }
        for l in l2.links() {
            prod *= contract(&pd.e_mat, &vectors[&l.first()], &vectors[&l.second()]);
        }
        acc += prod;
    }
    Ok(acc)
}

fn contract(m: &DMatrix<Complex64>, a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            acc += ai * m[(i, j)] * bj;
        }
    }
    acc
}
