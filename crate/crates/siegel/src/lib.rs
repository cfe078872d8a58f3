//! Desk-scale computer algebra and numerics for the pullback machinery of
//! Siegel Eisenstein series.
//!
//! The crate is organized around six concerns:
//!
//! * [`link`] — the symbolic differential-operator calculus on link
//!   monomials and its numeric instantiation;
//! * [`harmonic`] — pluri-harmonic polynomials over a split index set, the
//!   harmonicity checker, harmonic projection, and extraction of the pure
//!   `(Delta - E)` polynomial attached to a harmonic input;
//! * [`modular`] — exact Fourier-coefficient infrastructure: degree-1
//!   level-one forms with Hecke theory and Satake parameters, the degree-2
//!   Siegel Eisenstein table at the holomorphic point, a double-coset
//!   eigenvalue oracle, and numeric Petersson norms;
//! * [`pullback`] — the diagonal-restriction decomposition over the Hecke
//!   eigenbasis and the numeric disk integral behind the constancy probe;
//! * [`lfunction`] — standard-L Euler factors, the Dirichlet-series
//!   cross-check, gamma factors with their exact polynomial identities, and
//!   the pole candidate tables;
//! * [`cache`] — a small persistent JSON cache with atomic replacement.
//!
//! Exact quantities are `BigRational` throughout; floating point appears
//! only in explicitly numeric operations.

pub mod cache;
pub mod harmonic;
pub mod lfunction;
pub mod linalg;
pub mod link;
pub mod modular;
pub mod mpoly;
pub mod pullback;
pub mod qpoly;
pub mod rat;
