//! Pole candidate tables.
//!
//! These transcribe finite case analyses into explicit lists of
//! `(location, order bound)` pairs. Entries are always *possible* poles —
//! an empty list means the function is holomorphic in the stated region,
//! a listed entry only caps the order. The Klingen-type and completed-L
//! tables are conditional on the constancy hypothesis for the disk
//! integral and carry a flag saying so.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rat::{qi, qr};

#[derive(Debug, Error)]
pub enum PoleError {
    #[error("parameters outside any stated case: {0}")]
    OutsideStatedCases(String),
}

/// Which table to produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoleContext {
    /// Normalized degree-n Eisenstein series (zeta-cleared), parameters (n, k).
    Feit,
    /// Modified Klingen-type series, parameters (p, q, k).
    Klingen63,
    /// Completed standard L-function, parameters (q, k).
    Lambda64,
}

/// A finite pole candidate list with order bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleTable {
    pub context: PoleContext,
    /// (n or p, q, k) as applicable; unused slots zero.
    pub parameters: (u32, u32, u32),
    pub conditional: bool,
    /// (location, max order), sorted by location.
    pub entries: Vec<(BigRational, u32)>,
}

impl PoleTable {
    pub fn is_entire(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn order_at(&self, s: &BigRational) -> u32 {
        self.entries
            .iter()
            .find(|(loc, _)| loc == s)
            .map(|&(_, o)| o)
            .unwrap_or(0)
    }
}

fn sorted(mut entries: Vec<(BigRational, u32)>) -> Vec<(BigRational, u32)> {
    entries.retain(|(_, o)| *o >= 1);
    entries.sort();
    entries.dedup();
    entries
}

/// Pole candidates of the zeta-cleared degree-n Eisenstein series in the
/// region `k + 2 Re(s) > [n/2]`, in the `s` variable.
pub fn feit_table(n: u32, k: u32) -> Result<PoleTable, PoleError> {
    if n == 0 || k == 0 || k % 2 != 0 {
        return Err(PoleError::OutsideStatedCases(format!(
            "need n >= 1 and positive even k, got n = {n}, k = {k}"
        )));
    }
    let entries = if 2 * k >= n {
        if n % 4 == 0 {
            // single possible simple pole at k + 2s = n/2 + 1
            vec![(qr(n as i64 / 2 + 1 - k as i64, 2), 1)]
        } else {
            Vec::new()
        }
    } else {
        // possible simple poles at integer t = k + 2s in [(n+3)/2 .. n-k+1]
        let lo = (n as i64 + 3).div_euclid(2);
        let hi = n as i64 - k as i64 + 1;
        (lo..=hi).map(|t| (qr(t - k as i64, 2), 1)).collect()
    };
    Ok(PoleTable {
        context: PoleContext::Feit,
        parameters: (n, k, 0),
        conditional: false,
        entries: sorted(entries),
    })
}

/// Pole candidates of the modified Klingen-type series; conditional table.
pub fn klingen63_table(p: u32, q: u32, k: u32) -> Result<PoleTable, PoleError> {
    if q < 1 || p < q || k == 0 {
        return Err(PoleError::OutsideStatedCases(format!(
            "need 1 <= q <= p and k >= 1, got p = {p}, q = {q}, k = {k}"
        )));
    }
    let eps = q % 2;
    let entries = if 2 * k >= p + q {
        if (p + q) % 4 != 0 {
            Vec::new()
        } else {
            let exceptional = (p == q && q % 2 == 0) || (p == q + 2 && q % 2 == 1);
            if exceptional {
                let half_diff = qi((p as i64 - q as i64) / 2);
                vec![(half_diff.clone(), 1), (half_diff + qi(1), 1)]
            } else {
                Vec::new()
            }
        }
    } else if k >= q + eps + 2 {
        Vec::new()
    } else if k <= q + eps {
        if (q + eps).abs_diff(k) % 2 != 0 {
            return Err(PoleError::OutsideStatedCases(format!(
                "order caps need q + eps_q - k even, got p = {p}, q = {q}, k = {k}"
            )));
        }
        let cap_global = (q + eps - k) / 2;
        let mut entries = Vec::new();
        let j_max = (p + q) / 2 - k;
        for j in 0..=j_max {
            let cap = (j / 2).min(cap_global) + 1;
            entries.push((qi(k as i64 - q as i64 + j as i64), cap));
            entries.push((qi(p as i64 - k as i64 + 1 - j as i64), cap));
        }
        if (p + q) % 2 == 1 && cap_global >= 1 {
            entries.push((qr(p as i64 - q as i64 + 1, 2), cap_global));
        }
        entries
    } else {
        return Err(PoleError::OutsideStatedCases(format!(
            "k = {k} falls between the stated ranges for p = {p}, q = {q}"
        )));
    };
    Ok(PoleTable {
        context: PoleContext::Klingen63,
        parameters: (p, q, k),
        conditional: true,
        entries: sorted(entries),
    })
}

/// Pole candidates of the completed standard L-function; conditional table.
pub fn lambda64_table(q: u32, k: u32) -> Result<PoleTable, PoleError> {
    if q < 1 || k == 0 {
        return Err(PoleError::OutsideStatedCases(format!(
            "need q >= 1 and k >= 1, got q = {q}, k = {k}"
        )));
    }
    let entries = if k >= q {
        if q % 2 == 1 {
            Vec::new()
        } else {
            vec![(qi(0), 1), (qi(1), 1)]
        }
    } else {
        let mut entries = Vec::new();
        for j in 0..=(q - k) {
            let cap = j / 2 + 1;
            entries.push((qi(k as i64 - q as i64 + j as i64), cap));
            entries.push((qi(q as i64 - k as i64 + 1 - j as i64), cap));
        }
        entries
    };
    Ok(PoleTable {
        context: PoleContext::Lambda64,
        parameters: (q, k, 0),
        conditional: true,
        entries: sorted(entries),
    })
}
