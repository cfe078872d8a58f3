//! Exact linear algebra over the rationals: reduced row echelon form,
//! kernel bases, and overdetermined solves. Desk scale only — dense
//! Gauss-Jordan with exact pivots.

use num_rational::BigRational;
use num_traits::Zero;

/// Dense rational matrix as rows.
pub type QMatrix = Vec<Vec<BigRational>>;

/// In-place reduced row echelon form; returns the pivot column of each
/// pivot row.
pub fn rref(m: &mut QMatrix) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Kernel basis of the linear map given by `m` (columns = unknowns).
pub fn kernel_basis(mut m: QMatrix, cols: usize) -> Vec<Vec<BigRational>> {
    if m.is_empty() {
        m.push(vec![BigRational::zero(); cols]);
    }
    let pivots = rref(&mut m);
    let mut basis = Vec::new();
    let pivot_set: Vec<bool> = {
        let mut v = vec![false; cols];
        for &p in &pivots {
            v[p] = true;
        }
        v
    };
    for free in 0..cols {
        if pivot_set[free] {
            continue;
        }
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::from_integer(1.into());
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = -m[row][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Outcome of an exact overdetermined solve of `A x = b`.
pub struct SolveOutcome {
    /// A particular solution when the system is consistent.
    pub solution: Option<Vec<BigRational>>,
    /// Number of inconsistent pivot rows `[0 .. 0 | c]`, `c != 0`; zero
    /// exactly when the system is consistent.
    pub residual_rank: usize,
    /// First equation index (original row order) witnessing inconsistency.
    pub first_bad_row: Option<usize>,
}

/// Solves `A x = b` exactly, reporting inconsistency instead of failing.
pub fn solve_overdetermined(a: &QMatrix, b: &[BigRational]) -> SolveOutcome {
    assert_eq!(a.len(), b.len());
    let cols = a.first().map_or(0, |r| r.len());
    // Track original row identity through elimination for the witness.
    let mut aug: Vec<(Vec<BigRational>, usize)> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, rhs))| {
            let mut v = row.clone();
            v.push(rhs.clone());
            (v, i)
        })
        .collect();
    let rows = aug.len();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !aug[i].0[c].is_zero()) else {
            continue;
        };
        aug.swap(r, pr);
        let inv = aug[r].0[c].recip();
        for x in aug[r].0.iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !aug[i].0[c].is_zero() {
                let f = aug[i].0[c].clone();
                for j in 0..=cols {
                    let t = &aug[r].0[j] * &f;
                    aug[i].0[j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let mut residual_rank = 0;
    let mut first_bad_row = None;
    for (row, orig) in &aug[r..] {
        if !row[cols].is_zero() {
            residual_rank += 1;
            if first_bad_row.is_none() {
                first_bad_row = Some(*orig);
            }
        }
    }
    let solution = if residual_rank == 0 {
        let mut x = vec![BigRational::zero(); cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = aug[row].0[cols].clone();
        }
        Some(x)
    } else {
        None
    };
    SolveOutcome {
        solution,
        residual_rank,
        first_bad_row,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qi;

    #[test]
    fn rref_and_kernel() {
        // x + y + z = 0 stated twice, plus x - y = 0
        let m: QMatrix = vec![
            vec![qi(1), qi(1), qi(1)],
            vec![qi(2), qi(2), qi(2)],
            vec![qi(1), qi(-1), qi(0)],
        ];
        let basis = kernel_basis(m, 3);
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        // x = y, z = -2x
        assert_eq!(v[0], v[1]);
        assert_eq!(v[2], -(v[0].clone() + v[1].clone()));
    }

    #[test]
    fn solve_consistent_overdetermined() {
        // x = 3, y = -1 observed through four equations
        let a: QMatrix = vec![
            vec![qi(1), qi(0)],
            vec![qi(0), qi(1)],
            vec![qi(1), qi(1)],
            vec![qi(2), qi(-1)],
        ];
        let b = vec![qi(3), qi(-1), qi(2), qi(7)];
        let out = solve_overdetermined(&a, &b);
        assert_eq!(out.residual_rank, 0);
        assert_eq!(out.solution.unwrap(), vec![qi(3), qi(-1)]);
    }

    #[test]
    fn solve_reports_inconsistency() {
        let a: QMatrix = vec![vec![qi(1)], vec![qi(1)]];
        let b = vec![qi(1), qi(2)];
        let out = solve_overdetermined(&a, &b);
        assert_eq!(out.residual_rank, 1);
        assert!(out.solution.is_none());
        assert_eq!(out.first_bad_row, Some(1));
    }
}
