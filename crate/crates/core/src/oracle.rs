//! Brute-force dense homology oracle.
//!
//! This is a deliberately separate computation path from the sparse engine
//! in [`crate::complex`]: dense matrices, plain textbook Gaussian
//! elimination, dimensions from the rank-nullity count
//! `dim H_k = dim C_k - rank d_k - rank d_{k+1}`. It exists to cross-check
//! the sparse path and backs the CLI `--oracle` flag; it shares no
//! elimination code with it.

use crate::complex::{ChainComplex, GradedDims, Window};
use crate::rational::Rational;

/// Rank of a dense rational matrix by row reduction with partial
/// (first-nonzero) pivoting.
#[allow(clippy::needless_range_loop)]
pub fn dense_rank(mut m: Vec<Vec<Rational>>) -> usize {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let Some(pivot) = (row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pivot);
        let inv = m[row][col].recip();
        for c in col..ncols {
            m[row][c] = &m[row][c] * &inv;
        }
        for r in 0..nrows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..ncols {
                    let delta = &factor * &m[row][c];
                    m[r][c] = &m[r][c] - &delta;
                }
            }
        }
        row += 1;
        rank += 1;
    }
    rank
}

/// Dense differential matrix of `d : C_k -> C_{k-1}` in the canonical bases.
fn dense_differential(complex: &ChainComplex, degree: i64) -> Vec<Vec<Rational>> {
    let sources = complex.generators_in_degree(degree);
    let targets = complex.generators_in_degree(degree - 1);
    let mut m = vec![vec![Rational::zero(); sources.len()]; targets.len()];
    for (where_from, &s) in sources.iter().enumerate() {
        for (t, c) in complex.differential_of(s).iter() {
            if let Some(where_to) = targets.iter().position(|&g| g == *t) {
                m[where_to][where_from] = c.clone();
            }
        }
    }
    m
}

/// Homology dimensions over the window, by dense rank counting only.
/// Assumes the complex is valid; the oracle makes no attempt to diagnose.
pub fn homology_dims(complex: &ChainComplex, window: Window) -> GradedDims {
    let mut dims = GradedDims::new();
    for k in window.degrees() {
        let n_k = complex.generators_in_degree(k).len();
        if n_k == 0 {
            continue;
        }
        let rank_out = dense_rank(dense_differential(complex, k));
        let rank_in = dense_rank(dense_differential(complex, k + 1));
        dims.set(k, n_k - rank_out - rank_in);
    }
    dims
}
