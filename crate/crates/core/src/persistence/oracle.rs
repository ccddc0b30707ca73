use std::collections::HashMap;

use num::{BigRational, Zero};

use super::BettiSequence;
use crate::error::{Error, Result};
use crate::geometry::DistanceMatrix;

pub const ORACLE_MAX_POINTS: usize = 12;

/// Betti numbers at each scale in `epsilons`, recomputed from scratch.
///
/// Each scale gets its own static Rips complex (every vertex subset is tested
/// directly against the distance condition) and integer boundary matrices
/// whose ranks are taken over the rationals:
/// `H_k = dim ker d_k - rank d_{k+1}`.
pub fn oracle_betti_curve(
    dist: &DistanceMatrix,
    max_dim: usize,
    epsilons: &[f64],
) -> Result<Vec<(usize, BettiSequence)>> {
    let n = dist.len();
    if n > ORACLE_MAX_POINTS {
        return Err(Error::TooLarge {
            n,
            max: ORACLE_MAX_POINTS,
        });
    }
    if epsilons.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("epsilon grid must be ascending".into()));
    }
    epsilons
        .iter()
        .map(|&eps| Ok(betti_at_scale(dist, max_dim, eps)))
        .collect()
}

fn betti_at_scale(dist: &DistanceMatrix, max_dim: usize, eps: f64) -> (usize, BettiSequence) {
    let n = dist.len();
    // simplices[k] holds vertex bitmasks of the k-simplices.
    let mut simplices: Vec<Vec<u32>> = vec![Vec::new(); max_dim + 2];
    for mask in 1u32..(1u32 << n) {
        let k = mask.count_ones() as usize - 1;
        if k > max_dim + 1 {
            continue;
        }
        let verts = vertices_of(mask);
        let clique = verts
            .iter()
            .enumerate()
            .all(|(a, &u)| verts[a + 1..].iter().all(|&v| dist.get(u, v) <= eps));
        if clique {
            simplices[k].push(mask);
        }
    }

    // rank[k] = rank of the boundary map from k-chains to (k-1)-chains.
    let mut rank = vec![0usize; max_dim + 2];
    for k in 1..=max_dim + 1 {
        rank[k] = boundary_rank(&simplices[k - 1], &simplices[k]);
    }
    let betti: Vec<usize> = (0..=max_dim)
        .map(|k| simplices[k].len() - rank[k] - rank[k + 1])
        .collect();
    (betti[0], BettiSequence(betti[1..].to_vec()))
}

fn vertices_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask & (1 << b) != 0).collect()
}

fn boundary_rank(rows: &[u32], cols: &[u32]) -> usize {
    if rows.is_empty() || cols.is_empty() {
        return 0;
    }
    let row_of: HashMap<u32, usize> = rows.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut matrix: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); cols.len()]; rows.len()];
    for (c, &mask) in cols.iter().enumerate() {
        for (i, v) in vertices_of(mask).into_iter().enumerate() {
            let face = mask & !(1 << v);
            let sign = if i % 2 == 0 { 1 } else { -1 };
            matrix[row_of[&face]][c] = BigRational::from_integer(sign.into());
        }
    }
    rational_rank(matrix)
}

/// Rank by Gaussian elimination with exact rational arithmetic.
fn rational_rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let factor = &m[r][c] / &pivot;
                for cc in c..cols {
                    if !m[rank][cc].is_zero() {
                        let delta = &factor * &m[rank][cc];
                        m[r][cc] -= delta;
                    }
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}
