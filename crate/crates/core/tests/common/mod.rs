//! Test-only oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use perforate_core::prelude::*;

/// Betti numbers `[b0, b1, ..., b_max_dim]` of the static Rips complex at
/// scale `eps`, by brute-force clique listing and dense Gaussian elimination
/// over Z/2. Shares no code with the filtration builder or the reducer.
pub fn z2_betti(dist: &DistanceMatrix, eps: f64, max_dim: usize) -> Vec<usize> {
    let n = dist.len();
    let mut levels: Vec<Vec<Vec<usize>>> = vec![(0..n).map(|v| vec![v]).collect()];
    for k in 1..=max_dim + 1 {
        let mut next = Vec::new();
        for s in &levels[k - 1] {
            let last = *s.last().unwrap();
            for v in last + 1..n {
                if s.iter().all(|&u| dist.get(u, v) <= eps) {
                    let mut t = s.clone();
                    t.push(v);
                    next.push(t);
                }
            }
        }
        levels.push(next);
    }
    let rank: Vec<usize> = (0..=max_dim + 1)
        .map(|k| if k == 0 { 0 } else { z2_rank(&levels[k - 1], &levels[k]) })
        .collect();
    (0..=max_dim)
        .map(|k| levels[k].len() - rank[k] - rank[k + 1])
        .collect()
}

fn z2_rank(rows: &[Vec<usize>], cols: &[Vec<usize>]) -> usize {
    if rows.is_empty() || cols.is_empty() {
        return 0;
    }
    let index: std::collections::HashMap<&[usize], usize> =
        rows.iter().enumerate().map(|(i, r)| (r.as_slice(), i)).collect();
    let words = rows.len().div_ceil(64);
    let mut matrix: Vec<Vec<u64>> = cols
        .iter()
        .map(|c| {
            let mut bits = vec![0u64; words];
            for skip in 0..c.len() {
                let face: Vec<usize> = c.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                let r = index[face.as_slice()];
                bits[r / 64] ^= 1 << (r % 64);
            }
            bits
        })
        .collect();
    let mut rank = 0;
    for bit in 0..rows.len() {
        let (w, m) = (bit / 64, 1u64 << (bit % 64));
        let Some(p) = (rank..matrix.len()).find(|&j| matrix[j][w] & m != 0) else {
            continue;
        };
        matrix.swap(rank, p);
        let pivot = matrix[rank].clone();
        for row in matrix.iter_mut().skip(rank + 1) {
            if row[w] & m != 0 {
                row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
            }
        }
        rank += 1;
    }
    rank
}

/// Finite `(birth, death)` pairs of positive length in dimension `dim`.
pub fn finite_bars(diagram: &PersistenceDiagram, dim: usize) -> Vec<(f64, f64)> {
    diagram
        .bars_in_dim(dim)
        .filter(|b| !b.is_infinite() && b.persistence() > 0.0)
        .map(|b| (b.birth, b.death))
        .collect()
}

/// Bottleneck distance between two finite diagrams, by bisection over the
/// candidate costs and a perfect-matching test on the usual bipartite graph
/// where every bar may also go to the diagonal.
pub fn bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let pair = |x: (f64, f64), y: (f64, f64)| (x.0 - y.0).abs().max((x.1 - y.1).abs());
    let diag = |x: (f64, f64)| (x.1 - x.0) / 2.0;
    let mut costs: Vec<f64> = vec![0.0];
    costs.extend(a.iter().map(|&x| diag(x)));
    costs.extend(b.iter().map(|&y| diag(y)));
    for &x in a {
        costs.extend(b.iter().map(|&y| pair(x, y)));
    }
    costs.sort_by(f64::total_cmp);
    costs.dedup();
    let (n, m) = (a.len(), b.len());
    // Left: a[0..n] then diagonal copies of b; right: b[0..m] then diagonal copies of a.
    let feasible = |t: f64| {
        let adj: Vec<Vec<usize>> = (0..n + m)
            .map(|l| {
                (0..n + m)
                    .filter(|&r| match (l < n, r < m) {
                        (true, true) => pair(a[l], b[r]) <= t,
                        (true, false) => r - m == l && diag(a[l]) <= t,
                        (false, true) => l - n == r && diag(b[r]) <= t,
                        (false, false) => true,
                    })
                    .collect()
            })
            .collect();
        let mut owner: Vec<Option<usize>> = vec![None; n + m];
        fn augment(l: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
            for &r in &adj[l] {
                if !seen[r] {
                    seen[r] = true;
                    if owner[r].is_none_or(|o| augment(o, adj, seen, owner)) {
                        owner[r] = Some(l);
                        return true;
                    }
                }
            }
            false
        }
        (0..n + m).all(|l| augment(l, &adj, &mut vec![false; n + m], &mut owner))
    };
    let (mut lo, mut hi) = (0, costs.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(costs[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    costs[lo]
}

pub fn cloud_strategy(
    max_points: usize,
    max_dim: usize,
) -> impl proptest::strategy::Strategy<Value = PointCloud> {
    use proptest::prelude::*;
    (1..=max_points, 1..=max_dim).prop_flat_map(|(n, d)| {
        proptest::collection::vec(-1.0f64..1.0, n * d)
            .prop_map(move |coords| PointCloud::from_flat(coords, d).unwrap())
    })
}
