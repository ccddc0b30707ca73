use rustc_hash::FxHashMap as HashMap;
use smallvec::SmallVec;

use super::{compute_persistence, Bar, PersistenceDiagram};
use crate::complex::{build_vr_filtration_with_budget, MaxEpsilon};
use crate::error::{Error, Result};
use crate::geometry::DistanceMatrix;
use crate::union_find::UnionFind;

/// A coface in filtration order: birth first, then vertices lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Entry {
    order: u64,
    key: u128,
}

/// Maps a double to an integer with the same `total_cmp` order.
fn order_key(x: f64) -> u64 {
    let bits = x.to_bits();
    if bits >> 63 == 0 {
        bits | 1 << 63
    } else {
        !bits
    }
}

fn from_order_key(k: u64) -> f64 {
    f64::from_bits(if k >> 63 == 1 { k & !(1 << 63) } else { !k })
}

type Vertices = SmallVec<[u32; 8]>;

struct Packer {
    bits: u32,
}

impl Packer {
    /// Fixed-width big-endian packing, so equal-length keys compare
    /// lexicographically.
    fn pack(&self, vertices: impl IntoIterator<Item = u32>) -> u128 {
        vertices
            .into_iter()
            .fold(0u128, |acc, v| acc << self.bits | v as u128)
    }

    fn unpack(&self, mut key: u128, len: usize) -> Vertices {
        let mask = (1u128 << self.bits) - 1;
        let mut out: Vertices = smallvec::smallvec![0; len];
        for slot in out.iter_mut().rev() {
            *slot = (key & mask) as u32;
            key >>= self.bits;
        }
        out
    }
}

struct Cliques<'a> {
    dist: &'a DistanceMatrix,
    upper: Vec<Vec<u32>>,
    packer: &'a Packer,
    /// Simplices by dimension, dimension 0 left empty.
    by_dim: Vec<Vec<Entry>>,
    count: usize,
    budget: usize,
}

impl Cliques<'_> {
    fn extend(&mut self, clique: &mut Vertices, birth: f64, candidates: &[u32]) -> Result<()> {
        for (k, &u) in candidates.iter().enumerate() {
            let b = clique.iter().fold(birth, |b, &w| b.max(self.dist.get(w as usize, u as usize)));
            clique.push(u);
            self.count += 1;
            if self.count > self.budget {
                return Err(Error::BudgetExceeded { budget: self.budget });
            }
            let key = self.packer.pack(clique.iter().copied());
            self.by_dim[clique.len() - 1].push(Entry { order: order_key(b), key });
            if clique.len() < self.by_dim.len() {
                let next: Vec<u32> = candidates[k + 1..]
                    .iter()
                    .copied()
                    .filter(|w| self.upper[u as usize].binary_search(w).is_ok())
                    .collect();
                if !next.is_empty() {
                    self.extend(clique, b, &next)?;
                }
            }
            clique.pop();
        }
        Ok(())
    }
}

/// Same bars as [`compute_persistence`] on the Rips filtration with simplices
/// of dimension up to `max_dim`, without building the top dimension.
///
/// Pairs are found by reducing the coboundary matrix with clearing: columns
/// in reverse filtration order, pivot at the earliest coface, cofaces
/// enumerated from the distance matrix on demand. Dimension 0 uses union-find.
/// `budget` bounds the simplices below the top dimension, and `top_cycles`
/// is always empty.
pub fn rips_persistence(
    dist: &DistanceMatrix,
    max_dim: usize,
    max_epsilon: MaxEpsilon,
    budget: usize,
) -> Result<PersistenceDiagram> {
    let n = dist.len();
    let bits = (usize::BITS - n.saturating_sub(1).leading_zeros()).max(1);
    if max_dim < 2 || (max_dim as u32 + 1) * bits > 128 {
        let filt = build_vr_filtration_with_budget(dist, max_dim, max_epsilon, budget)?;
        let mut diagram = compute_persistence(&filt)?;
        diagram.top_cycles.clear();
        return Ok(diagram);
    }
    let eps = max_epsilon.resolve(dist)?;
    if n > budget {
        return Err(Error::BudgetExceeded { budget });
    }
    let packer = Packer { bits };
    let mut cliques = Cliques {
        dist,
        upper: (0..n)
            .map(|v| {
                let row = dist.row(v);
                ((v + 1)..n).filter(|&u| row[u] <= eps).map(|u| u as u32).collect()
            })
            .collect(),
        packer: &packer,
        by_dim: vec![Vec::new(); max_dim],
        count: n,
        budget,
    };
    let mut clique = Vertices::new();
    for v in 0..n {
        clique.clear();
        clique.push(v as u32);
        let candidates = std::mem::take(&mut cliques.upper[v]);
        cliques.extend(&mut clique, 0.0, &candidates)?;
        cliques.upper[v] = candidates;
    }
    let mut by_dim = cliques.by_dim;
    for entries in &mut by_dim {
        entries.sort_unstable();
    }

    let mut bars = Vec::new();
    let mut deaths: HashMap<u128, Entry> = HashMap::default();
    let mut components = UnionFind::new(n);
    for &e in &by_dim[1] {
        let v = packer.unpack(e.key, 2);
        if components.union(v[0] as usize, v[1] as usize) {
            bars.push(Bar { dim: 0, birth: 0.0, death: from_order_key(e.order) });
            deaths.insert(e.key, e);
        }
    }
    for k in 0..n.saturating_sub(bars.len()) {
        let death = if k == 0 { f64::INFINITY } else { eps };
        bars.push(Bar { dim: 0, birth: 0.0, death });
    }

    // Cofaces of the `k`-simplex `s` in vertex order.
    let cofaces = |s: Entry, k: usize, visit: &mut dyn FnMut(Entry)| {
        let vs = packer.unpack(s.key, k + 1);
        let birth = from_order_key(s.order);
        let mut at = 0;
        for v in 0..n as u32 {
            if at < vs.len() && vs[at] == v {
                at += 1;
                continue;
            }
            let b = vs.iter().fold(birth, |b, &u| b.max(dist.get(u as usize, v as usize)));
            if b <= eps {
                let (lo, hi) = vs.split_at(at);
                let key = packer.pack(lo.iter().copied().chain([v]).chain(hi.iter().copied()));
                visit(Entry { order: order_key(b), key });
            }
        }
    };
    let coboundary = |s: Entry, k: usize| -> Vec<Entry> {
        let mut out = Vec::new();
        cofaces(s, k, &mut |e| out.push(e));
        out.sort_unstable();
        out
    };
    let earliest_coface = |s: Entry, k: usize| -> Option<Entry> {
        let vs = packer.unpack(s.key, k + 1);
        let birth = from_order_key(s.order);
        let rows: SmallVec<[&[f64]; 8]> = vs.iter().map(|&u| dist.row(u as usize)).collect();
        let mut best: Option<(f64, u32)> = None;
        let mut at = 0;
        for v in 0..n {
            if at < vs.len() && vs[at] as usize == v {
                at += 1;
                continue;
            }
            let b = rows.iter().fold(birth, |b, row| b.max(row[v]));
            // Ties keep the smaller new vertex, which gives the smaller key,
            // and nothing is born before `s`.
            if b <= eps && best.is_none_or(|(c, _)| b.total_cmp(&c).is_lt()) {
                best = Some((b, v as u32));
                if b == birth {
                    break;
                }
            }
        }
        best.map(|(b, v)| {
            let at = vs.partition_point(|&u| u < v);
            let key = packer.pack(vs[..at].iter().copied().chain([v]).chain(vs[at..].iter().copied()));
            Entry { order: order_key(b), key }
        })
    };

    let mut scratch = Vec::new();
    for k in 1..max_dim {
        let mut pivots: HashMap<u128, Entry> = HashMap::default();
        let mut stored: HashMap<u128, Vec<Entry>> = HashMap::default();
        for &s in by_dim[k].iter().rev() {
            if deaths.contains_key(&s.key) {
                continue;
            }
            let birth = from_order_key(s.order);
            // Most columns are already reduced; only those whose pivot is
            // taken are materialised.
            let first = earliest_coface(s, k);
            if let Some(pivot) = first.filter(|p| !pivots.contains_key(&p.key)) {
                bars.push(Bar { dim: k, birth, death: from_order_key(pivot.order) });
                pivots.insert(pivot.key, s);
                continue;
            }
            let mut col = if first.is_some() { coboundary(s, k) } else { Vec::new() };
            let mut reduced = false;
            while let Some(pivot) = col.first() {
                let Some(&owner) = pivots.get(&pivot.key) else { break };
                match stored.get(&owner.key) {
                    Some(other) => symmetric_difference(&col, other, &mut scratch),
                    None => symmetric_difference(&col, &coboundary(owner, k), &mut scratch),
                }
                std::mem::swap(&mut col, &mut scratch);
                reduced = true;
            }
            match col.first() {
                Some(pivot) => {
                    bars.push(Bar { dim: k, birth, death: from_order_key(pivot.order) });
                    pivots.insert(pivot.key, s);
                    if reduced {
                        stored.insert(s.key, col);
                    }
                }
                None => bars.push(Bar { dim: k, birth, death: eps }),
            }
        }
        deaths = pivots;
    }

    bars.sort_unstable_by_key(|b| (b.dim, order_key(b.birth), order_key(b.death)));
    Ok(PersistenceDiagram {
        bars,
        max_dim: max_dim - 1,
        max_epsilon: eps,
        n_points: n,
        top_cycles: Vec::new(),
    })
}

/// Z/2 sum of two sorted columns.
fn symmetric_difference(a: &[Entry], b: &[Entry], out: &mut Vec<Entry>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_vr_filtration, DEFAULT_SIMPLEX_BUDGET};
    use crate::geometry::{pairwise_distances, sample_shape, Metric, Shape};

    #[test]
    fn order_key_round_trips_and_sorts() {
        let xs = [-1.5, -0.0, 0.0, 1e-300, 0.5, 2.0, f64::INFINITY];
        for w in xs.windows(2) {
            assert!(order_key(w[0]) < order_key(w[1]));
        }
        for x in xs {
            assert_eq!(from_order_key(order_key(x)).to_bits(), x.to_bits());
        }
    }

    #[test]
    fn matches_reduction_on_noisy_circle() {
        let cloud = sample_shape(&Shape::Circle { radius: 1.0 }, 30, 0.1, 7).unwrap();
        let dist = pairwise_distances(&cloud, Metric::Euclidean).unwrap();
        for cap in 1..=3 {
            let reference = compute_persistence(&build_vr_filtration(&dist, cap, MaxEpsilon::Diameter).unwrap()).unwrap();
            let fast = rips_persistence(&dist, cap, MaxEpsilon::Diameter, DEFAULT_SIMPLEX_BUDGET).unwrap();
            assert_eq!(fast.bars, reference.bars, "cap {cap}");
            assert_eq!(fast.max_dim, reference.max_dim);
            assert!(fast.top_cycles.is_empty());
        }
    }
}
