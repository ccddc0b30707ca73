//! Mapper graphs: lens, cover, single-linkage clustering of each preimage,
//! and the nerve of the resulting clusters.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{euclidean, pca_project, PointCloud};
use crate::union_find::UnionFind;

const AUTO_BINS: usize = 10;

/// Projection used as the mapper filter function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "arg")]
pub enum Lens {
    /// First `k` principal components.
    Pca(usize),
    /// A single input coordinate.
    Coordinate(usize),
}

impl std::str::FromStr for Lens {
    type Err = Error;

    /// Accepts `pca`, `pca<k>`, `pca:<k>` and `coord:<i>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown lens {s:?}"));
        if let Some(rest) = s.strip_prefix("coord") {
            let i = rest.trim_start_matches(':').parse().map_err(|_| bad())?;
            return Ok(Lens::Coordinate(i));
        }
        if let Some(rest) = s.strip_prefix("pca") {
            let rest = rest.trim_start_matches(':');
            let k = if rest.is_empty() { 1 } else { rest.parse().map_err(|_| bad())? };
            return Ok(Lens::Pca(k));
        }
        Err(bad())
    }
}

impl std::fmt::Display for Lens {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Lens::Pca(k) => write!(f, "pca:{k}"),
            Lens::Coordinate(i) => write!(f, "coord:{i}"),
        }
    }
}

/// Single-linkage merge distance within each preimage.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Linkage {
    Fixed(f64),
    /// Left edge of the first empty bin in a 10-bin histogram of the
    /// preimage's pairwise distances.
    #[default]
    Auto,
}

impl std::str::FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Linkage::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(Linkage::Fixed(v)),
            _ => Err(Error::InvalidArgument(format!(
                "linkage must be \"auto\" or a positive number, got {s:?}"
            ))),
        }
    }
}

impl std::fmt::Display for Linkage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Linkage::Fixed(v) => write!(f, "{v}"),
            Linkage::Auto => f.write_str("auto"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverBox {
    /// `sum_a index_a * resolution^a`.
    pub id: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Per axis, whether `upper` is included (true only for the last interval).
    closed: Vec<bool>,
}

impl CoverBox {
    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter().enumerate().all(|(a, &x)| {
            x >= self.lower[a] && (x < self.upper[a] || (self.closed[a] && x <= self.upper[a]))
        })
    }
}

/// Product of `resolution` overlapping intervals per lens axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    pub lens_dim: usize,
    pub resolution: usize,
    pub overlap: f64,
    pub boxes: Vec<CoverBox>,
}

/// Intervals `[lo_j, hi_j)` of equal width `w` with step `w (1 - g)` spanning
/// `[min, max]`; the last one is closed.
fn axis_intervals(min: f64, max: f64, r: usize, g: f64) -> Vec<(f64, f64)> {
    let width = (max - min) / ((r - 1) as f64 * (1.0 - g) + 1.0);
    let step = width * (1.0 - g);
    let lows: Vec<f64> = (0..r).map(|j| min + j as f64 * step).collect();
    (0..r)
        .map(|j| {
            let hi = if j + 1 == r {
                max
            } else {
                // Rounding must never open a gap before the next interval.
                (lows[j] + width).max(lows[j + 1])
            };
            (lows[j], hi)
        })
        .collect()
}

pub fn build_cover(lensed: &PointCloud, resolution: usize, overlap: f64) -> Result<Cover> {
    let m = lensed.dim();
    if m > 2 {
        return Err(Error::UnsupportedLensDim(m));
    }
    if resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::InvalidArgument(format!("overlap must lie in [0, 1), got {overlap}")));
    }
    let mut axes = Vec::with_capacity(m);
    for a in 0..m {
        let (lo, hi) = lensed
            .points()
            .map(|p| p[a])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
        let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
        axes.push(axis_intervals(lo, hi, resolution, overlap));
    }
    let count = resolution.pow(m as u32);
    let boxes = (0..count)
        .map(|id| {
            let mut rest = id;
            let mut lower = Vec::with_capacity(m);
            let mut upper = Vec::with_capacity(m);
            let mut closed = Vec::with_capacity(m);
            for intervals in &axes {
                let j = rest % resolution;
                rest /= resolution;
                lower.push(intervals[j].0);
                upper.push(intervals[j].1);
                closed.push(j + 1 == resolution);
            }
            CoverBox { id, lower, upper, closed }
        })
        .collect();
    Ok(Cover {
        lens_dim: m,
        resolution,
        overlap,
        boxes,
    })
}

fn auto_epsilon(dists: &[f64]) -> f64 {
    let (lo, hi) = dists
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    if !(hi > lo) {
        return hi.max(0.0);
    }
    let width = (hi - lo) / AUTO_BINS as f64;
    let mut counts = [0usize; AUTO_BINS];
    for &d in dists {
        let bin = (((d - lo) / width) as usize).min(AUTO_BINS - 1);
        counts[bin] += 1;
    }
    match counts.iter().position(|&c| c == 0) {
        Some(bin) => lo + bin as f64 * width,
        None => hi,
    }
}

/// Single-linkage clusters of `members`, each sorted, ordered by smallest member.
pub fn cluster_preimage(cloud: &PointCloud, members: &[usize], linkage: Linkage) -> Vec<Vec<usize>> {
    let k = members.len();
    if k == 0 {
        return Vec::new();
    }
    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            pairs.push(euclidean(cloud.point(members[i]), cloud.point(members[j])));
        }
    }
    let eps = match linkage {
        Linkage::Fixed(e) => e,
        Linkage::Auto => auto_epsilon(&pairs),
    };
    let mut uf = UnionFind::new(k);
    let mut p = 0;
    for i in 0..k {
        for j in (i + 1)..k {
            if pairs[p] <= eps {
                uf.union(i, j);
            }
            p += 1;
        }
    }
    let mut local = uf.groups();
    for g in &mut local {
        for i in g.iter_mut() {
            *i = members[*i];
        }
        g.sort_unstable();
    }
    local.sort();
    local
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapperNode {
    pub id: usize,
    #[serde(rename = "box")]
    pub box_id: usize,
    pub size: usize,
    pub members: Vec<usize>,
    /// Mean of the members in the original coordinates.
    pub centroid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapperGraph {
    pub nodes: Vec<MapperNode>,
    /// Nerve simplices of dimension `1..=output_dim` as ascending node ids,
    /// ordered by size then lexicographically. Nodes themselves are the
    /// 0-simplices and are not repeated here.
    pub simplices: Vec<Vec<usize>>,
    pub output_dim: usize,
}

impl MapperGraph {
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.simplices
            .iter()
            .filter(|s| s.len() == 2)
            .map(|s| (s[0], s[1]))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "nodes": self.nodes, "simplices": self.simplices })
    }

    /// One `"u v"` line per edge.
    pub fn edge_list(&self) -> String {
        self.edges().map(|(u, v)| format!("{u} {v}\n")).collect()
    }
}

fn centroid(cloud: &PointCloud, members: &[usize]) -> Vec<f64> {
    let mut c = vec![0.0; cloud.dim()];
    for &i in members {
        for (s, x) in c.iter_mut().zip(cloud.point(i)) {
            *s += x;
        }
    }
    c.iter_mut().for_each(|s| *s /= members.len() as f64);
    c
}

/// Simplices spanned by nodes sharing a point, up to `output_dim`.
pub fn nerve(nodes: &[MapperNode], n_points: usize, output_dim: usize) -> Vec<Vec<usize>> {
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); n_points];
    for node in nodes {
        for &p in &node.members {
            containing[p].push(node.id);
        }
    }
    let mut out = BTreeSet::new();
    let mut current = Vec::new();
    for ids in &containing {
        subsets(ids, 0, output_dim + 1, &mut current, &mut out);
    }
    let mut simplices: Vec<Vec<usize>> = out.into_iter().collect();
    simplices.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    simplices
}

fn subsets(ids: &[usize], start: usize, max_len: usize, current: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
    if current.len() >= 2 {
        out.insert(current.clone());
    }
    if current.len() == max_len {
        return;
    }
    for i in start..ids.len() {
        current.push(ids[i]);
        subsets(ids, i + 1, max_len, current, out);
        current.pop();
    }
}

pub fn mapper(
    cloud: &PointCloud,
    lens: Lens,
    resolution: usize,
    overlap: f64,
    linkage: Linkage,
    output_dim: usize,
) -> Result<MapperGraph> {
    if cloud.is_empty() {
        return Err(Error::InvalidCloud("mapper of an empty cloud".into()));
    }
    if output_dim == 0 {
        return Err(Error::InvalidArgument("output_dim must be at least 1".into()));
    }
    let lensed = match lens {
        Lens::Pca(k) => pca_project(cloud, k)?,
        Lens::Coordinate(i) => {
            if i >= cloud.dim() {
                return Err(Error::InvalidArgument(format!(
                    "coordinate {i} out of range for dimension {}",
                    cloud.dim()
                )));
            }
            PointCloud::from_flat(cloud.points().map(|p| p[i]).collect(), 1)?
        }
    };
    let cover = build_cover(&lensed, resolution, overlap)?;
    let clusters: Vec<(usize, Vec<Vec<usize>>)> = cover
        .boxes
        .par_iter()
        .map(|b| {
            let members: Vec<usize> = (0..lensed.len()).filter(|&i| b.contains(lensed.point(i))).collect();
            (b.id, cluster_preimage(cloud, &members, linkage))
        })
        .collect();

    let mut nodes = Vec::new();
    for (box_id, groups) in clusters {
        for members in groups {
            nodes.push(MapperNode {
                id: nodes.len(),
                box_id,
                size: members.len(),
                centroid: centroid(cloud, &members),
                members,
            });
        }
    }
    let simplices = nerve(&nodes, cloud.len(), output_dim);
    Ok(MapperGraph {
        nodes,
        simplices,
        output_dim,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct GraphStats {
    pub components: usize,
    pub cycle_rank: usize,
    pub nodes: usize,
    pub edges: usize,
}

pub fn graph_stats(g: &MapperGraph) -> GraphStats {
    let mut uf = UnionFind::new(g.nodes.len());
    let mut edges = 0;
    for (u, v) in g.edges() {
        uf.union(u, v);
        edges += 1;
    }
    let components = uf.components();
    GraphStats {
        components,
        cycle_rank: edges + components - g.nodes.len(),
        nodes: g.nodes.len(),
        edges,
    }
}
