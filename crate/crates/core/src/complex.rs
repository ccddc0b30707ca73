//! Vietoris-Rips filtrations.
//!
//! A simplex enters the filtration at the largest pairwise distance among its
//! vertices. Simplices are ordered by `(birth, dim, vertices)`, which puts
//! every face before its cofaces even when births tie.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::geometry::DistanceMatrix;

/// Default cap on the number of simplices a single filtration may hold.
pub const DEFAULT_SIMPLEX_BUDGET: usize = 5_000_000;

pub type Vertices = SmallVec<[u32; 4]>;

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub vertices: Vertices,
    pub birth: f64,
}

impl Simplex {
    pub fn new(vertices: impl IntoIterator<Item = u32>, birth: f64) -> Self {
        Self {
            vertices: vertices.into_iter().collect(),
            birth,
        }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Codimension-one faces; the `i`-th face omits vertex `i`.
    pub fn faces(&self) -> impl Iterator<Item = Vertices> + '_ {
        let k = if self.vertices.len() > 1 { self.vertices.len() } else { 0 };
        (0..k).map(move |skip| {
            self.vertices
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect()
        })
    }

    fn filtration_cmp(&self, other: &Self) -> Ordering {
        self.birth
            .total_cmp(&other.birth)
            .then(self.vertices.len().cmp(&other.vertices.len()))
            .then_with(|| self.vertices.cmp(&other.vertices))
    }
}

/// Upper scale limit for a filtration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum MaxEpsilon {
    /// Resolved to the largest entry of the distance matrix.
    #[default]
    Diameter,
    Fixed(f64),
}

impl MaxEpsilon {
    pub fn resolve(self, dist: &DistanceMatrix) -> Result<f64> {
        match self {
            MaxEpsilon::Diameter => Ok(dist.diameter()),
            MaxEpsilon::Fixed(e) if e > 0.0 && e.is_finite() => Ok(e),
            MaxEpsilon::Fixed(e) => Err(Error::InvalidArgument(format!(
                "max_epsilon must be positive and finite, got {e}"
            ))),
        }
    }
}

impl std::str::FromStr for MaxEpsilon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "diameter" {
            return Ok(MaxEpsilon::Diameter);
        }
        let e: f64 = s
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("max epsilon {s:?} is neither a number nor \"diameter\"")))?;
        if e > 0.0 && e.is_finite() {
            Ok(MaxEpsilon::Fixed(e))
        } else {
            Err(Error::InvalidArgument(format!("max epsilon must be positive, got {s}")))
        }
    }
}

impl std::fmt::Display for MaxEpsilon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MaxEpsilon::Diameter => f.write_str("diameter"),
            MaxEpsilon::Fixed(e) => write!(f, "{e}"),
        }
    }
}

/// Serialized as the string `"diameter"` or a number.
impl Serialize for MaxEpsilon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MaxEpsilon::Diameter => s.serialize_str("diameter"),
            MaxEpsilon::Fixed(e) => s.serialize_f64(*e),
        }
    }
}

impl<'de> Deserialize<'de> for MaxEpsilon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Name(String),
            Value(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Name(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Value(e) => Ok(MaxEpsilon::Fixed(e)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Filtration {
    simplices: Vec<Simplex>,
    max_dim: usize,
    max_epsilon: f64,
    n_points: usize,
}

impl Filtration {
    /// Wraps an explicit simplex list, sorting it into filtration order and
    /// checking that every face is present with a birth no later than its coface.
    pub fn from_simplices(mut simplices: Vec<Simplex>, n_points: usize, max_epsilon: f64) -> Result<Self> {
        for s in &simplices {
            if s.vertices.is_empty() {
                return Err(Error::InvalidFiltration("empty simplex".into()));
            }
            if s.vertices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidFiltration(format!(
                    "vertices {:?} are not strictly ascending",
                    s.vertices
                )));
            }
            if s.vertices.iter().any(|&v| v as usize >= n_points) {
                return Err(Error::InvalidFiltration(format!(
                    "simplex {:?} references a vertex >= {n_points}",
                    s.vertices
                )));
            }
            if !s.birth.is_finite() {
                return Err(Error::InvalidFiltration("non-finite birth".into()));
            }
        }
        simplices.sort_unstable_by(Simplex::filtration_cmp);
        let max_dim = simplices.iter().map(Simplex::dim).max().unwrap_or(0);
        let filt = Self {
            simplices,
            max_dim,
            max_epsilon,
            n_points,
        };
        filt.face_index()?;
        Ok(filt)
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Largest simplex dimension allowed in this filtration.
    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn max_epsilon(&self) -> f64 {
        self.max_epsilon
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Simplices present at scale `epsilon`.
    pub fn at_scale(&self, epsilon: f64) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter().take_while(move |s| s.birth <= epsilon)
    }

    /// Face lookup over this filtration; fails if a face is missing, is
    /// duplicated, or does not precede its coface.
    pub fn face_index(&self) -> Result<FaceIndex> {
        let mut lookup: HashMap<&[u32], u32> = HashMap::with_capacity(self.simplices.len());
        for (i, s) in self.simplices.iter().enumerate() {
            if lookup.insert(s.vertices.as_slice(), i as u32).is_some() {
                return Err(Error::InvalidFiltration(format!("duplicate simplex {:?}", s.vertices)));
            }
        }
        let mut offsets = Vec::with_capacity(self.simplices.len() + 1);
        let mut rows = Vec::new();
        offsets.push(0u32);
        let mut face = Vertices::new();
        for (i, s) in self.simplices.iter().enumerate() {
            let k = if s.vertices.len() > 1 { s.vertices.len() } else { 0 };
            for skip in 0..k {
                face.clear();
                face.extend(s.vertices.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v));
                match lookup.get(face.as_slice()) {
                    Some(&j) if (j as usize) < i && self.simplices[j as usize].birth <= s.birth => rows.push(j),
                    Some(_) => {
                        return Err(Error::InvalidFiltration(format!(
                            "face {face:?} of {:?} does not precede it",
                            s.vertices
                        )))
                    }
                    None => {
                        return Err(Error::InvalidFiltration(format!(
                            "face {face:?} of {:?} is missing",
                            s.vertices
                        )))
                    }
                }
            }
            offsets.push(rows.len() as u32);
        }
        let lookup = lookup.into_iter().map(|(k, v)| (Vertices::from_slice(k), v)).collect();
        Ok(FaceIndex { lookup, offsets, rows })
    }
}

/// Boundary lists of a validated filtration.
pub struct FaceIndex {
    lookup: HashMap<Vertices, u32>,
    offsets: Vec<u32>,
    rows: Vec<u32>,
}

impl FaceIndex {
    pub fn position(&self, vertices: &[u32]) -> Option<usize> {
        self.lookup.get(vertices).map(|&i| i as usize)
    }

    /// Positions of the faces of simplex `i`; the `j`-th omits vertex `j`.
    pub fn faces(&self, i: usize) -> &[u32] {
        &self.rows[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// Positions of the codimension-one faces of simplex `i`, ascending.
    pub fn boundary(&self, i: usize) -> Vec<u32> {
        let mut rows = self.faces(i).to_vec();
        rows.sort_unstable();
        rows
    }
}

pub fn build_vr_filtration(dist: &DistanceMatrix, max_dim: usize, max_epsilon: MaxEpsilon) -> Result<Filtration> {
    build_vr_filtration_with_budget(dist, max_dim, max_epsilon, DEFAULT_SIMPLEX_BUDGET)
}

/// Enumerates every clique of at most `max_dim + 1` vertices whose edges
/// are all no longer than the resolved `max_epsilon`.
pub fn build_vr_filtration_with_budget(
    dist: &DistanceMatrix,
    max_dim: usize,
    max_epsilon: MaxEpsilon,
    budget: usize,
) -> Result<Filtration> {
    let n = dist.len();
    let eps = max_epsilon.resolve(dist)?;
    if n > u32::MAX as usize {
        return Err(Error::InvalidArgument("too many points".into()));
    }

    // Higher neighbours of each vertex, ascending.
    let upper: Vec<Vec<u32>> = (0..n)
        .map(|v| {
            let row = dist.row(v);
            ((v + 1)..n)
                .filter(|&u| row[u] <= eps)
                .map(|u| u as u32)
                .collect()
        })
        .collect();

    let mut simplices = Vec::new();
    for v in 0..n {
        push_checked(&mut simplices, Simplex::new([v as u32], 0.0), budget)?;
    }
    if max_dim > 0 {
        let mut clique: Vertices = SmallVec::new();
        for v in 0..n {
            clique.clear();
            clique.push(v as u32);
            extend_cliques(dist, &upper, &mut clique, 0.0, &upper[v], max_dim, budget, &mut simplices)?;
        }
    }
    simplices.sort_unstable_by(Simplex::filtration_cmp);
    Ok(Filtration {
        simplices,
        max_dim,
        max_epsilon: eps,
        n_points: n,
    })
}

#[allow(clippy::too_many_arguments)]
fn extend_cliques(
    dist: &DistanceMatrix,
    upper: &[Vec<u32>],
    clique: &mut Vertices,
    birth: f64,
    candidates: &[u32],
    max_dim: usize,
    budget: usize,
    out: &mut Vec<Simplex>,
) -> Result<()> {
    for (k, &u) in candidates.iter().enumerate() {
        let new_birth = clique
            .iter()
            .map(|&w| dist.get(w as usize, u as usize))
            .fold(birth, f64::max);
        clique.push(u);
        push_checked(
            out,
            Simplex {
                vertices: clique.clone(),
                birth: new_birth,
            },
            budget,
        )?;
        if clique.len() <= max_dim {
            let next = intersect_sorted(&candidates[k + 1..], &upper[u as usize]);
            if !next.is_empty() {
                extend_cliques(dist, upper, clique, new_birth, &next, max_dim, budget, out)?;
            }
        }
        clique.pop();
    }
    Ok(())
}

fn push_checked(out: &mut Vec<Simplex>, s: Simplex, budget: usize) -> Result<()> {
    if out.len() >= budget {
        return Err(Error::BudgetExceeded { budget });
    }
    out.push(s);
    Ok(())
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}
