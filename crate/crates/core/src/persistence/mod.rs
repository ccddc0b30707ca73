//! Persistent homology of Vietoris-Rips filtrations.
//!
//! [`compute_persistence`] is the production path (sparse Z/2 column
//! reduction with clearing). [`oracle_betti_curve`] recomputes Betti numbers
//! from scratch at each scale by rank-nullity over the rationals, and
//! [`persistent_boundary_rank`] reduces the persistent boundary matrix over
//! `Q[t]`; both exist to cross-check the fast path. [`rips_persistence`]
//! reaches the same bars from the distance matrix by a coboundary reduction
//! that never builds the top dimension.

mod cohomology;
mod oracle;
mod polynomial;
mod reduce;

pub use oracle::{oracle_betti_curve, ORACLE_MAX_POINTS};
pub use polynomial::{
    persistent_boundary_rank, CellFiltration, PolyMatrix, PolyReduction, Polynomial, POLY_MAX_POINTS,
};
pub use cohomology::rips_persistence;
pub use reduce::compute_persistence;

use serde::{Deserialize, Serialize};

/// Default minimum bar length, as a fraction of the filtration's max epsilon.
pub const DEFAULT_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub dim: usize,
    pub birth: f64,
    /// `f64::INFINITY` for the essential dimension-0 class.
    pub death: f64,
}

impl Bar {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    /// Born and killed by simplices entering at the same scale.
    pub fn is_zero_persistence(&self) -> bool {
        self.death == self.birth
    }
}

/// Betti numbers `H_1, H_2, ...`; `H_0` is reported separately as a component count.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BettiSequence(pub Vec<usize>);

impl BettiSequence {
    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    /// Count for homology dimension `k >= 1`, zero past the end.
    pub fn get(&self, k: usize) -> usize {
        k.checked_sub(1).and_then(|i| self.0.get(i)).copied().unwrap_or(0)
    }

    pub fn trimmed(&self) -> BettiSequence {
        let end = self.0.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1);
        BettiSequence(self.0[..end].to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl From<Vec<usize>> for BettiSequence {
    fn from(v: Vec<usize>) -> Self {
        BettiSequence(v)
    }
}

impl std::fmt::Display for BettiSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .map(|(i, c)| format!("H{}={c}", i + 1))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    /// Sorted by `(dim, birth, death)`.
    pub bars: Vec<Bar>,
    /// Highest homology dimension reported as bars.
    pub max_dim: usize,
    pub max_epsilon: f64,
    pub n_points: usize,
    /// Births of cycles in the filtration's top simplex dimension. Nothing in
    /// the filtration can kill them, so they are kept out of `bars`.
    pub top_cycles: Vec<f64>,
}

impl PersistenceDiagram {
    pub fn bars_in_dim(&self, dim: usize) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(move |b| b.dim == dim)
    }

    /// Barcode as a JSON array of `{dim, birth, death}` with `"inf"` for the
    /// essential class.
    pub fn bars_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.bars
                .iter()
                .map(|b| {
                    let death = if b.is_infinite() {
                        serde_json::Value::from("inf")
                    } else {
                        serde_json::Value::from(b.death)
                    };
                    serde_json::json!({ "dim": b.dim, "birth": b.birth, "death": death })
                })
                .collect(),
        )
    }
}

/// Component count and Betti numbers of the complex at scale `epsilon`.
pub fn betti_at(diagram: &PersistenceDiagram, epsilon: f64) -> (usize, BettiSequence) {
    let mut counts = vec![0usize; diagram.max_dim + 1];
    for b in &diagram.bars {
        if b.birth <= epsilon && epsilon < b.death && b.dim <= diagram.max_dim {
            counts[b.dim] += 1;
        }
    }
    let components = counts[0];
    (components, BettiSequence(counts[1..].to_vec()))
}

/// Bars in each dimension `>= 1` whose length is at least
/// `threshold * max_epsilon`.
pub fn persistent_betti(diagram: &PersistenceDiagram, threshold: f64) -> BettiSequence {
    let cutoff = threshold * diagram.max_epsilon;
    let mut counts = vec![0usize; diagram.max_dim];
    for b in &diagram.bars {
        // Zero-length bars never count, even with a zero threshold.
        if b.dim >= 1 && b.persistence() > 0.0 && b.persistence() >= cutoff {
            counts[b.dim - 1] += 1;
        }
    }
    BettiSequence(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagram(bars: Vec<Bar>, max_dim: usize, max_epsilon: f64) -> PersistenceDiagram {
        PersistenceDiagram {
            bars,
            max_dim,
            max_epsilon,
            n_points: 3,
            top_cycles: Vec::new(),
        }
    }

    #[test]
    fn betti_at_uses_half_open_bars() {
        let d = diagram(
            vec![
                Bar { dim: 0, birth: 0.0, death: 1.0 },
                Bar { dim: 0, birth: 0.0, death: f64::INFINITY },
                Bar { dim: 1, birth: 0.5, death: 2.0 },
            ],
            1,
            2.0,
        );
        assert_eq!(betti_at(&d, 0.0), (2, BettiSequence(vec![0])));
        assert_eq!(betti_at(&d, 0.5), (2, BettiSequence(vec![1])));
        assert_eq!(betti_at(&d, 1.0), (1, BettiSequence(vec![1])));
        assert_eq!(betti_at(&d, 2.0), (1, BettiSequence(vec![0])));
    }

    #[test]
    fn persistent_betti_thresholds_on_max_epsilon() {
        let d = diagram(
            vec![
                Bar { dim: 1, birth: 0.1, death: 0.15 },
                Bar { dim: 1, birth: 0.1, death: 0.9 },
                Bar { dim: 1, birth: 0.3, death: 0.3 },
                Bar { dim: 2, birth: 0.2, death: 0.5 },
            ],
            2,
            1.0,
        );
        assert_eq!(persistent_betti(&d, 0.1), BettiSequence(vec![1, 1]));
        assert_eq!(persistent_betti(&d, 0.0), BettiSequence(vec![2, 1]));
        assert_eq!(persistent_betti(&d, 1.0), BettiSequence(vec![0, 0]));
    }

    #[test]
    fn betti_sequence_helpers() {
        let b = BettiSequence(vec![2, 1, 0, 0]);
        assert_eq!(b.trimmed(), BettiSequence(vec![2, 1]));
        assert_eq!(b.get(1), 2);
        assert_eq!(b.get(5), 0);
        assert_eq!(b.to_string(), "H1=2 H2=1 H3=0 H4=0");
        assert!(BettiSequence(vec![0, 0]).is_zero());
    }

    #[test]
    fn json_uses_inf_sentinel() {
        let d = diagram(
            vec![
                Bar { dim: 0, birth: 0.0, death: 1.0 },
                Bar { dim: 0, birth: 0.0, death: f64::INFINITY },
            ],
            0,
            1.0,
        );
        assert_eq!(
            d.bars_json().to_string(),
            r#"[{"birth":0.0,"death":1.0,"dim":0},{"birth":0.0,"death":"inf","dim":0}]"#
        );
    }
}
