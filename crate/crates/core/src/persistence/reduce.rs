use super::{Bar, PersistenceDiagram};
use crate::complex::Filtration;
use crate::error::Result;

const NONE: u32 = u32::MAX;

/// Standard persistence pairing over Z/2.
///
/// Columns are reduced left to right within each dimension, highest
/// dimension first. Whenever a column ends with pivot row `r`, simplex `r`
/// is known to be a creator and its own column is cleared without being
/// reduced.
pub fn compute_persistence(filt: &Filtration) -> Result<PersistenceDiagram> {
    let index = filt.face_index()?;
    let simplices = filt.simplices();
    let n = simplices.len();
    let top = filt.max_dim();

    let mut by_dim: Vec<Vec<u32>> = vec![Vec::new(); top + 1];
    for (i, s) in simplices.iter().enumerate() {
        by_dim[s.dim()].push(i as u32);
    }

    let mut pivot_owner = vec![NONE; n];
    let mut cleared = vec![false; n];
    let mut negative = vec![false; n];
    let mut slot = vec![NONE; n];
    let mut stored: Vec<Vec<u32>> = Vec::new();
    let mut scratch = Vec::new();

    for d in (1..=top).rev() {
        for &j in &by_dim[d] {
            let j = j as usize;
            if cleared[j] {
                continue;
            }
            let mut col = index.boundary(j);
            while let Some(&low) = col.last() {
                let owner = pivot_owner[low as usize];
                if owner == NONE {
                    break;
                }
                symmetric_difference(&col, &stored[slot[owner as usize] as usize], &mut scratch);
                std::mem::swap(&mut col, &mut scratch);
            }
            if let Some(&low) = col.last() {
                pivot_owner[low as usize] = j as u32;
                cleared[low as usize] = true;
                negative[j] = true;
                slot[j] = stored.len() as u32;
                stored.push(col);
            }
        }
    }

    let max_dim = top.saturating_sub(1);
    let eps = filt.max_epsilon();
    let mut bars = Vec::new();
    let mut top_cycles = Vec::new();
    let mut essential_assigned = false;
    for (i, s) in simplices.iter().enumerate() {
        if negative[i] {
            continue;
        }
        let dim = s.dim();
        let owner = pivot_owner[i];
        if owner != NONE {
            bars.push(Bar {
                dim,
                birth: s.birth,
                death: simplices[owner as usize].birth,
            });
        } else if dim == 0 {
            let death = if essential_assigned { eps } else { f64::INFINITY };
            essential_assigned = true;
            bars.push(Bar { dim, birth: s.birth, death });
        } else if dim == top {
            top_cycles.push(s.birth);
        } else {
            bars.push(Bar { dim, birth: s.birth, death: eps });
        }
    }
    bars.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then(a.birth.total_cmp(&b.birth))
            .then(a.death.total_cmp(&b.death))
    });

    Ok(PersistenceDiagram {
        bars,
        max_dim,
        max_epsilon: eps,
        n_points: filt.n_points(),
        top_cycles,
    })
}

/// Z/2 sum of two ascending index columns.
fn symmetric_difference(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
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
    use crate::complex::{build_vr_filtration, Filtration, MaxEpsilon, Simplex};
    use crate::geometry::DistanceMatrix;

    #[test]
    fn two_vertices_one_edge() {
        let d = DistanceMatrix::from_full(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let f = build_vr_filtration(&d, 1, MaxEpsilon::Diameter).unwrap();
        let dgm = compute_persistence(&f).unwrap();
        assert_eq!(
            dgm.bars,
            vec![
                Bar { dim: 0, birth: 0.0, death: 1.0 },
                Bar { dim: 0, birth: 0.0, death: f64::INFINITY },
            ]
        );
    }

    #[test]
    fn filled_triangle_has_zero_length_loop() {
        let d = DistanceMatrix::from_full(3, vec![0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0]).unwrap();
        let f = build_vr_filtration(&d, 2, MaxEpsilon::Fixed(2.0)).unwrap();
        let dgm = compute_persistence(&f).unwrap();
        let loops: Vec<&Bar> = dgm.bars_in_dim(1).collect();
        assert_eq!(loops, vec![&Bar { dim: 1, birth: 1.0, death: 1.0 }]);
        assert!(loops[0].is_zero_persistence());
        assert_eq!(dgm.bars_in_dim(0).filter(|b| b.is_infinite()).count(), 1);
    }

    #[test]
    fn hollow_square_loop_dies_when_diagonals_enter() {
        let s = 2f64.sqrt();
        let d = DistanceMatrix::from_full(
            4,
            vec![
                0.0, 1.0, s, 1.0, //
                1.0, 0.0, 1.0, s, //
                s, 1.0, 0.0, 1.0, //
                1.0, s, 1.0, 0.0,
            ],
        )
        .unwrap();
        let f = build_vr_filtration(&d, 2, MaxEpsilon::Diameter).unwrap();
        let dgm = compute_persistence(&f).unwrap();
        let loops: Vec<&Bar> = dgm.bars_in_dim(1).filter(|b| !b.is_zero_persistence()).collect();
        assert_eq!(loops, vec![&Bar { dim: 1, birth: 1.0, death: s }]);
        // Each diagonal closes a loop that its triangles fill at the same scale.
        assert_eq!(dgm.bars_in_dim(1).filter(|b| b.is_zero_persistence()).count(), 2);
    }

    #[test]
    fn disconnected_components_close_at_cap() {
        let d = DistanceMatrix::from_full(3, vec![0.0, 1.0, 9.0, 1.0, 0.0, 9.0, 9.0, 9.0, 0.0]).unwrap();
        let f = build_vr_filtration(&d, 1, MaxEpsilon::Fixed(2.0)).unwrap();
        let dgm = compute_persistence(&f).unwrap();
        let zero: Vec<&Bar> = dgm.bars_in_dim(0).collect();
        assert_eq!(zero.iter().filter(|b| b.is_infinite()).count(), 1);
        assert_eq!(zero.iter().filter(|b| b.death == 2.0).count(), 1);
        assert_eq!(zero.iter().filter(|b| b.death == 1.0).count(), 1);
    }

    #[test]
    fn top_dimension_cycles_are_not_bars() {
        let f = Filtration::from_simplices(
            vec![
                Simplex::new([0], 0.0),
                Simplex::new([1], 0.0),
                Simplex::new([2], 0.0),
                Simplex::new([0, 1], 1.0),
                Simplex::new([1, 2], 1.0),
                Simplex::new([0, 2], 1.0),
            ],
            3,
            1.0,
        )
        .unwrap();
        let dgm = compute_persistence(&f).unwrap();
        assert_eq!(dgm.max_dim, 0);
        assert_eq!(dgm.top_cycles, vec![1.0]);
        assert!(dgm.bars.iter().all(|b| b.dim == 0));
    }

    #[test]
    fn symmetric_difference_merges() {
        let mut out = Vec::new();
        symmetric_difference(&[1, 3, 5], &[3, 4, 5, 9], &mut out);
        assert_eq!(out, vec![1, 4, 9]);
    }
}
