mod common;

use std::collections::BTreeSet;

use common::cloud_strategy;
use perforate_core::mapper::{build_cover, nerve, MapperNode};
use perforate_core::prelude::*;
use proptest::prelude::*;

/// Components by depth-first search over an adjacency list.
fn components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    count
}

fn node_strategy() -> impl Strategy<Value = (usize, Vec<Vec<usize>>)> {
    (1usize..25).prop_flat_map(|n_points| {
        let members = proptest::collection::btree_set(0..n_points, 1..=n_points.min(6))
            .prop_map(|s| s.into_iter().collect::<Vec<_>>());
        (Just(n_points), proptest::collection::vec(members, 1..=20))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nerve_is_exactly_the_sets_of_overlapping_nodes((n_points, members) in node_strategy(), output_dim in 1usize..=3) {
        let nodes: Vec<MapperNode> = members.iter().enumerate().map(|(id, m)| MapperNode {
            id,
            box_id: id,
            size: m.len(),
            members: m.clone(),
            centroid: Vec::new(),
        }).collect();
        let simplices = nerve(&nodes, n_points, output_dim);
        let got: BTreeSet<Vec<usize>> = simplices.iter().cloned().collect();
        prop_assert_eq!(got.len(), simplices.len());
        for s in &simplices {
            prop_assert!(s.len() >= 2 && s.len() <= output_dim + 1);
            prop_assert!(s.windows(2).all(|w| w[0] < w[1]));
            let shared = (0..n_points).any(|p| s.iter().all(|&i| members[i].contains(&p)));
            prop_assert!(shared, "{:?} has no common point", s);
            // Closed under taking faces of size at least two.
            if s.len() > 2 {
                for skip in 0..s.len() {
                    let face: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                    prop_assert!(got.contains(&face));
                }
            }
        }
        // Every overlapping pair is an edge.
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                let overlap = members[i].iter().any(|p| members[j].contains(p));
                prop_assert_eq!(overlap, got.contains(&vec![i, j]));
            }
        }
    }

    #[test]
    fn graph_stats_agree_with_a_search(cloud in cloud_strategy(60, 3), resolution in 1usize..6, overlap in 0.0f64..0.6) {
        let g = mapper(&cloud, Lens::Coordinate(0), resolution, overlap, Linkage::Auto, 2).unwrap();
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let stats = graph_stats(&g);
        let c = components(g.nodes.len(), &edges);
        prop_assert_eq!(stats.components, c);
        prop_assert_eq!(stats.edges, edges.len());
        prop_assert_eq!(stats.cycle_rank + g.nodes.len(), edges.len() + c);
        // Every point lands in some node, and node sizes are their member counts.
        let covered: BTreeSet<usize> = g.nodes.iter().flat_map(|n| n.members.iter().copied()).collect();
        prop_assert_eq!(covered.len(), cloud.len());
        prop_assert!(g.nodes.iter().all(|n| n.size == n.members.len()));
    }

    #[test]
    fn cover_boxes_contain_every_lens_value(cloud in cloud_strategy(40, 2), resolution in 1usize..8, overlap in 0.0f64..0.9) {
        let cover = build_cover(&cloud, resolution, overlap).unwrap();
        prop_assert_eq!(cover.boxes.len(), resolution.pow(cloud.dim() as u32));
        for p in cloud.points() {
            prop_assert!(cover.boxes.iter().any(|b| b.contains(p)));
        }
    }
}

// Random samples of 100 points leave some overlap strips empty on one arc,
// which cuts the loop; evenly spaced points never do.
#[test]
fn evenly_spaced_circles_have_one_cycle() {
    for step in 0..10 {
        let offset = step as f64 * 0.1;
        let points: Vec<[f64; 2]> = (0..100)
            .map(|i| {
                let a = offset + std::f64::consts::TAU * i as f64 / 100.0;
                [a.cos(), a.sin()]
            })
            .collect();
        let circle = PointCloud::from_points(&points).unwrap();
        let g = mapper(&circle, Lens::Coordinate(0), 4, 0.3, Linkage::Auto, 1).unwrap();
        assert_eq!(graph_stats(&g).cycle_rank, 1, "offset {offset}");
    }
}

#[test]
fn sampled_circle_fixture_has_one_cycle() {
    let circle = sample_shape(&Shape::Circle { radius: 1.0 }, 100, 0.0, 0).unwrap();
    let g = mapper(&circle, Lens::Coordinate(0), 4, 0.3, Linkage::Auto, 1).unwrap();
    assert_eq!(graph_stats(&g).cycle_rank, 1);
}

#[test]
fn blobs_have_no_cycles() {
    for seed in 0..20 {
        let blob = sample_shape(&Shape::GaussianBlob { dim: 2, std: 1.0 }, 100, 0.0, seed).unwrap();
        for lens in [Lens::Coordinate(0), Lens::Pca(1)] {
            let g = mapper(&blob, lens, 4, 0.3, Linkage::Auto, 1).unwrap();
            assert_eq!(graph_stats(&g).cycle_rank, 0, "seed {seed} lens {lens}");
        }
    }
}
