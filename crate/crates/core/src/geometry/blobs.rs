use super::{euclidean, PointCloud};
use crate::union_find::UnionFind;

/// Replaces each single-linkage cluster (linkage distance `<= radius`) by its
/// centre of mass.
///
/// Merging is repeated on the weighted centroids until no two of them lie
/// within `radius`, so the result is a fixed point: collapsing it again with
/// the same radius returns it unchanged. Output points are ordered by the
/// smallest original index in each cluster.
pub fn collapse_blobs(cloud: &PointCloud, radius: f64) -> PointCloud {
    let radius = radius.max(0.0);
    let dim = cloud.dim();
    let mut centroids: Vec<Vec<f64>> = cloud.points().map(|p| p.to_vec()).collect();
    let mut weights: Vec<f64> = vec![1.0; centroids.len()];

    loop {
        let n = centroids.len();
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if euclidean(&centroids[i], &centroids[j]) <= radius {
                    uf.union(i, j);
                }
            }
        }
        if uf.components() == n {
            break;
        }
        let groups = uf.groups();
        let mut next = Vec::with_capacity(groups.len());
        let mut next_weights = Vec::with_capacity(groups.len());
        for group in groups {
            let total: f64 = group.iter().map(|&i| weights[i]).sum();
            let mut c = vec![0.0; dim];
            for &i in &group {
                for (acc, x) in c.iter_mut().zip(&centroids[i]) {
                    *acc += weights[i] * x;
                }
            }
            c.iter_mut().for_each(|x| *x /= total);
            next.push(c);
            next_weights.push(total);
        }
        centroids = next;
        weights = next_weights;
    }

    let coords = centroids.into_iter().flatten().collect();
    PointCloud::from_flat(coords, dim).expect("centroids of finite points are finite")
}
