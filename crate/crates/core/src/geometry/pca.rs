use nalgebra::{DMatrix, SymmetricEigen};

use super::PointCloud;
use crate::error::{Error, Result};

/// Principal axes of a cloud, ordered by descending variance.
#[derive(Debug, Clone)]
pub struct Pca {
    mean: Vec<f64>,
    /// `dim x k`, one unit-length axis per column.
    axes: DMatrix<f64>,
    variances: Vec<f64>,
}

impl Pca {
    pub fn fit(cloud: &PointCloud, k: usize) -> Result<Self> {
        let n = cloud.len();
        let d = cloud.dim();
        let max = n.min(d);
        if k == 0 || k > max {
            return Err(Error::Rank { requested: k, max });
        }
        let mut mean = vec![0.0; d];
        for p in cloud.points() {
            for (m, x) in mean.iter_mut().zip(p) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);

        let centered = DMatrix::from_fn(n, d, |i, j| cloud.point(i)[j] - mean[j]);
        let denom = n.saturating_sub(1).max(1) as f64;
        let cov = (centered.transpose() * &centered) / denom;
        let eig = SymmetricEigen::new(cov);

        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        let mut axes = DMatrix::zeros(d, k);
        let mut variances = Vec::with_capacity(k);
        for (col, &idx) in order.iter().take(k).enumerate() {
            let mut v = eig.eigenvectors.column(idx).clone_owned();
            // Fix the sign so the largest-magnitude entry is positive.
            let lead = v.iter().copied().fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            if lead < 0.0 {
                v.neg_mut();
            }
            axes.set_column(col, &v);
            variances.push(eig.eigenvalues[idx].max(0.0));
        }
        Ok(Self {
            mean,
            axes,
            variances,
        })
    }

    pub fn transform(&self, cloud: &PointCloud) -> Result<PointCloud> {
        if cloud.dim() != self.mean.len() {
            return Err(Error::InvalidCloud(format!(
                "cloud has dimension {} but the projection expects {}",
                cloud.dim(),
                self.mean.len()
            )));
        }
        let k = self.axes.ncols();
        let mut coords = Vec::with_capacity(cloud.len() * k);
        for p in cloud.points() {
            for c in 0..k {
                let axis = self.axes.column(c);
                coords.push(
                    p.iter()
                        .zip(&self.mean)
                        .zip(axis.iter())
                        .map(|((x, m), a)| (x - m) * a)
                        .sum(),
                );
            }
        }
        let out = PointCloud::from_flat(coords, k)?;
        match cloud.labels() {
            Some(l) => out.with_labels(l.to_vec()),
            None => Ok(out),
        }
    }

    /// Covariance eigenvalues of the retained axes.
    pub fn explained_variance(&self) -> &[f64] {
        &self.variances
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }
}

/// Mean-centres `cloud` and projects it onto its top `k` principal axes.
pub fn pca_project(cloud: &PointCloud, k: usize) -> Result<PointCloud> {
    Pca::fit(cloud, k)?.transform(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{pairwise_distances, Metric};

    #[test]
    fn rejects_rank_overflow() {
        let cloud = PointCloud::from_points(&[[0.0, 1.0, 2.0], [1.0, 1.0, 1.0]]).unwrap();
        assert_eq!(
            pca_project(&cloud, 3).unwrap_err(),
            Error::Rank { requested: 3, max: 2 }
        );
        assert!(pca_project(&cloud, 0).is_err());
    }

    #[test]
    fn full_rank_projection_is_an_isometry() {
        let pts: Vec<[f64; 3]> = (0..12)
            .map(|i| {
                let t = i as f64;
                [t.sin() * 3.0, (1.7 * t).cos(), 0.3 * t - 1.0]
            })
            .collect();
        let cloud = PointCloud::from_points(&pts).unwrap();
        let proj = pca_project(&cloud, 3).unwrap();
        let a = pairwise_distances(&cloud, Metric::Euclidean).unwrap();
        let b = pairwise_distances(&proj, Metric::Euclidean).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                assert!((a.get(i, j) - b.get(i, j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn subspace_points_reconstruct_exactly() {
        // Points on the plane spanned by (1,1,0,0) and (0,0,1,-1), offset by (5,0,0,2).
        let pts: Vec<[f64; 4]> = (0..10)
            .map(|i| {
                let (a, b) = (i as f64 * 0.7 - 2.0, ((i * i) % 7) as f64 - 3.0);
                [5.0 + a, a, b, 2.0 - b]
            })
            .collect();
        let cloud = PointCloud::from_points(&pts).unwrap();
        let pca = Pca::fit(&cloud, 2).unwrap();
        let proj = pca.transform(&cloud).unwrap();
        for (i, p) in cloud.points().enumerate() {
            let q = proj.point(i);
            for j in 0..4 {
                let rec = pca.mean()[j] + q[0] * pca.axes[(j, 0)] + q[1] * pca.axes[(j, 1)];
                assert!((rec - p[j]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn variances_are_descending() {
        let pts: Vec<[f64; 3]> = (0..20)
            .map(|i| {
                let t = i as f64;
                [10.0 * t.cos(), 2.0 * (0.5 * t).sin(), 0.1 * t]
            })
            .collect();
        let pca = Pca::fit(&PointCloud::from_points(&pts).unwrap(), 3).unwrap();
        let v = pca.explained_variance();
        assert!(v[0] >= v[1] && v[1] >= v[2]);
    }
}
