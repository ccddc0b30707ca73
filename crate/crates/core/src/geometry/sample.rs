//! Seeded samplers for manifolds with known homology.
//!
//! All samplers draw from `ChaCha8Rng::seed_from_u64(seed)`, whose output
//! stream is specified independently of platform and word size, so fixture
//! clouds are bit-reproducible.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::PointCloud;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Circle of the given radius in the plane.
    Circle { radius: f64 },
    /// 2-sphere of the given radius in R^3.
    Sphere { radius: f64 },
    /// Torus of revolution in R^3 with tube radius `minor` around a circle of radius `major`.
    Torus { major: f64, minor: f64 },
    /// Isotropic Gaussian in R^dim.
    GaussianBlob { dim: usize, std: f64 },
}

impl Shape {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidShapeParams(msg));
        match *self {
            Shape::Circle { radius } | Shape::Sphere { radius } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return bad(format!("radius must be positive, got {radius}"));
                }
            }
            Shape::Torus { major, minor } => {
                if !(minor > 0.0 && major > minor && major.is_finite()) {
                    return bad(format!(
                        "torus requires major > minor > 0, got major={major} minor={minor}"
                    ));
                }
            }
            Shape::GaussianBlob { dim, std } => {
                if dim == 0 {
                    return bad("blob dimension must be at least 1".into());
                }
                if !(std > 0.0 && std.is_finite()) {
                    return bad(format!("blob std must be positive, got {std}"));
                }
            }
        }
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        match *self {
            Shape::Circle { .. } => 2,
            Shape::Sphere { .. } | Shape::Torus { .. } => 3,
            Shape::GaussianBlob { dim, .. } => dim,
        }
    }
}

/// Draws `n` points from `shape`, then adds isotropic Gaussian noise of
/// standard deviation `noise_sigma` to every coordinate.
pub fn sample_shape(shape: &Shape, n: usize, noise_sigma: f64, seed: u64) -> Result<PointCloud> {
    shape.validate()?;
    if n == 0 {
        return Err(Error::InvalidShapeParams("n must be at least 1".into()));
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidShapeParams(format!(
            "noise_sigma must be nonnegative, got {noise_sigma}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = shape.ambient_dim();
    let mut coords = Vec::with_capacity(n * dim);
    for _ in 0..n {
        match *shape {
            Shape::Circle { radius } => {
                let t = rng.random::<f64>() * TAU;
                coords.extend([radius * t.cos(), radius * t.sin()]);
            }
            Shape::Sphere { radius } => {
                // Normalised Gaussian directions are uniform on the sphere.
                let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
                let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                coords.extend(v.iter().map(|x| radius * x / len));
            }
            Shape::Torus { major, minor } => {
                let u = rng.random::<f64>() * TAU;
                let v = rng.random::<f64>() * TAU;
                let ring = major + minor * v.cos();
                coords.extend([ring * u.cos(), ring * u.sin(), minor * v.sin()]);
            }
            Shape::GaussianBlob { dim, std } => {
                for _ in 0..dim {
                    coords.push(std * rng.sample::<f64, _>(StandardNormal));
                }
            }
        }
    }
    if noise_sigma > 0.0 {
        let noise = Normal::new(0.0, noise_sigma).expect("validated sigma");
        for c in coords.iter_mut() {
            *c += noise.sample(&mut rng);
        }
    }
    PointCloud::from_flat(coords, dim)
}
