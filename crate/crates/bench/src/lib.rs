//! Shared fixtures for the criterion benchmarks.

use perforate_core::geometry::{sample_shape, PointCloud, Shape};

pub const SEED: u64 = 20_240_501;

pub fn circle(n: usize) -> PointCloud {
    sample_shape(&Shape::Circle { radius: 1.0 }, n, 0.05, SEED).expect("valid circle")
}

pub fn torus(n: usize) -> PointCloud {
    sample_shape(&Shape::Torus { major: 2.0, minor: 0.5 }, n, 0.0, SEED).expect("valid torus")
}

pub fn blob(n: usize, dim: usize) -> PointCloud {
    sample_shape(&Shape::GaussianBlob { dim, std: 1.0 }, n, 0.0, SEED).expect("valid blob")
}
