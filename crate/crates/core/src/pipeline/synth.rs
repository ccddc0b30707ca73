//! Synthetic hidden-state corpora with a known topological trajectory.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use super::hst::StateTensor;
use crate::error::{Error, Result};
use crate::geometry::{sample_shape, PointCloud, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusPattern {
    /// Each sentence pushes a blob radially out onto a noisy circle.
    BlobToCircle,
    /// Each sentence morphs between two independent blobs.
    BlobToBlob,
    /// The same noisy circle at every epoch.
    Constant,
}

impl std::str::FromStr for CorpusPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "blob-to-circle" => Ok(Self::BlobToCircle),
            "blob-to-blob" => Ok(Self::BlobToBlob),
            "constant" => Ok(Self::Constant),
            other => Err(Error::InvalidArgument(format!("unknown corpus pattern {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub pattern: CorpusPattern,
    pub sentences: usize,
    pub tokens: usize,
    /// At least 2; the shape lives in the first two coordinates.
    pub state_dim: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Median distance of a blob point from the centre.
    pub blob_scale: f64,
    /// Standard deviation of the log-radius of blob points.
    pub blob_spread: f64,
    pub circle_noise: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            pattern: CorpusPattern::BlobToCircle,
            sentences: 40,
            tokens: 40,
            state_dim: 2,
            epochs: 20,
            seed: 0,
            blob_scale: 0.5,
            blob_spread: 1.25,
            circle_noise: 0.05,
        }
    }
}

fn pad(cloud: &PointCloud, dim: usize) -> Result<PointCloud> {
    let mut coords = Vec::with_capacity(cloud.len() * dim);
    for p in cloud.points() {
        coords.extend_from_slice(p);
        coords.extend(std::iter::repeat_n(0.0, dim - p.len()));
    }
    PointCloud::from_flat(coords, dim)
}

fn lerp(a: &PointCloud, b: &PointCloud, t: f64) -> Result<PointCloud> {
    let coords = a.as_flat().iter().zip(b.as_flat()).map(|(x, y)| (1.0 - t) * x + t * y).collect();
    PointCloud::from_flat(coords, a.dim())
}

/// Planar blob with uniform directions and log-normal radii. The heavy tail
/// keeps chance gaps small next to the diameter, so blobs rarely show loops.
fn sample_blob(n: usize, scale: f64, spread: f64, seed: u64) -> Result<PointCloud> {
    let radii = LogNormal::new(scale.ln(), spread).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(n * 2);
    for _ in 0..n {
        let angle = rng.random::<f64>() * std::f64::consts::TAU;
        let r = radii.sample(&mut rng);
        coords.extend([r * angle.cos(), r * angle.sin()]);
    }
    PointCloud::from_flat(coords, 2)
}

/// Each point moved along its ray to a radius drawn from `N(1, noise^2)`.
fn onto_circle(cloud: &PointCloud, noise: f64, seed: u64) -> Result<PointCloud> {
    let radii = Normal::new(1.0, noise).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(cloud.len() * 2);
    for p in cloud.points() {
        let angle = p[1].atan2(p[0]);
        let r: f64 = radii.sample(&mut rng);
        coords.extend([r * angle.cos(), r * angle.sin()]);
    }
    PointCloud::from_flat(coords, 2)
}

pub fn synthetic_corpus(spec: &CorpusSpec) -> Result<Vec<StateTensor>> {
    if spec.state_dim < 2 || spec.epochs == 0 {
        return Err(Error::InvalidArgument("corpus needs state_dim >= 2 and at least one epoch".into()));
    }
    let blob = |seed| sample_blob(spec.tokens, spec.blob_scale, spec.blob_spread, seed);
    let circle = Shape::Circle { radius: 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.sentences);
    for s in 0..spec.sentences {
        let (a, b) = (rng.random::<u64>(), rng.random::<u64>());
        let (start, end) = match spec.pattern {
            CorpusPattern::BlobToCircle => {
                let start = blob(a)?;
                let end = onto_circle(&start, spec.circle_noise, b)?;
                (start, end)
            }
            CorpusPattern::BlobToBlob => (blob(a)?, blob(b)?),
            CorpusPattern::Constant => {
                let c = sample_shape(&circle, spec.tokens, spec.circle_noise, b)?;
                (c.clone(), c)
            }
        };
        let clouds = (0..spec.epochs)
            .map(|e| {
                let t = if spec.epochs == 1 { 1.0 } else { e as f64 / (spec.epochs - 1) as f64 };
                pad(&lerp(&start, &end, t)?, spec.state_dim)
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(StateTensor::from_epochs(format!("s{s:05}"), &clouds)?);
    }
    Ok(out)
}
