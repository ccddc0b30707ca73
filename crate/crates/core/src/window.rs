//! Sliding-window (delay) embeddings of single hidden-state coordinates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{MaxEpsilon, DEFAULT_SIMPLEX_BUDGET};
use crate::error::{Error, Result};
use crate::geometry::{pairwise_distances, Metric, PointCloud};
use crate::perforation::diagram_perforation;
use crate::persistence::{rips_persistence, DEFAULT_THRESHOLD};

/// Values of one state coordinate over the tokens of a sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSeries {
    values: Vec<f64>,
    pub dimension: usize,
    pub sentence_id: Option<String>,
}

impl ScalarSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("a series needs at least one value".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite value at step {i}")));
        }
        Ok(Self {
            values,
            dimension: 0,
            sentence_id: None,
        })
    }

    pub fn with_source(mut self, dimension: usize, sentence_id: impl Into<String>) -> Self {
        self.dimension = dimension;
        self.sentence_id = Some(sentence_id.into());
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Zero mean, unit sample deviation; a constant series becomes all zeros.
    pub fn z_normalized(&self) -> ScalarSeries {
        if self.values.iter().all(|&v| v == self.values[0]) {
            return ScalarSeries { values: vec![0.0; self.values.len()], ..self.clone() };
        }
        let n = self.values.len() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        let var = self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        let values = self
            .values
            .iter()
            .map(|v| (v - mean) / sd)
            .collect();
        ScalarSeries { values, ..self.clone() }
    }
}

/// Points `(f(t), f(t + tau), ..., f(t + (d - 1) tau))` in order of `t`.
pub fn sliding_window_embed(series: &ScalarSeries, d: usize, tau: usize) -> Result<PointCloud> {
    if d == 0 || tau == 0 {
        return Err(Error::InvalidArgument("window dimension and delay must be at least 1".into()));
    }
    let len = series.len();
    let span = (d - 1) * tau;
    if len < span + 1 {
        return Err(Error::SeriesTooShort { len, d, tau });
    }
    let f = series.values();
    let mut coords = Vec::with_capacity((len - span) * d);
    for t in 0..len - span {
        coords.extend((0..d).map(|k| f[t + k * tau]));
    }
    PointCloud::from_flat(coords, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowParams {
    pub d: usize,
    pub tau: usize,
    pub threshold: f64,
    /// Highest homology dimension counted.
    pub max_dim: usize,
    pub z_normalize: bool,
}

impl Default for WindowParams {
    fn default() -> Self {
        Self {
            d: 3,
            tau: 1,
            threshold: DEFAULT_THRESHOLD,
            max_dim: 2,
            z_normalize: false,
        }
    }
}

/// Perforation of one embedded series under the default filtration
/// (euclidean, cap at the diameter).
pub fn series_perforation(series: &ScalarSeries, params: &WindowParams) -> Result<f64> {
    let series = if params.z_normalize {
        series.z_normalized()
    } else {
        series.clone()
    };
    let cloud = sliding_window_embed(&series, params.d, params.tau)?;
    let dist = pairwise_distances(&cloud, Metric::Euclidean)?;
    let diagram = rips_persistence(&dist, params.max_dim + 1, MaxEpsilon::Diameter, DEFAULT_SIMPLEX_BUDGET)?;
    Ok(diagram_perforation(&diagram, params.threshold).phi)
}

/// One perforation per state coordinate of a `tokens x dim` matrix; `None`
/// where the sentence is too short for the window.
pub fn per_dimension_perforation(states: &PointCloud, params: &WindowParams) -> Result<Vec<Option<f64>>> {
    let tokens = states.len();
    (0..states.dim())
        .into_par_iter()
        .map(|i| {
            if tokens == 0 || tokens < (params.d.max(1) - 1) * params.tau + 1 {
                return Ok(None);
            }
            let series = ScalarSeries::new(states.points().map(|p| p[i]).collect())?;
            series_perforation(&series, params).map(Some)
        })
        .collect()
}

/// Mean over the non-null entries.
pub fn mean_perforation(values: &[Option<f64>]) -> Option<f64> {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64)
}
