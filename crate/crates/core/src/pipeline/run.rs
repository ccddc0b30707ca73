use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hst::{read_state_file, StateTensor};
use crate::complex::{MaxEpsilon, DEFAULT_SIMPLEX_BUDGET};
use crate::error::{Error, Result};
use crate::geometry::{pairwise_distances, Metric};
use crate::perforation::diagram_perforation;
use crate::persistence::{rips_persistence, DEFAULT_THRESHOLD};

pub const TOOL: &str = "perforate";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Every knob that influences a perforation curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub metric: Metric,
    /// Highest homology dimension counted.
    pub max_dim: usize,
    pub max_epsilon: MaxEpsilon,
    pub threshold: f64,
    pub sample_size: usize,
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide. Does not affect results.
    pub jobs: usize,
    pub simplex_budget: usize,
    /// Sentences with fewer tokens are skipped.
    pub min_tokens: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            metric: Metric::Euclidean,
            max_dim: 2,
            max_epsilon: MaxEpsilon::Diameter,
            threshold: DEFAULT_THRESHOLD,
            sample_size: 2000,
            seed: 0,
            jobs: 0,
            simplex_budget: DEFAULT_SIMPLEX_BUDGET,
            min_tokens: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    #[serde(flatten)]
    pub config: PipelineConfig,
    pub layer: String,
    pub input: String,
    pub sentences: usize,
    pub epochs: usize,
    pub skipped_short: usize,
    pub sampling: String,
    pub interval: String,
}

impl RunManifest {
    pub fn new(config: &PipelineConfig, layer: &str, input: &str) -> Self {
        Self {
            tool: TOOL.into(),
            tool_version: TOOL_VERSION.into(),
            config: config.clone(),
            layer: layer.into(),
            input: input.into(),
            sentences: 0,
            epochs: 0,
            skipped_short: 0,
            sampling: "seeded shuffle without replacement, same sentences at every epoch".into(),
            interval: "p01 and p99, linear interpolation between order statistics".into(),
        }
    }

    /// Keys a curve manifest must carry.
    pub fn required_keys() -> Vec<String> {
        let probe = serde_json::to_value(RunManifest::new(&PipelineConfig::default(), "", ""))
            .expect("manifest serializes");
        probe.as_object().expect("manifest is an object").keys().cloned().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochSummary {
    pub epoch: usize,
    pub mean: f64,
    pub p01: f64,
    pub p99: f64,
    pub n: usize,
}

/// Indices of usable sentences in sampling order, and how many were too short.
pub fn sample_sentences(tensors: &[StateTensor], config: &PipelineConfig) -> (Vec<usize>, usize) {
    let mut usable: Vec<usize> = (0..tensors.len())
        .filter(|&i| tensors[i].n_tokens() >= config.min_tokens)
        .collect();
    let skipped = tensors.len() - usable.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    usable.shuffle(&mut rng);
    usable.truncate(config.sample_size);
    (usable, skipped)
}

pub fn sentence_perforation(tensor: &StateTensor, epoch: usize, config: &PipelineConfig) -> Result<f64> {
    let cloud = tensor.slice_epoch(epoch)?;
    let dist = pairwise_distances(&cloud, config.metric)?;
    let diagram = rips_persistence(&dist, config.max_dim + 1, config.max_epsilon, config.simplex_budget)?;
    Ok(diagram_perforation(&diagram, config.threshold).phi)
}

/// Linear interpolation at rank `(n - 1) p` of an ascending slice.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Mean and central 98% interval; order of `values` does not matter.
pub fn summarize(epoch: usize, mut values: Vec<f64>) -> Result<EpochSummary> {
    if values.is_empty() {
        return Err(Error::EmptySample(epoch));
    }
    values.sort_by(f64::total_cmp);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(EpochSummary {
        epoch,
        mean,
        p01: percentile(&values, 0.01),
        p99: percentile(&values, 0.99),
        n: values.len(),
    })
}

fn epoch_values(tensors: &[StateTensor], sample: &[usize], epoch: usize, config: &PipelineConfig) -> Result<Vec<f64>> {
    sample
        .par_iter()
        .map(|&i| sentence_perforation(&tensors[i], epoch, config))
        .collect()
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {jobs} workers: {e}")))
}

pub fn epoch_perforation(tensors: &[StateTensor], epoch: usize, config: &PipelineConfig) -> Result<EpochSummary> {
    let (sample, _) = sample_sentences(tensors, config);
    let values = pool(config.jobs)?.install(|| epoch_values(tensors, &sample, epoch, config))?;
    summarize(epoch, values)
}

/// One summary per epoch of the longest tensor, plus the run manifest.
pub fn perforation_curve(
    tensors: &[StateTensor],
    config: &PipelineConfig,
    layer: &str,
    input: &str,
) -> Result<(Vec<EpochSummary>, RunManifest)> {
    let (sample, skipped) = sample_sentences(tensors, config);
    let epochs = tensors.iter().map(StateTensor::n_epochs).max().unwrap_or(0);
    let workers = pool(config.jobs)?;
    let mut summaries = Vec::with_capacity(epochs);
    for epoch in 0..epochs {
        let values = workers.install(|| epoch_values(tensors, &sample, epoch, config))?;
        summaries.push(summarize(epoch, values)?);
    }
    let mut manifest = RunManifest::new(config, layer, input);
    manifest.sentences = sample.len();
    manifest.epochs = epochs;
    manifest.skipped_short = skipped;
    Ok((summaries, manifest))
}

/// `%.17g`: 17 significant digits, trailing zeros dropped.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

pub fn curve_csv(summaries: &[EpochSummary]) -> String {
    let mut out = String::from("epoch,mean,p01,p99,n\n");
    for s in summaries {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.epoch,
            format_g17(s.mean),
            format_g17(s.p01),
            format_g17(s.p99),
            s.n
        ));
    }
    out
}

pub fn curve_json(summaries: &[EpochSummary], manifest: &RunManifest) -> serde_json::Value {
    serde_json::json!({ "manifest": manifest, "epochs": summaries })
}

/// Checks that a curve document carries a complete manifest and well-formed epochs.
pub fn validate_curve(doc: &serde_json::Value) -> Result<()> {
    let manifest = doc
        .get("manifest")
        .and_then(|m| m.as_object())
        .ok_or_else(|| Error::InvalidArgument("curve has no manifest object".into()))?;
    for key in RunManifest::required_keys() {
        if !manifest.contains_key(&key) {
            return Err(Error::InvalidArgument(format!("manifest is missing \"{key}\"")));
        }
    }
    serde_json::from_value::<RunManifest>(serde_json::Value::Object(manifest.clone()))
        .map_err(|e| Error::InvalidArgument(format!("malformed manifest: {e}")))?;
    let epochs = doc
        .get("epochs")
        .cloned()
        .ok_or_else(|| Error::InvalidArgument("curve has no epochs".into()))?;
    serde_json::from_value::<Vec<EpochSummary>>(epochs)
        .map_err(|e| Error::InvalidArgument(format!("malformed epochs: {e}")))?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summaries: Vec<EpochSummary>,
    pub manifest: RunManifest,
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
}

/// Reads an HST1 file and writes `<layer>.curve.csv` and `<layer>.curve.json`
/// into `out_dir`.
pub fn run_pipeline(input: &Path, layer: &str, config: &PipelineConfig, out_dir: &Path) -> Result<RunOutput> {
    let tensors = read_state_file(input)?;
    let name = input.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let (summaries, manifest) = perforation_curve(&tensors, config, layer, &name)?;
    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(format!("{layer}.curve.csv"));
    let json_path = out_dir.join(format!("{layer}.curve.json"));
    std::fs::write(&csv_path, curve_csv(&summaries))?;
    let json = serde_json::to_string_pretty(&curve_json(&summaries, &manifest))
        .map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(&json_path, json + "\n")?;
    Ok(RunOutput {
        summaries,
        manifest,
        csv_path,
        json_path,
    })
}
