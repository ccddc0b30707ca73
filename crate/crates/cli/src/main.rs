mod cloud;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use perforate_core::complex::{MaxEpsilon, DEFAULT_SIMPLEX_BUDGET};
use perforate_core::geometry::{pairwise_distances, sample_shape, Metric, PointCloud, Shape};
use perforate_core::mapper::{graph_stats, mapper, Lens, Linkage};
use perforate_core::perforation::{decode_perforation, diagram_perforation, DEFAULT_DECODE_TOLERANCE};
use perforate_core::persistence::{rips_persistence, BettiSequence, DEFAULT_THRESHOLD};
use perforate_core::pipeline::{
    read_state_file, run_pipeline, synthetic_corpus, validate_curve, write_state_file, CorpusPattern, CorpusSpec,
    PipelineConfig, StateTensor, MAGIC, TOOL, TOOL_VERSION,
};
use perforate_core::window::{mean_perforation, per_dimension_perforation, WindowParams};

use cloud::{read_cloud, write_cloud, write_text};

#[derive(Parser)]
#[command(name = "perforate", version, about = "Topological complexity of point clouds and hidden-state corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write synthetic fixtures.
    #[command(subcommand)]
    Gen(Gen),
    /// Persistence barcode of one point cloud.
    Persist(PersistCmd),
    /// Perforation curve of an HST1 corpus.
    Perforation(PerforationCmd),
    /// Mapper graph of a point cloud or one HST1 slice.
    Mapper(MapperCmd),
    /// Per-coordinate sliding-window perforation of one HST1 slice.
    Window(WindowCmd),
    /// Betti sequence encoded by a perforation value.
    Decode(DecodeCmd),
    /// Structural check of an HST1 file, or of a curve JSON with --curve.
    Validate(ValidateCmd),
}

#[derive(Subcommand)]
enum Gen {
    /// Sample a shape into a CSV point cloud.
    Shape(ShapeCmd),
    /// Generate an HST1 corpus.
    Corpus(CorpusCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeKind {
    Circle,
    Sphere,
    Torus,
    Blob,
}

#[derive(Args)]
struct ShapeCmd {
    #[arg(long, value_enum)]
    kind: ShapeKind,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Circle or sphere radius.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 2.0)]
    major: f64,
    #[arg(long, default_value_t = 0.5)]
    minor: f64,
    /// Blob dimension.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Blob standard deviation.
    #[arg(long, default_value_t = 1.0)]
    std: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CorpusCmd {
    #[arg(long, default_value = "blob-to-circle")]
    pattern: CorpusPattern,
    #[arg(long, default_value_t = CorpusSpec::default().sentences)]
    sentences: usize,
    #[arg(long, default_value_t = CorpusSpec::default().tokens)]
    tokens: usize,
    #[arg(long, default_value_t = CorpusSpec::default().state_dim)]
    state_dim: usize,
    #[arg(long, default_value_t = CorpusSpec::default().epochs)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Median radius of blob points.
    #[arg(long, default_value_t = CorpusSpec::default().blob_scale)]
    blob_scale: f64,
    /// Standard deviation of the log-radius of blob points.
    #[arg(long, default_value_t = CorpusSpec::default().blob_spread)]
    blob_spread: f64,
    #[arg(long, default_value_t = CorpusSpec::default().circle_noise)]
    circle_noise: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FiltrationArgs {
    #[arg(long, default_value = "euclidean")]
    metric: Metric,
    /// Highest homology dimension.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..))]
    max_dim: u8,
    /// `diameter` or a positive number.
    #[arg(long, default_value = "diameter")]
    max_eps: MaxEpsilon,
    /// Minimum bar length as a fraction of the maximum scale.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Largest number of simplices to build.
    #[arg(long, default_value_t = DEFAULT_SIMPLEX_BUDGET)]
    budget: usize,
}

impl FiltrationArgs {
    fn manifest(&self) -> Value {
        json!({
            "metric": self.metric,
            "max_dim": self.max_dim,
            "max_epsilon": self.max_eps,
            "threshold": self.threshold,
            "simplex_budget": self.budget,
        })
    }
}

#[derive(Args)]
struct PersistCmd {
    /// CSV point cloud.
    input: PathBuf,
    #[command(flatten)]
    filtration: FiltrationArgs,
    /// Output JSON; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PerforationCmd {
    input: PathBuf,
    /// Name used for the output files.
    #[arg(long, default_value = "hidden")]
    layer: String,
    #[command(flatten)]
    filtration: FiltrationArgs,
    /// Sentences sampled per epoch.
    #[arg(long, default_value_t = PipelineConfig::default().sample_size)]
    sample: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Shorter sentences are skipped.
    #[arg(long, default_value_t = PipelineConfig::default().min_tokens)]
    min_tokens: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SliceArgs {
    /// Sentence id; the first sentence if absent.
    #[arg(long)]
    sentence: Option<String>,
    #[arg(long, default_value_t = 0)]
    epoch: usize,
}

#[derive(Args)]
struct MapperCmd {
    /// CSV point cloud or HST1 file.
    input: PathBuf,
    #[command(flatten)]
    slice: SliceArgs,
    /// `pca:K` or `coord:I`.
    #[arg(long, default_value = "pca:1")]
    lens: Lens,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    resolution: u32,
    #[arg(long, default_value_t = 0.3)]
    overlap: f64,
    /// `auto` or a positive distance.
    #[arg(long, default_value = "auto")]
    linkage: Linkage,
    /// Largest nerve simplex dimension kept.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..))]
    output_dim: u8,
    /// Output directory for mapper.json and mapper.edges.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct WindowCmd {
    input: PathBuf,
    #[command(flatten)]
    slice: SliceArgs,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    d: u32,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    tau: u32,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..))]
    max_dim: u8,
    #[arg(long)]
    z_normalize: bool,
    /// Output directory for window.csv and window.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct DecodeCmd {
    phi: f64,
    #[arg(long, default_value_t = DEFAULT_DECODE_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args)]
struct ValidateCmd {
    input: PathBuf,
    /// Treat the input as a curve JSON.
    #[arg(long)]
    curve: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen(Gen::Shape(cmd)) => gen_shape(cmd),
        Command::Gen(Gen::Corpus(cmd)) => gen_corpus(cmd),
        Command::Persist(cmd) => persist(cmd),
        Command::Perforation(cmd) => perforation(cmd),
        Command::Mapper(cmd) => mapper_cmd(cmd),
        Command::Window(cmd) => window(cmd),
        Command::Decode(cmd) => decode(cmd),
        Command::Validate(cmd) => validate(cmd),
    }
}

fn manifest(command: &str, input: &Path, params: Value) -> Value {
    let mut m = json!({
        "tool": TOOL,
        "tool_version": TOOL_VERSION,
        "command": command,
        "input": input.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
    });
    if let (Some(m), Value::Object(params)) = (m.as_object_mut(), params) {
        m.extend(params);
    }
    m
}

fn write_json(path: Option<&Path>, doc: &Value) -> Result<()> {
    write_text(path, &(serde_json::to_string_pretty(doc)? + "\n"))
}

fn gen_shape(cmd: ShapeCmd) -> Result<()> {
    let shape = match cmd.kind {
        ShapeKind::Circle => Shape::Circle { radius: cmd.radius },
        ShapeKind::Sphere => Shape::Sphere { radius: cmd.radius },
        ShapeKind::Torus => Shape::Torus { major: cmd.major, minor: cmd.minor },
        ShapeKind::Blob => Shape::GaussianBlob { dim: cmd.dim, std: cmd.std },
    };
    let cloud = sample_shape(&shape, cmd.n, cmd.noise, cmd.seed)?;
    write_cloud(&cmd.out, &cloud)
}

fn gen_corpus(cmd: CorpusCmd) -> Result<()> {
    let spec = CorpusSpec {
        pattern: cmd.pattern,
        sentences: cmd.sentences,
        tokens: cmd.tokens,
        state_dim: cmd.state_dim,
        epochs: cmd.epochs,
        seed: cmd.seed,
        blob_scale: cmd.blob_scale,
        blob_spread: cmd.blob_spread,
        circle_noise: cmd.circle_noise,
    };
    write_state_file(&cmd.out, &synthetic_corpus(&spec)?)?;
    Ok(())
}

fn persist(cmd: PersistCmd) -> Result<()> {
    let f = &cmd.filtration;
    let cloud = read_cloud(&cmd.input)?;
    let dist = pairwise_distances(&cloud, f.metric)?;
    let diagram = rips_persistence(&dist, f.max_dim as usize + 1, f.max_eps, f.budget)?;
    let value = diagram_perforation(&diagram, f.threshold);
    let mut params = f.manifest();
    params["n_points"] = json!(cloud.len());
    params["max_epsilon_value"] = json!(diagram.max_epsilon);
    let doc = json!({
        "manifest": manifest("persist", &cmd.input, params),
        "bars": diagram.bars_json(),
        "betti": value.betti.0,
        "perforation": value.phi,
    });
    write_json(cmd.out.as_deref(), &doc)
}

fn perforation(cmd: PerforationCmd) -> Result<()> {
    let f = &cmd.filtration;
    let config = PipelineConfig {
        metric: f.metric,
        max_dim: f.max_dim as usize,
        max_epsilon: f.max_eps,
        threshold: f.threshold,
        sample_size: cmd.sample,
        seed: cmd.seed,
        jobs: cmd.jobs,
        simplex_budget: f.budget,
        min_tokens: cmd.min_tokens,
    };
    let out = run_pipeline(&cmd.input, &cmd.layer, &config, &cmd.out)?;
    println!("{}", out.csv_path.display());
    println!("{}", out.json_path.display());
    Ok(())
}

fn is_state_file(path: &Path) -> Result<bool> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(bytes.starts_with(MAGIC))
}

fn select_slice(path: &Path, slice: &SliceArgs) -> Result<(PointCloud, String)> {
    let tensors = read_state_file(path)?;
    let tensor: &StateTensor = match &slice.sentence {
        Some(id) => tensors
            .iter()
            .find(|t| &t.sentence_id == id)
            .ok_or_else(|| anyhow!("no sentence {id:?} in {}", path.display()))?,
        None => tensors
            .first()
            .ok_or_else(|| anyhow!("{} holds no sentences", path.display()))?,
    };
    Ok((tensor.slice_epoch(slice.epoch)?, tensor.sentence_id.clone()))
}

fn mapper_cmd(cmd: MapperCmd) -> Result<()> {
    let (cloud, source) = if is_state_file(&cmd.input)? {
        let (cloud, id) = select_slice(&cmd.input, &cmd.slice)?;
        (cloud, json!({ "sentence": id, "epoch": cmd.slice.epoch }))
    } else {
        (read_cloud(&cmd.input)?, Value::Null)
    };
    let graph = mapper(
        &cloud,
        cmd.lens,
        cmd.resolution as usize,
        cmd.overlap,
        cmd.linkage,
        cmd.output_dim as usize,
    )?;
    let stats = graph_stats(&graph);
    let params = json!({
        "lens": cmd.lens.to_string(),
        "resolution": cmd.resolution,
        "overlap": cmd.overlap,
        "linkage": cmd.linkage.to_string(),
        "output_dim": cmd.output_dim,
        "slice": source,
        "n_points": cloud.len(),
        "components": stats.components,
        "cycle_rank": stats.cycle_rank,
    });
    let mut doc = graph.to_json();
    doc["manifest"] = manifest("mapper", &cmd.input, params);
    std::fs::create_dir_all(&cmd.out)?;
    write_json(Some(&cmd.out.join("mapper.json")), &doc)?;
    write_text(Some(&cmd.out.join("mapper.edges")), &graph.edge_list())
}

fn window(cmd: WindowCmd) -> Result<()> {
    let (states, id) = select_slice(&cmd.input, &cmd.slice)?;
    let params = WindowParams {
        d: cmd.d as usize,
        tau: cmd.tau as usize,
        threshold: cmd.threshold,
        max_dim: cmd.max_dim as usize,
        z_normalize: cmd.z_normalize,
    };
    let values = per_dimension_perforation(&states, &params)?;
    let mut csv = String::from("dimension,perforation\n");
    for (i, v) in values.iter().enumerate() {
        let cell = v.map(perforate_core::pipeline::format_g17).unwrap_or_default();
        csv.push_str(&format!("{i},{cell}\n"));
    }
    let mut m = serde_json::to_value(params)?;
    m["sentence"] = json!(id);
    m["epoch"] = json!(cmd.slice.epoch);
    m["metric"] = json!(Metric::Euclidean);
    m["max_epsilon"] = json!(MaxEpsilon::Diameter);
    let doc = json!({
        "manifest": manifest("window", &cmd.input, m),
        "perforation": values,
        "mean": mean_perforation(&values),
    });
    std::fs::create_dir_all(&cmd.out)?;
    write_text(Some(&cmd.out.join("window.csv")), &csv)?;
    write_json(Some(&cmd.out.join("window.json")), &doc)
}

fn decode(cmd: DecodeCmd) -> Result<()> {
    let betti = decode_perforation(cmd.phi, cmd.tolerance)?;
    println!("{}", betti_line(&betti));
    Ok(())
}

/// `H1=2 H2=1`; an empty sequence prints as `H1=0`.
fn betti_line(betti: &BettiSequence) -> String {
    if betti.0.is_empty() {
        "H1=0".into()
    } else {
        betti.to_string()
    }
}

fn validate(cmd: ValidateCmd) -> Result<()> {
    if cmd.curve {
        let text = std::fs::read_to_string(&cmd.input).with_context(|| format!("cannot read {}", cmd.input.display()))?;
        let doc: Value = serde_json::from_str(&text).context("curve is not JSON")?;
        validate_curve(&doc)?;
        println!("ok: curve with complete manifest");
        return Ok(());
    }
    let tensors = read_state_file(&cmd.input)?;
    let epochs = tensors.iter().map(StateTensor::n_epochs).max().unwrap_or(0);
    println!("ok: {} sentences, up to {epochs} epochs", tensors.len());
    Ok(())
}
