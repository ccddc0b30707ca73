//! Corpus-level orchestration: HST1 input, per-epoch perforation curves and
//! their manifests.

mod hst;
mod run;
mod synth;

pub use hst::{
    decode_state_file, encode_state_file, read_state_file, write_state_file, StateTensor, MAGIC, VERSION,
};
pub use run::{
    curve_csv, curve_json, epoch_perforation, format_g17, percentile, perforation_curve, run_pipeline,
    sample_sentences, sentence_perforation, summarize, validate_curve, EpochSummary, PipelineConfig,
    RunManifest, RunOutput, TOOL, TOOL_VERSION,
};
pub use synth::{synthetic_corpus, CorpusPattern, CorpusSpec};
