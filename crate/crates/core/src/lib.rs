//! Topological complexity of point clouds built from neural-network hidden
//! states.
//!
//! The crate computes Vietoris-Rips persistent homology of a cloud, reduces
//! the resulting barcode to *perforation* (Betti numbers weighted by the
//! logarithms of consecutive primes), sketches clouds as mapper graphs, and
//! turns single hidden-state coordinates into clouds through sliding-window
//! delay embeddings. The [`pipeline`] module ties these together over a
//! corpus of per-sentence state tensors stored in the HST1 container.
//!
//! ```
//! use perforate_core::prelude::*;
//!
//! let cloud = sample_shape(&Shape::Circle { radius: 1.0 }, 40, 0.0, 7).unwrap();
//! let dist = pairwise_distances(&cloud, Metric::Euclidean).unwrap();
//! let filt = build_vr_filtration(&dist, 2, MaxEpsilon::Diameter).unwrap();
//! let diagram = compute_persistence(&filt).unwrap();
//! let betti = persistent_betti(&diagram, DEFAULT_THRESHOLD);
//! assert_eq!(betti.trimmed().counts(), &[1]);
//! assert_eq!(perforation(&betti).phi, 2f64.ln());
//! ```

pub mod complex;
pub mod error;
pub mod geometry;
pub mod mapper;
pub mod perforation;
pub mod persistence;
pub mod pipeline;
pub mod union_find;
pub mod window;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::complex::{build_vr_filtration, Filtration, MaxEpsilon, Simplex};
    pub use crate::error::{Error, Result};
    pub use crate::geometry::{
        collapse_blobs, pairwise_distances, pca_project, sample_shape, DistanceMatrix, Metric,
        PointCloud, Shape,
    };
    pub use crate::mapper::{graph_stats, mapper, GraphStats, Lens, Linkage, MapperGraph};
    pub use crate::perforation::{decode_perforation, perforation, PerforationValue};
    pub use crate::persistence::{
        betti_at, compute_persistence, persistent_betti, Bar, BettiSequence, PersistenceDiagram,
        DEFAULT_THRESHOLD,
    };
    pub use crate::pipeline::{
        read_state_file, run_pipeline, write_state_file, EpochSummary, PipelineConfig, RunManifest, StateTensor,
    };
    pub use crate::window::{per_dimension_perforation, sliding_window_embed, ScalarSeries, WindowParams};
}
