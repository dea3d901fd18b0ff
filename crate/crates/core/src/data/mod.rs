//! Data plumbing: IDX image ingestion, PCA reduction, component
//! normalization, quantum label generation, and dataset splitting.

mod idx;
mod pca;
mod pipeline;

pub use idx::{load_idx, parse_idx, to_idx_bytes, ImageSet};
pub use pca::{fit_pca, Normalizer, PcaModel};
pub use pipeline::{
    dataset_from_csv, dataset_to_csv, generate_labels, make_splits, synthetic_inputs,
    LabelRecord, SplitIndices,
};
