//! The three model families: explicit, implicit (kernel) and data
//! re-uploading, plus the feature encodings and ansatz builders used by the
//! experiments.

mod ansatz;
mod encoding;
mod explicit;
mod implicit;
mod parity;
mod reuploading;

pub use ansatz::{hardware_efficient_ansatz, heisenberg_ansatz, layer_schedule};
pub use encoding::{AngleFn, FeatureEncoding};
pub use explicit::ExplicitModel;
pub use implicit::ImplicitModel;
pub use parity::{parity_model, parity_params};
pub use reuploading::{ParamModel, ReuploadingModel};
