//! Exact statevector laboratory for comparing quantum model families:
//! explicit variational models, implicit kernel models, and data re-uploading
//! models, together with constructive mappings between them, training
//! machinery, a learning-separation experiment, and an image-regression
//! data pipeline.

pub mod cli;
pub mod data;
pub mod error;
pub mod learning;
pub mod mappings;
pub mod models;
pub mod seplab;
pub mod sim;

pub use error::{Error, Result};
