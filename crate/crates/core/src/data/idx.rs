//! IDX image-file ingestion (the fashion-MNIST container format), with
//! transparent gzip decompression for `.gz` paths.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;

use crate::error::{Error, Result};

const IMAGE_MAGIC: u32 = 0x0000_0803;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageSet {
    pub rows: usize,
    pub cols: usize,
    /// Row-major pixel blocks, rows * cols bytes each.
    pub images: Vec<Vec<u8>>,
}

impl ImageSet {
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Pixels of one image as floats in [0, 255].
    pub fn as_floats(&self, index: usize) -> Vec<f64> {
        self.images[index].iter().map(|&b| b as f64).collect()
    }
}

fn read_u32(bytes: &[u8], offset: usize) -> Result<u32> {
    let slice = bytes.get(offset..offset + 4).ok_or(Error::IdxParse {
        offset,
        reason: "file truncated inside a header field".into(),
    })?;
    Ok(u32::from_be_bytes(slice.try_into().unwrap()))
}

/// Parse an in-memory IDX image buffer.
pub fn parse_idx(bytes: &[u8]) -> Result<ImageSet> {
    let magic = read_u32(bytes, 0)?;
    if magic != IMAGE_MAGIC {
        return Err(Error::IdxParse {
            offset: 0,
            reason: format!("bad magic 0x{magic:08x}, expected 0x{IMAGE_MAGIC:08x}"),
        });
    }
    let count = read_u32(bytes, 4)? as usize;
    let rows = read_u32(bytes, 8)? as usize;
    let cols = read_u32(bytes, 12)? as usize;
    let pixels = rows * cols;
    let need = 16 + count * pixels;
    if bytes.len() < need {
        return Err(Error::IdxParse {
            offset: bytes.len(),
            reason: format!("payload ends early: need {need} bytes, have {}", bytes.len()),
        });
    }
    let images = (0..count)
        .map(|i| bytes[16 + i * pixels..16 + (i + 1) * pixels].to_vec())
        .collect();
    Ok(ImageSet { rows, cols, images })
}

/// Load an IDX image file; paths ending in `.gz` are decompressed first.
pub fn load_idx<P: AsRef<Path>>(path: P) -> Result<ImageSet> {
    let path = path.as_ref();
    let mut raw = Vec::new();
    let mut file = File::open(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        GzDecoder::new(file).read_to_end(&mut raw)?;
    } else {
        file.read_to_end(&mut raw)?;
    }
    parse_idx(&raw)
}

/// Serialize an ImageSet back into IDX bytes (test fixtures, round-trips).
pub fn to_idx_bytes(set: &ImageSet) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + set.len() * set.rows * set.cols);
    out.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
    out.extend_from_slice(&(set.len() as u32).to_be_bytes());
    out.extend_from_slice(&(set.rows as u32).to_be_bytes());
    out.extend_from_slice(&(set.cols as u32).to_be_bytes());
    for img in &set.images {
        out.extend_from_slice(img);
    }
    out
}
