//! PADEMB1 embedding files: the magic `PADEMB1\0`, little-endian `u32` row
//! count N and dimension D, then N·D little-endian `f32` values, row-major.

use std::path::Path;

use padbench_core::fid::EmbeddingSet;

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

pub const MAGIC: &[u8; 8] = b"PADEMB1\0";
const HEADER_LEN: usize = 16;

pub fn decode_embeddings(bytes: &[u8], path: &Path) -> Result<EmbeddingSet> {
    let truncated = |message: String| Error::TruncatedFile { path: path.to_path_buf(), message };
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        if bytes.len() < MAGIC.len() && MAGIC.starts_with(bytes) {
            return Err(truncated(format!("{} bytes, header needs {HEADER_LEN}", bytes.len())));
        }
        return Err(Error::BadMagic { path: path.to_path_buf() });
    }
    if bytes.len() < HEADER_LEN {
        return Err(truncated(format!("{} bytes, header needs {HEADER_LEN}", bytes.len())));
    }
    let n = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let d = u32::from_le_bytes(bytes[12..16].try_into().expect("4 bytes")) as usize;
    if n == 0 || d == 0 {
        return Err(Error::DimensionZero { path: path.to_path_buf() });
    }
    let expected = n
        .checked_mul(d)
        .and_then(|v| v.checked_mul(4))
        .ok_or_else(|| truncated(format!("header claims {n}x{d} values")))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() < expected {
        return Err(truncated(format!("header claims {n}x{d} values, {} complete rows present", body.len() / (4 * d))));
    }
    if body.len() > expected {
        return Err(Error::parse(path, format!("{} trailing bytes after {n}x{d} values", body.len() - expected)));
    }
    let data: Vec<f32> = body.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
    EmbeddingSet::new(n, d, data).map_err(|e| Error::parse(path, e))
}

pub fn read_embeddings(path: &Path) -> Result<EmbeddingSet> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_embeddings(&bytes, path)
}

pub fn encode_embeddings(set: &EmbeddingSet) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * set.data().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(set.count() as u32).to_le_bytes());
    out.extend_from_slice(&(set.dim() as u32).to_le_bytes());
    for v in set.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn write_embeddings(set: &EmbeddingSet, path: &Path) -> Result<()> {
    let bytes = encode_embeddings(set);
    write_atomic(path, |w| w.write_all(&bytes))
}
