use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;

use crate::error::{Error, Result};

use super::dataset::LabeledImageSet;

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

fn read_maybe_gz(path: &Path) -> Result<Vec<u8>> {
    let raw = fs::read(path)?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(raw.as_slice()).read_to_end(&mut out)?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

fn be_u32(bytes: &[u8], offset: usize, path: &Path) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::Truncated {
            path: path.to_path_buf(),
            expected: offset + 4,
            actual: bytes.len(),
        })
}

/// Parses an IDX3 image file: returns `(count, rows, cols, pixels)`.
pub fn parse_idx_images(bytes: &[u8], path: &Path) -> Result<(usize, usize, usize, Vec<u8>)> {
    let magic = be_u32(bytes, 0, path)?;
    if magic != IMAGES_MAGIC {
        return Err(Error::BadMagic {
            path: path.to_path_buf(),
            expected: IMAGES_MAGIC,
            found: magic,
        });
    }
    let count = be_u32(bytes, 4, path)? as usize;
    let rows = be_u32(bytes, 8, path)? as usize;
    let cols = be_u32(bytes, 12, path)? as usize;
    let expected = 16 + count * rows * cols;
    if bytes.len() < expected {
        return Err(Error::Truncated {
            path: path.to_path_buf(),
            expected,
            actual: bytes.len(),
        });
    }
    Ok((count, rows, cols, bytes[16..expected].to_vec()))
}

/// Parses an IDX1 label file.
pub fn parse_idx_labels(bytes: &[u8], path: &Path) -> Result<Vec<u8>> {
    let magic = be_u32(bytes, 0, path)?;
    if magic != LABELS_MAGIC {
        return Err(Error::BadMagic {
            path: path.to_path_buf(),
            expected: LABELS_MAGIC,
            found: magic,
        });
    }
    let count = be_u32(bytes, 4, path)? as usize;
    let expected = 8 + count;
    if bytes.len() < expected {
        return Err(Error::Truncated {
            path: path.to_path_buf(),
            expected,
            actual: bytes.len(),
        });
    }
    Ok(bytes[8..expected].to_vec())
}

/// Loads an image/label IDX pair; gzip-compressed files are accepted.
pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<LabeledImageSet> {
    let images_path = images_path.as_ref();
    let labels_path = labels_path.as_ref();
    let (count, rows, cols, pixels) = parse_idx_images(&read_maybe_gz(images_path)?, images_path)?;
    let labels = parse_idx_labels(&read_maybe_gz(labels_path)?, labels_path)?;
    if labels.len() != count {
        return Err(Error::CountMismatch {
            images: count,
            labels: labels.len(),
        });
    }
    LabeledImageSet::new(rows * cols, pixels, labels, images_path.display().to_string())
}

/// Writes a set as uncompressed IDX files with square `side x side` images.
pub fn write_idx(set: &LabeledImageSet, side: usize, images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<()> {
    if side * side != set.n_pixels() {
        return Err(Error::dims("image side", set.n_pixels(), side * side));
    }
    let mut f = fs::File::create(images_path)?;
    for word in [IMAGES_MAGIC, set.len() as u32, side as u32, side as u32] {
        f.write_all(&word.to_be_bytes())?;
    }
    f.write_all(set.images())?;
    let mut f = fs::File::create(labels_path)?;
    for word in [LABELS_MAGIC, set.len() as u32] {
        f.write_all(&word.to_be_bytes())?;
    }
    f.write_all(set.labels())?;
    Ok(())
}
