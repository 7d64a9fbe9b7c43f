use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use flate2::read::GzDecoder;

use super::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

const MNIST_CLASSES: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdxHeader {
    pub magic: u32,
    pub dims: Vec<usize>,
}

impl IdxHeader {
    fn payload_len(&self) -> usize {
        self.dims.iter().product()
    }
}

fn read_all(path: &Path) -> Result<Vec<u8>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut buf = Vec::new();
    let gz = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz"));
    if gz {
        GzDecoder::new(BufReader::new(file))
            .read_to_end(&mut buf)
            .map_err(|e| Error::Format {
                path: path.into(),
                detail: format!("gzip stream: {e}"),
            })?;
    } else {
        BufReader::new(file)
            .read_to_end(&mut buf)
            .map_err(|e| Error::io(path, e))?;
    }
    Ok(buf)
}

/// Parses the big-endian header and checks the payload length exactly.
fn parse(path: &Path, bytes: &[u8], magic: u32, n_dims: usize) -> Result<(IdxHeader, usize)> {
    let fmt = |detail: String| Error::Format {
        path: path.into(),
        detail,
    };
    let header_len = 4 + 4 * n_dims;
    if bytes.len() < header_len {
        return Err(fmt(format!(
            "truncated header: expected {header_len} bytes, found {}",
            bytes.len()
        )));
    }
    let word = |i: usize| u32::from_be_bytes(bytes[4 * i..4 * i + 4].try_into().unwrap());
    let observed = word(0);
    if observed != magic {
        return Err(fmt(format!(
            "bad magic 0x{observed:08x} ({observed}), expected 0x{magic:08x} ({magic})"
        )));
    }
    let dims: Vec<usize> = (1..=n_dims).map(|i| word(i) as usize).collect();
    if dims.contains(&0) {
        return Err(fmt(format!("zero dimension in {dims:?}")));
    }
    let header = IdxHeader { magic, dims };
    let expected = header.payload_len();
    let actual = bytes.len() - header_len;
    if actual != expected {
        let what = if actual < expected {
            "truncated payload"
        } else {
            "trailing bytes after payload"
        };
        return Err(fmt(format!("{what}: expected {expected} bytes, found {actual}")));
    }
    Ok((header, header_len))
}

/// Reads an image file; returns the header and raw pixel bytes.
pub fn read_idx_images(path: &Path) -> Result<(IdxHeader, Vec<u8>)> {
    let bytes = read_all(path)?;
    let (header, off) = parse(path, &bytes, IDX_IMAGES_MAGIC, 3)?;
    Ok((header, bytes[off..].to_vec()))
}

/// Reads a label file; returns the header and one byte per label.
pub fn read_idx_labels(path: &Path) -> Result<(IdxHeader, Vec<u8>)> {
    let bytes = read_all(path)?;
    let (header, off) = parse(path, &bytes, IDX_LABELS_MAGIC, 1)?;
    let labels = bytes[off..].to_vec();
    if let Some(pos) = labels.iter().position(|&l| l as usize >= MNIST_CLASSES) {
        return Err(Error::Format {
            path: path.into(),
            detail: format!("label {} at index {pos} is outside 0..=9", labels[pos]),
        });
    }
    Ok((header, labels))
}

/// Loads an MNIST image/label pair, scaling pixels by 1/255.
///
/// With `limit = Some(k)` only the first `k` records in file order are kept.
pub fn load_mnist(images_path: &Path, labels_path: &Path, limit: Option<usize>) -> Result<Dataset> {
    let (ih, pixels) = read_idx_images(images_path)?;
    let (lh, labels) = read_idx_labels(labels_path)?;
    let (n, rows, cols) = (ih.dims[0], ih.dims[1], ih.dims[2]);
    if n != lh.dims[0] {
        return Err(Error::Consistency(format!(
            "{} has {n} images but {} has {} labels",
            images_path.display(),
            labels_path.display(),
            lh.dims[0]
        )));
    }
    let take = match limit {
        Some(0) => return Err(Error::Usage("limit must be >= 1".into())),
        Some(k) => k.min(n),
        None => n,
    };
    let n_in = rows * cols;
    let data: Vec<f64> = pixels[..take * n_in].iter().map(|&b| b as f64 / 255.0).collect();
    let classes = labels[..take].iter().map(|&l| l as usize).collect();
    let name = match limit {
        Some(_) => format!("mnist-{take}"),
        None => "mnist".to_string(),
    };
    Dataset::new(name, Matrix::from_vec(take, n_in, data), classes, MNIST_CLASSES)
}
