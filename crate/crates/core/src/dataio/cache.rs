//! Versioned binary cache for encoded datasets, for fast re-runs.
//!
//! Layout (little endian): 8-byte magic `NADCACHE`, u32 version, u64 rows,
//! u64 cols, `rows * cols` f64 feature values, `rows` label bytes, u32 name
//! count, then length-prefixed UTF-8 feature names.

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{DataError, EncodedDataset};
use crate::Matrix;

const MAGIC: &[u8; 8] = b"NADCACHE";
const VERSION: u32 = 1;

pub fn save_dataset_cache(dataset: &EncodedDataset, path: &Path) -> Result<(), DataError> {
    let file = std::fs::File::create(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut w = std::io::BufWriter::new(file);
    let io_err = |e: std::io::Error| DataError::Io {
        path: path.display().to_string(),
        source: e,
    };
    w.write_all(MAGIC).map_err(io_err)?;
    w.write_u32::<LittleEndian>(VERSION).map_err(io_err)?;
    w.write_u64::<LittleEndian>(dataset.n_rows() as u64)
        .map_err(io_err)?;
    w.write_u64::<LittleEndian>(dataset.n_features() as u64)
        .map_err(io_err)?;
    for &v in dataset.features.as_slice() {
        w.write_f64::<LittleEndian>(v).map_err(io_err)?;
    }
    for &l in &dataset.labels {
        w.write_u8(l as u8).map_err(io_err)?;
    }
    w.write_u32::<LittleEndian>(dataset.feature_names.len() as u32)
        .map_err(io_err)?;
    for name in &dataset.feature_names {
        let bytes = name.as_bytes();
        w.write_u32::<LittleEndian>(bytes.len() as u32)
            .map_err(io_err)?;
        w.write_all(bytes).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn load_dataset_cache(path: &Path) -> Result<EncodedDataset, DataError> {
    let file = std::fs::File::open(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut r = std::io::BufReader::new(file);
    let io_err = |e: std::io::Error| DataError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MAGIC {
        return Err(DataError::Cache("bad magic; not a dataset cache".into()));
    }
    let version = r.read_u32::<LittleEndian>().map_err(io_err)?;
    if version != VERSION {
        return Err(DataError::Cache(format!(
            "unsupported cache version {version} (supported: {VERSION})"
        )));
    }
    let rows = r.read_u64::<LittleEndian>().map_err(io_err)? as usize;
    let cols = r.read_u64::<LittleEndian>().map_err(io_err)? as usize;
    let mut data = vec![0.0f64; rows * cols];
    for v in &mut data {
        *v = r.read_f64::<LittleEndian>().map_err(io_err)?;
    }
    let mut labels = Vec::with_capacity(rows);
    for _ in 0..rows {
        labels.push(r.read_u8().map_err(io_err)? != 0);
    }
    let n_names = r.read_u32::<LittleEndian>().map_err(io_err)? as usize;
    if n_names != cols {
        return Err(DataError::Cache(format!(
            "cache lists {n_names} feature names for {cols} columns"
        )));
    }
    let mut feature_names = Vec::with_capacity(n_names);
    for _ in 0..n_names {
        let len = r.read_u32::<LittleEndian>().map_err(io_err)? as usize;
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf).map_err(io_err)?;
        feature_names.push(
            String::from_utf8(buf).map_err(|_| DataError::Cache("non-UTF-8 name".into()))?,
        );
    }
    let features = Matrix::from_vec(rows, cols, data)
        .map_err(|e| DataError::Cache(format!("inconsistent dimensions: {e}")))?;
    Ok(EncodedDataset {
        features,
        labels,
        feature_names,
    })
}
