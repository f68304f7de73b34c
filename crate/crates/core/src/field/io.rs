use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use super::{Grid3, ScalarField};
use crate::{LabError, Result};

/// Writes little-endian `(re, im)` f64 pairs.
pub fn write_complex(path: &Path, values: &[C64]) -> Result<()> {
    let mut buf = Vec::with_capacity(values.len() * 16);
    for z in values {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    fs::File::create(path)?.write_all(&buf)?;
    Ok(())
}

pub fn read_complex(path: &Path) -> Result<Vec<C64>> {
    let mut buf = Vec::new();
    fs::File::open(path)?.read_to_end(&mut buf)?;
    if buf.len() % 16 != 0 {
        return Err(LabError::Invalid(format!(
            "{}: length not a multiple of 16",
            path.display()
        )));
    }
    Ok(buf
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            C64::new(re, im)
        })
        .collect())
}

fn sidecar_path(bin: &Path) -> PathBuf {
    bin.with_extension("json")
}

/// Binary block plus a JSON sidecar next to it (same stem, `.json`).
pub fn write_block(bin: &Path, values: &[C64], meta: Value) -> Result<()> {
    write_complex(bin, values)?;
    let text = serde_json::to_string_pretty(&meta).map_err(|e| LabError::Invalid(e.to_string()))?;
    fs::write(sidecar_path(bin), text + "\n")?;
    Ok(())
}

pub fn export_field(field: &ScalarField, bin: &Path, extra: Value) -> Result<()> {
    let g = field.grid();
    let meta = json!({
        "n": g.n(),
        "dx": g.dx(),
        "shape": [g.np(), g.np(), g.np()],
        "layout": "row-major, z fastest",
        "dtype": "complex f64 little-endian (re, im)",
        "extended": field.is_extended(),
        "extra": extra,
    });
    write_block(bin, field.values(), meta)
}

pub fn import_field(bin: &Path) -> Result<ScalarField> {
    let text = fs::read_to_string(sidecar_path(bin))?;
    let meta: Value = serde_json::from_str(&text).map_err(|e| LabError::Invalid(e.to_string()))?;
    let n = meta["n"]
        .as_u64()
        .ok_or_else(|| LabError::Invalid("sidecar missing n".into()))? as usize;
    let extended = meta["extended"].as_bool().unwrap_or(true);
    let grid: Arc<Grid3> = super::build_grid(n)?;
    ScalarField::from_nodal(&grid, read_complex(bin)?, extended)
}
