//! Spectral cache file: versioned JSON, read-validated, atomically
//! rewritten (single writer, many readers).

use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

use super::{SpectralValue, SpectrumTable};
use crate::error::{Error, Result};
use crate::eval::{eval_theta_core, eval_theta_dx_core};
use num_complex::Complex64;

pub const SPECTRAL_CACHE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    schema_version: u32,
    tolerance: f64,
    entries: Vec<CacheEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    j: u32,
    q: f64,
    x: f64,
    res_theta: f64,
    res_dtheta: f64,
}

/// Load and validate a cache; any defect (parse failure, wrong schema,
/// non-contiguous indices, residuals that no longer check out) discards
/// the whole cache so the caller recomputes.
pub(super) fn load_validated(path: &Path, tolerance: f64) -> Option<Vec<SpectralValue>> {
    let text = fs::read_to_string(path).ok()?;
    let file: CacheFile = serde_json::from_str(&text).ok()?;
    if file.schema_version != SPECTRAL_CACHE_SCHEMA_VERSION {
        return None;
    }
    let mut out = Vec::with_capacity(file.entries.len());
    let mut prev_q = 0.0;
    for (i, e) in file.entries.iter().enumerate() {
        if e.j as usize != i + 1 || !(e.q > prev_q && e.q < 1.0) || !(e.x < 0.0) {
            return None;
        }
        prev_q = e.q;
        // trust nothing: re-evaluate both residuals at the cached point
        let qc = Complex64::new(e.q, 0.0);
        let xc = Complex64::new(e.x, 0.0);
        let f = eval_theta_core(qc, xc, 1e-15).ok()?.value.norm();
        let fx = eval_theta_dx_core(qc, xc, 1e-15).ok()?.value.norm();
        let slack = 10.0 * tolerance;
        if f > slack || fx > slack {
            return None;
        }
        out.push(SpectralValue {
            index: e.j,
            q_value: e.q,
            double_zero_x: e.x,
            residuals: (f, fx),
        });
    }
    Some(out)
}

/// Write the table by replacing the file atomically (temp + rename).
pub(super) fn store_atomic(path: &Path, table: &SpectrumTable) -> Result<()> {
    let file = CacheFile {
        schema_version: SPECTRAL_CACHE_SCHEMA_VERSION,
        tolerance: table.tolerance,
        entries: table
            .entries
            .iter()
            .map(|e| CacheEntry {
                j: e.index,
                q: e.q_value,
                x: e.double_zero_x,
                res_theta: e.residuals.0,
                res_dtheta: e.residuals.1,
            })
            .collect(),
    };
    let text = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::Cache(format!("serialize: {e}")))?;
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    fs::write(&tmp, text).map_err(|e| Error::Cache(format!("write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::Cache(format!("rename into {}: {e}", path.display()))
    })?;
    Ok(())
}
