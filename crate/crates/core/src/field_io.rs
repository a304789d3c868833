//! Field persistence: `morse-field/1` JSON schema, written atomically with
//! full-precision numbers so identical inputs give byte-identical files.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::field::{ParamGrid, ScalarField2D};
use crate::solver::SolverConfig;
use crate::{Error, Result, Scalar};

pub const FIELD_SCHEMA: &str = "morse-field/1";

/// Bumped whenever the numerics change in a way that alters sampled
/// values, so stale field files are not mistaken for up-to-date ones.
pub const SOLVER_REVISION: u32 = 1;

/// Short digest of the solver configuration, recorded as provenance in
/// field files.
pub fn solver_digest<T: Scalar>(config: &SolverConfig<T>) -> String {
    let canonical = format!(
        "rev={SOLVER_REVISION};energy_tolerance={:e};tail_tolerance={:e};max_refinements={};initial_points={}",
        config.energy_tolerance.to_f64().unwrap_or(f64::NAN),
        config.tail_tolerance.to_f64().unwrap_or(f64::NAN),
        config.max_refinements,
        config.initial_points,
    );
    let hash = Sha256::digest(canonical.as_bytes());
    hex_prefix(&hash, 16)
}

fn hex_prefix(bytes: &[u8], n: usize) -> String {
    bytes.iter().take(n).map(|b| format!("{b:02x}")).collect()
}

/// 17 significant digits: enough to reproduce any f64 exactly on reload.
fn full(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serialize a field to the `morse-field/1` layout. Field order and number
/// formatting are fixed so output is deterministic.
pub fn field_to_json(field: &ScalarField2D<f64>) -> String {
    let g = &field.grid;
    let mut out = String::with_capacity(32 * field.values.len() + 512);
    out.push_str("{\n");
    out.push_str(&format!("  \"schema\": \"{FIELD_SCHEMA}\",\n"));
    out.push_str(&format!(
        "  \"grid\": {{\"a_min\": {}, \"a_max\": {}, \"n_a\": {}, \"C_min\": {}, \"C_max\": {}, \"n_C\": {}}},\n",
        full(g.a_min),
        full(g.a_max),
        g.n_a,
        full(g.c_min),
        full(g.c_max),
        g.n_c
    ));
    out.push_str(&format!("  \"s\": {},\n", full(field.s)));
    out.push_str(&format!("  \"r0\": {},\n", full(field.r0)));
    out.push_str("  \"convention\": {\"hbar\": 1, \"mass\": 1},\n");
    out.push_str(&format!("  \"solver_digest\": \"{}\",\n", field.solver_digest));
    out.push_str("  \"values\": [");
    for (k, v) in field.values.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        if v.is_nan() {
            out.push_str("null");
        } else {
            out.push_str(&full(*v));
        }
    }
    out.push_str("],\n");
    out.push_str("  \"mask\": [");
    for (k, m) in field.mask.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        out.push_str(if *m { "true" } else { "false" });
    }
    out.push_str("]\n}\n");
    out
}

#[derive(Deserialize)]
struct FileGrid {
    a_min: f64,
    a_max: f64,
    n_a: usize,
    #[serde(rename = "C_min")]
    c_min: f64,
    #[serde(rename = "C_max")]
    c_max: f64,
    #[serde(rename = "n_C")]
    n_c: usize,
}

#[derive(Deserialize)]
struct FileConvention {
    hbar: f64,
    mass: f64,
}

#[derive(Deserialize)]
struct FileDoc {
    schema: String,
    grid: FileGrid,
    s: f64,
    r0: f64,
    convention: FileConvention,
    solver_digest: String,
    values: Vec<Option<f64>>,
    mask: Vec<bool>,
}

/// Write atomically: temp file in the same directory, then rename.
pub fn save_field(field: &ScalarField2D<f64>, path: &Path) -> Result<()> {
    let json = field_to_json(field);
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(json.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_field(path: &Path) -> Result<ScalarField2D<f64>> {
    let text = fs::read_to_string(path)?;
    parse_field(&text)
}

/// Load and require the stored provenance digest to match `expected`.
pub fn load_field_strict(path: &Path, expected_digest: &str) -> Result<ScalarField2D<f64>> {
    let field = load_field(path)?;
    if field.solver_digest != expected_digest {
        return Err(Error::Format(format!(
            "solver digest mismatch: file has {}, expected {}",
            field.solver_digest, expected_digest
        )));
    }
    Ok(field)
}

pub fn parse_field(text: &str) -> Result<ScalarField2D<f64>> {
    let doc: FileDoc =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("malformed field file: {e}")))?;
    if doc.schema != FIELD_SCHEMA {
        return Err(Error::Format(format!(
            "unsupported schema {:?}, expected {FIELD_SCHEMA:?}",
            doc.schema
        )));
    }
    if doc.convention.hbar != 1.0 || doc.convention.mass != 1.0 {
        return Err(Error::Format("unexpected unit convention".into()));
    }
    let expected = doc.grid.n_a * doc.grid.n_c;
    if doc.values.len() != expected || doc.mask.len() != expected {
        return Err(Error::Format(format!(
            "array length mismatch: grid says {expected}, got {} values / {} mask",
            doc.values.len(),
            doc.mask.len()
        )));
    }
    let grid = ParamGrid {
        a_min: doc.grid.a_min,
        a_max: doc.grid.a_max,
        n_a: doc.grid.n_a,
        c_min: doc.grid.c_min,
        c_max: doc.grid.c_max,
        n_c: doc.grid.n_c,
    };
    grid.validate()?;
    Ok(ScalarField2D {
        grid,
        s: doc.s,
        r0: doc.r0,
        values: doc.values.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect(),
        mask: doc.mask,
    solver_digest: doc.solver_digest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField2D;

    fn sample() -> ScalarField2D<f64> {
        let grid = ParamGrid {
            a_min: 0.8,
            a_max: 2.0,
            n_a: 3,
            c_min: 12.0,
            c_max: 26.0,
            n_c: 2,
        };
        let mut f = ScalarField2D::from_fn(grid, 1.1, |a, c| a * 0.1 + c * 0.01);
        f.solver_digest = solver_digest(&SolverConfig::<f64>::default());
        let idx = f.index(1, 2);
        f.values[idx] = f64::NAN;
        f.mask[idx] = false;
        f
    }

    #[test]
    fn round_trip_is_exact() {
        let field = sample();
        let dir = std::env::temp_dir().join("morse-lsm-io-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("field.json");
        save_field(&field, &path).unwrap();
        let loaded = load_field(&path).unwrap();
        assert_eq!(loaded.grid, field.grid);
        assert_eq!(loaded.s, field.s);
        assert_eq!(loaded.mask, field.mask);
        for (a, b) in loaded.values.iter().zip(&field.values) {
            assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()));
        }
        // serialization is deterministic
        assert_eq!(field_to_json(&loaded), field_to_json(&field));
    }

    #[test]
    fn truncated_file_is_rejected() {
        let json = field_to_json(&sample());
        let truncated = &json[..json.len() / 2];
        assert!(matches!(parse_field(truncated), Err(Error::Format(_))));
    }

    #[test]
    fn schema_and_length_validation() {
        let json = field_to_json(&sample()).replace("morse-field/1", "morse-field/99");
        assert!(matches!(parse_field(&json), Err(Error::Format(_))));
        let json = field_to_json(&sample()).replace("\"n_a\": 3", "\"n_a\": 4");
        assert!(matches!(parse_field(&json), Err(Error::Format(_))));
    }

    #[test]
    fn strict_digest_check() {
        let field = sample();
        let dir = std::env::temp_dir().join("morse-lsm-io-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("strict.json");
        save_field(&field, &path).unwrap();
        assert!(load_field_strict(&path, &field.solver_digest).is_ok());
        assert!(matches!(
            load_field_strict(&path, "deadbeef"),
            Err(Error::Format(_))
        ));
    }
}
