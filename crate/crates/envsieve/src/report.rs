//! Machine-readable run reports: a versioned JSON envelope that embeds the
//! exact invocation (command, parameters, seed, tool and cache versions),
//! plus the serialization conventions used everywhere: complex numbers as
//! [re, im] pairs, exact rationals as "num/den" strings, CSV with a header
//! row and LF line endings.

use crate::{arith, Rat, Result};
use rustfft::num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

/// Report envelope version.
pub const SCHEMA: &str = "sr-1";

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub tool: String,
    pub prime_cache: String,
}

/// Everything needed to reproduce a run; identical manifests (same
/// command, parameters, and seed) reproduce identical `data` bytes.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub versions: Versions,
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, parameters: &[(&str, String)], seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters: parameters
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            seed,
            versions: Versions {
                tool: env!("CARGO_PKG_VERSION").to_string(),
                prime_cache: String::from_utf8_lossy(arith::CACHE_MAGIC).into_owned(),
            },
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

/// The envelope every command prints.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub manifest: RunManifest,
    pub data: Value,
}

pub fn report(manifest: RunManifest, data: Value) -> Report {
    Report {
        schema: SCHEMA,
        manifest,
        data,
    }
}

/// Complex number as the two-element array [re, im].
pub fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Exact rational as the canonical "num/den" string.
pub fn rat_json(r: &Rat) -> Value {
    json!(format!("{}/{}", r.numer(), r.denom()))
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Comma-separated values with a header row and LF line endings.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = Vec::new();
    writeln!(
        out,
        "{}",
        header.iter().map(|h| csv_field(h)).collect::<Vec<_>>().join(",")
    )?;
    for row in rows {
        writeln!(
            out,
            "{}",
            row.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",")
        )?;
    }
    std::fs::write(path, out)?;
    Ok(())
}
