//! Versioned JSON report envelope. Report bytes are fully deterministic
//! (timestamps live only in campaign manifests).

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub schema: u32,
    pub kind: String,
    pub seed: Option<u64>,
    pub payload: T,
}

/// Serialize a report envelope to pretty JSON and write it.
pub fn save_report<T: Serialize>(
    path: &Path,
    kind: &str,
    seed: Option<u64>,
    payload: &T,
) -> Result<String> {
    let report = Report {
        schema: SCHEMA_VERSION,
        kind: kind.to_string(),
        seed,
        payload,
    };
    let json = serde_json::to_string_pretty(&report)?;
    std::fs::write(path, &json)?;
    Ok(json)
}

/// Content hash used by campaign manifests.
pub fn report_sha256(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
