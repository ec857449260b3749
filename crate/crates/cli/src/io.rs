use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Settings shared by every subcommand.
pub struct Ctx {
    pub seed: u64,
    pub jobs: Option<usize>,
    pub no_meta: bool,
    pub output: Option<PathBuf>,
    pub command: String,
    pub started: Instant,
}

impl Ctx {
    /// Writes `value` as pretty JSON to the output file or stdout. Unless
    /// `--no-meta` is given, objects gain a `meta` entry with run details.
    pub fn emit(&self, value: impl Serialize) -> Result<()> {
        let mut value = serde_json::to_value(value)?;
        if let (false, Value::Object(map)) = (self.no_meta, &mut value) {
            let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            map.insert(
                "meta".into(),
                json!({
                    "version": VERSION,
                    "command": self.command,
                    "seed": self.seed,
                    "jobs": self.jobs,
                    "timestamp": timestamp,
                    "elapsed_ms": self.started.elapsed().as_millis() as u64,
                }),
            );
        }
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        self.write_text(&text)
    }

    pub fn write_text(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

/// Reads a JSON file into `T`. A `meta` entry is ignored, and if the object
/// has one of `nested` as a key, that entry is read instead, so reports of
/// one subcommand can feed another.
pub fn read_json<T: DeserializeOwned>(path: &Path, nested: &[&str]) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Value::Object(map) = &mut value {
        map.remove("meta");
        if let Some(inner) = nested.iter().find_map(|k| map.get(*k)) {
            value = inner.clone();
        }
    }
    serde_json::from_value(value).with_context(|| format!("decoding {}", path.display()))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
