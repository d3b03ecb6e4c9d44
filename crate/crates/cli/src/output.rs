use std::fs;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use qlwave_core::experiment::{ExperimentConfig, SCHEMA_VERSION};

/// Envelope shared by every JSON artifact.
#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub config: &'a ExperimentConfig,
    pub result: T,
}

impl<'a, T: Serialize> Report<'a, T> {
    pub fn new(command: &'static str, config: &'a ExperimentConfig, result: T) -> Self {
        Self { schema_version: SCHEMA_VERSION, command, config, result }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Header row, `,` separator, LF line endings.
pub fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))
}
