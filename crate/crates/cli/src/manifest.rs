use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

/// Everything needed to regenerate a command's output files.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seed: Option<u64>,
    pub parameters: Value,
    pub apparatus: Value,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        parameters: impl Serialize,
        apparatus: impl Serialize,
        seed: Option<u64>,
    ) -> Self {
        Self {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            parameters: serde_json::to_value(parameters).expect("plain data"),
            apparatus: serde_json::to_value(apparatus).expect("plain data"),
            outputs: Vec::new(),
        }
    }

    pub fn output(&mut self, dir: &Path, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        dir.join(name)
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<PathBuf> {
        let path = dir.join(format!("{}.manifest.json", self.command));
        let mut text = serde_json::to_string_pretty(self).expect("plain data");
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}
