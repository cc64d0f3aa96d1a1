//! CSV tables with a one-line JSON config echo, and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::LabError;

/// Per-module tolerances recorded in every manifest.
pub fn tolerances() -> serde_json::Value {
    json!({
        "oracle_normalization": 1e-10,
        "method_a_exact": 1e-10,
        "method_b_exact": 1e-10,
        "sampling_sigmas": 3.0,
        "fidelity_identity": 1e-12,
        "reflection_reduction": 1e-10,
        "translation_equivalence": 1e-12,
        "tensor_orthonormality": 1e-10,
        "rotation_covariance": 1e-10,
        "collective_variance_relative": 0.01,
        "fd_moment_defect": 1e-12,
    })
}

/// Formats a float with the shortest round-trip representation.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub struct Table {
    columns: Vec<&'static str>,
    body: String,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            body: String::new(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.body.push_str(&cells.join(","));
        self.body.push('\n');
    }

    pub fn len(&self) -> usize {
        self.body.lines().count()
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }

    pub fn render(&self, config_json: &str) -> String {
        let mut s = String::with_capacity(self.body.len() + config_json.len() + 64);
        writeln!(s, "# {config_json}").unwrap();
        writeln!(s, "{}", self.columns.join(",")).unwrap();
        s.push_str(&self.body);
        s
    }
}

pub struct OutputDir {
    pub dir: PathBuf,
    config_json: String,
    files: Vec<String>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> LabError + '_ {
    move |source| LabError::Io {
        path: path.display().to_string(),
        source,
    }
}

impl OutputDir {
    pub fn create(dir: &Path, config_json: String) -> Result<Self, LabError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config_json,
            files: Vec::new(),
        })
    }

    pub fn write_table(&mut self, name: &str, table: &Table) -> Result<PathBuf, LabError> {
        self.write_text(name, &table.render(&self.config_json))
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<PathBuf, LabError> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(io_err(&path))?;
        self.files.push(name.to_string());
        Ok(path)
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    /// Writes `manifest.json`; not part of the byte-identical data set
    /// because it records wall-clock time.
    pub fn write_manifest(
        &mut self,
        command: &str,
        workers: usize,
        seconds: f64,
    ) -> Result<PathBuf, LabError> {
        let config: serde_json::Value =
            serde_json::from_str(&self.config_json).expect("config echo is JSON");
        let manifest = json!({
            "package": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "workers": workers,
            "wall_clock_seconds": seconds,
            "tolerances": tolerances(),
            "files": self.files,
            "config": config,
        });
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        let path = self.dir.join("manifest.json");
        fs::write(&path, text).map_err(io_err(&path))?;
        Ok(path)
    }
}
