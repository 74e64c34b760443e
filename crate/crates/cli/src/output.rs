//! Collects a run's outputs and writes them once at the end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::manifest::RunManifest;
use crate::Failure;

pub struct Outputs {
    dir: Option<PathBuf>,
    manifest: RunManifest,
    files: Vec<(String, String)>,
}

impl Outputs {
    pub fn new(dir: Option<PathBuf>, manifest: RunManifest) -> Self {
        Outputs { dir, manifest, files: Vec::new() }
    }

    pub fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    /// With an output directory every file is written atomically, followed
    /// by `manifest.json`; otherwise the contents go to stdout.
    pub fn finish(mut self) -> Result<(), Failure> {
        self.manifest.outputs = self.files.iter().map(|(n, _)| n.clone()).collect();
        let manifest = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes") + "\n";
        match &self.dir {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
                for (name, contents) in &self.files {
                    write_atomic(&dir.join(name), contents)?;
                }
                write_atomic(&dir.join("manifest.json"), &manifest)
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                let many = self.files.len() > 1;
                for (name, contents) in &self.files {
                    if many {
                        writeln!(stdout, "==> {name} <==").map_err(|e| io_failure(Path::new("stdout"), e))?;
                    }
                    stdout.write_all(contents.as_bytes()).map_err(|e| io_failure(Path::new("stdout"), e))?;
                }
                Ok(())
            }
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("cannot write {}: {e}", path.display()))
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(|e| io_failure(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_failure(path, e))
}
