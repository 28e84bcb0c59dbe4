use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct SkippedScene {
    pub title: String,
    pub scene_id: String,
    pub reason: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a serde_json::Value,
    inputs: &'a [InputDigest],
    outputs: Vec<String>,
    skipped: &'a [SkippedScene],
}

/// Tracks the files a run writes so a failed run can remove them, and
/// writes the run manifest at the end.
pub struct Run {
    pub out_dir: PathBuf,
    created_dir: bool,
    written: Vec<PathBuf>,
    pub inputs: Vec<InputDigest>,
    pub skipped: Vec<SkippedScene>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl Run {
    pub fn new(out_dir: &Path) -> Result<Self> {
        let created_dir = !out_dir.exists();
        fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
        Ok(Self {
            out_dir: out_dir.to_path_buf(),
            created_dir,
            written: Vec::new(),
            inputs: Vec::new(),
            skipped: Vec::new(),
        })
    }

    /// Records an input file and its digest.
    pub fn input(&mut self, path: &Path) -> Result<()> {
        let sha256 = sha256_file(path)?;
        self.inputs.push(InputDigest { path: path.display().to_string(), sha256 });
        Ok(())
    }

    /// Writes `name` under the output directory through `f`.
    pub fn write<F>(&mut self, name: &str, f: F) -> Result<PathBuf>
    where
        F: FnOnce(&mut dyn Write) -> Result<()>,
    {
        let path = self.out_dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        self.written.push(path.clone());
        let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        f(&mut w)?;
        w.flush()?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }

    /// Writes `manifest.json` listing config, input digests, outputs and
    /// skipped scenes.
    pub fn finish(mut self, command: &str, config: &serde_json::Value) -> Result<()> {
        let mut outputs: Vec<String> =
            self.written.iter().map(|p| p.strip_prefix(&self.out_dir).unwrap_or(p).display().to_string()).collect();
        outputs.sort();
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            inputs: &self.inputs,
            outputs,
            skipped: &self.skipped,
        };
        let value = serde_json::to_value(&manifest)?;
        self.write_json("manifest.json", &value)?;
        self.written.clear();
        Ok(())
    }

    /// Removes everything this run wrote.
    pub fn abort(self) {
        for p in self.written.iter().rev() {
            let _ = fs::remove_file(p);
        }
        let mut dirs: Vec<&Path> = self.written.iter().filter_map(|p| p.parent()).collect();
        dirs.sort();
        dirs.dedup();
        for d in dirs.into_iter().rev() {
            if d != self.out_dir {
                let _ = fs::remove_dir(d);
            }
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.out_dir);
        }
    }
}
