//! Output paths. Without `--out`, files land in `$LOGFACTOR_OUT_DIR` (or the
//! working directory) under a per-command default name.

use logfactor::Error;
use serde::Serialize;
use std::fs::File;
use std::path::{Path, PathBuf};

pub const OUT_DIR_VAR: &str = "LOGFACTOR_OUT_DIR";

pub struct Output {
    path: PathBuf,
}

pub fn create(path: &Path) -> Result<File, Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

impl Output {
    pub fn resolve(out: Option<&str>, default_name: &str) -> Result<Self, Error> {
        let path = match out {
            Some(p) => PathBuf::from(p),
            None => {
                let dir = std::env::var_os(OUT_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
                dir.join(default_name)
            }
        };
        Ok(Output { path })
    }

    pub fn create(&self) -> Result<File, Error> {
        create(&self.path)
    }

    pub fn display(&self) -> String {
        self.path.display().to_string()
    }

    /// `<stem>_<suffix>` in the same directory.
    pub fn sibling(&self, suffix: &str) -> PathBuf {
        let stem = self.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        self.path.with_file_name(format!("{stem}_{suffix}"))
    }

    /// `<file>.json` holding the resolved command line and a result summary.
    pub fn write_sidecar<C: Serialize, S: Serialize>(&self, config: &C, summary: &S) -> Result<(), Error> {
        let mut name = self.path.file_name().unwrap_or_default().to_os_string();
        name.push(".json");
        let path = self.path.with_file_name(name);
        let doc = serde_json::json!({ "config": config, "summary": summary });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}
