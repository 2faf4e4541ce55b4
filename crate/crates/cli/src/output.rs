use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use randfix_core::export::to_json_string;
use randfix_core::PicardReport;

use crate::error::CliError;

/// Output directory; every file is written whole.
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|source| CliError::Io {
            path: root.display().to_string(),
            source,
        })?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| CliError::Io {
                path: parent.display().to_string(),
                source,
            })?;
        }
        fs::write(&path, contents).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn write_json<S: Serialize + ?Sized>(&self, name: &str, value: &S) -> Result<(), CliError> {
        let text = to_json_string(value)
            .map_err(|e| CliError::Other(format!("serializing {name}: {e}")))?;
        self.write(name, &text)
    }

    /// `steps/omega_XXXXX.csv` for every report.
    pub fn write_steps<'a>(
        &self,
        reports: impl Iterator<Item = (u64, &'a PicardReport<f64>)>,
    ) -> Result<(), CliError> {
        for (index, r) in reports {
            self.write(&format!("steps/omega_{index:05}.csv"), &r.steps_csv())?;
        }
        Ok(())
    }
}
