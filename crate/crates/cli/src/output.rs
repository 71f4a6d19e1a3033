use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use outage_core::Scenario;

use crate::params::{config_path_display, Settings};

/// `#` comment block naming the tool, the command and every parameter.
pub fn header(
    command: &str,
    settings: &Settings,
    config: &Option<PathBuf>,
    scenario: Option<&Scenario>,
    extra: &[(&str, String)],
) -> String {
    let mut out = format!(
        "# outage {}\n# command: {command}\n# config: {}\n",
        env!("CARGO_PKG_VERSION"),
        config_path_display(config)
    );
    for (key, value) in settings.describe(scenario).iter().chain(extra) {
        out.push_str(&format!("# {key} = {value}\n"));
    }
    out
}

/// Writes to `out` if set, else stdout.
pub fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()?;
            Ok(())
        }
    }
}
