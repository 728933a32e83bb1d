use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::config::RunConfig;

/// Output envelope: reproducible `data` payload plus provenance. The
/// timestamp lives in its own field so reruns stay byte-comparable on
/// everything else.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'static str,
    timestamp: String,
    config: &'a RunConfig,
    data: T,
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn unix_timestamp() -> String {
    match std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH) {
        Ok(d) => d.as_secs().to_string(),
        Err(_) => "0".to_string(),
    }
}

/// Atomic write: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let tmp = path.with_extension("tmp");
    {
        let mut f =
            std::fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(
    config: &RunConfig,
    name: &str,
    data: T,
) -> anyhow::Result<PathBuf> {
    let env = Envelope {
        version: VERSION,
        timestamp: unix_timestamp(),
        config,
        data,
    };
    let mut bytes = serde_json::to_vec_pretty(&env)?;
    bytes.push(b'\n');
    let path = config.out.join(name);
    write_atomic(&path, &bytes)?;
    Ok(path)
}

pub fn write_text(config: &RunConfig, name: &str, text: &str) -> anyhow::Result<PathBuf> {
    let path = config.out.join(name);
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}
