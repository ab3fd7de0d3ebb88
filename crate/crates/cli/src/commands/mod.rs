pub mod bench;
pub mod generate;
pub mod import;
pub mod layout;
pub mod verify;

use std::path::{Path, PathBuf};

/// Missing or contradictory flags that the parser alone cannot catch; mapped
/// to exit code 2 like any other usage problem.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub(crate) fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

/// `g.hbag` with suffix `remap.csv` becomes `g.hbag.remap.csv`.
pub(crate) fn sidecar(base: &Path, suffix: &str) -> PathBuf {
    let mut name = base.as_os_str().to_owned();
    name.push(".");
    name.push(suffix);
    PathBuf::from(name)
}
