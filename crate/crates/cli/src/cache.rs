use std::fs;
use std::path::PathBuf;

use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::commands::Instance;

/// Content address of a result: command, instance, options and tool version.
pub fn key(command: &str, inst: &Instance, options: &str, verify: bool) -> String {
    let mut h = Sha256::new();
    let text = format!(
        "gale {}\n{command}\nk={}\nr={:?}\ntheta={:?}\noptions={options}\nverify={verify}\n",
        env!("CARGO_PKG_VERSION"),
        inst.r.k(),
        inst.r.upper(),
        inst.theta,
    );
    h.update(text.as_bytes());
    hex::encode(h.finalize())
}

/// Directory of cached JSON results.
pub struct Store {
    dir: PathBuf,
}

impl Store {
    /// `GALE_CACHE_DIR`, else `$XDG_CACHE_HOME/gale`, else `$HOME/.cache/gale`.
    pub fn from_env() -> Option<Self> {
        let nonempty = |v: &str| std::env::var_os(v).filter(|s| !s.is_empty()).map(PathBuf::from);
        let dir = nonempty("GALE_CACHE_DIR")
            .or_else(|| nonempty("XDG_CACHE_HOME").map(|d| d.join("gale")))
            .or_else(|| nonempty("HOME").map(|d| d.join(".cache").join("gale")))?;
        Some(Store { dir })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<Value> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put(&self, key: &str, value: &Value) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!("{key}.{}.tmp", std::process::id()));
        fs::write(&tmp, serde_json::to_string(value).expect("serializable"))?;
        fs::rename(tmp, self.path(key))
    }
}
