//! Service configuration: an optional TOML file, then `KWICDESK_*`
//! environment variables, then command-line flags.

use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context};
use kwicdesk_reconcile::WikidataConfig;
use serde::Deserialize;

pub const ENV_BIND: &str = "KWICDESK_BIND";
pub const ENV_STORAGE_ROOT: &str = "KWICDESK_STORAGE_ROOT";
pub const ENV_TOKEN_KEY: &str = "KWICDESK_TOKEN_KEY";
pub const ENV_TOKEN_LIFETIME: &str = "KWICDESK_TOKEN_LIFETIME";
pub const ENV_WIKIDATA_URL: &str = "KWICDESK_WIKIDATA_URL";

pub const MIN_TOKEN_KEY_BYTES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub bind: String,
    pub storage_root: PathBuf,
    /// HS256 signing key for session tokens.
    pub token_key: Option<String>,
    /// Session token lifetime in seconds.
    pub token_lifetime: u64,
    pub wikidata: WikidataConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            bind: "127.0.0.1:8080".into(),
            storage_root: PathBuf::from("kwicdesk-data"),
            token_key: None,
            token_lifetime: kwicdesk_store::DEFAULT_TOKEN_LIFETIME.as_secs(),
            wikidata: WikidataConfig::default(),
        }
    }
}

impl Config {
    /// Reads `path` if given and applies the process environment.
    pub fn load(path: Option<&Path>) -> anyhow::Result<Config> {
        let mut cfg = match path {
            Some(p) => {
                let raw = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                toml::from_str(&raw).with_context(|| format!("parsing {}", p.display()))?
            }
            None => Config::default(),
        };
        cfg.apply_env(|k| std::env::var(k).ok())?;
        Ok(cfg)
    }

    pub fn apply_env(&mut self, get: impl Fn(&str) -> Option<String>) -> anyhow::Result<()> {
        if let Some(v) = get(ENV_BIND) {
            self.bind = v;
        }
        if let Some(v) = get(ENV_STORAGE_ROOT) {
            self.storage_root = v.into();
        }
        if let Some(v) = get(ENV_TOKEN_KEY) {
            self.token_key = Some(v);
        }
        if let Some(v) = get(ENV_TOKEN_LIFETIME) {
            self.token_lifetime = v
                .parse()
                .with_context(|| format!("{ENV_TOKEN_LIFETIME} must be a number of seconds"))?;
        }
        if let Some(v) = get(ENV_WIKIDATA_URL) {
            self.wikidata.base_url = v;
        }
        Ok(())
    }

    pub fn token_lifetime(&self) -> Duration {
        Duration::from_secs(self.token_lifetime)
    }

    pub fn token_key(&self) -> anyhow::Result<&[u8]> {
        match &self.token_key {
            Some(k) if k.len() >= MIN_TOKEN_KEY_BYTES => Ok(k.as_bytes()),
            Some(_) => bail!("token key must be at least {MIN_TOKEN_KEY_BYTES} bytes"),
            None => bail!("no token signing key: set {ENV_TOKEN_KEY} or `token_key` in the config file"),
        }
    }

    pub fn users_file(&self) -> PathBuf {
        self.storage_root.join("users.json")
    }
}
