//! How requests reach the remote service: live over HTTP, or replayed from
//! recorded fixture files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};

use crate::error::ReconcileError;

/// A GET request relative to the configured base URL.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub path: String,
    pub query: BTreeMap<String, String>,
}

impl Request {
    pub fn new(path: impl Into<String>) -> Self {
        Request {
            path: path.into(),
            query: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<String>) -> Self {
        self.query.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Response {
    pub status: u16,
    pub body: String,
}

#[async_trait]
pub trait Transport: Send + Sync {
    async fn get(&self, request: &Request) -> Result<Response, ReconcileError>;
}

/// Live transport.
pub struct HttpTransport {
    client: reqwest::Client,
    base_url: String,
}

impl HttpTransport {
    pub fn new(base_url: &str) -> Result<Self, ReconcileError> {
        let client = reqwest::Client::builder()
            .user_agent(concat!("kwicdesk/", env!("CARGO_PKG_VERSION")))
            .timeout(Duration::from_secs(15))
            .build()
            .map_err(|e| ReconcileError::Unavailable(e.to_string()))?;
        Ok(HttpTransport {
            client,
            base_url: base_url.trim_end_matches('/').to_string(),
        })
    }
}

#[async_trait]
impl Transport for HttpTransport {
    async fn get(&self, request: &Request) -> Result<Response, ReconcileError> {
        let url = format!("{}{}", self.base_url, request.path);
        tracing::debug!(%url, "wikidata request");
        let resp = self
            .client
            .get(&url)
            .query(&request.query)
            .send()
            .await
            .map_err(|e| ReconcileError::Unavailable(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp.text().await.map_err(|e| ReconcileError::Unavailable(e.to_string()))?;
        Ok(Response { status, body })
    }
}

/// One recorded exchange, stored as a JSON file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub request: Request,
    pub response: Response,
}

/// Answers requests from recorded fixtures. A request with no matching
/// fixture fails as if the service were unreachable.
#[derive(Debug, Default)]
pub struct ReplayTransport {
    fixtures: Vec<Fixture>,
    calls: AtomicUsize,
    misses: Mutex<Vec<Request>>,
}

impl ReplayTransport {
    pub fn new(fixtures: Vec<Fixture>) -> Self {
        ReplayTransport {
            fixtures,
            ..Default::default()
        }
    }

    /// Loads every `*.json` file in `dir`.
    pub fn from_dir(dir: &Path) -> std::io::Result<Self> {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut fixtures = Vec::new();
        for p in paths {
            let raw = std::fs::read_to_string(&p)?;
            let f: Fixture = serde_json::from_str(&raw).map_err(|e| {
                std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{}: {e}", p.display()))
            })?;
            fixtures.push(f);
        }
        Ok(Self::new(fixtures))
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    /// Requests that matched no fixture.
    pub fn misses(&self) -> Vec<Request> {
        self.misses.lock().unwrap().clone()
    }
}

#[async_trait]
impl Transport for ReplayTransport {
    async fn get(&self, request: &Request) -> Result<Response, ReconcileError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        match self.fixtures.iter().find(|f| &f.request == request) {
            Some(f) => Ok(f.response.clone()),
            None => {
                self.misses.lock().unwrap().push(request.clone());
                Err(ReconcileError::Unavailable(format!("no recorded response for {}", request.path)))
            }
        }
    }
}

/// Wraps another transport and writes each exchange to `dir` as a fixture.
pub struct RecordingTransport<T> {
    inner: T,
    dir: PathBuf,
    counter: AtomicUsize,
}

impl<T: Transport> RecordingTransport<T> {
    pub fn new(inner: T, dir: impl Into<PathBuf>) -> Self {
        RecordingTransport {
            inner,
            dir: dir.into(),
            counter: AtomicUsize::new(0),
        }
    }
}

#[async_trait]
impl<T: Transport> Transport for RecordingTransport<T> {
    async fn get(&self, request: &Request) -> Result<Response, ReconcileError> {
        let response = self.inner.get(request).await?;
        let n = self.counter.fetch_add(1, Ordering::SeqCst);
        let fixture = Fixture {
            request: request.clone(),
            response: response.clone(),
        };
        let path = self.dir.join(format!("recorded-{n:04}.json"));
        let json = serde_json::to_string_pretty(&fixture).expect("fixture serializes");
        if let Err(e) = std::fs::write(&path, json) {
            tracing::warn!(path = %path.display(), "could not record fixture: {e}");
        }
        Ok(response)
    }
}
