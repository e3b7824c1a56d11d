//! Fallback lookup against an E-utilities style `esearch` endpoint.
//!
//! Responses are cached on disk, one JSON file per query named by the
//! SHA-256 of (base URL, term). All requests pass through one rate gate.
//! An ID is returned only when the service reports exactly one match.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use refmap_core::resolver::{Fallback, FallbackError};
use thiserror::Error;

use crate::config::RemoteConfig;
use crate::error::{Error, Result};
use crate::io::sha256_hex;

#[derive(Debug, Clone, Error)]
#[error("{message}")]
pub struct TransportError {
    /// HTTP status when the server answered.
    pub status: Option<u16>,
    pub message: String,
}

impl TransportError {
    fn retryable(&self) -> bool {
        match self.status {
            None => true,
            Some(s) => s == 429 || s >= 500,
        }
    }
}

pub trait Transport: Send + Sync {
    fn get(&self, url: &str, query: &[(&str, &str)]) -> Result<String, TransportError>;
}

pub struct UreqTransport {
    agent: ureq::Agent,
}

impl UreqTransport {
    pub fn new(timeout: Duration) -> Self {
        UreqTransport {
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
        }
    }
}

impl Transport for UreqTransport {
    fn get(&self, url: &str, query: &[(&str, &str)]) -> Result<String, TransportError> {
        let mut req = self.agent.get(url);
        for (k, v) in query {
            req = req.query(k, v);
        }
        match req.call() {
            Ok(resp) => resp.into_string().map_err(|e| TransportError {
                status: None,
                message: e.to_string(),
            }),
            Err(ureq::Error::Status(code, _)) => Err(TransportError {
                status: Some(code),
                message: format!("HTTP {code}"),
            }),
            Err(e) => Err(TransportError {
                status: None,
                message: e.to_string(),
            }),
        }
    }
}

pub struct RemoteClient<T: Transport = UreqTransport> {
    transport: T,
    base_url: String,
    cache_dir: PathBuf,
    offline: bool,
    max_retries: u32,
    backoff: Duration,
    min_interval: Duration,
    gate: Mutex<Option<Instant>>,
    calls: AtomicUsize,
}

impl RemoteClient<UreqTransport> {
    pub fn from_config(cfg: &RemoteConfig, cache_dir: &Path) -> Self {
        RemoteClient::new(
            UreqTransport::new(Duration::from_secs(cfg.timeout_secs)),
            cfg,
            cache_dir,
        )
    }
}

impl<T: Transport> RemoteClient<T> {
    pub fn new(transport: T, cfg: &RemoteConfig, cache_dir: &Path) -> Self {
        RemoteClient {
            transport,
            base_url: cfg.base_url.clone(),
            cache_dir: cache_dir.to_path_buf(),
            offline: cfg.offline,
            max_retries: cfg.max_retries,
            backoff: Duration::from_millis(cfg.backoff_ms),
            min_interval: if cfg.rps > 0.0 {
                Duration::from_secs_f64(1.0 / cfg.rps)
            } else {
                Duration::ZERO
            },
            gate: Mutex::new(None),
            calls: AtomicUsize::new(0),
        }
    }

    /// Requests sent so far, retries included.
    pub fn network_calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn cache_path(&self, term: &str) -> PathBuf {
        let key = sha256_hex(format!("{}\n{}", self.base_url, term).as_bytes());
        self.cache_dir.join(format!("{key}.json"))
    }

    pub fn lookup(&self, term: &str) -> Result<Option<String>> {
        let term = term.trim();
        let path = self.cache_path(term);
        if let Ok(body) = fs::read_to_string(&path) {
            return parse_esearch(&body);
        }
        if self.offline {
            log::info!("offline: no cached response for {term:?}, skipped");
            return Ok(None);
        }
        let body = self.fetch(term)?;
        let id = parse_esearch(&body)?;
        fs::create_dir_all(&self.cache_dir)
            .map_err(|e| Error::io(format!("creating {}", self.cache_dir.display()), e))?;
        static TMP_SEQ: AtomicUsize = AtomicUsize::new(0);
        let seq = TMP_SEQ.fetch_add(1, Ordering::Relaxed);
        let tmp = path.with_extension(format!("tmp{}-{seq}", std::process::id()));
        fs::write(&tmp, &body).map_err(|e| Error::io(format!("writing {}", tmp.display()), e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
        Ok(id)
    }

    fn fetch(&self, term: &str) -> Result<String> {
        let query = [("db", "pubmed"), ("retmode", "json"), ("term", term)];
        let mut attempt = 0;
        loop {
            self.wait_turn();
            self.calls.fetch_add(1, Ordering::Relaxed);
            match self.transport.get(&self.base_url, &query) {
                Ok(body) => return Ok(body),
                Err(e) if e.retryable() && attempt < self.max_retries => {
                    let delay = self.backoff * 2u32.saturating_pow(attempt);
                    log::warn!("remote lookup failed ({e}); retry {} in {delay:?}", attempt + 1);
                    std::thread::sleep(delay);
                    attempt += 1;
                }
                Err(e) => {
                    return Err(Error::Remote(format!("{e} after {} attempt(s)", attempt + 1)));
                }
            }
        }
    }

    fn wait_turn(&self) {
        let mut next = self.gate.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(at) = *next {
            if let Some(wait) = at.checked_duration_since(Instant::now()) {
                std::thread::sleep(wait);
            }
        }
        *next = Some(Instant::now() + self.min_interval);
    }
}

impl<T: Transport> Fallback for RemoteClient<T> {
    fn lookup(&self, fragment_text: &str) -> Result<Option<String>, FallbackError> {
        RemoteClient::lookup(self, fragment_text).map_err(|e| FallbackError(e.to_string()))
    }
}

/// `esearchresult.count` and `esearchresult.idlist`; one match or nothing.
pub fn parse_esearch(body: &str) -> Result<Option<String>> {
    let bad = |m: &str| Error::Remote(format!("malformed esearch response: {m}"));
    let v: serde_json::Value = serde_json::from_str(body).map_err(|e| bad(&e.to_string()))?;
    let res = v.get("esearchresult").ok_or_else(|| bad("no esearchresult"))?;
    let count = match res.get("count") {
        Some(serde_json::Value::String(s)) => s.parse::<u64>().map_err(|_| bad("count"))?,
        Some(serde_json::Value::Number(n)) => n.as_u64().ok_or_else(|| bad("count"))?,
        _ => return Err(bad("no count")),
    };
    let ids: Vec<&str> = res
        .get("idlist")
        .and_then(|l| l.as_array())
        .map(|a| a.iter().filter_map(|x| x.as_str()).collect())
        .unwrap_or_default();
    Ok(match (count, ids.as_slice()) {
        (1, [id]) => Some(id.to_string()),
        _ => None,
    })
}
