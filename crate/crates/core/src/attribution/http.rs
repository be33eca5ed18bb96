use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::embed::{EmbeddingProvider, EmbeddingVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HttpEmbedderConfig {
    pub endpoint: String,
    /// Model/version tag; part of every cache key.
    pub identity: String,
    pub dimension: usize,
    pub timeout_secs: f64,
    pub cache_dir: Option<PathBuf>,
    /// Texts per request.
    pub batch_size: usize,
}

impl Default for HttpEmbedderConfig {
    fn default() -> Self {
        HttpEmbedderConfig {
            endpoint: "http://127.0.0.1:8080/embed".into(),
            identity: "external".into(),
            dimension: 768,
            timeout_secs: 30.0,
            cache_dir: None,
            batch_size: 64,
        }
    }
}

#[derive(Serialize)]
struct Request<'a> {
    texts: &'a [&'a str],
}

#[derive(Deserialize)]
struct Response {
    vectors: Vec<Vec<f64>>,
}

/// Client for an embedding service speaking
/// `POST {"texts": [..]}` → `{"vectors": [[..]]}`, with an optional on-disk
/// cache at `cache_dir/sha256(identity)/sha256(text).json`.
pub struct HttpEmbedder {
    config: HttpEmbedderConfig,
    agent: ureq::Agent,
}

fn hex_digest(data: &[u8]) -> String {
    Sha256::digest(data)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl HttpEmbedder {
    pub fn new(config: HttpEmbedderConfig) -> Result<Self> {
        if config.dimension == 0 || config.batch_size == 0 {
            return Err(Error::precondition(
                "embedding dimension and batch size must be positive",
            ));
        }
        if config.timeout_secs.is_nan() || config.timeout_secs <= 0.0 {
            return Err(Error::precondition("embedding timeout must be positive"));
        }
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(HttpEmbedder { config, agent })
    }

    pub fn config(&self) -> &HttpEmbedderConfig {
        &self.config
    }

    fn cache_path(&self, text: &str) -> Option<PathBuf> {
        self.config.cache_dir.as_ref().map(|dir| {
            dir.join(hex_digest(self.config.identity.as_bytes()))
                .join(format!("{}.json", hex_digest(text.as_bytes())))
        })
    }

    fn read_cache(&self, path: &Path) -> Option<Vec<f64>> {
        let bytes = fs::read(path).ok()?;
        let v: Vec<f64> = serde_json::from_slice(&bytes).ok()?;
        (v.len() == self.config.dimension).then_some(v)
    }

    /// Write-then-rename so concurrent writers never leave a partial file.
    fn write_cache(&self, path: &Path, raw: &[f64]) -> Result<()> {
        let dir = path.parent().expect("cache path has a parent");
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
        serde_json::to_writer(&mut tmp, raw)?;
        tmp.flush().map_err(|e| Error::io(path, e))?;
        tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
        Ok(())
    }

    fn request(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>> {
        let unavailable = |e: ureq::Error| {
            Error::EmbeddingUnavailable(format!("{}: {e}", self.config.endpoint))
        };
        let mut response = self
            .agent
            .post(&self.config.endpoint)
            .send_json(Request { texts })
            .map_err(unavailable)?;
        let status = response.status();
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(Error::EmbeddingUnavailable(format!(
                "{} answered {status}",
                self.config.endpoint
            )));
        }
        if !status.is_success() {
            return Err(Error::EmbeddingResponse(format!(
                "{} answered {status}",
                self.config.endpoint
            )));
        }
        let body: Response = response
            .body_mut()
            .read_json()
            .map_err(|e| Error::EmbeddingResponse(e.to_string()))?;
        if body.vectors.len() != texts.len() {
            return Err(Error::EmbeddingResponse(format!(
                "asked for {} vectors, got {}",
                texts.len(),
                body.vectors.len()
            )));
        }
        for v in &body.vectors {
            if v.len() != self.config.dimension {
                return Err(Error::DimensionMismatch {
                    expected: self.config.dimension,
                    found: v.len(),
                });
            }
        }
        Ok(body.vectors)
    }
}

impl EmbeddingProvider for HttpEmbedder {
    fn identity(&self) -> &str {
        &self.config.identity
    }

    fn dimension(&self) -> usize {
        self.config.dimension
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>> {
        let mut raw: Vec<Option<Vec<f64>>> = texts
            .iter()
            .map(|t| self.cache_path(t).and_then(|p| self.read_cache(&p)))
            .collect();
        let missing: Vec<usize> = (0..texts.len()).filter(|&i| raw[i].is_none()).collect();
        for chunk in missing.chunks(self.config.batch_size) {
            let batch: Vec<&str> = chunk.iter().map(|&i| texts[i]).collect();
            for (&i, v) in chunk.iter().zip(self.request(&batch)?) {
                if let Some(p) = self.cache_path(texts[i]) {
                    self.write_cache(&p, &v)?;
                }
                raw[i] = Some(v);
            }
        }
        raw.into_iter()
            .map(|v| EmbeddingVector::normalized(v.expect("filled above")))
            .collect()
    }
}
