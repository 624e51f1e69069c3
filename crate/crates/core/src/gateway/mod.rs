//! Uniform access to translation backends.
//!
//! A backend is described by a small JSON config and comes in three kinds:
//! a live HTTP adapter, an offline fixture file of precomputed outputs, and
//! a synthetic translator driven by a bias policy. Batches consult the
//! persistent cache first, respect a rate limit and a parallelism cap for
//! live requests, and account for every sentence: each one ends up either in
//! the record list or in an explicit failure list.

mod cache;
mod http;
mod rate_limit;

pub use cache::{cache_key, CacheEntry, CacheError, TranslationCache};
pub use http::{
    HttpBackendSetup, HttpRequestSpec, HttpResponseSpec, HttpTransport, ReqwestTransport,
    SharedTransport, TransportError,
};
pub use rate_limit::TokenBucket;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::classifier::GenderLabel;
use crate::eec::{EecCorpus, EecSentence};
use crate::simlab::{synth_translate, SimlabError, SyntheticPolicy};

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("backend {backend_id} unreachable: {detail}")]
    BackendUnreachable { backend_id: String, detail: String },
    #[error("fixture is missing {} sentence(s): {}", ids.len(), ids.join(", "))]
    FixtureMissingSentences { ids: Vec<String> },
    #[error("rate limit config invalid for {backend_id}: {detail}")]
    RateLimitConfigInvalid { backend_id: String, detail: String },
    #[error("duplicate sentence id {id} at line {line}")]
    DuplicateSentenceId { id: String, line: usize },
    #[error("{path} line {line}: {detail}")]
    FormatError {
        path: PathBuf,
        line: usize,
        detail: String,
    },
    #[error("backend config {path}: {detail}")]
    ConfigInvalid { path: PathBuf, detail: String },
    #[error("endpoint config invalid for {backend_id}: {detail}")]
    EndpointConfigInvalid { backend_id: String, detail: String },
    #[error("environment variable {name} is not set")]
    MissingEnvVar { name: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error(transparent)]
    Simlab(#[from] SimlabError),
}

/// The three backend families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    HttpAdapter,
    FixtureFile,
    Synthetic,
}

fn default_rate_limit() -> f64 {
    4.0
}

fn default_max_parallel() -> usize {
    1
}

/// One backend's identity and wiring. `endpoint_config` is kind-specific:
/// `url`/`method`/`headers`/`body`/`response_path` for HTTP adapters,
/// `path` for fixture files, `policy` or `policy_path` for synthetic ones.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendDescriptor {
    pub backend_id: String,
    pub kind: BackendKind,
    #[serde(default)]
    pub endpoint_config: serde_json::Map<String, Value>,
    #[serde(default = "default_rate_limit")]
    pub rate_limit: f64,
    #[serde(default = "default_max_parallel")]
    pub max_parallel: usize,
}

impl BackendDescriptor {
    /// Loads a descriptor from a JSON file. Relative `path` and
    /// `policy_path` values are resolved against the config file's
    /// directory, so configs can ship next to their data.
    pub fn from_json_file(path: &Path) -> Result<Self, GatewayError> {
        let text = fs::read_to_string(path).map_err(|source| GatewayError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut descriptor: BackendDescriptor =
            serde_json::from_str(&text).map_err(|e| GatewayError::ConfigInvalid {
                path: path.to_path_buf(),
                detail: e.to_string(),
            })?;
        if let Some(base) = path.parent() {
            for key in ["path", "policy_path"] {
                if let Some(Value::String(raw)) = descriptor.endpoint_config.get(key) {
                    let referenced = Path::new(raw);
                    if referenced.is_relative() {
                        let resolved = base.join(referenced);
                        descriptor.endpoint_config.insert(
                            key.to_string(),
                            Value::String(resolved.to_string_lossy().into_owned()),
                        );
                    }
                }
            }
        }
        descriptor.validate()?;
        Ok(descriptor)
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        if self.backend_id.trim().is_empty() {
            return Err(GatewayError::EndpointConfigInvalid {
                backend_id: self.backend_id.clone(),
                detail: "backend_id is empty".to_string(),
            });
        }
        if !self.rate_limit.is_finite() || self.rate_limit <= 0.0 {
            return Err(GatewayError::RateLimitConfigInvalid {
                backend_id: self.backend_id.clone(),
                detail: format!("rate_limit must be positive, got {}", self.rate_limit),
            });
        }
        if self.max_parallel == 0 {
            return Err(GatewayError::RateLimitConfigInvalid {
                backend_id: self.backend_id.clone(),
                detail: "max_parallel must be at least 1".to_string(),
            });
        }
        Ok(())
    }
}

/// One translated sentence. `label` stays empty until classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationRecord {
    pub sentence_id: String,
    pub backend_id: String,
    pub source_hangul: String,
    pub output_english: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<GenderLabel>,
    pub fetched_at: DateTime<Utc>,
    pub from_cache: bool,
}

/// One sentence that still has no output after retries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationFailure {
    pub sentence_id: String,
    pub error: String,
}

/// Everything a batch produced. Records and failures partition the corpus.
#[derive(Debug, Clone)]
pub struct BatchOutcome {
    pub records: Vec<TranslationRecord>,
    pub failures: Vec<TranslationFailure>,
}

impl BatchOutcome {
    /// Fraction of sentences that have an output.
    pub fn coverage(&self) -> f64 {
        let total = self.records.len() + self.failures.len();
        if total == 0 {
            return 0.0;
        }
        self.records.len() as f64 / total as f64
    }
}

/// Batch translator over one backend, with optional persistent caching.
pub struct Gateway {
    cache: Option<TranslationCache>,
    transport: SharedTransport,
    backoff: Vec<Duration>,
    append_period: bool,
}

impl Gateway {
    pub fn new() -> Self {
        Gateway {
            cache: None,
            transport: Arc::new(ReqwestTransport::new()),
            backoff: vec![Duration::from_secs(1), Duration::from_secs(2)],
            append_period: false,
        }
    }

    pub fn with_cache(mut self, cache: TranslationCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_transport(mut self, transport: SharedTransport) -> Self {
        self.transport = transport;
        self
    }

    /// Sleep intervals between retry attempts; attempts = intervals + 1.
    pub fn with_backoff(mut self, backoff: Vec<Duration>) -> Self {
        self.backoff = backoff;
        self
    }

    /// Appends a final period to each source sentence before sending.
    pub fn with_append_period(mut self, append_period: bool) -> Self {
        self.append_period = append_period;
        self
    }

    pub fn cache(&self) -> Option<&TranslationCache> {
        self.cache.as_ref()
    }

    fn source_text(&self, sentence: &EecSentence) -> String {
        if self.append_period {
            format!("{}.", sentence.text_hangul)
        } else {
            sentence.text_hangul.clone()
        }
    }

    /// Translates every corpus sentence through one backend. The cache is
    /// consulted first; only misses touch the backend. Fixture and synthetic
    /// backends either cover all misses or fail hard; HTTP misses that still
    /// fail after retries land in the failure list.
    pub fn translate_batch(
        &self,
        corpus: &EecCorpus,
        backend: &BackendDescriptor,
    ) -> Result<BatchOutcome, GatewayError> {
        backend.validate()?;

        let mut by_id: HashMap<String, TranslationRecord> = HashMap::new();
        let mut failures_by_id: HashMap<String, String> = HashMap::new();
        let mut misses: Vec<&EecSentence> = Vec::new();
        let mut cache_hits = 0usize;
        for sentence in corpus.sentences() {
            let source = self.source_text(sentence);
            let key = cache_key(&backend.backend_id, &source);
            match self.cache.as_ref().and_then(|c| c.lookup(&key)) {
                Some(entry) => {
                    cache_hits += 1;
                    by_id.insert(
                        sentence.sentence_id.clone(),
                        TranslationRecord {
                            sentence_id: sentence.sentence_id.clone(),
                            backend_id: backend.backend_id.clone(),
                            source_hangul: source,
                            output_english: entry.output,
                            label: None,
                            fetched_at: entry.fetched_at,
                            from_cache: true,
                        },
                    );
                }
                None => misses.push(sentence),
            }
        }

        let mut fresh: Vec<(usize, String)> = Vec::new();
        match backend.kind {
            BackendKind::FixtureFile => {
                let fixture = load_backend_fixture(backend)?;
                let mut missing: Vec<String> = misses
                    .iter()
                    .filter(|s| !fixture.contains_key(&s.sentence_id))
                    .map(|s| s.sentence_id.clone())
                    .collect();
                if !missing.is_empty() {
                    missing.sort();
                    return Err(GatewayError::FixtureMissingSentences { ids: missing });
                }
                for (index, sentence) in misses.iter().enumerate() {
                    fresh.push((index, fixture[&sentence.sentence_id].clone()));
                }
            }
            BackendKind::Synthetic => {
                let policy = resolve_policy(backend)?;
                policy.validate()?;
                for (index, sentence) in misses.iter().enumerate() {
                    fresh.push((index, synth_translate(sentence, &policy)?));
                }
            }
            BackendKind::HttpAdapter => {
                if !misses.is_empty() {
                    let setup = HttpBackendSetup::from_config(
                        &backend.backend_id,
                        &backend.endpoint_config,
                    )?;
                    let outcomes = self.fetch_parallel(backend, &setup, &misses);
                    let mut live_errors = 0usize;
                    for (index, outcome) in outcomes {
                        match outcome {
                            Ok(output) => fresh.push((index, output)),
                            Err(detail) => {
                                live_errors += 1;
                                failures_by_id.insert(misses[index].sentence_id.clone(), detail);
                            }
                        }
                    }
                    if live_errors == misses.len() && cache_hits == 0 {
                        let detail = failures_by_id
                            .values()
                            .next()
                            .cloned()
                            .unwrap_or_else(|| "no attempt succeeded".to_string());
                        return Err(GatewayError::BackendUnreachable {
                            backend_id: backend.backend_id.clone(),
                            detail,
                        });
                    }
                }
            }
        }

        let fetched_at = Utc::now();
        for (index, output) in fresh {
            let sentence = misses[index];
            let source = self.source_text(sentence);
            if let Some(cache) = &self.cache {
                cache.append(CacheEntry {
                    key: cache_key(&backend.backend_id, &source),
                    backend_id: backend.backend_id.clone(),
                    source: source.clone(),
                    output: output.clone(),
                    fetched_at,
                })?;
            }
            by_id.insert(
                sentence.sentence_id.clone(),
                TranslationRecord {
                    sentence_id: sentence.sentence_id.clone(),
                    backend_id: backend.backend_id.clone(),
                    source_hangul: source,
                    output_english: output,
                    label: None,
                    fetched_at,
                    from_cache: false,
                },
            );
        }

        let mut records = Vec::with_capacity(by_id.len());
        let mut failures = Vec::with_capacity(failures_by_id.len());
        for sentence in corpus.sentences() {
            if let Some(record) = by_id.remove(&sentence.sentence_id) {
                records.push(record);
            } else if let Some(error) = failures_by_id.remove(&sentence.sentence_id) {
                failures.push(TranslationFailure {
                    sentence_id: sentence.sentence_id.clone(),
                    error,
                });
            }
        }
        debug_assert_eq!(records.len() + failures.len(), corpus.len());
        Ok(BatchOutcome { records, failures })
    }

    fn fetch_parallel(
        &self,
        backend: &BackendDescriptor,
        setup: &HttpBackendSetup,
        misses: &[&EecSentence],
    ) -> Vec<(usize, Result<String, String>)> {
        let bucket = TokenBucket::new(backend.rate_limit);
        let next = AtomicUsize::new(0);
        let results: Mutex<Vec<(usize, Result<String, String>)>> = Mutex::new(Vec::new());
        let workers = backend.max_parallel.min(misses.len()).max(1);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let index = next.fetch_add(1, Ordering::Relaxed);
                    if index >= misses.len() {
                        break;
                    }
                    let source = self.source_text(misses[index]);
                    let outcome = self.fetch_one(backend, setup, &bucket, &source);
                    results.lock().unwrap().push((index, outcome));
                });
            }
        });
        let mut collected = results.into_inner().unwrap();
        collected.sort_by_key(|(index, _)| *index);
        collected
    }

    /// One sentence through the HTTP adapter: rate-limited attempts with
    /// backoff in between. Connection errors and 429/5xx responses retry;
    /// other 4xx responses and response-shape problems fail immediately.
    fn fetch_one(
        &self,
        backend: &BackendDescriptor,
        setup: &HttpBackendSetup,
        bucket: &TokenBucket,
        source: &str,
    ) -> Result<String, String> {
        let request = setup.build_request(source);
        let attempts = self.backoff.len() + 1;
        let mut last_error = String::new();
        for attempt in 0..attempts {
            if attempt > 0 {
                std::thread::sleep(self.backoff[attempt - 1]);
            }
            bucket.acquire();
            match self.transport.send(&request) {
                Ok(response) if (200..300).contains(&response.status) => {
                    return setup
                        .extract_output(&backend.backend_id, &response.body)
                        .map_err(|e| e.to_string());
                }
                Ok(response) if response.status == 429 || response.status >= 500 => {
                    last_error = format!(
                        "HTTP {} after attempt {}: {}",
                        response.status,
                        attempt + 1,
                        snippet(&response.body)
                    );
                }
                Ok(response) => {
                    return Err(format!(
                        "HTTP {}: {}",
                        response.status,
                        snippet(&response.body)
                    ));
                }
                Err(e) => last_error = format!("attempt {}: {e}", attempt + 1),
            }
        }
        Err(last_error)
    }
}

impl Default for Gateway {
    fn default() -> Self {
        Self::new()
    }
}

fn snippet(body: &str) -> String {
    let trimmed = body.trim();
    if trimmed.chars().count() <= 200 {
        trimmed.to_string()
    } else {
        let cut: String = trimmed.chars().take(200).collect();
        format!("{cut}…")
    }
}

fn load_backend_fixture(
    backend: &BackendDescriptor,
) -> Result<BTreeMap<String, String>, GatewayError> {
    let path = backend
        .endpoint_config
        .get("path")
        .and_then(Value::as_str)
        .ok_or_else(|| GatewayError::EndpointConfigInvalid {
            backend_id: backend.backend_id.clone(),
            detail: "fixture backend needs a string field \"path\"".to_string(),
        })?;
    load_fixture(Path::new(path))
}

fn resolve_policy(backend: &BackendDescriptor) -> Result<SyntheticPolicy, GatewayError> {
    let invalid = |detail: String| GatewayError::EndpointConfigInvalid {
        backend_id: backend.backend_id.clone(),
        detail,
    };
    if let Some(inline) = backend.endpoint_config.get("policy") {
        return serde_json::from_value(inline.clone())
            .map_err(|e| invalid(format!("inline policy invalid: {e}")));
    }
    if let Some(path) = backend
        .endpoint_config
        .get("policy_path")
        .and_then(Value::as_str)
    {
        let text = fs::read_to_string(path).map_err(|source| GatewayError::Io {
            path: PathBuf::from(path),
            source,
        })?;
        return serde_json::from_str(&text)
            .map_err(|e| invalid(format!("policy file {path} invalid: {e}")));
    }
    Err(invalid(
        "synthetic backend needs \"policy\" or \"policy_path\"".to_string(),
    ))
}

/// Reads a fixture TSV of `sentence_id<TAB>english_output` rows. CRLF and LF
/// files parse identically; blank lines are skipped; duplicate ids and
/// malformed rows are errors.
pub fn load_fixture(path: &Path) -> Result<BTreeMap<String, String>, GatewayError> {
    let text = fs::read_to_string(path).map_err(|source| GatewayError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut map = BTreeMap::new();
    for (index, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (id, output) = line
            .split_once('\t')
            .ok_or_else(|| GatewayError::FormatError {
                path: path.to_path_buf(),
                line: index + 1,
                detail: "expected sentence_id<TAB>english_output".to_string(),
            })?;
        if id.is_empty() || output.is_empty() {
            return Err(GatewayError::FormatError {
                path: path.to_path_buf(),
                line: index + 1,
                detail: "sentence id and output must be nonempty".to_string(),
            });
        }
        if map.insert(id.to_string(), output.to_string()).is_some() {
            return Err(GatewayError::DuplicateSentenceId {
                id: id.to_string(),
                line: index + 1,
            });
        }
    }
    Ok(map)
}

/// Writes translation records as JSONL, one record per line.
pub fn write_records(path: &Path, records: &[TranslationRecord]) -> Result<(), GatewayError> {
    let mut buf = String::new();
    for record in records {
        buf.push_str(&serde_json::to_string(record).expect("records serialize"));
        buf.push('\n');
    }
    fs::write(path, buf).map_err(|source| GatewayError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads translation records back from JSONL.
pub fn read_records(path: &Path) -> Result<Vec<TranslationRecord>, GatewayError> {
    let text = fs::read_to_string(path).map_err(|source| GatewayError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut records = Vec::new();
    for (index, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: TranslationRecord =
            serde_json::from_str(line).map_err(|e| GatewayError::FormatError {
                path: path.to_path_buf(),
                line: index + 1,
                detail: e.to_string(),
            })?;
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simlab::synthetic_lexicon;
    use std::collections::VecDeque;

    struct ScriptedTransport {
        responses: Mutex<VecDeque<Result<HttpResponseSpec, String>>>,
        requests: Mutex<Vec<HttpRequestSpec>>,
    }

    impl ScriptedTransport {
        fn new(responses: Vec<Result<HttpResponseSpec, String>>) -> Arc<Self> {
            Arc::new(ScriptedTransport {
                responses: Mutex::new(responses.into()),
                requests: Mutex::new(Vec::new()),
            })
        }

        fn ok(body: &str) -> Result<HttpResponseSpec, String> {
            Ok(HttpResponseSpec {
                status: 200,
                body: body.to_string(),
            })
        }

        fn status(code: u16) -> Result<HttpResponseSpec, String> {
            Ok(HttpResponseSpec {
                status: code,
                body: "{}".to_string(),
            })
        }
    }

    impl HttpTransport for ScriptedTransport {
        fn send(&self, request: &HttpRequestSpec) -> Result<HttpResponseSpec, TransportError> {
            self.requests.lock().unwrap().push(request.clone());
            match self.responses.lock().unwrap().pop_front() {
                Some(Ok(response)) => Ok(response),
                Some(Err(detail)) => Err(TransportError(detail)),
                None => Err(TransportError("script exhausted".to_string())),
            }
        }
    }

    fn tiny_corpus() -> EecCorpus {
        EecCorpus::generate(&synthetic_lexicon(1, 0, 0)).unwrap()
    }

    fn http_backend(max_parallel: usize) -> BackendDescriptor {
        let config = serde_json::json!({
            "url": "https://mt.example.com/t",
            "body": {"q": "{text}"},
            "response_path": "/out",
        });
        BackendDescriptor {
            backend_id: "live".to_string(),
            kind: BackendKind::HttpAdapter,
            endpoint_config: config.as_object().unwrap().clone(),
            rate_limit: 1000.0,
            max_parallel,
        }
    }

    fn fast_gateway(transport: Arc<ScriptedTransport>) -> Gateway {
        Gateway::new()
            .with_transport(transport)
            .with_backoff(vec![Duration::ZERO, Duration::ZERO])
            .with_cache(TranslationCache::in_memory())
    }

    #[test]
    fn synthetic_backend_covers_every_sentence() {
        let corpus = EecCorpus::generate(&synthetic_lexicon(2, 2, 2)).unwrap();
        let backend = BackendDescriptor {
            backend_id: "synthetic-neutral".to_string(),
            kind: BackendKind::Synthetic,
            endpoint_config: serde_json::json!({
                "policy": {"kind": "fixed_portions", "target": {"p_w": 0.0, "p_m": 0.0, "p_n": 1.0}}
            })
            .as_object()
            .unwrap()
            .clone(),
            rate_limit: 1000.0,
            max_parallel: 1,
        };
        let gateway = Gateway::new().with_cache(TranslationCache::in_memory());
        let outcome = gateway.translate_batch(&corpus, &backend).unwrap();
        assert_eq!(outcome.records.len(), corpus.len());
        assert!(outcome.failures.is_empty());
        assert_eq!(outcome.coverage(), 1.0);
        let ids: Vec<&str> = outcome
            .records
            .iter()
            .map(|r| r.sentence_id.as_str())
            .collect();
        let expected: Vec<&str> = corpus
            .sentences()
            .iter()
            .map(|s| s.sentence_id.as_str())
            .collect();
        assert_eq!(ids, expected);
        assert!(outcome.records.iter().all(|r| !r.from_cache));
    }

    #[test]
    fn second_batch_is_served_from_cache() {
        let corpus = tiny_corpus();
        let backend = BackendDescriptor {
            backend_id: "synthetic-neutral".to_string(),
            kind: BackendKind::Synthetic,
            endpoint_config: serde_json::json!({
                "policy": {"kind": "fixed_portions", "target": {"p_w": 0.0, "p_m": 0.0, "p_n": 1.0}}
            })
            .as_object()
            .unwrap()
            .clone(),
            rate_limit: 1000.0,
            max_parallel: 1,
        };
        let gateway = Gateway::new().with_cache(TranslationCache::in_memory());
        let first = gateway.translate_batch(&corpus, &backend).unwrap();
        let second = gateway.translate_batch(&corpus, &backend).unwrap();
        assert!(second.records.iter().all(|r| r.from_cache));
        for (a, b) in first.records.iter().zip(&second.records) {
            assert_eq!(a.output_english, b.output_english);
            assert_eq!(a.fetched_at, b.fetched_at);
        }
    }

    #[test]
    fn fixture_with_missing_ids_fails_with_exactly_those_ids() {
        let corpus = EecCorpus::generate(&synthetic_lexicon(1, 1, 0)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fixture.tsv");
        let mut rows = String::new();
        for sentence in corpus.sentences().iter().skip(3) {
            rows.push_str(&format!("{}\tThe person is x.\n", sentence.sentence_id));
        }
        fs::write(&path, rows).unwrap();
        let backend = BackendDescriptor {
            backend_id: "fixture".to_string(),
            kind: BackendKind::FixtureFile,
            endpoint_config: serde_json::json!({"path": path.to_str().unwrap()})
                .as_object()
                .unwrap()
                .clone(),
            rate_limit: 1000.0,
            max_parallel: 1,
        };
        let gateway = Gateway::new();
        match gateway.translate_batch(&corpus, &backend) {
            Err(GatewayError::FixtureMissingSentences { ids }) => {
                let mut expected: Vec<String> = corpus
                    .sentences()
                    .iter()
                    .take(3)
                    .map(|s| s.sentence_id.clone())
                    .collect();
                expected.sort();
                assert_eq!(ids, expected);
            }
            other => panic!("expected missing-sentence error, got {other:?}"),
        }
    }

    #[test]
    fn http_retry_recovers_from_transient_errors() {
        let corpus = tiny_corpus();
        let mut script = Vec::new();
        script.push(ScriptedTransport::status(503));
        script.push(Err("connection reset".to_string()));
        script.push(ScriptedTransport::ok(
            r#"{"out": "The person is pos-0001."}"#,
        ));
        for _ in 0..3 {
            script.push(ScriptedTransport::ok(
                r#"{"out": "The person is pos-0001."}"#,
            ));
        }
        let transport = ScriptedTransport::new(script);
        let gateway = fast_gateway(transport.clone());
        let outcome = gateway.translate_batch(&corpus, &http_backend(1)).unwrap();
        assert_eq!(outcome.records.len(), 4);
        assert!(outcome.failures.is_empty());
        assert_eq!(transport.requests.lock().unwrap().len(), 6);
    }

    #[test]
    fn http_non_retryable_status_lands_in_failures() {
        let corpus = tiny_corpus();
        let mut script = vec![ScriptedTransport::status(404)];
        for _ in 0..3 {
            script.push(ScriptedTransport::ok(
                r#"{"out": "The person is pos-0001."}"#,
            ));
        }
        let transport = ScriptedTransport::new(script);
        let gateway = fast_gateway(transport);
        let outcome = gateway.translate_batch(&corpus, &http_backend(1)).unwrap();
        assert_eq!(outcome.records.len(), 3);
        assert_eq!(outcome.failures.len(), 1);
        assert!(outcome.failures[0].error.contains("404"));
        assert!((outcome.coverage() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn fully_failed_live_batch_is_unreachable() {
        let corpus = tiny_corpus();
        let transport = ScriptedTransport::new(vec![]);
        let gateway = fast_gateway(transport);
        match gateway.translate_batch(&corpus, &http_backend(2)) {
            Err(GatewayError::BackendUnreachable { backend_id, .. }) => {
                assert_eq!(backend_id, "live");
            }
            other => panic!("expected unreachable, got {other:?}"),
        }
    }

    #[test]
    fn invalid_rate_limit_is_rejected_before_any_request() {
        let corpus = tiny_corpus();
        let mut backend = http_backend(1);
        backend.rate_limit = 0.0;
        let gateway = Gateway::new();
        assert!(matches!(
            gateway.translate_batch(&corpus, &backend),
            Err(GatewayError::RateLimitConfigInvalid { .. })
        ));
        let mut backend = http_backend(1);
        backend.max_parallel = 0;
        assert!(matches!(
            gateway.translate_batch(&corpus, &backend),
            Err(GatewayError::RateLimitConfigInvalid { .. })
        ));
    }

    #[test]
    fn fixture_parser_normalizes_crlf_and_rejects_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.tsv");
        fs::write(&path, "a-1\tShe is kind.\r\nb-2\tHe is kind.\r\n").unwrap();
        let map = load_fixture(&path).unwrap();
        assert_eq!(map.len(), 2);
        assert_eq!(map["a-1"], "She is kind.");

        fs::write(&path, "a-1\tx\na-1\ty\n").unwrap();
        assert!(matches!(
            load_fixture(&path),
            Err(GatewayError::DuplicateSentenceId { line: 2, .. })
        ));

        fs::write(&path, "no tab here\n").unwrap();
        assert!(matches!(
            load_fixture(&path),
            Err(GatewayError::FormatError { line: 1, .. })
        ));
    }

    #[test]
    fn records_round_trip_through_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        let records = vec![TranslationRecord {
            sentence_id: "pos-0001-informal-impolite".to_string(),
            backend_id: "b".to_string(),
            source_hangul: "걔는 가가해".to_string(),
            output_english: "The person is pos-0001.".to_string(),
            label: None,
            fetched_at: Utc::now(),
            from_cache: false,
        }];
        write_records(&path, &records).unwrap();
        let back = read_records(&path).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn descriptor_file_resolves_relative_fixture_path() {
        let dir = tempfile::tempdir().unwrap();
        let config_path = dir.path().join("backend.json");
        fs::write(
            &config_path,
            r#"{"backend_id": "f", "kind": "fixture_file", "endpoint_config": {"path": "data/fixture.tsv"}}"#,
        )
        .unwrap();
        let descriptor = BackendDescriptor::from_json_file(&config_path).unwrap();
        let resolved = descriptor.endpoint_config["path"].as_str().unwrap();
        assert_eq!(
            Path::new(resolved),
            dir.path().join("data/fixture.tsv").as_path()
        );
        assert_eq!(descriptor.rate_limit, 4.0);
        assert_eq!(descriptor.max_parallel, 1);
    }
}
