//! Configuration-driven HTTP access for translation backends.
//!
//! Adapters are built from an endpoint config (URL template, headers, body
//! template, response field path) rather than per-vendor code; the transport
//! itself sits behind a trait so tests can substitute a scripted one.

use std::sync::Arc;
use std::time::Duration;

use serde_json::Value;
use thiserror::Error;

use super::GatewayError;

/// A fully rendered request, ready to send.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpRequestSpec {
    pub method: String,
    pub url: String,
    pub headers: Vec<(String, String)>,
    pub body: Option<String>,
}

/// A raw response: status code and body text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponseSpec {
    pub status: u16,
    pub body: String,
}

/// Failure to obtain any response (connection, timeout, protocol).
#[derive(Debug, Error)]
#[error("transport error: {0}")]
pub struct TransportError(pub String);

pub trait HttpTransport: Send + Sync {
    fn send(&self, request: &HttpRequestSpec) -> Result<HttpResponseSpec, TransportError>;
}

/// Blocking reqwest-backed transport with a 30 second timeout.
pub struct ReqwestTransport {
    client: reqwest::blocking::Client,
}

impl ReqwestTransport {
    pub fn new() -> Self {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(30))
            .build()
            .expect("default TLS client");
        ReqwestTransport { client }
    }
}

impl Default for ReqwestTransport {
    fn default() -> Self {
        Self::new()
    }
}

impl HttpTransport for ReqwestTransport {
    fn send(&self, request: &HttpRequestSpec) -> Result<HttpResponseSpec, TransportError> {
        let method: reqwest::Method = request
            .method
            .parse()
            .map_err(|_| TransportError(format!("invalid method {}", request.method)))?;
        let mut builder = self.client.request(method, &request.url);
        for (name, value) in &request.headers {
            builder = builder.header(name, value);
        }
        if let Some(body) = &request.body {
            builder = builder.body(body.clone());
        }
        let response = builder.send().map_err(|e| TransportError(e.to_string()))?;
        let status = response.status().as_u16();
        let body = response.text().map_err(|e| TransportError(e.to_string()))?;
        Ok(HttpResponseSpec { status, body })
    }
}

pub type SharedTransport = Arc<dyn HttpTransport>;

/// Parsed endpoint configuration for one HTTP backend.
#[derive(Debug, Clone)]
pub struct HttpBackendSetup {
    url_template: String,
    method: String,
    headers: Vec<(String, String)>,
    body_template: Option<Value>,
    response_path: String,
}

impl HttpBackendSetup {
    /// Reads the endpoint config map. Header values may reference secrets as
    /// `${VAR_NAME}`; the variables are resolved from the environment here
    /// and never written back to disk.
    pub fn from_config(
        backend_id: &str,
        config: &serde_json::Map<String, Value>,
    ) -> Result<Self, GatewayError> {
        let invalid = |detail: String| GatewayError::EndpointConfigInvalid {
            backend_id: backend_id.to_string(),
            detail,
        };
        let url_template = config
            .get("url")
            .and_then(Value::as_str)
            .ok_or_else(|| invalid("missing string field \"url\"".to_string()))?
            .to_string();
        let body_template = config.get("body").cloned();
        let method = match config.get("method") {
            Some(v) => v
                .as_str()
                .ok_or_else(|| invalid("\"method\" must be a string".to_string()))?
                .to_uppercase(),
            None if body_template.is_some() => "POST".to_string(),
            None => "GET".to_string(),
        };
        let mut headers = Vec::new();
        if let Some(raw) = config.get("headers") {
            let map = raw
                .as_object()
                .ok_or_else(|| invalid("\"headers\" must be an object".to_string()))?;
            for (name, value) in map {
                let value = value
                    .as_str()
                    .ok_or_else(|| invalid(format!("header {name} must be a string")))?;
                headers.push((name.clone(), expand_env(value)?));
            }
        }
        let response_path = config
            .get("response_path")
            .and_then(Value::as_str)
            .ok_or_else(|| invalid("missing string field \"response_path\"".to_string()))?
            .to_string();
        if !response_path.starts_with('/') {
            return Err(invalid(format!(
                "\"response_path\" must be a JSON pointer starting with '/', got {response_path:?}"
            )));
        }
        Ok(HttpBackendSetup {
            url_template,
            method,
            headers,
            body_template,
            response_path,
        })
    }

    /// Renders the request for one source sentence. `{text}` in the URL is
    /// percent-encoded; `{text}` inside body string values is inserted raw
    /// (JSON serialization escapes it).
    pub fn build_request(&self, text: &str) -> HttpRequestSpec {
        let encoded: String = url::form_urlencoded::byte_serialize(text.as_bytes()).collect();
        let url = self.url_template.replace("{text}", &encoded);
        let body = self.body_template.as_ref().map(|template| {
            let mut rendered = template.clone();
            substitute_text(&mut rendered, text);
            rendered.to_string()
        });
        HttpRequestSpec {
            method: self.method.clone(),
            url,
            headers: self.headers.clone(),
            body,
        }
    }

    /// Pulls the translated string out of a response body via the configured
    /// JSON pointer.
    pub fn extract_output(&self, backend_id: &str, body: &str) -> Result<String, GatewayError> {
        let invalid = |detail: String| GatewayError::EndpointConfigInvalid {
            backend_id: backend_id.to_string(),
            detail,
        };
        let parsed: Value = serde_json::from_str(body)
            .map_err(|e| invalid(format!("response is not JSON: {e}")))?;
        let found = parsed
            .pointer(&self.response_path)
            .ok_or_else(|| invalid(format!("response has no field at {}", self.response_path)))?;
        let text = found
            .as_str()
            .ok_or_else(|| invalid(format!("field at {} is not a string", self.response_path)))?;
        if text.is_empty() {
            return Err(invalid(format!("field at {} is empty", self.response_path)));
        }
        Ok(text.to_string())
    }
}

/// Replaces `${NAME}` references with environment variable values.
fn expand_env(value: &str) -> Result<String, GatewayError> {
    let mut result = String::with_capacity(value.len());
    let mut rest = value;
    while let Some(start) = rest.find("${") {
        result.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        let end = after.find('}').ok_or_else(|| GatewayError::MissingEnvVar {
            name: after.to_string(),
        })?;
        let name = &after[..end];
        let resolved = std::env::var(name).map_err(|_| GatewayError::MissingEnvVar {
            name: name.to_string(),
        })?;
        result.push_str(&resolved);
        rest = &after[end + 1..];
    }
    result.push_str(rest);
    Ok(result)
}

fn substitute_text(value: &mut Value, text: &str) {
    match value {
        Value::String(s) => {
            if s.contains("{text}") {
                *s = s.replace("{text}", text);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|v| substitute_text(v, text)),
        Value::Object(map) => map.values_mut().for_each(|v| substitute_text(v, text)),
        _ => {}
    }
}
