use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::header::CONTENT_TYPE;
use tibcorpus::crawl::{CrawlConfig, FetchResponse, Fetcher};
use tibcorpus::{Error, Result};

/// Blocking HTTP fetcher used by `tibcorpus crawl`.
pub struct HttpFetcher {
    client: Client,
}

impl HttpFetcher {
    pub fn new(config: &CrawlConfig) -> Result<Self> {
        let client = Client::builder()
            .user_agent(config.user_agent.clone())
            .timeout(Duration::from_millis(config.timeout_ms))
            .build()
            .map_err(|e| Error::Config(format!("cannot build HTTP client: {e}")))?;
        Ok(Self { client })
    }
}

impl Fetcher for HttpFetcher {
    fn fetch(&self, url: &str) -> FetchResponse {
        let resp = match self.client.get(url).send() {
            Ok(r) => r,
            Err(e) => return FetchResponse::failed(e.to_string()),
        };
        let status = resp.status().as_u16();
        let content_type = resp.headers().get(CONTENT_TYPE).and_then(|v| v.to_str().ok()).map(String::from);
        match resp.bytes() {
            Ok(body) => FetchResponse { status, content_type, body: body.to_vec(), error: None },
            Err(e) => FetchResponse { status, content_type, body: Vec::new(), error: Some(e.to_string()) },
        }
    }
}
