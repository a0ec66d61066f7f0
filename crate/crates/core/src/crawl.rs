//! Breadth-first crawler confined to the registrable domains of its seeds,
//! plus the HTML helpers it needs.
//!
//! Fetching goes through the [`Fetcher`] trait so the crawler can be driven
//! by an HTTP client or by an in-memory link graph.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Mutex;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use scraper::{ElementRef, Html, Node, Selector};
use serde::{Deserialize, Serialize};
use texting_robots::Robot;
use url::Url;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CrawlConfig {
    pub seed_urls: Vec<String>,
    pub max_pages: usize,
    /// Unlimited when absent.
    pub max_depth: Option<usize>,
    pub politeness_delay_ms: u64,
    pub timeout_ms: u64,
    pub user_agent: String,
    pub concurrency: usize,
    pub respect_robots: bool,
}

impl Default for CrawlConfig {
    fn default() -> Self {
        Self {
            seed_urls: Vec::new(),
            max_pages: 10_000,
            max_depth: None,
            politeness_delay_ms: 1_000,
            timeout_ms: 30_000,
            user_agent: concat!("tibcorpus/", env!("CARGO_PKG_VERSION")).into(),
            concurrency: 4,
            respect_robots: true,
        }
    }
}

impl CrawlConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_pages == 0 {
            return Err(Error::Config("max_pages must be at least 1".into()));
        }
        if self.concurrency == 0 {
            return Err(Error::Config("concurrency must be at least 1".into()));
        }
        if self.user_agent.trim().is_empty() {
            return Err(Error::Config("user_agent is empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    pub url: String,
    pub depth: usize,
    /// Milliseconds since the Unix epoch.
    pub fetched_at: u64,
    /// HTTP status, or 0 when the request itself failed.
    pub status: u16,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FetchResponse {
    pub status: u16,
    pub content_type: Option<String>,
    pub body: Vec<u8>,
    pub error: Option<String>,
}

impl FetchResponse {
    pub fn ok_html(body: impl Into<Vec<u8>>) -> Self {
        Self { status: 200, content_type: Some("text/html".into()), body: body.into(), error: None }
    }

    pub fn failed(error: impl Into<String>) -> Self {
        Self { status: 0, error: Some(error.into()), ..Self::default() }
    }

    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }

    fn is_html(&self) -> bool {
        self.content_type.as_deref().is_none_or(|c| {
            let c = c.to_ascii_lowercase();
            c.contains("html") || c.starts_with("text/plain")
        })
    }
}

pub trait Fetcher: Sync {
    fn fetch(&self, url: &str) -> FetchResponse;
}

impl<F: Fn(&str) -> FetchResponse + Sync> Fetcher for F {
    fn fetch(&self, url: &str) -> FetchResponse {
        self(url)
    }
}

/// Parse an absolute http(s) URL, dropping the fragment. Host lowercasing
/// and dot-segment removal come from WHATWG parsing.
pub fn normalize_url(raw: &str) -> Result<Url> {
    let bad = |reason: &str| Error::Url { url: raw.to_string(), reason: reason.to_string() };
    let mut url = Url::parse(raw.trim()).map_err(|e| bad(&e.to_string()))?;
    if !matches!(url.scheme(), "http" | "https") {
        return Err(bad("not an http(s) URL"));
    }
    if url.host_str().is_none_or(str::is_empty) {
        return Err(bad("missing host"));
    }
    url.set_fragment(None);
    Ok(url)
}

/// Public suffix plus one label; the bare host for IPs and hosts the suffix
/// list cannot split.
pub fn registrable_domain(url: &Url) -> String {
    let host = url.host_str().unwrap_or_default().trim_end_matches('.').to_ascii_lowercase();
    if matches!(url.host(), Some(url::Host::Domain(_))) {
        if let Some(d) = psl::domain_str(&host) {
            return d.to_string();
        }
    }
    host
}

pub fn same_root_domain(a: &str, b: &str) -> Result<bool> {
    Ok(registrable_domain(&normalize_url(a)?) == registrable_domain(&normalize_url(b)?))
}

fn parse_html(html: &[u8]) -> Html {
    Html::parse_document(&String::from_utf8_lossy(html))
}

/// Resolved, fragment-free http(s) targets of every `<a href>`, first
/// occurrence order.
pub fn extract_links(html: &[u8], base: &Url) -> Vec<String> {
    let doc = parse_html(html);
    let sel = Selector::parse("a[href]").expect("static selector");
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for a in doc.select(&sel) {
        let href = a.value().attr("href").unwrap_or_default().trim();
        if href.is_empty() || href.starts_with('#') {
            continue;
        }
        let Ok(mut url) = base.join(href) else { continue };
        if !matches!(url.scheme(), "http" | "https") || url.host_str().is_none() {
            continue;
        }
        url.set_fragment(None);
        let s = url.to_string();
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    out
}

const SKIPPED: &[&str] = &["script", "style", "head", "noscript", "template", "svg", "iframe", "object"];
const BLOCKS: &[&str] = &[
    "address", "article", "aside", "blockquote", "br", "dd", "div", "dl", "dt", "figcaption", "figure", "footer",
    "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "li", "main", "nav", "ol", "p", "pre", "section",
    "table", "td", "th", "tr", "ul", "body", "html", "title",
];

fn walk(el: ElementRef<'_>, out: &mut String) {
    for child in el.children() {
        match child.value() {
            Node::Text(t) => out.extend(t.chars().map(|c| if c.is_whitespace() { ' ' } else { c })),
            Node::Element(e) => {
                let name = e.name();
                if SKIPPED.contains(&name) {
                    continue;
                }
                let block = BLOCKS.contains(&name);
                if block {
                    out.push('\n');
                }
                if let Some(child_el) = ElementRef::wrap(child) {
                    walk(child_el, out);
                }
                if block {
                    out.push('\n');
                }
            }
            _ => {}
        }
    }
}

/// Visible text: one line per block element, whitespace collapsed, blank
/// lines removed. Entities are decoded by the parser.
pub fn extract_text(html: &[u8]) -> String {
    let doc = parse_html(html);
    let mut raw = String::new();
    walk(doc.root_element(), &mut raw);
    raw.lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrawlSummary {
    pub fetched: usize,
    pub failed: usize,
    pub blocked_by_robots: usize,
    pub discovered: usize,
}

struct Politeness {
    delay: Duration,
    next_slot: Mutex<HashMap<String, Instant>>,
}

impl Politeness {
    fn wait(&self, host: &str, extra: Duration) {
        if self.delay.is_zero() && extra.is_zero() {
            return;
        }
        let gap = self.delay.max(extra);
        let sleep_until = {
            let mut slots = self.next_slot.lock().expect("politeness lock");
            let now = Instant::now();
            let slot = slots.get(host).copied().unwrap_or(now).max(now);
            slots.insert(host.to_string(), slot + gap);
            slot
        };
        let now = Instant::now();
        if sleep_until > now {
            std::thread::sleep(sleep_until - now);
        }
    }
}

fn now_millis() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

struct Job {
    url: Url,
    depth: usize,
    root: String,
}

/// Crawl breadth-first from `config.seed_urls`.
///
/// Fetches run up to `concurrency` at a time, but results are handled in the
/// order URLs were dequeued, so the set and order of emitted pages does not
/// depend on the concurrency level.
pub fn crawl<F>(config: &CrawlConfig, fetcher: &dyn Fetcher, mut emit: F) -> Result<CrawlSummary>
where
    F: FnMut(Page) -> Result<()>,
{
    config.validate()?;
    if config.seed_urls.is_empty() {
        return Err(Error::Config("no seed URLs".into()));
    }
    let mut queue = VecDeque::new();
    let mut visited = HashSet::new();
    for s in &config.seed_urls {
        let url = normalize_url(s)?;
        if visited.insert(url.to_string()) {
            let root = registrable_domain(&url);
            queue.push_back(Job { url, depth: 0, root });
        }
    }
    let politeness =
        Politeness { delay: Duration::from_millis(config.politeness_delay_ms), next_slot: Mutex::new(HashMap::new()) };
    let mut robots: HashMap<String, Option<Robot>> = HashMap::new();
    let mut summary = CrawlSummary { discovered: queue.len(), ..Default::default() };

    while summary.fetched < config.max_pages && !queue.is_empty() {
        let room = (config.max_pages - summary.fetched).min(config.concurrency);
        let mut batch = Vec::with_capacity(room);
        while batch.len() < room {
            let Some(job) = queue.pop_front() else { break };
            if config.respect_robots && !robots_allow(&mut robots, &job.url, config, fetcher, &politeness) {
                summary.blocked_by_robots += 1;
                continue;
            }
            batch.push(job);
        }
        let responses = fetch_batch(&batch, fetcher, &politeness, &robots);
        for (job, (resp, fetched_at)) in batch.into_iter().zip(responses) {
            summary.fetched += 1;
            if !resp.is_success() {
                summary.failed += 1;
            }
            let html_ok = resp.is_success() && resp.is_html();
            if html_ok && config.max_depth.is_none_or(|m| job.depth < m) {
                for link in extract_links(&resp.body, &job.url) {
                    let Ok(url) = normalize_url(&link) else { continue };
                    if registrable_domain(&url) != job.root || !visited.insert(url.to_string()) {
                        continue;
                    }
                    summary.discovered += 1;
                    queue.push_back(Job { url, depth: job.depth + 1, root: job.root.clone() });
                }
            }
            emit(Page {
                url: job.url.to_string(),
                depth: job.depth,
                fetched_at,
                status: resp.status,
                text: if html_ok { extract_text(&resp.body) } else { String::new() },
                error: resp.error,
            })?;
        }
    }
    Ok(summary)
}

fn origin_key(url: &Url) -> String {
    url.origin().ascii_serialization()
}

fn crawl_delay(robots: &HashMap<String, Option<Robot>>, url: &Url) -> Duration {
    robots
        .get(&origin_key(url))
        .and_then(|r| r.as_ref()?.delay)
        .filter(|d| d.is_finite() && *d > 0.0)
        .map_or(Duration::ZERO, |d| Duration::from_secs_f32(d.min(60.0)))
}

fn robots_allow(
    cache: &mut HashMap<String, Option<Robot>>,
    url: &Url,
    config: &CrawlConfig,
    fetcher: &dyn Fetcher,
    politeness: &Politeness,
) -> bool {
    let key = origin_key(url);
    let robot = cache.entry(key.clone()).or_insert_with(|| {
        let robots_url = format!("{key}/robots.txt");
        politeness.wait(url.host_str().unwrap_or_default(), Duration::ZERO);
        let resp = fetcher.fetch(&robots_url);
        if resp.is_success() {
            Robot::new(&config.user_agent, &resp.body).ok()
        } else {
            log::debug!("no robots.txt at {robots_url} (status {})", resp.status);
            None
        }
    });
    robot.as_ref().is_none_or(|r| r.allowed(url.as_str()))
}

fn fetch_batch(
    batch: &[Job],
    fetcher: &dyn Fetcher,
    politeness: &Politeness,
    robots: &HashMap<String, Option<Robot>>,
) -> Vec<(FetchResponse, u64)> {
    let one = |job: &Job| {
        politeness.wait(job.url.host_str().unwrap_or_default(), crawl_delay(robots, &job.url));
        let resp = fetcher.fetch(job.url.as_str());
        (resp, now_millis())
    };
    if batch.len() <= 1 {
        return batch.iter().map(one).collect();
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = batch.iter().map(|job| s.spawn(move || one(job))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| (FetchResponse::failed("fetch panicked"), 0))).collect()
    })
}

/// Read a seed file: one URL per line, `#` comments allowed.
pub fn parse_seed_file(data: &str) -> Vec<String> {
    data.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(String::from).collect()
}
