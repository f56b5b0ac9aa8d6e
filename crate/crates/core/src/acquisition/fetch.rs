//! Blocking HTTP fetcher with retries, per-host spacing and a bounded
//! worker pool.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AcquisitionError, Cache, RawDocument, TopicEntry};
use crate::model::Platform;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FetchPolicy {
    pub max_attempts: u32,
    /// First backoff delay; doubles after every failed attempt.
    pub initial_backoff: Duration,
    /// Minimum spacing between two requests to the same host.
    pub host_interval: Duration,
    pub user_agent: String,
    pub timeout: Duration,
    /// Ignore existing cache entries and refetch.
    pub refresh: bool,
    pub wikipedia_base: String,
    pub grokipedia_base: String,
}

impl Default for FetchPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            initial_backoff: Duration::from_secs(1),
            host_interval: Duration::from_millis(1000),
            user_agent: format!("epiaudit/{} (citation audit; offline-first)", env!("CARGO_PKG_VERSION")),
            timeout: Duration::from_secs(30),
            refresh: false,
            wikipedia_base: "https://en.wikipedia.org".into(),
            grokipedia_base: "https://grokipedia.com".into(),
        }
    }
}

impl FetchPolicy {
    /// Canonical article URL for a title on a platform.
    pub fn article_url(&self, platform: Platform, title: &str) -> String {
        let (base, prefix) = match platform {
            Platform::Wikipedia => (&self.wikipedia_base, "wiki"),
            Platform::Grokipedia => (&self.grokipedia_base, "page"),
        };
        let slug = title.trim().replace(' ', "_");
        match url::Url::parse(base) {
            Ok(mut u) if !u.cannot_be_a_base() => {
                u.path_segments_mut().expect("base url").pop_if_empty().push(prefix).push(&slug);
                u.to_string()
            }
            _ => format!("{}/{prefix}/{slug}", base.trim_end_matches('/')),
        }
    }
}

/// Serializes requests per host: each request reserves the next free slot
/// for its host, so start times to one host are at least `interval` apart.
#[derive(Debug, Default)]
pub struct RateLimiter {
    interval: Duration,
    next_slot: Mutex<HashMap<String, Instant>>,
}

impl RateLimiter {
    pub fn new(interval: Duration) -> Self {
        Self { interval, next_slot: Mutex::new(HashMap::new()) }
    }

    pub fn wait(&self, host: &str) {
        let slot = {
            let mut map = self.next_slot.lock().expect("rate limiter lock");
            let now = Instant::now();
            let slot = map.get(host).map_or(now, |t| (*t).max(now));
            map.insert(host.to_string(), slot + self.interval);
            slot
        };
        let now = Instant::now();
        if slot > now {
            thread::sleep(slot - now);
        }
    }
}

pub struct Fetcher {
    policy: FetchPolicy,
    agent: ureq::Agent,
    limiter: RateLimiter,
}

impl Fetcher {
    pub fn new(policy: FetchPolicy) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .user_agent(policy.user_agent.as_str())
            .timeout_global(Some(policy.timeout))
            .build()
            .into();
        let limiter = RateLimiter::new(policy.host_interval);
        Self { policy, agent, limiter }
    }

    pub fn policy(&self) -> &FetchPolicy {
        &self.policy
    }

    /// Returns the cached document unless `refresh` is set; otherwise
    /// fetches over HTTP and stores the result. The flag reports a cache hit.
    pub fn fetch(&self, topic: &str, platform: Platform, cache: &Cache) -> Result<(RawDocument, bool), AcquisitionError> {
        if topic.trim().is_empty() {
            return Err(AcquisitionError::EmptyTopic);
        }
        if !self.policy.refresh && cache.contains(platform, topic) {
            return cache.load(platform, topic).map(|d| (d, true));
        }
        let url = self.policy.article_url(platform, topic);
        let body = self.get_with_retries(&url)?;
        let doc = RawDocument::new(platform, topic, &url, body, chrono::Utc::now());
        cache.store(&doc)?;
        Ok((doc, false))
    }

    fn get_with_retries(&self, url: &str) -> Result<Vec<u8>, AcquisitionError> {
        let host = url::Url::parse(url)
            .ok()
            .and_then(|u| u.host_str().map(|h| format!("{h}:{}", u.port_or_known_default().unwrap_or(0))))
            .unwrap_or_default();
        let attempts = self.policy.max_attempts.max(1);
        let mut last = AcquisitionError::NetworkError { url: url.into(), reason: "no attempt made".into() };
        for attempt in 1..=attempts {
            self.limiter.wait(&host);
            log::debug!("GET {url} (attempt {attempt}/{attempts})");
            match self.agent.get(url).call() {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    match status {
                        200..=299 => match resp.body_mut().with_config().limit(64 * 1024 * 1024).read_to_vec() {
                            Ok(body) if !body.is_empty() => return Ok(body),
                            Ok(_) => {
                                last = AcquisitionError::NetworkError { url: url.into(), reason: "empty body".into() }
                            }
                            Err(e) => last = AcquisitionError::NetworkError { url: url.into(), reason: e.to_string() },
                        },
                        404 => return Err(AcquisitionError::NotFound { url: url.into() }),
                        429 => last = AcquisitionError::RateLimited { url: url.into(), attempts },
                        s => last = AcquisitionError::NetworkError { url: url.into(), reason: format!("HTTP {s}") },
                    }
                }
                Err(e) => last = AcquisitionError::NetworkError { url: url.into(), reason: e.to_string() },
            }
            if attempt < attempts {
                thread::sleep(self.policy.initial_backoff * 2u32.pow(attempt - 1));
            }
        }
        Err(last)
    }
}

/// One-shot convenience wrapper around [`Fetcher::fetch`].
pub fn fetch_article(
    topic: &str,
    platform: Platform,
    cache_dir: &Path,
    policy: &FetchPolicy,
) -> Result<RawDocument, AcquisitionError> {
    Fetcher::new(policy.clone()).fetch(topic, platform, &Cache::new(cache_dir)).map(|(d, _)| d)
}

/// Result of fetching one topic on one platform.
#[derive(Debug)]
pub struct FetchOutcome {
    pub title: String,
    pub platform: Platform,
    pub result: Result<RawDocument, AcquisitionError>,
    pub from_cache: bool,
}

/// Fetches every included topic on both platforms with at most
/// `max_concurrency` requests in flight. Output order follows the input.
pub fn fetch_all(fetcher: &Fetcher, cache: &Cache, topics: &[TopicEntry], max_concurrency: usize) -> Vec<FetchOutcome> {
    let jobs: Vec<(&TopicEntry, Platform)> = topics
        .iter()
        .filter(|t| t.include)
        .flat_map(|t| Platform::ALL.into_iter().map(move |p| (t, p)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(max_concurrency.max(1))
        .build()
        .expect("fetch pool");
    pool.install(|| {
        jobs.par_iter()
            .map(|(t, p)| {
                let res = fetcher.fetch(&t.title, *p, cache);
                if let Err(e) = &res {
                    log::warn!("{} on {}: {e}", t.title, p);
                }
                let from_cache = matches!(res, Ok((_, true)));
                FetchOutcome { title: t.title.clone(), platform: *p, result: res.map(|(d, _)| d), from_cache }
            })
            .collect()
    })
}
