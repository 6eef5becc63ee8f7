//! HTTP resolution of author URIs.
//!
//! `GET /a/{id}` answers `303 See Other` pointing at `/a/{id}.{ext}`, where
//! the extension comes from the `Accept` header (HTML when absent or tied).
//! `GET /a/{id}.html|.atom|.rdf` serves the representation directly; an
//! explicit suffix always beats the header.
//!
//! Every request reads exactly one [`Snapshot`]. [`Resolver::reload`] swaps
//! in a new one atomically, so a request never sees half of a reload.

use std::sync::{Arc, RwLock};

use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;

use crate::minting::MintPolicy;
use crate::render::{render_atom, render_html, render_ore, Representation, Suffix};
use crate::store::ReadView;
use crate::time::Timestamp;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Via {
    Default,
    AcceptHeader,
    Suffix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NegotiationResult {
    pub chosen: Suffix,
    pub via: Via,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NegotiationError {
    UnknownSuffix(String),
    NotAcceptable,
}

/// One parsed media range from an `Accept` header.
struct MediaRange<'a> {
    kind: &'a str,
    subtype: &'a str,
    q: f32,
}

fn parse_accept(header: &str) -> Vec<MediaRange<'_>> {
    header
        .split(',')
        .filter_map(|item| {
            let mut parts = item.split(';');
            let (kind, subtype) = parts.next()?.trim().split_once('/')?;
            let (kind, subtype) = (kind.trim(), subtype.trim());
            if kind.is_empty() || subtype.is_empty() {
                return None;
            }
            let mut q = 1.0;
            for param in parts {
                if let Some((name, value)) = param.split_once('=') {
                    if name.trim().eq_ignore_ascii_case("q") {
                        q = value
                            .trim()
                            .parse::<f32>()
                            .ok()
                            .filter(|q| (0.0..=1.0).contains(q))?;
                    }
                }
            }
            Some(MediaRange { kind, subtype, q })
        })
        .collect()
}

/// Quality the header assigns to `media_type`, taken from the most specific
/// matching range (`type/subtype` over `type/*` over `*/*`).
fn quality(ranges: &[MediaRange<'_>], media_type: &str) -> f32 {
    let (kind, subtype) = media_type.split_once('/').expect("static media types");
    let mut best: Option<(u8, f32)> = None;
    for range in ranges {
        let specificity = if range.kind.eq_ignore_ascii_case(kind)
            && range.subtype.eq_ignore_ascii_case(subtype)
        {
            3
        } else if range.kind.eq_ignore_ascii_case(kind) && range.subtype == "*" {
            2
        } else if range.kind == "*" && range.subtype == "*" {
            1
        } else {
            continue;
        };
        best = match best {
            Some((s, q)) if s > specificity || (s == specificity && q >= range.q) => Some((s, q)),
            _ => Some((specificity, range.q)),
        };
    }
    best.map_or(0.0, |(_, q)| q)
}

/// Picks a representation from an optional suffix and `Accept` header.
pub fn negotiate(
    accept: Option<&str>,
    suffix: Option<&str>,
) -> Result<NegotiationResult, NegotiationError> {
    if let Some(suffix) = suffix {
        let chosen = suffix
            .parse::<Suffix>()
            .map_err(|_| NegotiationError::UnknownSuffix(suffix.to_string()))?;
        return Ok(NegotiationResult {
            chosen,
            via: Via::Suffix,
        });
    }
    let ranges = accept.map(parse_accept).unwrap_or_default();
    if ranges.is_empty() {
        return Ok(NegotiationResult {
            chosen: Suffix::Html,
            via: Via::Default,
        });
    }
    let mut best: Option<(Suffix, f32)> = None;
    for candidate in Suffix::ALL {
        let q = quality(&ranges, candidate.media_type());
        if q > 0.0 && best.is_none_or(|(_, top)| q > top) {
            best = Some((candidate, q));
        }
    }
    best.map(|(chosen, _)| NegotiationResult {
        chosen,
        via: Via::AcceptHeader,
    })
    .ok_or(NegotiationError::NotAcceptable)
}

/// Everything one request needs: data, policy and the feed timestamp.
#[derive(Debug, Clone)]
pub struct Snapshot {
    view: ReadView,
    policy: MintPolicy,
    generated_at: Timestamp,
}

impl Snapshot {
    /// Stamps the snapshot with the current time.
    pub fn new(view: ReadView, policy: MintPolicy) -> Self {
        Self::at(view, policy, Timestamp::now())
    }

    pub fn at(view: ReadView, policy: MintPolicy, generated_at: Timestamp) -> Self {
        Snapshot {
            view,
            policy,
            generated_at,
        }
    }

    pub fn view(&self) -> &ReadView {
        &self.view
    }

    pub fn policy(&self) -> &MintPolicy {
        &self.policy
    }

    pub fn generated_at(&self) -> Timestamp {
        self.generated_at
    }

    /// Renders one representation of an author, or `None` if unknown.
    pub fn representation(&self, author_id: &str, suffix: Suffix) -> Option<Representation> {
        let author = self.view.author(author_id)?;
        let papers = self.view.papers_for_author(author_id).ok()?;
        Some(match suffix {
            Suffix::Html => render_html(author, &papers, &self.policy),
            Suffix::Atom => render_atom(author, &papers, &self.policy, self.generated_at),
            Suffix::Rdf => render_ore(author, &papers, &self.policy).rdfxml,
        })
    }
}

/// A fully formed HTTP answer, independent of any server framework.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub status: StatusCode,
    pub headers: Vec<(header::HeaderName, String)>,
    pub body: Vec<u8>,
}

impl Reply {
    fn text(status: StatusCode, body: &str) -> Self {
        Reply {
            status,
            headers: vec![(header::CONTENT_TYPE, "text/plain; charset=utf-8".into())],
            body: body.as_bytes().to_vec(),
        }
    }

    fn cors(mut self) -> Self {
        self.headers
            .push((header::ACCESS_CONTROL_ALLOW_ORIGIN, "*".into()));
        self
    }

    fn vary_accept(mut self) -> Self {
        self.headers.push((header::VARY, "Accept".into()));
        self
    }

    pub fn header(&self, name: &header::HeaderName) -> Option<&str> {
        self.headers
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }
}

impl IntoResponse for Reply {
    fn into_response(self) -> Response {
        let mut headers = HeaderMap::new();
        for (name, value) in self.headers {
            if let Ok(value) = HeaderValue::from_str(&value) {
                headers.append(name, value);
            }
        }
        (self.status, headers, self.body).into_response()
    }
}

/// `GET /a/{id}`: redirect to the negotiated suffix URL.
pub fn handle_get_author(snapshot: &Snapshot, author_id: &str, accept: Option<&str>) -> Reply {
    if snapshot.view.author(author_id).is_none() {
        return Reply::text(
            StatusCode::NOT_FOUND,
            &format!("unknown author {author_id}\n"),
        )
        .cors();
    }
    match negotiate(accept, None) {
        Ok(result) => Reply {
            status: StatusCode::SEE_OTHER,
            headers: vec![(
                header::LOCATION,
                format!("/a/{author_id}.{}", result.chosen),
            )],
            body: Vec::new(),
        }
        .vary_accept()
        .cors(),
        Err(_) => Reply::text(
            StatusCode::NOT_ACCEPTABLE,
            "acceptable types: text/html, application/atom+xml, application/rdf+xml\n",
        )
        .vary_accept()
        .cors(),
    }
}

/// `GET /a/{id}.{ext}`: serve the representation.
pub fn handle_get_representation(snapshot: &Snapshot, author_id: &str, ext: &str) -> Reply {
    let not_found = || {
        Reply::text(
            StatusCode::NOT_FOUND,
            &format!("no such resource /a/{author_id}.{ext}\n"),
        )
        .cors()
    };
    let Ok(NegotiationResult { chosen, .. }) = negotiate(None, Some(ext)) else {
        return not_found();
    };
    let Some(rep) = snapshot.representation(author_id, chosen) else {
        return not_found();
    };
    Reply {
        status: StatusCode::OK,
        headers: vec![(header::CONTENT_TYPE, rep.content_type())],
        body: rep.body,
    }
    .cors()
}

/// Dispatches the last path segment under `/a/`.
pub fn handle_author_path(snapshot: &Snapshot, segment: &str, accept: Option<&str>) -> Reply {
    match segment.rsplit_once('.') {
        Some((author_id, ext)) => handle_get_representation(snapshot, author_id, ext),
        None => handle_get_author(snapshot, segment, accept),
    }
}

/// Shared server state holding the current snapshot.
#[derive(Debug)]
pub struct Resolver {
    current: RwLock<Arc<Snapshot>>,
}

impl Resolver {
    pub fn new(snapshot: Snapshot) -> Self {
        Resolver {
            current: RwLock::new(Arc::new(snapshot)),
        }
    }

    pub fn current(&self) -> Arc<Snapshot> {
        Arc::clone(&self.current.read().unwrap_or_else(|e| e.into_inner()))
    }

    /// Replaces the snapshot; in-flight requests finish on the old one.
    pub fn reload(&self, snapshot: Snapshot) {
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(snapshot);
    }

    pub fn router(self: Arc<Self>) -> Router {
        Router::new()
            .route("/healthz", get(|| async { "ok" }))
            .route("/a/{segment}", get(author_route))
            .with_state(self)
    }
}

async fn author_route(
    State(resolver): State<Arc<Resolver>>,
    Path(segment): Path<String>,
    headers: HeaderMap,
) -> Reply {
    let accept = headers.get(header::ACCEPT).and_then(|v| v.to_str().ok());
    handle_author_path(&resolver.current(), &segment, accept)
}
