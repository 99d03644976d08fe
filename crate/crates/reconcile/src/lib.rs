//! Wikidata reconciliation: candidate search, record details (including the
//! Treccani identifier claim), and linking entities to records.
//!
//! All remote access goes through a [`Transport`], so tests replay recorded
//! fixtures instead of touching the network.

pub mod error;
pub mod transport;

use std::sync::Arc;

use kwicdesk_core::model::TRECCANI_NOT_DETECTED;
use kwicdesk_core::{AnnotationError, Document, Entity, Qid};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use error::ReconcileError;
pub use transport::{Fixture, HttpTransport, RecordingTransport, ReplayTransport, Request, Response, Transport};

pub const DEFAULT_BASE_URL: &str = "https://www.wikidata.org";
/// Wikidata property holding the Treccani encyclopedia identifier.
pub const DEFAULT_TRECCANI_PROPERTY: &str = "P3365";
pub const DEFAULT_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct WikidataConfig {
    pub base_url: String,
    /// Language for labels, descriptions and search.
    pub language: String,
    pub treccani_property: String,
    pub default_limit: usize,
}

impl Default for WikidataConfig {
    fn default() -> Self {
        WikidataConfig {
            base_url: DEFAULT_BASE_URL.to_string(),
            language: "it".to_string(),
            treccani_property: DEFAULT_TRECCANI_PROPERTY.to_string(),
            default_limit: DEFAULT_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WikidataCandidate {
    pub qid: Qid,
    pub label: String,
    pub description: String,
    /// 1-based rank in the search service's ordering.
    pub match_score: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityDetails {
    pub qid: Qid,
    pub label: String,
    pub description: String,
    /// The claim value, or [`TRECCANI_NOT_DETECTED`].
    pub treccani_id: String,
}

/// Result of a link: the updated entity and, when the record could be
/// fetched, its details.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkOutcome {
    pub entity: Entity,
    pub details: Option<EntityDetails>,
}

#[derive(Clone)]
pub struct WikidataClient {
    transport: Arc<dyn Transport>,
    config: WikidataConfig,
}

fn parse_qid(s: &str) -> Result<Qid, ReconcileError> {
    Qid::parse(s).map_err(|_| ReconcileError::InvalidQid(s.to_string()))
}

fn malformed(what: &str) -> ReconcileError {
    ReconcileError::Unavailable(format!("malformed {what} response"))
}

/// Picks a language-keyed string (`labels`, `descriptions`), preferring
/// `lang`, then English, then whatever comes first.
fn localized(map: &Value, lang: &str) -> Option<String> {
    let obj = map.as_object()?;
    [lang, "en"]
        .iter()
        .find_map(|l| obj.get(*l))
        .or_else(|| obj.values().next())
        .and_then(|v| v.get("value"))
        .and_then(Value::as_str)
        .map(str::to_string)
}

impl WikidataClient {
    pub fn new(transport: Arc<dyn Transport>, config: WikidataConfig) -> Self {
        WikidataClient { transport, config }
    }

    /// A client talking to the live service at `config.base_url`.
    pub fn http(config: WikidataConfig) -> Result<Self, ReconcileError> {
        let t = HttpTransport::new(&config.base_url)?;
        Ok(Self::new(Arc::new(t), config))
    }

    pub fn config(&self) -> &WikidataConfig {
        &self.config
    }

    /// The request `search_candidates` issues.
    pub fn search_request(&self, label: &str, limit: usize) -> Request {
        Request::new("/w/api.php")
            .param("action", "wbsearchentities")
            .param("format", "json")
            .param("type", "item")
            .param("language", self.config.language.as_str())
            .param("uselang", self.config.language.as_str())
            .param("limit", limit.to_string())
            .param("search", label.trim())
    }

    /// The request `fetch_details` issues.
    pub fn details_request(&self, qid: &Qid) -> Request {
        Request::new(format!("/wiki/Special:EntityData/{}.json", qid.as_str()))
    }

    /// Candidates for `label` in the service's rank order, at most `limit`
    /// (the configured default when `None`).
    pub async fn search_candidates(
        &self,
        label: &str,
        limit: Option<usize>,
    ) -> Result<Vec<WikidataCandidate>, ReconcileError> {
        if label.trim().is_empty() {
            return Err(ReconcileError::InvalidLabel);
        }
        let limit = limit.unwrap_or(self.config.default_limit).max(1);
        let resp = self.transport.get(&self.search_request(label, limit)).await?;
        if resp.status != 200 {
            return Err(ReconcileError::Unavailable(format!("search returned HTTP {}", resp.status)));
        }
        let body: Value = serde_json::from_str(&resp.body).map_err(|_| malformed("search"))?;
        let hits = body.get("search").and_then(Value::as_array).ok_or_else(|| malformed("search"))?;
        let mut out = Vec::new();
        for hit in hits {
            let Some(qid) = hit.get("id").and_then(Value::as_str).and_then(|s| Qid::parse(s).ok()) else {
                continue;
            };
            let text = |k: &str| hit.get(k).and_then(Value::as_str).unwrap_or_default().to_string();
            let label = match text("label") {
                l if l.is_empty() => qid.as_str().to_string(),
                l => l,
            };
            out.push(WikidataCandidate {
                qid,
                label,
                description: text("description"),
                match_score: out.len() + 1,
            });
            if out.len() == limit {
                break;
            }
        }
        Ok(out)
    }

    /// Label, description and Treccani identifier of a record.
    pub async fn fetch_details(&self, qid: &str) -> Result<EntityDetails, ReconcileError> {
        let qid = parse_qid(qid)?;
        let resp = self.transport.get(&self.details_request(&qid)).await?;
        match resp.status {
            200 => {}
            404 => return Err(ReconcileError::NotFound(qid.as_str().to_string())),
            s => return Err(ReconcileError::Unavailable(format!("entity data returned HTTP {s}"))),
        }
        let body: Value = serde_json::from_str(&resp.body).map_err(|_| malformed("entity data"))?;
        let entities = body.get("entities").and_then(Value::as_object).ok_or_else(|| malformed("entity data"))?;
        // A redirected id comes back under the target's id.
        let record = entities
            .get(qid.as_str())
            .or_else(|| entities.values().next())
            .ok_or_else(|| ReconcileError::NotFound(qid.as_str().to_string()))?;
        if record.get("missing").is_some() {
            return Err(ReconcileError::NotFound(qid.as_str().to_string()));
        }
        let lang = &self.config.language;
        let label = record.get("labels").and_then(|l| localized(l, lang)).unwrap_or_else(|| qid.as_str().to_string());
        let description = record.get("descriptions").and_then(|d| localized(d, lang)).unwrap_or_default();
        let treccani_id = record
            .get("claims")
            .and_then(|c| c.get(&self.config.treccani_property))
            .and_then(Value::as_array)
            .and_then(|claims| {
                claims.iter().find_map(|c| {
                    c.pointer("/mainsnak/datavalue/value").and_then(Value::as_str).map(str::to_string)
                })
            })
            .filter(|v| !v.trim().is_empty())
            .unwrap_or_else(|| TRECCANI_NOT_DETECTED.to_string());
        Ok(EntityDetails {
            qid,
            label,
            description,
            treccani_id,
        })
    }

    /// Fetches the record for `qid`, then links `entity_id` to it. The entity
    /// and qid are checked before any request is made. When the service is
    /// unavailable the link is still made, without a Treccani identifier.
    pub async fn link_entity(
        &self,
        doc: &mut Document,
        entity_id: &str,
        qid: &str,
    ) -> Result<LinkOutcome, ReconcileError> {
        let parsed = parse_qid(qid)?;
        doc.entity(entity_id)
            .ok_or_else(|| AnnotationError::UnknownEntity(entity_id.to_string()))?;
        let details = match self.fetch_details(parsed.as_str()).await {
            Ok(d) => Some(d),
            Err(ReconcileError::Unavailable(reason)) => {
                tracing::warn!(%entity_id, qid = parsed.as_str(), "linking without details: {reason}");
                None
            }
            Err(e) => return Err(e),
        };
        apply_link(doc, entity_id, parsed, details)
    }
}

/// Sets the link on the entity, taking the Treccani identifier from
/// `details` when present.
pub fn apply_link(
    doc: &mut Document,
    entity_id: &str,
    qid: Qid,
    details: Option<EntityDetails>,
) -> Result<LinkOutcome, ReconcileError> {
    let treccani = details.as_ref().map(|d| d.treccani_id.clone());
    let entity = doc.set_wikidata_link(entity_id, qid, treccani)?;
    Ok(LinkOutcome { entity, details })
}

/// Removes the link and the Treccani identifier.
pub fn unlink_entity(doc: &mut Document, entity_id: &str) -> Result<Entity, ReconcileError> {
    Ok(doc.clear_wikidata_link(entity_id)?)
}
