//! Entity-list export and import, for reusing curated authority lists across
//! documents.

use serde::{Deserialize, Serialize};

use crate::error::ImportError;
use crate::model::{is_valid_entity_id, Document, Entity, Location, Qid};

pub const FORMAT_NAME: &str = "kwicdesk-entities";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntityList {
    pub format: String,
    pub version: u32,
    pub entities: Vec<EntityRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntityRecord {
    pub id: String,
    pub label: String,
    pub sort_key: String,
    pub category: String,
    pub wikidata_id: Option<Qid>,
    pub treccani_id: Option<String>,
    #[serde(default)]
    pub aliases: Vec<String>,
    #[serde(default = "active")]
    pub location: Location,
}

fn active() -> Location {
    Location::Active
}

impl From<&Entity> for EntityRecord {
    fn from(e: &Entity) -> Self {
        EntityRecord {
            id: e.entity_id.clone(),
            label: e.label.clone(),
            sort_key: e.sort_key.clone(),
            category: e.category.clone(),
            wikidata_id: e.wikidata_id.clone(),
            treccani_id: e.treccani_id.clone(),
            aliases: e.aliases.clone(),
            location: e.location,
        }
    }
}

pub fn export_entities(doc: &Document) -> String {
    let list = EntityList {
        format: FORMAT_NAME.to_string(),
        version: FORMAT_VERSION,
        entities: doc.entities.values().map(EntityRecord::from).collect(),
    };
    serde_json::to_string_pretty(&list).expect("entity list serializes")
}

fn check(list: &EntityList, doc: &Document) -> Result<(), ImportError> {
    let schema = |msg: String| Err(ImportError::Schema(msg));
    if list.format != FORMAT_NAME {
        return schema(format!("format is `{}`, expected `{FORMAT_NAME}`", list.format));
    }
    if list.version != FORMAT_VERSION {
        return schema(format!("unsupported version {}", list.version));
    }
    let mut seen = std::collections::HashSet::new();
    for r in &list.entities {
        if !is_valid_entity_id(&r.id) {
            return schema(format!("`{}` is not an entity id", r.id));
        }
        if !seen.insert(&r.id) {
            return schema(format!("entity `{}` listed twice", r.id));
        }
        if r.label.trim().is_empty() {
            return schema(format!("entity `{}` has an empty label", r.id));
        }
        if r.wikidata_id.is_none() && r.treccani_id.is_some() {
            return schema(format!("entity `{}` has a Treccani id but no Wikidata link", r.id));
        }
        if doc.category(&r.category).is_none() {
            return Err(ImportError::UnknownCategory(r.category.clone()));
        }
    }
    Ok(())
}

/// Merges an exported entity list into `doc`, matching by entity id.
///
/// Imported fields win over existing ones, aliases are unioned, and an
/// existing entity keeps its location. Nothing changes unless the whole
/// payload is valid. Returns the number of entities imported.
pub fn import_entities(doc: &mut Document, payload: &str) -> Result<usize, ImportError> {
    let list: EntityList =
        serde_json::from_str(payload).map_err(|e| ImportError::Schema(e.to_string()))?;
    check(&list, doc)?;
    let count = list.entities.len();
    for r in list.entities {
        let kind = doc.category(&r.category).map(|c| c.kind).expect("checked");
        match doc.entities.get_mut(&r.id) {
            Some(e) => {
                e.label = r.label;
                e.sort_key = r.sort_key;
                e.wikidata_id = r.wikidata_id;
                e.treccani_id = r.treccani_id;
                for a in r.aliases {
                    if !e.aliases.contains(&a) {
                        e.aliases.push(a);
                    }
                }
                if e.category != r.category {
                    e.category = r.category.clone();
                    for m in doc.mentions.iter_mut().filter(|m| m.entity_id == r.id) {
                        m.category = r.category.clone();
                        m.kind = kind;
                    }
                }
            }
            None => {
                let e = Entity {
                    entity_id: r.id.clone(),
                    label: r.label,
                    sort_key: r.sort_key,
                    category: r.category,
                    wikidata_id: r.wikidata_id,
                    treccani_id: r.treccani_id,
                    location: r.location,
                    aliases: r.aliases,
                };
                doc.entities.insert(r.id, e);
            }
        }
    }
    Ok(count)
}
