//! Documents, mentions, entities and categories.
//!
//! A [`Document`] owns an immutable text body and stand-off annotations over
//! it. Offsets count Unicode scalar values (Rust `char`s), never bytes, so a
//! client working with code points and the engine always agree.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::AnnotationError;

/// Prefix of every mention identifier.
pub const MENTION_ID_PREFIX: &str = "mention-";

/// Value stored as the Treccani identifier when the linked Wikidata record
/// carries no Treccani claim.
pub const TRECCANI_NOT_DETECTED: &str = "Not Detected";

/// Half-open character range `[start, end)` in Unicode scalar values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Whether the two ranges share at least one character.
    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// Whether a category marks mentions of named things or references to texts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CategoryKind {
    Mention,
    Reference,
}

impl CategoryKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CategoryKind::Mention => "mention",
            CategoryKind::Reference => "reference",
        }
    }
}

impl FromStr for CategoryKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mention" => Ok(CategoryKind::Mention),
            "reference" => Ok(CategoryKind::Reference),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Category {
    pub name: String,
    pub kind: CategoryKind,
    /// Second token of the serialized `class` attribute, e.g. `organization`.
    pub display_class: String,
    /// Value of the `typeof` attribute (a CURIE or absolute IRI).
    pub rdfa_type: String,
    /// Value of the span `property` attribute.
    pub rdfa_property: String,
}

pub const DEFAULT_RDFA_PROPERTY: &str = "dcterms:references";

impl Category {
    pub fn new(
        name: impl Into<String>,
        kind: CategoryKind,
        display_class: impl Into<String>,
        rdfa_type: impl Into<String>,
    ) -> Self {
        Category {
            name: name.into(),
            kind,
            display_class: display_class.into(),
            rdfa_type: rdfa_type.into(),
            rdfa_property: DEFAULT_RDFA_PROPERTY.to_string(),
        }
    }

    /// The five categories every new document starts with.
    pub fn defaults() -> Vec<Category> {
        vec![
            Category::new("People", CategoryKind::Mention, "person", "foaf:Person"),
            Category::new("Places", CategoryKind::Mention, "place", "dcterms:Location"),
            Category::new(
                "Organizations",
                CategoryKind::Mention,
                "organization",
                "foaf:Organization",
            ),
            Category::new(
                "Bibliographic references",
                CategoryKind::Reference,
                "bibref",
                "dcterms:BibliographicResource",
            ),
            Category::new("Quotations", CategoryKind::Reference, "quotation", "schema:Quotation"),
        ]
    }

    /// The serialized `class` attribute value, e.g. `mention organization`.
    pub fn class_attribute(&self) -> String {
        format!("{} {}", self.kind.as_str(), self.display_class)
    }
}

/// Where an entity currently lives in the entity panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Active,
    Scrap,
    Trash,
}

impl Location {
    pub fn as_str(&self) -> &'static str {
        match self {
            Location::Active => "active",
            Location::Scrap => "scrap",
            Location::Trash => "trash",
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Location {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "active" => Ok(Location::Active),
            "scrap" => Ok(Location::Scrap),
            "trash" => Ok(Location::Trash),
            _ => Err(()),
        }
    }
}

/// A Wikidata item identifier such as `Q815348`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Qid(String);

pub const WIKIDATA_ENTITY_PREFIX: &str = "http://www.wikidata.org/entity/";

impl Qid {
    pub fn parse(s: &str) -> Result<Qid, AnnotationError> {
        let digits = s
            .strip_prefix('Q')
            .ok_or_else(|| AnnotationError::InvalidQid(s.to_string()))?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(AnnotationError::InvalidQid(s.to_string()));
        }
        Ok(Qid(s.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn iri(&self) -> String {
        format!("{WIKIDATA_ENTITY_PREFIX}{}", self.0)
    }
}

impl fmt::Display for Qid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Qid {
    type Err = AnnotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Qid::parse(s)
    }
}

impl TryFrom<String> for Qid {
    type Error = AnnotationError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        Qid::parse(&s)
    }
}

impl From<Qid> for String {
    fn from(q: Qid) -> String {
        q.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub entity_id: String,
    pub label: String,
    pub sort_key: String,
    pub category: String,
    pub wikidata_id: Option<Qid>,
    pub treccani_id: Option<String>,
    pub location: Location,
    #[serde(default)]
    pub aliases: Vec<String>,
}

impl Entity {
    pub fn new(entity_id: String, label: String, category: String) -> Self {
        Entity {
            entity_id,
            sort_key: label.clone(),
            label,
            category,
            wikidata_id: None,
            treccani_id: None,
            location: Location::Active,
            aliases: Vec::new(),
        }
    }

    pub fn is_active(&self) -> bool {
        self.location == Location::Active
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    pub mention_id: String,
    pub span: Span,
    pub entity_id: String,
    pub category: String,
    pub kind: CategoryKind,
}

impl Mention {
    /// The numeric part of `mention-N`.
    pub fn number(&self) -> Option<u64> {
        parse_mention_number(&self.mention_id)
    }
}

pub(crate) fn parse_mention_number(id: &str) -> Option<u64> {
    let digits = id.strip_prefix(MENTION_ID_PREFIX)?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|n| *n > 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum DocumentStatus {
    #[default]
    ToBeStarted,
    InProgress,
    Finished,
}

impl DocumentStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            DocumentStatus::ToBeStarted => "ToBeStarted",
            DocumentStatus::InProgress => "InProgress",
            DocumentStatus::Finished => "Finished",
        }
    }
}

impl fmt::Display for DocumentStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DocumentStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ToBeStarted" => Ok(DocumentStatus::ToBeStarted),
            "InProgress" => Ok(DocumentStatus::InProgress),
            "Finished" => Ok(DocumentStatus::Finished),
            other => Err(format!("unknown document status `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub text: String,
    /// Sorted by span start.
    pub mentions: Vec<Mention>,
    pub entities: BTreeMap<String, Entity>,
    pub categories: Vec<Category>,
    pub status: DocumentStatus,
    pub metadata_id: Option<String>,
    /// Next `mention-N` number; never decreases, so purged ids are not reused.
    pub next_mention: u64,
}

impl Document {
    /// A fresh document with the default category set.
    pub fn new(doc_id: impl Into<String>, text: impl Into<String>) -> Result<Self, AnnotationError> {
        Self::with_categories(doc_id, text, Category::defaults())
    }

    pub fn with_categories(
        doc_id: impl Into<String>,
        text: impl Into<String>,
        categories: Vec<Category>,
    ) -> Result<Self, AnnotationError> {
        let text = text.into();
        if let Some(pos) = text.chars().position(|c| c == '\0') {
            return Err(AnnotationError::InvalidText(pos));
        }
        Ok(Document {
            doc_id: doc_id.into(),
            text,
            mentions: Vec::new(),
            entities: BTreeMap::new(),
            categories,
            status: DocumentStatus::ToBeStarted,
            metadata_id: None,
            next_mention: 1,
        })
    }

    /// Length of the text in characters.
    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }

    /// The text covered by `span`; out-of-range parts are clipped.
    pub fn slice(&self, span: Span) -> String {
        self.text
            .chars()
            .skip(span.start)
            .take(span.len())
            .collect()
    }

    pub fn category(&self, name: &str) -> Option<&Category> {
        self.categories.iter().find(|c| c.name == name)
    }

    pub fn entity(&self, entity_id: &str) -> Option<&Entity> {
        self.entities.get(entity_id)
    }

    pub fn mention(&self, mention_id: &str) -> Option<&Mention> {
        self.mentions.iter().find(|m| m.mention_id == mention_id)
    }

    /// Mentions bound to `entity_id`, in text order.
    pub fn mentions_of<'a>(&'a self, entity_id: &'a str) -> impl Iterator<Item = &'a Mention> + 'a {
        self.mentions.iter().filter(move |m| m.entity_id == entity_id)
    }

    pub fn occurrences(&self, entity_id: &str) -> usize {
        self.mentions_of(entity_id).count()
    }

    /// A mention is suppressed while its entity sits in the trash: its span is
    /// kept for a later restore but it is not rendered.
    pub fn is_suppressed(&self, mention: &Mention) -> bool {
        self.entities
            .get(&mention.entity_id)
            .is_none_or(|e| e.location == Location::Trash)
    }

    pub fn live_mentions(&self) -> impl Iterator<Item = &Mention> {
        self.mentions.iter().filter(|m| !self.is_suppressed(m))
    }

    /// Every broken model invariant, as human-readable messages. Empty when the
    /// document is consistent.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let len = self.char_len();

        let mut names = std::collections::HashSet::new();
        for c in &self.categories {
            if !names.insert(c.name.as_str()) {
                out.push(format!("duplicate category name `{}`", c.name));
            }
        }

        let mut ids = std::collections::HashSet::new();
        for (i, m) in self.mentions.iter().enumerate() {
            if m.span.start >= m.span.end {
                out.push(format!("{}: empty span {}", m.mention_id, m.span));
            }
            if m.span.end > len {
                out.push(format!("{}: span {} beyond text length {len}", m.mention_id, m.span));
            }
            match m.number() {
                None => out.push(format!("{}: malformed mention id", m.mention_id)),
                Some(n) if n >= self.next_mention => {
                    out.push(format!("{}: id not below counter {}", m.mention_id, self.next_mention))
                }
                Some(_) => {}
            }
            if !ids.insert(m.mention_id.as_str()) {
                out.push(format!("{}: duplicate mention id", m.mention_id));
            }
            if let Some(next) = self.mentions.get(i + 1) {
                if m.span.end > next.span.start {
                    out.push(format!(
                        "{} {} overlaps or is out of order with {} {}",
                        m.mention_id, m.span, next.mention_id, next.span
                    ));
                }
            }
            match self.entities.get(&m.entity_id) {
                None => out.push(format!("{}: dangling entity {}", m.mention_id, m.entity_id)),
                Some(e) => {
                    if e.category != m.category {
                        out.push(format!(
                            "{}: category `{}` differs from entity category `{}`",
                            m.mention_id, m.category, e.category
                        ));
                    }
                }
            }
            match self.category(&m.category) {
                None => out.push(format!("{}: unknown category `{}`", m.mention_id, m.category)),
                Some(c) if c.kind != m.kind => {
                    out.push(format!("{}: kind differs from category kind", m.mention_id))
                }
                Some(_) => {}
            }
        }

        for (key, e) in &self.entities {
            if key != &e.entity_id {
                out.push(format!("entity keyed `{key}` has id `{}`", e.entity_id));
            }
            if !is_valid_entity_id(&e.entity_id) {
                out.push(format!("malformed entity id `{}`", e.entity_id));
            }
            if e.wikidata_id.is_none() && e.treccani_id.is_some() {
                out.push(format!("{}: Treccani id without Wikidata link", e.entity_id));
            }
            if self.category(&e.category).is_none() {
                out.push(format!("{}: unknown category `{}`", e.entity_id, e.category));
            }
        }
        out
    }

    pub(crate) fn take_mention_id(&mut self) -> String {
        let id = format!("{MENTION_ID_PREFIX}{}", self.next_mention);
        self.next_mention += 1;
        id
    }
}

pub(crate) fn is_valid_entity_id(id: &str) -> bool {
    id.len() > 1 && id.starts_with('#') && !id.chars().any(char::is_whitespace)
}

/// Derives a stable entity identifier from a label: `#` followed by the
/// whitespace-separated words of the label, each with its first letter
/// upper-cased.
///
/// ```
/// use kwicdesk_core::model::entity_id_from_label;
/// assert_eq!(entity_id_from_label("Democrazia Cristiana").unwrap(), "#DemocraziaCristiana");
/// ```
pub fn entity_id_from_label(label: &str) -> Result<String, AnnotationError> {
    let mut id = String::from("#");
    for word in label.split_whitespace() {
        let mut chars = word.chars();
        if let Some(first) = chars.next() {
            id.extend(first.to_uppercase());
            id.push_str(chars.as_str());
        }
    }
    if id.len() == 1 {
        return Err(AnnotationError::InvalidLabel);
    }
    Ok(id)
}

/// A set of documents keyed by id.
#[derive(Debug, Default, Clone)]
pub struct Corpus {
    documents: BTreeMap<String, Document>,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn new_document(&mut self, doc_id: &str, text: &str) -> Result<&mut Document, AnnotationError> {
        if self.documents.contains_key(doc_id) {
            return Err(AnnotationError::DuplicateDocument(doc_id.to_string()));
        }
        let doc = Document::new(doc_id, text)?;
        Ok(self.documents.entry(doc_id.to_string()).or_insert(doc))
    }

    pub fn insert(&mut self, doc: Document) -> Result<(), AnnotationError> {
        if self.documents.contains_key(&doc.doc_id) {
            return Err(AnnotationError::DuplicateDocument(doc.doc_id));
        }
        self.documents.insert(doc.doc_id.clone(), doc);
        Ok(())
    }

    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.documents.get(doc_id)
    }

    pub fn get_mut(&mut self, doc_id: &str) -> Option<&mut Document> {
        self.documents.get_mut(doc_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Document> {
        self.documents.values()
    }
}
