//! RDFa-annotated HTML: rendering and reading back.
//!
//! Each rendered mention is a `span` whose attributes come in a fixed order
//! (`id typeof about class property resource`), and each entity is a group
//! of `meta` elements in the head: `typeof`, `rdfs:label`, then
//! `dcterms:relation` when the entity is linked to Wikidata. Entity state the
//! panel needs but RDFa consumers do not (sort key, aliases, Treccani id,
//! scrap location) follows in `kd:` metas, only when it differs from the
//! default. Trashed entities and their mentions are left out.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use scraper::node::Element;
use scraper::{ElementRef, Html, Node, Selector};
use serde::Serialize;

use crate::error::ParseError;
use crate::model::{
    is_valid_entity_id, parse_mention_number, Category, CategoryKind, Document, Entity, Location,
    Mention, Qid, Span, DEFAULT_RDFA_PROPERTY, WIKIDATA_ENTITY_PREFIX,
};

/// Prefix declarations emitted on the root element.
pub const PREFIXES: &[(&str, &str)] = &[
    ("dcterms", "http://purl.org/dc/terms/"),
    ("foaf", "http://xmlns.com/foaf/0.1/"),
    ("kd", "urn:kwicdesk:vocab#"),
    ("rdfs", "http://www.w3.org/2000/01/rdf-schema#"),
    ("schema", "http://schema.org/"),
];

/// Id of the element wrapping the document text.
pub const TEXT_CONTAINER_ID: &str = "document-text";

const LABEL: &str = "rdfs:label";
const RELATION: &str = "dcterms:relation";
const SORT_KEY: &str = "kd:sortKey";
const TRECCANI: &str = "kd:treccaniId";
const ALIAS: &str = "kd:alias";
const LOCATION: &str = "kd:location";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum ParseWarning {
    /// A span pointed at an entity with no head metadata; the entity was
    /// synthesized from the span.
    DanglingEntity(String),
    /// A span class named no known category; one was synthesized.
    SynthesizedCategory(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedDocument {
    pub document: Document,
    pub warnings: Vec<ParseWarning>,
}

fn escape_text(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            // HTML parsers fold raw CR into LF
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
}

fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("&quot;"),
            c => escape_text(c.encode_utf8(&mut [0; 4]), &mut out),
        }
    }
    out
}

fn meta(out: &mut String, about: &str, attrs: &[(&str, &str)]) {
    out.push_str("<meta about=\"");
    out.push_str(&escape_attr(about));
    out.push('"');
    for (name, value) in attrs {
        let _ = write!(out, " {name}=\"{}\"", escape_attr(value));
    }
    out.push_str(">\n");
}

fn entity_metas(out: &mut String, e: &Entity, category: Option<&Category>) {
    let id = &e.entity_id;
    let rdfa_type = category.map_or("", |c| c.rdfa_type.as_str());
    meta(out, id, &[("typeof", rdfa_type)]);
    meta(out, id, &[("property", LABEL), ("content", &e.label)]);
    if let Some(q) = &e.wikidata_id {
        meta(out, id, &[("property", RELATION), ("resource", &q.iri())]);
    }
    if e.sort_key != e.label {
        meta(out, id, &[("property", SORT_KEY), ("content", &e.sort_key)]);
    }
    if let Some(t) = &e.treccani_id {
        meta(out, id, &[("property", TRECCANI), ("content", t)]);
    }
    for alias in &e.aliases {
        meta(out, id, &[("property", ALIAS), ("content", alias)]);
    }
    if e.location == Location::Scrap {
        meta(out, id, &[("property", LOCATION), ("content", "scrap")]);
    }
}

/// The opening tag of a rendered mention.
pub fn span_open_tag(m: &Mention, category: &Category) -> String {
    format!(
        "<span id=\"{id}\" typeof=\"{ty}\" about=\"#{id}\" class=\"{class}\" property=\"{prop}\" resource=\"{res}\">",
        id = escape_attr(&m.mention_id),
        ty = escape_attr(&category.rdfa_type),
        class = escape_attr(&category.class_attribute()),
        prop = escape_attr(&category.rdfa_property),
        res = escape_attr(&m.entity_id),
    )
}

/// Renders the document as an RDFa-annotated HTML page. Output is a pure
/// function of the document.
pub fn render_rdfa(doc: &Document) -> String {
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html prefix=\"");
    let prefixes: Vec<String> = PREFIXES.iter().map(|(p, iri)| format!("{p}: {iri}")).collect();
    out.push_str(&prefixes.join(" "));
    out.push_str("\">\n<head>\n<meta charset=\"utf-8\">\n<title>");
    escape_text(&doc.doc_id, &mut out);
    out.push_str("</title>\n");
    for e in doc.entities.values().filter(|e| e.location != Location::Trash) {
        entity_metas(&mut out, e, doc.category(&e.category));
    }
    out.push_str("</head>\n<body>\n<div id=\"");
    out.push_str(TEXT_CONTAINER_ID);
    out.push_str("\">");

    let chars: Vec<char> = doc.text.chars().collect();
    let mut pos = 0;
    for m in doc.live_mentions() {
        let Some(category) = doc.category(&m.category) else {
            continue;
        };
        escape_text(&chars[pos..m.span.start].iter().collect::<String>(), &mut out);
        out.push_str(&span_open_tag(m, category));
        escape_text(&chars[m.span.start..m.span.end].iter().collect::<String>(), &mut out);
        out.push_str("</span>");
        pos = m.span.end;
    }
    escape_text(&chars[pos..].iter().collect::<String>(), &mut out);
    out.push_str("</div>\n</body>\n</html>\n");
    out
}

const BLOCK_ELEMENTS: &[&str] = &[
    "address", "article", "aside", "blockquote", "dd", "div", "dl", "dt", "figcaption", "figure",
    "footer", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "li", "main", "nav", "ol", "p",
    "pre", "section", "table", "tr", "ul",
];

const SKIPPED_ELEMENTS: &[&str] = &["head", "script", "style", "template", "noscript", "title"];

struct RawMention {
    mention_id: String,
    number: u64,
    span: Span,
    entity_id: String,
    kind: CategoryKind,
    display_class: String,
    rdfa_type: String,
    rdfa_property: String,
    location: String,
}

struct Walker {
    text: String,
    len: usize,
    /// Set after a block element closes, so the next text starts a new line.
    pending_newline: bool,
    /// Whether whitespace-only text between tags is formatting to drop.
    loose: bool,
    mentions: Vec<RawMention>,
    open: Option<usize>,
    seen_spans: usize,
}

impl Walker {
    fn push(&mut self, s: &str) {
        if s.is_empty() {
            return;
        }
        if self.pending_newline && self.len > 0 && !self.text.ends_with('\n') {
            self.text.push('\n');
            self.len += 1;
        }
        self.pending_newline = false;
        self.text.push_str(s);
        self.len += s.chars().count();
    }

    fn break_line(&mut self) {
        if self.len > 0 {
            self.pending_newline = true;
        }
    }

    fn walk(&mut self, node: ego_tree::NodeRef<'_, Node>) -> Result<(), ParseError> {
        for child in node.children() {
            match child.value() {
                Node::Text(t) => {
                    if self.loose && t.trim().is_empty() && t.contains('\n') {
                        continue;
                    }
                    self.push(t);
                }
                Node::Element(el) => {
                    let name = el.name();
                    if SKIPPED_ELEMENTS.contains(&name) {
                        continue;
                    }
                    if name == "br" {
                        self.push("\n");
                        continue;
                    }
                    let block = BLOCK_ELEMENTS.contains(&name);
                    if block {
                        self.break_line();
                    }
                    if name == "span" && is_mention_span(el) {
                        self.mention(el, child)?;
                    } else {
                        self.walk(child)?;
                    }
                    if block {
                        self.break_line();
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn mention(&mut self, el: &Element, node: ego_tree::NodeRef<'_, Node>) -> Result<(), ParseError> {
        self.seen_spans += 1;
        let location = format!("mention span {} at character {}", self.seen_spans, self.len);
        if self.open.is_some() {
            return Err(ParseError::new(location, "mention spans cannot be nested"));
        }
        let id = el
            .attr("id")
            .ok_or_else(|| ParseError::new(&location, "missing id attribute"))?;
        let number = parse_mention_number(id)
            .ok_or_else(|| ParseError::new(&location, format!("id `{id}` is not of the form mention-N")))?;
        if let Some(about) = el.attr("about") {
            if about.strip_prefix('#') != Some(id) {
                return Err(ParseError::new(&location, format!("about `{about}` does not match id `{id}`")));
            }
        }
        let resource = el
            .attr("resource")
            .ok_or_else(|| ParseError::new(&location, "missing resource attribute"))?;
        if !is_valid_entity_id(resource) {
            return Err(ParseError::new(&location, format!("resource `{resource}` is not an entity id")));
        }
        let classes: Vec<&str> = el.attr("class").unwrap_or("").split_whitespace().collect();
        let (kind, display_class) = match classes.as_slice() {
            [kind, display] => match kind.parse::<CategoryKind>() {
                Ok(kind) => (kind, display.to_string()),
                Err(()) => return Err(ParseError::new(&location, format!("unknown mention kind `{kind}`"))),
            },
            _ => {
                return Err(ParseError::new(
                    &location,
                    "class must be `<kind> <category class>`",
                ))
            }
        };
        let start = self.len;
        self.open = Some(start);
        self.walk(node)?;
        self.open = None;
        if self.len == start {
            return Err(ParseError::new(location, "mention span is empty"));
        }
        self.mentions.push(RawMention {
            mention_id: id.to_string(),
            number,
            span: Span::new(start, self.len),
            entity_id: resource.to_string(),
            kind,
            display_class,
            rdfa_type: el.attr("typeof").unwrap_or_default().to_string(),
            rdfa_property: el.attr("property").unwrap_or(DEFAULT_RDFA_PROPERTY).to_string(),
            location,
        });
        Ok(())
    }
}

fn is_mention_span(el: &Element) -> bool {
    let first_class = el.attr("class").and_then(|c| c.split_whitespace().next());
    matches!(first_class, Some("mention" | "reference"))
        || el.attr("id").is_some_and(|id| id.starts_with(crate::model::MENTION_ID_PREFIX))
}

#[derive(Default)]
struct MetaGroup {
    rdfa_type: Option<String>,
    label: Option<String>,
    wikidata: Option<Qid>,
    sort_key: Option<String>,
    treccani: Option<String>,
    aliases: Vec<String>,
    location: Option<Location>,
}

fn read_metas(html: &Html) -> Result<Vec<(String, MetaGroup)>, ParseError> {
    let selector = Selector::parse("meta[about]").expect("static selector");
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, MetaGroup> = HashMap::new();
    for (i, el) in html.select(&selector).enumerate() {
        let location = format!("head meta {}", i + 1);
        let about = el.value().attr("about").unwrap_or_default().to_string();
        if !is_valid_entity_id(&about) {
            return Err(ParseError::new(location, format!("about `{about}` is not an entity id")));
        }
        if !groups.contains_key(&about) {
            order.push(about.clone());
        }
        let group = groups.entry(about).or_default();
        let attr = |name| el.value().attr(name);
        match attr("property") {
            None => {
                if let Some(t) = attr("typeof") {
                    group.rdfa_type = Some(t.to_string());
                }
            }
            Some(LABEL) => group.label = attr("content").map(str::to_string),
            Some(RELATION) => {
                let iri = attr("resource").unwrap_or_default();
                let qid = iri
                    .strip_prefix(WIKIDATA_ENTITY_PREFIX)
                    .and_then(|q| Qid::parse(q).ok())
                    .ok_or_else(|| ParseError::new(&location, format!("relation `{iri}` is not a Wikidata item")))?;
                group.wikidata = Some(qid);
            }
            Some(SORT_KEY) => group.sort_key = attr("content").map(str::to_string),
            Some(TRECCANI) => group.treccani = attr("content").map(str::to_string),
            Some(ALIAS) => group.aliases.extend(attr("content").map(str::to_string)),
            Some(LOCATION) => {
                let value = attr("content").unwrap_or_default();
                group.location = Some(value.parse().map_err(|()| {
                    ParseError::new(&location, format!("unknown entity location `{value}`"))
                })?);
            }
            Some(_) => {}
        }
    }
    Ok(order
        .into_iter()
        .map(|about| {
            let g = groups.remove(&about).unwrap_or_default();
            (about, g)
        })
        .collect())
}

/// Reads a document back from annotated HTML produced by [`render_rdfa`], or
/// from plain HTML without annotations.
///
/// The text comes from the `#document-text` container when present and from
/// the whole body otherwise; in the latter case block elements start new
/// lines and whitespace-only formatting between tags is dropped.
pub fn parse_rdfa(input: &str) -> Result<ParsedDocument, ParseError> {
    let html = Html::parse_document(input);
    let title_sel = Selector::parse("title").expect("static selector");
    let doc_id = html
        .select(&title_sel)
        .next()
        .map(|t| t.text().collect::<String>().trim().to_string())
        .filter(|t| !t.is_empty())
        .unwrap_or_else(|| "untitled".to_string());

    let container_sel = Selector::parse(&format!("#{TEXT_CONTAINER_ID}")).expect("static selector");
    let body_sel = Selector::parse("body").expect("static selector");
    let (root, loose): (Option<ElementRef<'_>>, bool) = match html.select(&container_sel).next() {
        Some(c) => (Some(c), false),
        None => (html.select(&body_sel).next(), true),
    };

    let mut walker = Walker {
        text: String::new(),
        len: 0,
        pending_newline: false,
        loose,
        mentions: Vec::new(),
        open: None,
        seen_spans: 0,
    };
    if let Some(root) = root {
        walker.walk(*root)?;
    }
    if loose {
        let trimmed = walker.text.trim_end().len();
        let last_end = walker.mentions.last().map_or(0, |m| m.span.end);
        let keep = walker.text.char_indices().nth(last_end).map_or(walker.text.len(), |(b, _)| b);
        walker.text.truncate(trimmed.max(keep));
    }

    let mut warnings = Vec::new();
    let mut categories = Category::defaults();
    let mut mentions = Vec::new();
    let mut mention_category: BTreeMap<String, (String, String)> = BTreeMap::new();
    let mut seen_ids = std::collections::HashSet::new();
    let mut next_mention = 1;

    for raw in walker.mentions {
        if !seen_ids.insert(raw.mention_id.clone()) {
            return Err(ParseError::new(raw.location, format!("duplicate mention id `{}`", raw.mention_id)));
        }
        let category = match categories
            .iter()
            .find(|c| c.kind == raw.kind && c.display_class == raw.display_class)
        {
            Some(c) => c.name.clone(),
            None => {
                let mut c = Category::new(raw.display_class.clone(), raw.kind, raw.display_class.clone(), raw.rdfa_type.clone());
                c.rdfa_property = raw.rdfa_property.clone();
                if categories.iter().any(|x| x.name == c.name) {
                    return Err(ParseError::new(raw.location, format!("class `{}` clashes with a category name", c.name)));
                }
                warnings.push(ParseWarning::SynthesizedCategory(c.name.clone()));
                let name = c.name.clone();
                categories.push(c);
                name
            }
        };
        match mention_category.get(&raw.entity_id) {
            Some((existing, _)) if existing != &category => {
                return Err(ParseError::new(
                    raw.location,
                    format!("entity `{}` used with categories `{existing}` and `{category}`", raw.entity_id),
                ))
            }
            Some(_) => {}
            None => {
                mention_category.insert(raw.entity_id.clone(), (category.clone(), raw.location.clone()));
            }
        }
        next_mention = next_mention.max(raw.number + 1);
        mentions.push(Mention {
            mention_id: raw.mention_id,
            span: raw.span,
            entity_id: raw.entity_id,
            category,
            kind: raw.kind,
        });
    }

    let mut entities = BTreeMap::new();
    for (about, g) in read_metas(&html)? {
        let category = match mention_category.get(&about) {
            Some((c, _)) => c.clone(),
            None => categories
                .iter()
                .find(|c| Some(&c.rdfa_type) == g.rdfa_type.as_ref())
                .map(|c| c.name.clone())
                .ok_or_else(|| {
                    ParseError::new(format!("entity {about}"), "cannot determine the entity category")
                })?,
        };
        let label = g.label.unwrap_or_else(|| about[1..].to_string());
        let mut e = Entity::new(about.clone(), label, category);
        if let Some(k) = g.sort_key {
            e.sort_key = k;
        }
        e.wikidata_id = g.wikidata;
        e.treccani_id = g.treccani;
        e.aliases = g.aliases;
        if let Some(l) = g.location {
            e.location = l;
        }
        entities.insert(about, e);
    }
    for (id, (category, _)) in &mention_category {
        if !entities.contains_key(id) {
            warnings.push(ParseWarning::DanglingEntity(id.clone()));
            entities.insert(id.clone(), Entity::new(id.clone(), id[1..].to_string(), category.clone()));
        }
    }

    let mut document = Document::with_categories(doc_id, walker.text, categories)
        .map_err(|e| ParseError::new("document text", e.to_string()))?;
    document.mentions = mentions;
    document.entities = entities;
    document.next_mention = next_mention;
    if let Some(problem) = document.invariant_violations().into_iter().next() {
        return Err(ParseError::new("document", problem));
    }
    Ok(ParsedDocument { document, warnings })
}
