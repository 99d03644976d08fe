//! TEI P5 export.

use std::borrow::Cow;
use std::collections::BTreeMap;

use quick_xml::escape::{escape, partial_escape};

use crate::metadata::MetadataRecord;
use crate::model::Document;

pub const TEI_NAMESPACE: &str = "http://www.tei-c.org/ns/1.0";

/// Which TEI element wraps mentions of each category. Categories without an
/// entry fall back to `<rs type="...">`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TeiMapping {
    pub elements: BTreeMap<String, String>,
}

impl Default for TeiMapping {
    fn default() -> Self {
        let elements = [
            ("People", "persName"),
            ("Places", "placeName"),
            ("Organizations", "orgName"),
            ("Bibliographic references", "bibl"),
            ("Quotations", "quote"),
        ]
        .into_iter()
        .map(|(c, e)| (c.to_string(), e.to_string()))
        .collect();
        TeiMapping { elements }
    }
}

fn is_xml_char(c: char) -> bool {
    matches!(c, '\t' | '\n' | '\r' | '\u{20}'..='\u{D7FF}' | '\u{E000}'..='\u{FFFD}' | '\u{10000}'..='\u{10FFFF}')
}

/// Characters XML 1.0 cannot carry become U+FFFD.
fn xml_clean(s: &str) -> Cow<'_, str> {
    if s.chars().all(is_xml_char) {
        Cow::Borrowed(s)
    } else {
        Cow::Owned(s.chars().map(|c| if is_xml_char(c) { c } else { '\u{FFFD}' }).collect())
    }
}

fn text(s: &str) -> String {
    partial_escape(xml_clean(s).as_ref()).into_owned()
}

fn attr(s: &str) -> String {
    escape(xml_clean(s).as_ref()).into_owned()
}

fn element(out: &mut String, name: &str, content: &str) {
    if content.is_empty() {
        out.push_str(&format!("<{name}/>"));
    } else {
        out.push_str(&format!("<{name}>{}</{name}>", text(content)));
    }
}

fn header(out: &mut String, doc: &Document, md: &MetadataRecord) {
    out.push_str("<teiHeader>\n<fileDesc>\n<titleStmt>\n");
    element(out, "title", &doc.doc_id);
    out.push('\n');
    out.push_str("<author>");
    element(out, "roleName", &md.author_role);
    out.push_str("</author>\n<respStmt><resp>curator</resp>");
    element(out, "name", &md.researcher_curator);
    out.push_str("</respStmt>\n</titleStmt>\n<publicationStmt>\n");
    out.push_str(&format!(
        "<idno type=\"document-number\">{}</idno>\n",
        text(&md.document_number)
    ));
    out.push_str("</publicationStmt>\n<notesStmt>\n");
    let status = md.publication_status.map_or("", |s| s.as_str());
    out.push_str(&format!("<note type=\"publication-status\">{status}</note>\n"));
    out.push_str("<note type=\"additional\">");
    out.push_str(&text(&md.additional_notes));
    out.push_str("</note>\n</notesStmt>\n<sourceDesc>\n");
    if md.provenance.is_empty() {
        out.push_str("<bibl/>\n");
    }
    for p in &md.provenance {
        element(out, "bibl", p);
        out.push('\n');
    }
    out.push_str("</sourceDesc>\n</fileDesc>\n<profileDesc>\n<creation>");
    match md.event_date() {
        Some(d) => out.push_str(&format!("<date when=\"{}\">{}</date>", d.iso(), text(&md.event_date))),
        None => out.push_str("<date/>"),
    }
    element(out, "placeName", &md.event_place);
    out.push_str("</creation>\n<abstract><p>");
    out.push_str(&text(&md.abstract_text));
    out.push_str("</p></abstract>\n<textClass>\n");
    for (kind, terms) in [("document-type", &md.document_type), ("document-subject", &md.document_subject)] {
        out.push_str(&format!("<keywords type=\"{kind}\">"));
        if terms.is_empty() {
            out.push_str("<term/>");
        }
        for t in terms {
            element(out, "term", t);
        }
        out.push_str("</keywords>\n");
    }
    out.push_str("</textClass>\n</profileDesc>\n");
    out.push_str(&format!("<revisionDesc status=\"{}\"/>\n", doc.status));
    out.push_str("</teiHeader>\n");
}

fn body_text(out: &mut String, s: &str) {
    for (i, line) in s.split('\n').enumerate() {
        if i > 0 {
            out.push_str("<lb/>\n");
        }
        out.push_str(&text(line));
    }
}

/// Exports the document as TEI with the default category mapping.
pub fn export_tei(doc: &Document, metadata: &MetadataRecord) -> String {
    export_tei_with(doc, metadata, &TeiMapping::default())
}

pub fn export_tei_with(doc: &Document, metadata: &MetadataRecord, mapping: &TeiMapping) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!("<TEI xmlns=\"{TEI_NAMESPACE}\">\n"));
    header(&mut out, doc, metadata);
    out.push_str("<text>\n<body>\n<div>\n<p>");

    let chars: Vec<char> = doc.text.chars().collect();
    let mut pos = 0;
    for m in doc.live_mentions() {
        body_text(&mut out, &chars[pos..m.span.start].iter().collect::<String>());
        let entity = &doc.entities[&m.entity_id];
        let mut refs = m.entity_id.clone();
        if let Some(q) = &entity.wikidata_id {
            refs.push(' ');
            refs.push_str(&q.iri());
        }
        let (name, type_attr) = match mapping.elements.get(&m.category) {
            Some(e) => (e.clone(), String::new()),
            None => {
                let class = doc.category(&m.category).map_or(m.category.as_str(), |c| c.display_class.as_str());
                ("rs".to_string(), format!(" type=\"{}\"", attr(class)))
            }
        };
        out.push_str(&format!("<{name}{type_attr} ref=\"{}\">", attr(&refs)));
        body_text(&mut out, &chars[m.span.start..m.span.end].iter().collect::<String>());
        out.push_str(&format!("</{name}>"));
        pos = m.span.end;
    }
    body_text(&mut out, &chars[pos..].iter().collect::<String>());
    out.push_str("</p>\n</div>\n</body>\n</text>\n</TEI>\n");
    out
}
