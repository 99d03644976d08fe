//! KWIC, KWOC and KWAC index entries for the mentions of an entity.
//!
//! Context never crosses a line break: the containing newline-delimited line
//! plays the role a title plays in classic keyword indexes. Within the line,
//! the left and right contexts are windows of at most `window_words` words.
//! A word is a whitespace-delimited token that still contains an
//! alphanumeric character once edge punctuation is stripped. Contexts are
//! verbatim slices of the line, so punctuation inside the window survives.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::AnnotationError;
use crate::model::{Document, Entity, Location, Mention};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Style {
    #[default]
    Kwic,
    Kwoc,
    Kwac,
}

impl Style {
    pub const ALL: [Style; 3] = [Style::Kwic, Style::Kwoc, Style::Kwac];
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Style::Kwic => "KWIC",
            Style::Kwoc => "KWOC",
            Style::Kwac => "KWAC",
        })
    }
}

impl FromStr for Style {
    type Err = AnnotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "KWIC" => Ok(Style::Kwic),
            "KWOC" => Ok(Style::Kwoc),
            "KWAC" => Ok(Style::Kwac),
            _ => Err(AnnotationError::InvalidConfig(format!("unknown style `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortOrder {
    /// Alphabetical by keyword, then right context, then position.
    #[default]
    KeywordThenRight,
    Position,
}

impl FromStr for SortOrder {
    type Err = AnnotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "keyword_then_right" | "alphabetical" => Ok(SortOrder::KeywordThenRight),
            "position" => Ok(SortOrder::Position),
            _ => Err(AnnotationError::InvalidConfig(format!("unknown sort order `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConcordanceConfig {
    pub style: Style,
    /// Must be at least 1. `usize::MAX` means "the whole line".
    pub window_words: usize,
    pub sort: SortOrder,
    pub case_fold_sort: bool,
    pub kwoc_separator: String,
    pub kwac_separator: String,
}

pub const DEFAULT_WINDOW_WORDS: usize = 5;

impl Default for ConcordanceConfig {
    fn default() -> Self {
        ConcordanceConfig {
            style: Style::Kwic,
            window_words: DEFAULT_WINDOW_WORDS,
            sort: SortOrder::KeywordThenRight,
            case_fold_sort: true,
            kwoc_separator: " — ".to_string(),
            kwac_separator: " / ".to_string(),
        }
    }
}

impl ConcordanceConfig {
    pub fn with_style(style: Style) -> Self {
        ConcordanceConfig {
            style,
            ..Default::default()
        }
    }

    pub fn window(mut self, words: usize) -> Self {
        self.window_words = words;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcordanceEntry {
    pub mention_id: String,
    pub keyword: String,
    pub left_context: String,
    pub right_context: String,
    /// The whole containing line.
    pub line: String,
    pub style: Style,
    /// Character offset of the keyword in the document.
    pub position: usize,
    /// The entry rendered in its style; KWIC uses tabs around the keyword.
    pub text: String,
}

/// One row of an entity-panel tab.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntitySummary {
    pub entity: Entity,
    pub occurrences: usize,
    pub wikidata_linked: bool,
}

/// Whether a whitespace-delimited token counts as a word.
pub fn is_word_token(token: &str) -> bool {
    token.chars().any(char::is_alphanumeric)
}

/// Words of `s` with edge punctuation removed, in order.
pub fn words(s: &str) -> Vec<&str> {
    s.split_whitespace()
        .filter(|t| is_word_token(t))
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()))
        .collect()
}

/// Char ranges of whitespace-delimited tokens in `chars`.
fn tokens(chars: &[char]) -> Vec<(usize, usize, bool)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        let is_word = chars[start..i].iter().any(|c| c.is_alphanumeric());
        out.push((start, i, is_word));
    }
    out
}

fn left_window(part: &[char], window: usize) -> String {
    let mut seen = 0;
    let mut from = 0;
    for (start, _, is_word) in tokens(part).into_iter().rev() {
        if is_word {
            seen += 1;
            if seen == window {
                from = start;
                break;
            }
        }
    }
    part[from..].iter().collect::<String>().trim().to_string()
}

fn right_window(part: &[char], window: usize) -> String {
    let mut seen = 0;
    let mut to = part.len();
    for (_, end, is_word) in tokens(part) {
        if is_word {
            seen += 1;
            if seen == window {
                to = end;
                break;
            }
        }
    }
    part[..to].iter().collect::<String>().trim().to_string()
}

/// Renders the entry body for `style` from its parts.
pub fn render_entry(
    style: Style,
    keyword: &str,
    left: &str,
    right: &str,
    line: &str,
    cfg: &ConcordanceConfig,
) -> String {
    match style {
        Style::Kwic => format!("{left}\t{keyword}\t{right}"),
        Style::Kwoc => format!("{keyword}{}{}", cfg.kwoc_separator, line.trim()),
        Style::Kwac => {
            let mut s = keyword.to_string();
            if !right.is_empty() {
                s.push(' ');
                s.push_str(right);
            }
            if !left.is_empty() {
                s.push_str(&cfg.kwac_separator);
                s.push_str(left);
            }
            s
        }
    }
}

fn entry_for(chars: &[char], mention: &Mention, cfg: &ConcordanceConfig) -> ConcordanceEntry {
    let span = mention.span;
    let line_start = chars[..span.start]
        .iter()
        .rposition(|&c| c == '\n')
        .map_or(0, |i| i + 1);
    let line_end = chars[span.end..]
        .iter()
        .position(|&c| c == '\n')
        .map_or(chars.len(), |i| span.end + i);
    let keyword: String = chars[span.start..span.end].iter().collect();
    let left = left_window(&chars[line_start..span.start], cfg.window_words);
    let right = right_window(&chars[span.end..line_end], cfg.window_words);
    let line: String = chars[line_start..line_end].iter().collect();
    let text = render_entry(cfg.style, &keyword, &left, &right, &line, cfg);
    ConcordanceEntry {
        mention_id: mention.mention_id.clone(),
        keyword,
        left_context: left,
        right_context: right,
        line,
        style: cfg.style,
        position: span.start,
        text,
    }
}

fn compare(a: &ConcordanceEntry, b: &ConcordanceEntry, cfg: &ConcordanceConfig) -> Ordering {
    match cfg.sort {
        SortOrder::Position => a.position.cmp(&b.position),
        SortOrder::KeywordThenRight => {
            let key = |e: &ConcordanceEntry| {
                if cfg.case_fold_sort {
                    (e.keyword.to_lowercase(), e.right_context.to_lowercase())
                } else {
                    (e.keyword.clone(), e.right_context.clone())
                }
            };
            key(a).cmp(&key(b)).then(a.position.cmp(&b.position))
        }
    }
}

/// The concordance of one entity: one entry per rendered mention, sorted as
/// configured. A trashed entity has no rendered mentions and yields nothing.
pub fn build_index(
    doc: &Document,
    entity_id: &str,
    cfg: &ConcordanceConfig,
) -> Result<Vec<ConcordanceEntry>, AnnotationError> {
    if cfg.window_words == 0 {
        return Err(AnnotationError::InvalidConfig("window_words must be at least 1".into()));
    }
    let entity = doc
        .entity(entity_id)
        .ok_or_else(|| AnnotationError::UnknownEntity(entity_id.to_string()))?;
    if entity.location == Location::Trash {
        return Ok(Vec::new());
    }
    let chars: Vec<char> = doc.text.chars().collect();
    let mut entries: Vec<ConcordanceEntry> = doc
        .mentions_of(entity_id)
        .map(|m| entry_for(&chars, m, cfg))
        .collect();
    entries.sort_by(|a, b| compare(a, b, cfg));
    Ok(entries)
}

/// Active entities of a category, ordered case-insensitively by sort key.
pub fn list_entities(doc: &Document, category: &str) -> Result<Vec<EntitySummary>, AnnotationError> {
    if doc.category(category).is_none() {
        return Err(AnnotationError::UnknownCategory(category.to_string()));
    }
    let mut out: Vec<EntitySummary> = doc
        .entities
        .values()
        .filter(|e| e.is_active() && e.category == category)
        .map(|e| EntitySummary {
            occurrences: doc.occurrences(&e.entity_id),
            wikidata_linked: e.wikidata_id.is_some(),
            entity: e.clone(),
        })
        .collect();
    out.sort_by(|a, b| {
        a.entity
            .sort_key
            .to_lowercase()
            .cmp(&b.entity.sort_key.to_lowercase())
            .then_with(|| a.entity.entity_id.cmp(&b.entity.entity_id))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Qid, Span};

    const TITLE: &str = "Design of information systems for digital libraries";

    fn title_doc() -> Document {
        let mut d = Document::new("t", TITLE).unwrap();
        d.mark_selection(Span::new(10, 21), "Quotations").unwrap();
        d
    }

    fn only(d: &Document, cfg: ConcordanceConfig) -> ConcordanceEntry {
        let id = d.mentions[0].entity_id.clone();
        build_index(d, &id, &cfg).unwrap().remove(0)
    }

    #[test]
    fn kwic_window_of_two() {
        let e = only(&title_doc(), ConcordanceConfig::default().window(2));
        assert_eq!(e.keyword, "information");
        assert_eq!(e.left_context, "Design of");
        assert_eq!(e.right_context, "systems for");
        assert_eq!(e.text, "Design of\tinformation\tsystems for");
    }

    #[test]
    fn keyword_at_start_has_no_left_context() {
        let mut d = Document::new("t", TITLE).unwrap();
        d.mark_selection(Span::new(0, 6), "Quotations").unwrap();
        let e = only(&d, ConcordanceConfig::default());
        assert_eq!(e.left_context, "");
    }

    #[test]
    fn kwoc_and_kwac() {
        let d = title_doc();
        let e = only(&d, ConcordanceConfig::with_style(Style::Kwoc));
        assert_eq!(
            e.text,
            "information — Design of information systems for digital libraries"
        );
        let e = only(&d, ConcordanceConfig::with_style(Style::Kwac));
        assert_eq!(e.text, "information systems for digital libraries / Design of");
    }

    #[test]
    fn context_stops_at_line_break() {
        let mut d = Document::new("t", "prima riga\nla DC vince\nultima").unwrap();
        d.mark_selection(Span::new(14, 16), "Organizations").unwrap();
        let e = only(&d, ConcordanceConfig::default());
        assert_eq!((e.left_context.as_str(), e.right_context.as_str()), ("la", "vince"));
        assert_eq!(e.line, "la DC vince");
    }

    #[test]
    fn punctuation_does_not_count_as_words() {
        let mut d = Document::new("t", "a b — c, DC (d) e f").unwrap();
        d.mark_selection(Span::new(9, 11), "Organizations").unwrap();
        let e = only(&d, ConcordanceConfig::default().window(2));
        assert_eq!(e.left_context, "b — c,");
        assert_eq!(e.right_context, "(d) e");
    }

    #[test]
    fn entries_sort_alphabetically_then_by_position() {
        let mut d = Document::new("t", "DC zeta. dc alfa. DC alfa.").unwrap();
        d.mark_selection(Span::new(0, 2), "Organizations").unwrap();
        let (m, _) = d.mark_selection(Span::new(9, 11), "Organizations").unwrap();
        d.move_mention(&m.mention_id, "#DC").unwrap();
        d.mark_selection(Span::new(18, 20), "Organizations").unwrap();
        let positions: Vec<_> = build_index(&d, "#DC", &ConcordanceConfig::default())
            .unwrap()
            .iter()
            .map(|e| e.position)
            .collect();
        assert_eq!(positions, [18, 9, 0]);
        let cfg = ConcordanceConfig {
            sort: SortOrder::Position,
            ..Default::default()
        };
        let positions: Vec<_> = build_index(&d, "#DC", &cfg).unwrap().iter().map(|e| e.position).collect();
        assert_eq!(positions, [0, 9, 18]);
    }

    #[test]
    fn index_errors() {
        let d = title_doc();
        assert_eq!(
            build_index(&d, "#Nope", &ConcordanceConfig::default()).unwrap_err(),
            AnnotationError::UnknownEntity("#Nope".into())
        );
        assert!(build_index(&d, "#Information", &ConcordanceConfig::default().window(0)).is_err());
    }

    #[test]
    fn entity_listing() {
        let mut d = Document::new("t", "DC DC DC Moro Andreotti").unwrap();
        d.highlight_all_instances(Span::new(0, 2), "Organizations").unwrap();
        d.relabel_entity("#DC", "Democrazia Cristiana").unwrap();
        d.set_wikidata_link("#DC", Qid::parse("Q815348").unwrap(), None).unwrap();
        let rows = list_entities(&d, "Organizations").unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].occurrences, rows[0].wikidata_linked), (3, true));

        assert!(list_entities(&d, "Places").unwrap().is_empty());
        assert_eq!(
            list_entities(&d, "Ships").unwrap_err(),
            AnnotationError::UnknownCategory("Ships".into())
        );

        d.mark_selection(Span::new(9, 13), "People").unwrap();
        d.mark_selection(Span::new(14, 23), "People").unwrap();
        d.set_sort_key("#Moro", "Moro, Aldo").unwrap();
        d.set_sort_key("#Andreotti", "Andreotti, Giulio").unwrap();
        let ids: Vec<_> = list_entities(&d, "People")
            .unwrap()
            .into_iter()
            .map(|r| r.entity.entity_id)
            .collect();
        assert_eq!(ids, ["#Andreotti", "#Moro"]);
    }

    #[test]
    fn word_segmentation() {
        assert_eq!(words("(DC), la — l'Italia!"), ["DC", "la", "l'Italia"]);
    }
}
