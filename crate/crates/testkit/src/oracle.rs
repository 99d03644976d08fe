//! Brute-force reference implementations.
//!
//! Everything here works on `Vec<char>` with exhaustive scans and
//! candidate enumeration; nothing calls into the engine or concordance code.

use kwicdesk_core::model::{Document, Location};

fn is_word(c: char) -> bool {
    c.is_alphanumeric() || c == '\'' || c == '\u{2019}'
}

fn boundary(chars: &[char], i: usize) -> bool {
    if i == 0 || i == chars.len() {
        return true;
    }
    !is_word(chars[i - 1]) || !is_word(chars[i])
}

/// Smallest superset of `[start, end)` whose ends are word boundaries.
pub fn extend_selection(text: &str, start: usize, end: usize) -> (usize, usize) {
    let chars: Vec<char> = text.chars().collect();
    let s = (0..=start).rev().find(|&i| boundary(&chars, i)).unwrap_or(0);
    let e = (end..=chars.len()).find(|&i| boundary(&chars, i)).unwrap_or(chars.len());
    (s, e)
}

/// Every whole-word occurrence of `needle`, tried at every character position.
pub fn whole_word_scan(text: &str, needle: &str) -> Vec<(usize, usize)> {
    let chars: Vec<char> = text.chars().collect();
    let pat: Vec<char> = needle.chars().collect();
    if pat.is_empty() || pat.len() > chars.len() {
        return Vec::new();
    }
    (0..=chars.len() - pat.len())
        .filter(|&i| chars[i..i + pat.len()] == pat[..])
        .filter(|&i| boundary(&chars, i) && boundary(&chars, i + pat.len()))
        .map(|i| (i, i + pat.len()))
        .collect()
}

/// Spans highlight-all should mark for the selection `[start, end)`: the
/// whole-word scan for the extended selection, minus anything touching an
/// existing mention or an occurrence accepted earlier in text order.
pub fn expected_highlight(doc: &Document, start: usize, end: usize) -> Vec<(usize, usize)> {
    let (s, e) = extend_selection(&doc.text, start, end);
    let needle: String = doc.text.chars().skip(s).take(e - s).collect();
    let mut taken: Vec<(usize, usize)> = doc.mentions.iter().map(|m| (m.span.start, m.span.end)).collect();
    let mut out = Vec::new();
    for (a, b) in whole_word_scan(&doc.text, &needle) {
        if taken.iter().all(|&(x, y)| b <= x || y <= a) {
            taken.push((a, b));
            out.push((a, b));
        }
    }
    out
}

fn word_count(s: &str) -> usize {
    s.split_whitespace().filter(|t| t.chars().any(char::is_alphanumeric)).count()
}

fn left_context(part: &[char], window: usize) -> String {
    // Shortest suffix starting at a token start that holds exactly `window`
    // words; the whole part when it has fewer.
    for i in (0..=part.len()).rev() {
        let at_token_start = i < part.len() && !part[i].is_whitespace() && (i == 0 || part[i - 1].is_whitespace());
        if !at_token_start {
            continue;
        }
        let candidate: String = part[i..].iter().collect();
        if word_count(&candidate) == window {
            return candidate.trim().to_string();
        }
    }
    part.iter().collect::<String>().trim().to_string()
}

fn right_context(part: &[char], window: usize) -> String {
    for i in 0..=part.len() {
        let at_token_end = i > 0 && !part[i - 1].is_whitespace() && (i == part.len() || part[i].is_whitespace());
        if !at_token_end {
            continue;
        }
        let candidate: String = part[..i].iter().collect();
        if word_count(&candidate) == window {
            return candidate.trim().to_string();
        }
    }
    part.iter().collect::<String>().trim().to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStyle {
    Kwic,
    Kwoc,
    Kwac,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleEntry {
    pub mention_id: String,
    pub keyword: String,
    pub left: String,
    pub right: String,
    pub line: String,
    pub position: usize,
    pub text: String,
}

/// Expected concordance of `entity_id` with the default separators, sorted
/// alphabetically (case-folded keyword, then right context, then position).
pub fn expected_index(doc: &Document, entity_id: &str, style: OracleStyle, window: usize) -> Vec<OracleEntry> {
    let chars: Vec<char> = doc.text.chars().collect();
    let trashed = doc.entities.get(entity_id).is_none_or(|e| e.location == Location::Trash);
    if trashed {
        return Vec::new();
    }
    let mut out: Vec<OracleEntry> = doc
        .mentions
        .iter()
        .filter(|m| m.entity_id == entity_id)
        .map(|m| {
            let (a, b) = (m.span.start, m.span.end);
            let mut ls = a;
            while ls > 0 && chars[ls - 1] != '\n' {
                ls -= 1;
            }
            let mut le = b;
            while le < chars.len() && chars[le] != '\n' {
                le += 1;
            }
            let keyword: String = chars[a..b].iter().collect();
            let left = left_context(&chars[ls..a], window);
            let right = right_context(&chars[b..le], window);
            let line: String = chars[ls..le].iter().collect();
            let text = match style {
                OracleStyle::Kwic => [left.as_str(), keyword.as_str(), right.as_str()].join("\t"),
                OracleStyle::Kwoc => format!("{keyword} — {}", line.trim()),
                OracleStyle::Kwac => {
                    let mut parts = vec![keyword.clone()];
                    if !right.is_empty() {
                        parts.push(right.clone());
                    }
                    let head = parts.join(" ");
                    if left.is_empty() {
                        head
                    } else {
                        format!("{head} / {left}")
                    }
                }
            };
            OracleEntry {
                mention_id: m.mention_id.clone(),
                keyword,
                left,
                right,
                line,
                position: a,
                text,
            }
        })
        .collect();
    out.sort_by_key(|e| (e.keyword.to_lowercase(), e.right.to_lowercase(), e.position));
    out
}

/// Words of a rendered entry once separators and edge punctuation are gone.
pub fn entry_words(rendered: &str) -> Vec<String> {
    let mut w: Vec<String> = rendered
        .split_whitespace()
        .filter(|t| t.chars().any(char::is_alphanumeric))
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()).to_string())
        .collect();
    w.sort();
    w
}
