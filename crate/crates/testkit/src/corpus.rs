//! Seeded random texts and annotated documents.

use kwicdesk_core::model::{Document, Span};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

const VOCABULARY: &[&str] = &[
    "la", "il", "di", "del", "e", "che", "in", "per", "DC", "Moro", "Aldo", "Andreotti", "Fanfani",
    "Democrazia", "Cristiana", "governo", "Roma", "Milano", "partito", "consiglio", "Presidente",
    "città", "perché", "l'Italia", "dell'anno", "Nenni", "PSI", "PCI", "Berlinguer", "1959", "1978",
    "Zoë", "Ελλάδα", "Straße", "già", "nazionale", "d’Alema",
];
const PREFIXES: &[&str] = &["(", "«", "\""];
const SUFFIXES: &[&str] = &[",", ".", ";", ":", ")", "»", "!", "?", "\""];

/// One whitespace-delimited token; `core` is the word part, in chars.
#[derive(Debug, Clone, Copy)]
pub struct Token {
    pub start: usize,
    pub core_start: usize,
    pub core_end: usize,
}

#[derive(Debug, Clone)]
pub struct GeneratedText {
    pub text: String,
    pub tokens: Vec<Token>,
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random prose of at most `max_bytes` UTF-8 bytes: a small vocabulary so
/// words repeat, edge punctuation, stray dashes, blank lines and odd spacing.
pub fn random_text(rng: &mut impl Rng, max_bytes: usize) -> GeneratedText {
    let mut text = String::new();
    let mut tokens = Vec::new();
    let mut chars = 0usize;
    let target = rng.gen_range(0..=max_bytes);
    loop {
        let mut piece = String::new();
        let sep = if text.is_empty() {
            ""
        } else {
            match rng.gen_range(0..20) {
                0 => "\n",
                1 => "\n\n",
                2 => "  ",
                3 => "\t",
                4 => " — ",
                _ => " ",
            }
        };
        piece.push_str(sep);
        let pre = if rng.gen_bool(0.1) { *PREFIXES.choose(rng).unwrap() } else { "" };
        let word = *VOCABULARY.choose(rng).unwrap();
        let post = if rng.gen_bool(0.2) { *SUFFIXES.choose(rng).unwrap() } else { "" };
        piece.push_str(pre);
        piece.push_str(word);
        piece.push_str(post);
        if text.len() + piece.len() > target.min(max_bytes) {
            break;
        }
        let start = chars + sep.chars().count();
        let core_start = start + pre.chars().count();
        let core_end = core_start + word.chars().count();
        tokens.push(Token { start, core_start, core_end });
        chars += piece.chars().count();
        text.push_str(&piece);
    }
    GeneratedText { text, tokens }
}

/// A random selection of one to three consecutive tokens, word-aligned.
pub fn random_token_span(rng: &mut impl Rng, tokens: &[Token]) -> Option<Span> {
    if tokens.is_empty() {
        return None;
    }
    let i = rng.gen_range(0..tokens.len());
    let j = (i + rng.gen_range(0..3)).min(tokens.len() - 1);
    Some(Span::new(tokens[i].core_start, tokens[j].core_end))
}

pub const CATEGORIES: &[&str] = &["People", "Places", "Organizations", "Bibliographic references", "Quotations"];

/// A document over random text with up to `max_mentions` word-aligned
/// mentions, some produced by highlight-all so entities recur.
pub fn random_document(rng: &mut impl Rng, doc_id: &str, max_bytes: usize, max_mentions: usize) -> (Document, GeneratedText) {
    let generated = random_text(rng, max_bytes);
    let mut doc = Document::new(doc_id, generated.text.clone()).expect("generated text has no NUL");
    let attempts = rng.gen_range(0..=max_mentions * 2);
    for _ in 0..attempts {
        if doc.mentions.len() >= max_mentions {
            break;
        }
        let Some(span) = random_token_span(rng, &generated.tokens) else { break };
        let category = *CATEGORIES.choose(rng).unwrap();
        if rng.gen_bool(0.3) {
            let mut trial = doc.clone();
            if trial.highlight_all_instances(span, category).is_ok() && trial.mentions.len() <= max_mentions {
                doc = trial;
            }
        } else {
            let _ = doc.mark_selection(span, category);
        }
    }
    (doc, generated)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_point_at_words() {
        let mut r = rng(7);
        for _ in 0..50 {
            let g = random_text(&mut r, 2048);
            assert!(g.text.len() <= 2048);
            let chars: Vec<char> = g.text.chars().collect();
            for t in &g.tokens {
                let core: String = chars[t.core_start..t.core_end].iter().collect();
                assert!(VOCABULARY.contains(&core.as_str()), "{core}");
            }
        }
    }

    #[test]
    fn documents_respect_limits() {
        let mut r = rng(11);
        for i in 0..30 {
            let (d, _) = random_document(&mut r, &format!("d{i}"), 2048, 20);
            assert!(d.mentions.len() <= 20);
            assert!(d.invariant_violations().is_empty());
        }
    }
}
