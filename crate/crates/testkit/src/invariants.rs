//! Random engine operation sequences and the checks run after each step.

use kwicdesk_core::model::{Document, Location};
use kwicdesk_core::rdfa::render_rdfa;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::corpus::{random_token_span, Token, CATEGORIES};

#[derive(Debug, Clone)]
pub enum Op {
    Mark(usize, usize, &'static str),
    HighlightAll(usize, usize, &'static str),
    Merge(String, String),
    MoveMention(String, String),
    Relabel(String, String),
    SortKey(String, String),
    Alias(String, String),
    MoveTo(String, Location),
    EmptyTrash,
}

fn pick(rng: &mut impl Rng, items: &[String]) -> String {
    items.choose(rng).cloned().unwrap_or_else(|| "#Nobody".to_string())
}

pub fn random_op(rng: &mut impl Rng, doc: &Document, tokens: &[Token]) -> Op {
    let entities: Vec<String> = doc.entities.keys().cloned().collect();
    let mentions: Vec<String> = doc.mentions.iter().map(|m| m.mention_id.clone()).collect();
    let category = *CATEGORIES.choose(rng).unwrap();
    let span = random_token_span(rng, tokens).unwrap_or(kwicdesk_core::model::Span::new(0, 0));
    match rng.gen_range(0..20) {
        0..=5 => Op::Mark(span.start, span.end, category),
        6..=7 => Op::HighlightAll(span.start, span.end, category),
        8..=9 => Op::Merge(pick(rng, &entities), pick(rng, &entities)),
        10..=11 => Op::MoveMention(pick(rng, &mentions), pick(rng, &entities)),
        12 => {
            let label = ["Democrazia Cristiana", "Aldo Moro", "  ", "Roma", "DC"].choose(rng).unwrap();
            Op::Relabel(pick(rng, &entities), label.to_string())
        }
        13 => Op::SortKey(pick(rng, &entities), "Zeta".into()),
        14 => Op::Alias(pick(rng, &entities), "il Presidente".into()),
        15..=18 => {
            let loc = *[Location::Active, Location::Scrap, Location::Trash].choose(rng).unwrap();
            Op::MoveTo(pick(rng, &entities), loc)
        }
        _ => Op::EmptyTrash,
    }
}

/// Applies `op`; returns whether it succeeded. `merged` is set to the
/// source entity id when a merge succeeds.
pub fn apply(doc: &mut Document, op: &Op, merged: &mut Option<String>) -> bool {
    use kwicdesk_core::model::Span;
    *merged = None;
    match op {
        Op::Mark(s, e, c) => doc.mark_selection(Span::new(*s, *e), c).is_ok(),
        Op::HighlightAll(s, e, c) => doc.highlight_all_instances(Span::new(*s, *e), c).is_ok(),
        Op::Merge(a, b) => {
            let ok = doc.merge_entities(a, b).is_ok();
            if ok {
                *merged = Some(a.clone());
            }
            ok
        }
        Op::MoveMention(m, e) => doc.move_mention(m, e).is_ok(),
        Op::Relabel(e, l) => doc.relabel_entity(e, l).is_ok(),
        Op::SortKey(e, k) => doc.set_sort_key(e, k).is_ok(),
        Op::Alias(e, a) => doc.add_alias(e, a).is_ok(),
        Op::MoveTo(e, l) => doc.move_to(e, *l).is_ok(),
        Op::EmptyTrash => {
            doc.empty_trash();
            true
        }
    }
}

fn count_rendered_spans(html: &str) -> usize {
    html.matches("<span id=\"mention-").count()
}

/// Checks the document-level invariants. `merged_away` names an entity that
/// was just merged into another and must no longer be serialized.
pub fn check(doc: &Document, merged_away: Option<&str>, rng: &mut impl Rng) -> Result<(), String> {
    let v = doc.invariant_violations();
    if !v.is_empty() {
        return Err(format!("model invariants: {v:?}"));
    }
    let mut spans: Vec<(usize, usize)> = doc.mentions.iter().map(|m| (m.span.start, m.span.end)).collect();
    spans.sort();
    for w in spans.windows(2) {
        if w[0].1 > w[1].0 {
            return Err(format!("overlapping mentions {:?} and {:?}", w[0], w[1]));
        }
    }
    for m in &doc.mentions {
        if !doc.entities.contains_key(&m.entity_id) {
            return Err(format!("{} references missing {}", m.mention_id, m.entity_id));
        }
    }
    let shown: usize = doc
        .entities
        .values()
        .filter(|e| e.location != Location::Trash)
        .map(|e| doc.occurrences(&e.entity_id))
        .sum();
    let live = doc.mentions.iter().filter(|m| doc.entities[&m.entity_id].location != Location::Trash).count();
    let html = render_rdfa(doc);
    let rendered = count_rendered_spans(&html);
    if shown != live || live != rendered {
        return Err(format!("count conservation: occurrences {shown}, live {live}, rendered {rendered}"));
    }
    if let Some(gone) = merged_away {
        for attr in ["about", "resource"] {
            if html.contains(&format!("{attr}=\"{gone}\"")) {
                return Err(format!("merged entity {gone} still serialized"));
            }
        }
    }
    let candidates: Vec<&str> = doc
        .entities
        .values()
        .filter(|e| e.location != Location::Trash)
        .map(|e| e.entity_id.as_str())
        .collect();
    if let Some(id) = candidates.choose(rng) {
        let home = doc.entities[*id].location;
        let mut trial = doc.clone();
        trial.move_to(id, Location::Trash).map_err(|e| format!("trash {id}: {e}"))?;
        trial.move_to(id, home).map_err(|e| format!("restore {id}: {e}"))?;
        if render_rdfa(&trial) != html {
            return Err(format!("trash and restore of {id} changed the rendering"));
        }
    }
    Ok(())
}

/// Runs `steps` random operations, checking invariants after each and that
/// a failed operation leaves the document untouched.
pub fn run_sequence(rng: &mut impl Rng, mut doc: Document, tokens: &[Token], steps: usize) -> Result<Document, String> {
    let mut merged = None;
    for step in 0..steps {
        let op = random_op(rng, &doc, tokens);
        let before = doc.clone();
        let ok = apply(&mut doc, &op, &mut merged);
        if !ok && doc != before {
            return Err(format!("step {step}: failed {op:?} modified the document"));
        }
        check(&doc, merged.as_deref(), rng).map_err(|e| format!("step {step} after {op:?}: {e}"))?;
    }
    Ok(doc)
}
