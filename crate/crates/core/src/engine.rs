//! Every mutation of a document's markup state.
//!
//! Operations are methods on [`Document`]. They either succeed and leave the
//! document consistent, or fail without touching it.

use crate::error::AnnotationError;
use crate::model::{
    entity_id_from_label, Document, DocumentStatus, Entity, Location, Mention, Qid, Span,
};

/// Characters that make up words for selection extension and whole-word
/// matching: alphanumerics plus straight and typographic apostrophes.
pub fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\'' || c == '\u{2019}'
}

fn is_boundary(chars: &[char], pos: usize) -> bool {
    pos == 0 || pos >= chars.len() || !(is_word_char(chars[pos - 1]) && is_word_char(chars[pos]))
}

fn check_bounds(span: Span, len: usize) -> Result<(), AnnotationError> {
    if span.start > span.end || span.end > len {
        return Err(AnnotationError::SelectionOutOfBounds {
            start: span.start,
            end: span.end,
            len,
        });
    }
    Ok(())
}

fn extend_span(chars: &[char], span: Span) -> Span {
    let mut start = span.start;
    while !is_boundary(chars, start) {
        start -= 1;
    }
    let mut end = span.end;
    while !is_boundary(chars, end) {
        end += 1;
    }
    Span { start, end }
}

impl Document {
    fn require_category(&self, name: &str) -> Result<(), AnnotationError> {
        self.category(name)
            .map(|_| ())
            .ok_or_else(|| AnnotationError::UnknownCategory(name.to_string()))
    }

    fn require_entity(&self, entity_id: &str) -> Result<&Entity, AnnotationError> {
        self.entities
            .get(entity_id)
            .ok_or_else(|| AnnotationError::UnknownEntity(entity_id.to_string()))
    }

    fn entity_mut(&mut self, entity_id: &str) -> Result<&mut Entity, AnnotationError> {
        self.entities
            .get_mut(entity_id)
            .ok_or_else(|| AnnotationError::UnknownEntity(entity_id.to_string()))
    }

    fn first_overlap(&self, span: Span) -> Option<&Mention> {
        // Suppressed mentions still block: restoring them must not create overlaps.
        self.mentions.iter().find(|m| m.span.overlaps(&span))
    }

    /// Picks the entity a new mention of `label` binds to, without creating it.
    ///
    /// An active entity of the category carrying `label` as an alias wins.
    /// Otherwise the slug of the label is tried, then `slug-2`, `slug-3`, ...;
    /// the first candidate that is free or already names an active entity of
    /// the same category is used.
    fn resolve_entity(&self, label: &str, category: &str) -> Result<(String, bool), AnnotationError> {
        if let Some(e) = self.entities.values().find(|e| {
            e.is_active() && e.category == category && e.aliases.iter().any(|a| a == label)
        }) {
            return Ok((e.entity_id.clone(), false));
        }
        let base = entity_id_from_label(label)?;
        for n in 1.. {
            let candidate = if n == 1 { base.clone() } else { format!("{base}-{n}") };
            match self.entities.get(&candidate) {
                None => return Ok((candidate, true)),
                Some(e) if e.is_active() && e.category == category => return Ok((candidate, false)),
                Some(_) => {}
            }
        }
        unreachable!()
    }

    fn insert_mention(&mut self, span: Span, entity_id: &str) -> Mention {
        let mention_id = self.take_mention_id();
        let entity = &self.entities[entity_id];
        let kind = self
            .category(&entity.category)
            .map(|c| c.kind)
            .expect("entity category exists");
        let mention = Mention {
            mention_id,
            span,
            entity_id: entity_id.to_string(),
            category: entity.category.clone(),
            kind,
        };
        let at = self.mentions.partition_point(|m| m.span.start < span.start);
        self.mentions.insert(at, mention.clone());
        mention
    }

    fn bind_new_mentions(
        &mut self,
        spans: &[Span],
        label: &str,
        category: &str,
    ) -> Result<Vec<Mention>, AnnotationError> {
        if spans.is_empty() {
            return Ok(Vec::new());
        }
        let (entity_id, fresh) = self.resolve_entity(label, category)?;
        if fresh {
            self.entities.insert(
                entity_id.clone(),
                Entity::new(entity_id.clone(), label.to_string(), category.to_string()),
            );
        }
        Ok(spans.iter().map(|s| self.insert_mention(*s, &entity_id)).collect())
    }

    /// Marks the selected characters as a mention of `category`.
    ///
    /// The mention binds to a fresh entity labeled with the selected text, or
    /// to the active entity of the same category whose id is the slug of that
    /// text.
    pub fn mark_selection(
        &mut self,
        span: Span,
        category: &str,
    ) -> Result<(Mention, Entity), AnnotationError> {
        self.require_category(category)?;
        check_bounds(span, self.char_len())?;
        if span.is_empty() {
            return Err(AnnotationError::EmptySelection);
        }
        if let Some(m) = self.first_overlap(span) {
            return Err(AnnotationError::OverlappingMention(m.mention_id.clone()));
        }
        let selected = self.slice(span);
        let label = selected.trim();
        if label.is_empty() {
            return Err(AnnotationError::InvalidLabel);
        }
        let mention = self
            .bind_new_mentions(&[span], label, category)?
            .pop()
            .expect("one span in, one mention out");
        let entity = self.entities[&mention.entity_id].clone();
        Ok((mention, entity))
    }

    /// Grows a selection until both ends sit on word boundaries. A selection
    /// that already does is returned unchanged.
    pub fn extend_to_word(&self, span: Span) -> Result<Span, AnnotationError> {
        let chars: Vec<char> = self.text.chars().collect();
        check_bounds(span, chars.len())?;
        Ok(extend_span(&chars, span))
    }

    /// Whole-word, case-sensitive occurrences of `needle` as char spans, in
    /// text order. Occurrences may overlap each other.
    pub fn find_whole_word(&self, needle: &str) -> Vec<Span> {
        if needle.is_empty() {
            return Vec::new();
        }
        let chars: Vec<char> = self.text.chars().collect();
        let byte_starts: Vec<usize> = self.text.char_indices().map(|(b, _)| b).collect();
        let needle_len = needle.chars().count();
        let mut out = Vec::new();
        let mut from = 0;
        while let Some(rel) = self.text[from..].find(needle) {
            let byte = from + rel;
            let start = byte_starts.partition_point(|&b| b < byte);
            let end = start + needle_len;
            if is_boundary(&chars, start) && is_boundary(&chars, end) {
                out.push(Span { start, end });
            }
            from = byte + self.text[byte..].chars().next().map_or(1, char::len_utf8);
        }
        out
    }

    /// Marks every whole-word occurrence of the (word-extended) selected
    /// string that does not collide with an existing mention, binding all of
    /// them to one entity. Returns the new mentions in text order.
    pub fn highlight_all_instances(
        &mut self,
        span: Span,
        category: &str,
    ) -> Result<Vec<Mention>, AnnotationError> {
        self.require_category(category)?;
        check_bounds(span, self.char_len())?;
        if span.is_empty() {
            return Err(AnnotationError::EmptySelection);
        }
        let needle = self.slice(self.extend_to_word(span)?);
        let label = needle.trim().to_string();
        if label.is_empty() {
            return Err(AnnotationError::InvalidLabel);
        }
        let mut accepted: Vec<Span> = Vec::new();
        for occ in self.find_whole_word(&needle) {
            let taken = self.first_overlap(occ).is_some()
                || accepted.last().is_some_and(|prev| prev.overlaps(&occ));
            if !taken {
                accepted.push(occ);
            }
        }
        self.bind_new_mentions(&accepted, &label, category)
    }

    fn require_active(&self, entity_id: &str) -> Result<&Entity, AnnotationError> {
        let e = self.require_entity(entity_id)?;
        if !e.is_active() {
            return Err(AnnotationError::EntityTrashed(entity_id.to_string()));
        }
        Ok(e)
    }

    /// Rebinds all mentions of `source` to `target` and deletes `source`.
    pub fn merge_entities(&mut self, source: &str, target: &str) -> Result<Entity, AnnotationError> {
        self.require_entity(source)?;
        self.require_entity(target)?;
        if source == target {
            return Err(AnnotationError::SelfMerge(source.to_string()));
        }
        let src = self.require_active(source)?.clone();
        let dst = self.require_active(target)?;
        if src.category != dst.category {
            return Err(AnnotationError::CategoryMismatch {
                expected: dst.category.clone(),
                found: src.category,
            });
        }
        for m in self.mentions.iter_mut().filter(|m| m.entity_id == source) {
            m.entity_id = target.to_string();
        }
        self.entities.remove(source);
        let dst = self.entity_mut(target)?;
        for alias in src.aliases {
            if alias != dst.label && !dst.aliases.contains(&alias) {
                dst.aliases.push(alias);
            }
        }
        Ok(dst.clone())
    }

    /// Rebinds one mention. An entity left without mentions goes to the trash.
    pub fn move_mention(&mut self, mention_id: &str, target: &str) -> Result<Mention, AnnotationError> {
        let idx = self
            .mentions
            .iter()
            .position(|m| m.mention_id == mention_id)
            .ok_or_else(|| AnnotationError::UnknownMention(mention_id.to_string()))?;
        let dst = self.require_entity(target)?;
        let current = self.mentions[idx].clone();
        if current.entity_id == target {
            return Ok(current);
        }
        if !dst.is_active() {
            return Err(AnnotationError::EntityTrashed(target.to_string()));
        }
        if dst.category != current.category {
            return Err(AnnotationError::CategoryMismatch {
                expected: dst.category.clone(),
                found: current.category,
            });
        }
        self.mentions[idx].entity_id = target.to_string();
        if self.occurrences(&current.entity_id) == 0 {
            if let Some(old) = self.entities.get_mut(&current.entity_id) {
                old.location = Location::Trash;
            }
        }
        Ok(self.mentions[idx].clone())
    }

    /// Changes the display label. The entity id never changes; the sort key
    /// follows the label only while it was still equal to it.
    pub fn relabel_entity(&mut self, entity_id: &str, new_label: &str) -> Result<Entity, AnnotationError> {
        let new_label = new_label.trim();
        if new_label.is_empty() {
            return Err(AnnotationError::InvalidLabel);
        }
        let e = self.entity_mut(entity_id)?;
        if e.sort_key == e.label {
            e.sort_key = new_label.to_string();
        }
        e.label = new_label.to_string();
        Ok(e.clone())
    }

    pub fn set_sort_key(&mut self, entity_id: &str, key: &str) -> Result<Entity, AnnotationError> {
        let e = self.entity_mut(entity_id)?;
        e.sort_key = key.to_string();
        Ok(e.clone())
    }

    /// Moves an entity between the panel, the scrap area and the trash.
    /// Trashed entities keep their spans but are not rendered.
    pub fn move_to(&mut self, entity_id: &str, destination: Location) -> Result<Entity, AnnotationError> {
        let e = self.entity_mut(entity_id)?;
        if e.location == destination {
            return Err(AnnotationError::AlreadyInLocation {
                entity_id: entity_id.to_string(),
                location: destination,
            });
        }
        e.location = destination;
        Ok(e.clone())
    }

    /// Permanently removes trashed entities and their mentions.
    pub fn empty_trash(&mut self) -> usize {
        let trashed: Vec<String> = self
            .entities
            .values()
            .filter(|e| e.location == Location::Trash)
            .map(|e| e.entity_id.clone())
            .collect();
        self.mentions.retain(|m| !trashed.contains(&m.entity_id));
        for id in &trashed {
            self.entities.remove(id);
        }
        trashed.len()
    }

    pub fn set_status(&mut self, status: DocumentStatus) -> &Document {
        self.status = status;
        self
    }

    /// Records an alternative surface form (e.g. "Pope") so later
    /// highlight-all runs on it bind to this entity.
    pub fn add_alias(&mut self, entity_id: &str, alias: &str) -> Result<Entity, AnnotationError> {
        let alias = alias.trim();
        if alias.is_empty() {
            return Err(AnnotationError::InvalidLabel);
        }
        let e = self.entity_mut(entity_id)?;
        if alias != e.label && !e.aliases.iter().any(|a| a == alias) {
            e.aliases.push(alias.to_string());
        }
        Ok(e.clone())
    }

    /// Sets the Wikidata link, replacing any previous one.
    pub fn set_wikidata_link(
        &mut self,
        entity_id: &str,
        qid: Qid,
        treccani_id: Option<String>,
    ) -> Result<Entity, AnnotationError> {
        let e = self.entity_mut(entity_id)?;
        e.wikidata_id = Some(qid);
        e.treccani_id = treccani_id;
        Ok(e.clone())
    }

    pub fn clear_wikidata_link(&mut self, entity_id: &str) -> Result<Entity, AnnotationError> {
        let e = self.entity_mut(entity_id)?;
        if e.wikidata_id.is_none() {
            return Err(AnnotationError::NotLinked(entity_id.to_string()));
        }
        e.wikidata_id = None;
        e.treccani_id = None;
        Ok(e.clone())
    }
}
