//! Bibliographic description of a document.

use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PublicationStatus {
    /// Published or edited.
    Published,
    /// Unpublished or unedited.
    Unpublished,
}

impl PublicationStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            PublicationStatus::Published => "published",
            PublicationStatus::Unpublished => "unpublished",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct MetadataRecord {
    /// Three digits, `001` to `999`, assigned in chronological order.
    pub document_number: String,
    pub author_role: String,
    pub researcher_curator: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub document_type: Vec<String>,
    pub document_subject: Vec<String>,
    pub publication_status: Option<PublicationStatus>,
    /// Bibliographic references (published) or archival signatures (unpublished).
    pub provenance: Vec<String>,
    pub event_place: String,
    /// `DD-MM-YYYY`, `YYYY`, or empty when unknown.
    pub event_date: String,
    pub additional_notes: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid {field}: {message}")]
pub struct ValidationError {
    pub field: &'static str,
    pub message: String,
}

/// Date of the described event: a full day or a bare year.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventDate {
    Day(NaiveDate),
    Year(u16),
}

impl EventDate {
    /// Accepts exactly `DD-MM-YYYY` naming a real calendar day, or `YYYY`.
    /// There is no year zero.
    pub fn parse(s: &str) -> Option<EventDate> {
        let digits = |part: &str, n: usize| part.len() == n && part.bytes().all(|b| b.is_ascii_digit());
        if s.ends_with("0000") {
            return None;
        }
        match s.split('-').collect::<Vec<_>>().as_slice() {
            [year] if digits(year, 4) => year.parse().ok().map(EventDate::Year),
            [day, month, year] if digits(day, 2) && digits(month, 2) && digits(year, 4) => {
                NaiveDate::from_ymd_opt(year.parse().ok()?, month.parse().ok()?, day.parse().ok()?)
                    .map(EventDate::Day)
            }
            _ => None,
        }
    }

    /// ISO 8601 form, as used in TEI `@when`.
    pub fn iso(&self) -> String {
        match self {
            EventDate::Day(d) => d.format("%Y-%m-%d").to_string(),
            EventDate::Year(y) => format!("{y:04}"),
        }
    }
}

impl fmt::Display for EventDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventDate::Day(d) => write!(f, "{}", d.format("%d-%m-%Y")),
            EventDate::Year(y) => write!(f, "{y:04}"),
        }
    }
}

/// Whether `s` is a valid document number (`001`..=`999`).
pub fn is_valid_document_number(s: &str) -> bool {
    s.len() == 3 && s.bytes().all(|b| b.is_ascii_digit()) && s != "000"
}

impl MetadataRecord {
    /// Checks the record field by field in form order, reporting the first
    /// offending field.
    pub fn validate(&self) -> Result<(), ValidationError> {
        if !is_valid_document_number(&self.document_number) {
            return Err(ValidationError {
                field: "document_number",
                message: format!("`{}` is not a three-digit number from 001 to 999", self.document_number),
            });
        }
        if !self.event_date.is_empty() && EventDate::parse(&self.event_date).is_none() {
            return Err(ValidationError {
                field: "event_date",
                message: format!("`{}` is neither DD-MM-YYYY nor YYYY", self.event_date),
            });
        }
        Ok(())
    }

    pub fn event_date(&self) -> Option<EventDate> {
        EventDate::parse(&self.event_date)
    }
}
