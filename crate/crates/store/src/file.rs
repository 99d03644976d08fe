//! File-backed store.
//!
//! ```text
//! <root>/documents/<hex(doc_id)>/state.json      {"revision": n, "document": {...}}
//! <root>/documents/<hex(doc_id)>/document.html   RDFa rendering of the latest revision
//! <root>/documents/<hex(doc_id)>/metadata.json   metadata record, once set
//! <root>/documents/<hex(doc_id)>/revisions.log   one JSON line per write
//! ```
//!
//! `state.json` is authoritative and is always written last, each file via
//! write-to-temp-then-rename.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use kwicdesk_core::{render_rdfa, Document, MetadataRecord};
use serde::Serialize;

use crate::{check_base, check_document, DocumentStore, DocumentSummary, Revision, StoreError, StoredDocument};

const STATE: &str = "state.json";
const HTML: &str = "document.html";
const METADATA: &str = "metadata.json";
const LOG: &str = "revisions.log";

pub struct FileStore {
    root: PathBuf,
    write_lock: Mutex<()>,
}

#[derive(Serialize)]
struct LogLine<'a> {
    revision: Revision,
    event: &'a str,
    at: u64,
    status: &'a str,
    mentions: usize,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let dir = path.parent().expect("store paths have a parent");
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| StoreError::Storage(e.to_string()))?;
    Ok(())
}

impl FileStore {
    /// Opens (creating if needed) a store rooted at `root`.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(root.join("documents"))?;
        Ok(FileStore {
            root,
            write_lock: Mutex::new(()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn dir(&self, doc_id: &str) -> PathBuf {
        self.root.join("documents").join(hex::encode(doc_id.as_bytes()))
    }

    fn read_state(&self, doc_id: &str) -> Result<StoredDocument, StoreError> {
        let path = self.dir(doc_id).join(STATE);
        let raw = match fs::read_to_string(&path) {
            Ok(raw) => raw,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(StoreError::UnknownDocument(doc_id.to_string()))
            }
            Err(e) => return Err(e.into()),
        };
        Ok(serde_json::from_str(&raw)?)
    }

    fn write_state(&self, stored: &StoredDocument, event: &str) -> Result<(), StoreError> {
        let dir = self.dir(&stored.document.doc_id);
        write_atomic(&dir.join(HTML), render_rdfa(&stored.document).as_bytes())?;
        write_atomic(&dir.join(STATE), &serde_json::to_vec_pretty(stored)?)?;
        let at = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let line = LogLine {
            revision: stored.revision,
            event,
            at,
            status: stored.document.status.as_str(),
            mentions: stored.document.mentions.len(),
        };
        let mut log = OpenOptions::new().create(true).append(true).open(dir.join(LOG))?;
        writeln!(log, "{}", serde_json::to_string(&line)?)?;
        Ok(())
    }
}

impl DocumentStore for FileStore {
    fn create(&self, doc: &Document) -> Result<Revision, StoreError> {
        check_document(doc)?;
        let _guard = self.write_lock.lock().unwrap();
        let dir = self.dir(&doc.doc_id);
        if dir.join(STATE).exists() {
            return Err(StoreError::DuplicateDocument(doc.doc_id.clone()));
        }
        fs::create_dir_all(&dir)?;
        let stored = StoredDocument {
            revision: 1,
            document: doc.clone(),
        };
        self.write_state(&stored, "create")?;
        Ok(1)
    }

    fn save(&self, doc: &Document, base: Option<Revision>) -> Result<Revision, StoreError> {
        check_document(doc)?;
        let _guard = self.write_lock.lock().unwrap();
        let current = self.read_state(&doc.doc_id)?;
        check_base(&doc.doc_id, base, current.revision)?;
        let stored = StoredDocument {
            revision: current.revision + 1,
            document: doc.clone(),
        };
        self.write_state(&stored, "save")?;
        Ok(stored.revision)
    }

    fn load(&self, doc_id: &str) -> Result<StoredDocument, StoreError> {
        self.read_state(doc_id)
    }

    fn list(&self) -> Result<Vec<DocumentSummary>, StoreError> {
        let mut out = Vec::new();
        for entry in fs::read_dir(self.root.join("documents"))? {
            let path = entry?.path();
            let state = path.join(STATE);
            if !state.exists() {
                continue;
            }
            let stored: StoredDocument = serde_json::from_str(&fs::read_to_string(&state)?)?;
            out.push(DocumentSummary::of(&stored, path.join(METADATA).exists()));
        }
        out.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        Ok(out)
    }

    fn get_metadata(&self, doc_id: &str) -> Result<Option<MetadataRecord>, StoreError> {
        self.read_state(doc_id)?;
        match fs::read_to_string(self.dir(doc_id).join(METADATA)) {
            Ok(raw) => Ok(Some(serde_json::from_str(&raw)?)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    fn upsert_metadata(&self, doc_id: &str, record: &MetadataRecord) -> Result<Revision, StoreError> {
        let _guard = self.write_lock.lock().unwrap();
        let mut stored = self.read_state(doc_id)?;
        record.validate()?;
        write_atomic(&self.dir(doc_id).join(METADATA), &serde_json::to_vec_pretty(record)?)?;
        stored.revision += 1;
        stored.document.metadata_id = Some(doc_id.to_string());
        self.write_state(&stored, "metadata")?;
        Ok(stored.revision)
    }
}
