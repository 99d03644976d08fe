#![allow(dead_code)]

use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use kwicdesk_reconcile::{ReplayTransport, WikidataClient, WikidataConfig};
use kwicdesk_server::{router, AppState};
use kwicdesk_store::{Accounts, Clock, MemoryStore, Role, TokenService, DEFAULT_TOKEN_LIFETIME};
use serde_json::{json, Value};
use tower::ServiceExt;

pub const USER: &str = "curatrice";
pub const PASSWORD: &str = "correct horse";
pub const DC_TEXT: &str = "Alle elezioni del 1948 la DC ottenne la maggioranza.\nLa Democrazia Cristiana governò per decenni.";

pub struct TestClock(pub AtomicU64);

impl Clock for TestClock {
    fn now(&self) -> u64 {
        self.0.load(Ordering::SeqCst)
    }
}

pub struct Harness {
    pub app: Router,
    pub clock: Arc<TestClock>,
    pub transport: Arc<ReplayTransport>,
    pub token: String,
}

pub struct Reply {
    pub status: StatusCode,
    pub content_type: String,
    pub text: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.text).unwrap_or_else(|e| panic!("{e}: {}", self.text))
    }

    pub fn code(&self) -> String {
        self.json()["code"].as_str().unwrap_or_default().to_string()
    }
}

impl Harness {
    pub async fn new() -> Harness {
        let accounts = Accounts::in_memory();
        accounts.add_user(USER, PASSWORD, Role::Annotator).unwrap();
        let clock = Arc::new(TestClock(AtomicU64::new(1_700_000_000)));
        let tokens = TokenService::new(b"contract-test-signing-key", DEFAULT_TOKEN_LIFETIME, clock.clone());
        let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("../reconcile/tests/fixtures");
        let transport = Arc::new(ReplayTransport::from_dir(&fixtures).unwrap());
        let config = WikidataConfig {
            base_url: "http://127.0.0.1:9".into(),
            ..Default::default()
        };
        let wikidata = WikidataClient::new(transport.clone(), config);
        let state = AppState::new(Arc::new(MemoryStore::new()), Arc::new(accounts), Arc::new(tokens), wikidata);
        let mut h = Harness {
            app: router(Arc::new(state)),
            clock,
            transport,
            token: String::new(),
        };
        let r = h.send(Method::POST, "/auth/login", None, Some(json!({"username": USER, "password": PASSWORD}))).await;
        assert_eq!(r.status, StatusCode::OK, "{}", r.text);
        h.token = r.json()["token"].as_str().unwrap().to_string();
        h
    }

    pub async fn raw(&self, method: Method, path: &str, token: Option<&str>, body: Body, json_body: bool) -> Reply {
        let mut req = Request::builder().method(method).uri(format!("/api/v1{path}"));
        if let Some(t) = token {
            req = req.header("authorization", format!("Bearer {t}"));
        }
        if json_body {
            req = req.header("content-type", "application/json");
        }
        let resp = self.app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
        let status = resp.status();
        let content_type = resp
            .headers()
            .get("content-type")
            .map(|v| v.to_str().unwrap().to_string())
            .unwrap_or_default();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        Reply {
            status,
            content_type,
            text: String::from_utf8(bytes.to_vec()).unwrap(),
        }
    }

    pub async fn send(&self, method: Method, path: &str, token: Option<&str>, body: Option<Value>) -> Reply {
        match body {
            Some(v) => self.raw(method, path, token, Body::from(v.to_string()), true).await,
            None => self.raw(method, path, token, Body::empty(), false).await,
        }
    }

    /// Authenticated call.
    pub async fn call(&self, method: Method, path: &str, body: Option<Value>) -> Reply {
        let token = self.token.clone();
        self.send(method, path, Some(&token), body).await
    }

    pub async fn upload(&self, doc_id: &str, content: &str) -> Reply {
        self.call(Method::POST, "/documents", Some(json!({"doc_id": doc_id, "content": content}))).await
    }

    pub async fn revision(&self, doc_id: &str) -> u64 {
        self.call(Method::GET, &format!("/documents/{doc_id}"), None).await.json()["revision"]
            .as_u64()
            .unwrap()
    }

    /// Uploads the DC example and marks both organization mentions.
    pub async fn dc_document(&self, doc_id: &str) {
        assert_eq!(self.upload(doc_id, DC_TEXT).await.status, StatusCode::CREATED);
        let full = DC_TEXT[..DC_TEXT.find("Democrazia").unwrap()].chars().count();
        for (s, e) in [(26, 28), (full, full + 20)] {
            let r = self
                .call(
                    Method::POST,
                    &format!("/documents/{doc_id}/mark"),
                    Some(json!({"start": s, "end": e, "category": "Organizations"})),
                )
                .await;
            assert_eq!(r.status, StatusCode::OK, "{}", r.text);
        }
    }
}

/// Every route as (method, path) with `doc` as the document id.
pub fn routes() -> Vec<(Method, String)> {
    let d = "/documents/doc";
    let mut v = vec![
        (Method::POST, "/auth/password".to_string()),
        (Method::GET, "/documents".to_string()),
        (Method::POST, "/documents".to_string()),
        (Method::GET, d.to_string()),
        (Method::PUT, d.to_string()),
        (Method::GET, "/reconcile/search?label=DC".to_string()),
        (Method::GET, "/reconcile/details/Q815348".to_string()),
    ];
    for (m, tail) in [
        (Method::GET, "html"),
        (Method::GET, "tei"),
        (Method::PUT, "status"),
        (Method::POST, "mark"),
        (Method::POST, "extend-to-word"),
        (Method::POST, "highlight-all"),
        (Method::POST, "merge"),
        (Method::POST, "move-mention"),
        (Method::POST, "relabel"),
        (Method::POST, "sort-key"),
        (Method::POST, "alias"),
        (Method::POST, "location"),
        (Method::POST, "empty-trash"),
        (Method::GET, "entities?category=People"),
        (Method::GET, "concordance?entity=%23DC"),
        (Method::GET, "entities/export"),
        (Method::POST, "entities/import"),
        (Method::POST, "link"),
        (Method::POST, "unlink"),
        (Method::GET, "metadata"),
        (Method::PUT, "metadata"),
    ] {
        v.push((m, format!("{d}/{tail}")));
    }
    v
}

fn expect(r: &Reply, status: StatusCode, what: &str) -> Result<(), String> {
    if r.status != status {
        return Err(format!("{what}: expected {status}, got {} {}", r.status, r.text));
    }
    if r.text.contains("$argon2") {
        return Err(format!("{what}: response leaks a password hash"));
    }
    Ok(())
}

/// Without a token every route except login answers 401.
pub async fn check_auth_required(h: &Harness) -> Result<usize, String> {
    let routes = routes();
    for (m, p) in &routes {
        for token in [None, Some("not-a-token")] {
            let r = h.send(m.clone(), p, token, Some(json!({}))).await;
            expect(&r, StatusCode::UNAUTHORIZED, &format!("{m} {p} token={token:?}"))?;
            if r.code() != "Unauthorized" {
                return Err(format!("{m} {p}: code {}", r.code()));
            }
        }
    }
    Ok(routes.len())
}

/// Walks every route once with a valid request on a fresh document.
/// Returns the number of distinct routes exercised, login included.
pub async fn api_smoke(h: &Harness, doc: &str) -> Result<usize, String> {
    let d = format!("/documents/{doc}");
    let mut seen = std::collections::BTreeSet::new();
    let mut hit = |m: &Method, route: &str| {
        seen.insert(format!("{m} {route}"));
    };
    let login = h
        .send(Method::POST, "/auth/login", None, Some(json!({"username": USER, "password": PASSWORD})))
        .await;
    expect(&login, StatusCode::OK, "login")?;
    hit(&Method::POST, "/auth/login");

    let r = h.upload(doc, DC_TEXT).await;
    expect(&r, StatusCode::CREATED, "upload")?;
    hit(&Method::POST, "/documents");
    let chars: Vec<char> = DC_TEXT.chars().collect();
    let find = |w: &str| {
        let w: Vec<char> = w.chars().collect();
        (0..chars.len()).find(|&i| chars[i..].starts_with(&w)).unwrap()
    };
    let dc_full = find("Democrazia");
    let magg = find("maggioranza");
    for (s, e) in [(26, 28), (dc_full, dc_full + 20), (magg, magg + 11)] {
        let r = h
            .call(Method::POST, &format!("{d}/mark"), Some(json!({"start": s, "end": e, "category": "Organizations"})))
            .await;
        expect(&r, StatusCode::OK, "mark")?;
    }
    hit(&Method::POST, "/documents/{id}/mark");

    let r = h.call(Method::GET, "/documents?status=ToBeStarted", None).await;
    expect(&r, StatusCode::OK, "list")?;
    if !r.json().as_array().unwrap().iter().any(|s| s["doc_id"] == doc) {
        return Err("list: uploaded document missing".into());
    }
    hit(&Method::GET, "/documents");

    let r = h.call(Method::GET, &d, None).await;
    expect(&r, StatusCode::OK, "get")?;
    hit(&Method::GET, "/documents/{id}");
    let stored = r.json();
    let r = h
        .call(
            Method::PUT,
            &d,
            Some(json!({"document": stored["document"], "base_revision": stored["revision"]})),
        )
        .await;
    expect(&r, StatusCode::OK, "save")?;
    hit(&Method::PUT, "/documents/{id}");

    let r = h.call(Method::GET, &format!("{d}/html"), None).await;
    expect(&r, StatusCode::OK, "html")?;
    if !r.content_type.starts_with("text/html") || !r.text.contains("typeof=\"foaf:Organization\"") {
        return Err(format!("html: unexpected body {}", r.content_type));
    }
    hit(&Method::GET, "/documents/{id}/html");

    let r = h
        .call(Method::POST, &format!("{d}/extend-to-word"), Some(json!({"start": 27, "end": 28})))
        .await;
    expect(&r, StatusCode::OK, "extend-to-word")?;
    if r.json()["text"] != "DC" {
        return Err(format!("extend-to-word: {}", r.text));
    }
    hit(&Method::POST, "/documents/{id}/extend-to-word");

    let r = h
        .call(Method::POST, &format!("{d}/highlight-all"), Some(json!({"start": 0, "end": 4, "category": "People"})))
        .await;
    expect(&r, StatusCode::OK, "highlight-all")?;
    hit(&Method::POST, "/documents/{id}/highlight-all");

    for (tail, body) in [
        ("alias", json!({"entity_id": "#DC", "alias": "Balena bianca"})),
        ("sort-key", json!({"entity_id": "#DC", "sort_key": "DC"})),
        ("relabel", json!({"entity_id": "#DemocraziaCristiana", "label": "Democrazia Cristiana (partito)"})),
        ("merge", json!({"source": "#DC", "target": "#DemocraziaCristiana"})),
        ("move-mention", json!({"mention_id": "mention-3", "target": "#DemocraziaCristiana"})),
    ] {
        let r = h.call(Method::POST, &format!("{d}/{tail}"), Some(body)).await;
        expect(&r, StatusCode::OK, tail)?;
        hit(&Method::POST, &format!("/documents/{{id}}/{tail}"));
    }

    let r = h.call(Method::GET, &format!("{d}/entities?category=Organizations"), None).await;
    expect(&r, StatusCode::OK, "entities")?;
    let orgs = r.json();
    let dc = orgs
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["entity"]["entity_id"] == "#DemocraziaCristiana")
        .ok_or("entities: merged target missing")?;
    if dc["occurrences"] != 3 {
        return Err(format!("entities: expected 3 occurrences, got {}", dc["occurrences"]));
    }
    hit(&Method::GET, "/documents/{id}/entities");

    let r = h
        .call(Method::GET, &format!("{d}/concordance?entity=%23DemocraziaCristiana&style=KWAC&window=3"), None)
        .await;
    expect(&r, StatusCode::OK, "concordance")?;
    if r.json().as_array().map(Vec::len) != Some(3) {
        return Err(format!("concordance: {}", r.text));
    }
    hit(&Method::GET, "/documents/{id}/concordance");

    let r = h.call(Method::GET, "/reconcile/search?label=Democrazia%20Cristiana", None).await;
    expect(&r, StatusCode::OK, "search")?;
    if r.json()[0]["qid"] != "Q815348" || r.json().as_array().unwrap().len() != 3 {
        return Err(format!("search: {}", r.text));
    }
    hit(&Method::GET, "/reconcile/search");
    let r = h.call(Method::GET, "/reconcile/details/Q815348", None).await;
    expect(&r, StatusCode::OK, "details")?;
    if r.json()["treccani_id"] != "democrazia-cristiana" {
        return Err(format!("details: {}", r.text));
    }
    hit(&Method::GET, "/reconcile/details/{qid}");
    let r = h
        .call(Method::POST, &format!("{d}/link"), Some(json!({"entity_id": "#DemocraziaCristiana", "qid": "Q815348"})))
        .await;
    expect(&r, StatusCode::OK, "link")?;
    hit(&Method::POST, "/documents/{id}/link");

    let r = h
        .call(
            Method::PUT,
            &format!("{d}/metadata"),
            Some(json!({"record": {"document_number": "042", "event_date": "09-05-1978", "event_place": "Roma"}})),
        )
        .await;
    expect(&r, StatusCode::OK, "metadata put")?;
    hit(&Method::PUT, "/documents/{id}/metadata");
    let r = h.call(Method::GET, &format!("{d}/metadata"), None).await;
    expect(&r, StatusCode::OK, "metadata get")?;
    if r.json()["document_number"] != "042" {
        return Err(format!("metadata get: {}", r.text));
    }
    hit(&Method::GET, "/documents/{id}/metadata");

    let r = h.call(Method::GET, &format!("{d}/tei"), None).await;
    expect(&r, StatusCode::OK, "tei")?;
    if !r.text.contains("<orgName") || !r.text.contains("http://www.wikidata.org/entity/Q815348") {
        return Err("tei: orgName with the Wikidata IRI missing".into());
    }
    hit(&Method::GET, "/documents/{id}/tei");

    let r = h
        .call(Method::POST, &format!("{d}/unlink"), Some(json!({"entity_id": "#DemocraziaCristiana"})))
        .await;
    expect(&r, StatusCode::OK, "unlink")?;
    hit(&Method::POST, "/documents/{id}/unlink");

    let r = h.call(Method::PUT, &format!("{d}/status"), Some(json!({"status": "InProgress"}))).await;
    expect(&r, StatusCode::OK, "status")?;
    hit(&Method::PUT, "/documents/{id}/status");

    let r = h.call(Method::GET, &format!("{d}/entities/export"), None).await;
    expect(&r, StatusCode::OK, "export")?;
    hit(&Method::GET, "/documents/{id}/entities/export");
    let exported = r.text;
    let copy = format!("{doc}-copy");
    expect(&h.upload(&copy, DC_TEXT).await, StatusCode::CREATED, "upload copy")?;
    let r = h
        .raw(Method::POST, &format!("/documents/{copy}/entities/import"), Some(&h.token), Body::from(exported), false)
        .await;
    expect(&r, StatusCode::OK, "import")?;
    if r.json()["result"]["imported"].as_u64().unwrap_or(0) == 0 {
        return Err(format!("import: {}", r.text));
    }
    hit(&Method::POST, "/documents/{id}/entities/import");

    let r = h
        .call(Method::POST, &format!("{d}/location"), Some(json!({"entity_id": "#Alle", "location": "trash"})))
        .await;
    expect(&r, StatusCode::OK, "location")?;
    hit(&Method::POST, "/documents/{id}/location");
    let r = h.call(Method::POST, &format!("{d}/empty-trash"), None).await;
    expect(&r, StatusCode::OK, "empty-trash")?;
    // #maggioranza was emptied by move-mention and trashed with it.
    if r.json()["result"]["purged"] != 2 {
        return Err(format!("empty-trash: {}", r.text));
    }
    hit(&Method::POST, "/documents/{id}/empty-trash");

    let r = h
        .call(Method::POST, "/auth/password", Some(json!({"old_password": PASSWORD, "new_password": PASSWORD})))
        .await;
    expect(&r, StatusCode::NO_CONTENT, "password")?;
    hit(&Method::POST, "/auth/password");

    Ok(seen.len())
}
