mod common;

use std::sync::atomic::Ordering;

use axum::body::Body;
use axum::http::{Method, StatusCode};
use common::{Harness, DC_TEXT, PASSWORD, USER};
use kwicdesk_core::{parse_rdfa, render_rdfa, Document};
use serde_json::json;

#[tokio::test]
async fn every_route_requires_a_token() {
    let h = Harness::new().await;
    let n = common::check_auth_required(&h).await.unwrap();
    assert_eq!(n, 28);
}

#[tokio::test]
async fn every_route_answers_a_valid_request() {
    let h = Harness::new().await;
    assert_eq!(common::api_smoke(&h, "smoke").await.unwrap(), 29);
    assert!(h.transport.misses().is_empty(), "{:?}", h.transport.misses());
}

#[tokio::test]
async fn unknown_route_is_json_404() {
    let h = Harness::new().await;
    let r = h.call(Method::GET, "/nowhere", None).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    assert_eq!(r.code(), "NotFound");
}

#[tokio::test]
async fn login_rejects_bad_credentials_alike() {
    let h = Harness::new().await;
    for (u, p) in [(USER, "wrong password"), ("nobody", PASSWORD)] {
        let r = h.send(Method::POST, "/auth/login", None, Some(json!({"username": u, "password": p}))).await;
        assert_eq!(r.status, StatusCode::UNAUTHORIZED);
        assert_eq!(r.code(), "InvalidCredentials");
    }
    let r = h
        .send(Method::POST, "/auth/login", None, Some(json!({"username": USER, "password": PASSWORD})))
        .await;
    let body = r.json();
    assert_eq!(body["user"]["username"], USER);
    assert_eq!(body["user"]["role"], "annotator");
    assert_eq!(body["expires_in"], 12 * 3600);
    assert!(!r.text.contains("argon2") && !r.text.contains("password"));
}

#[tokio::test]
async fn password_change_takes_effect() {
    let h = Harness::new().await;
    let r = h
        .call(Method::POST, "/auth/password", Some(json!({"old_password": "nope nope", "new_password": "another secret"})))
        .await;
    assert_eq!(r.code(), "InvalidCredentials");
    let r = h
        .call(Method::POST, "/auth/password", Some(json!({"old_password": PASSWORD, "new_password": "short"})))
        .await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.code(), "WeakPassword");
    let r = h
        .call(Method::POST, "/auth/password", Some(json!({"old_password": PASSWORD, "new_password": "another secret"})))
        .await;
    assert_eq!(r.status, StatusCode::NO_CONTENT);
    let old = h
        .send(Method::POST, "/auth/login", None, Some(json!({"username": USER, "password": PASSWORD})))
        .await;
    assert_eq!(old.status, StatusCode::UNAUTHORIZED);
    let new = h
        .send(Method::POST, "/auth/login", None, Some(json!({"username": USER, "password": "another secret"})))
        .await;
    assert_eq!(new.status, StatusCode::OK);
}

#[tokio::test]
async fn expired_token_cannot_save() {
    let h = Harness::new().await;
    h.dc_document("doc").await;
    let before = h.call(Method::GET, "/documents/doc", None).await.json();
    h.clock.0.fetch_add(12 * 3600, Ordering::SeqCst);
    let r = h
        .call(Method::POST, "/documents/doc/mark", Some(json!({"start": 0, "end": 4, "category": "People"})))
        .await;
    assert_eq!(r.status, StatusCode::UNAUTHORIZED);
    assert_eq!(r.code(), "TokenExpired");
    let r = h
        .call(Method::PUT, "/documents/doc", Some(json!({"document": before["document"]})))
        .await;
    assert_eq!(r.code(), "TokenExpired");
    h.clock.0.fetch_sub(1, Ordering::SeqCst);
    let after = h.call(Method::GET, "/documents/doc", None).await.json();
    assert_eq!(before, after);
}

#[tokio::test]
async fn stale_revision_is_a_conflict_and_writes_nothing() {
    let h = Harness::new().await;
    h.dc_document("doc").await;
    let rev = h.revision("doc").await;
    let r = h
        .call(
            Method::POST,
            "/documents/doc/mark",
            Some(json!({"start": 0, "end": 4, "category": "People", "base_revision": rev})),
        )
        .await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["revision"], rev + 1);
    let html = h.call(Method::GET, "/documents/doc/html", None).await.text;
    for (m, path, body) in [
        (Method::POST, "/documents/doc/mark", json!({"start": 5, "end": 13, "category": "Places", "base_revision": rev})),
        (Method::POST, "/documents/doc/relabel", json!({"entity_id": "#DC", "label": "X", "base_revision": rev})),
        (Method::PUT, "/documents/doc/status", json!({"status": "Finished", "base_revision": rev})),
        (Method::PUT, "/documents/doc/metadata", json!({"record": {"document_number": "001"}, "base_revision": rev})),
    ] {
        let r = h.call(m, path, Some(body)).await;
        assert_eq!(r.status, StatusCode::CONFLICT, "{path}: {}", r.text);
        assert_eq!(r.code(), "ConflictError");
        assert_eq!(r.json()["field"], "base_revision");
    }
    let stored = h.call(Method::GET, "/documents/doc", None).await.json();
    let r = h
        .call(Method::PUT, "/documents/doc", Some(json!({"document": stored["document"], "base_revision": rev})))
        .await;
    assert_eq!(r.code(), "ConflictError");
    assert_eq!(h.revision("doc").await, rev + 1);
    assert_eq!(h.call(Method::GET, "/documents/doc/html", None).await.text, html);
    assert_eq!(h.call(Method::GET, "/documents/doc/metadata", None).await.text, "null");
}

#[tokio::test]
async fn list_filters_by_status_and_id() {
    let h = Harness::new().await;
    h.upload("verbale-1", "uno").await;
    h.upload("verbale-2", "due").await;
    let r = h.call(Method::PUT, "/documents/verbale-2/status", Some(json!({"status": "InProgress"}))).await;
    assert_eq!(r.status, StatusCode::OK);
    let r = h.call(Method::GET, "/documents?status=InProgress", None).await.json();
    let ids: Vec<_> = r.as_array().unwrap().iter().map(|d| d["doc_id"].clone()).collect();
    assert_eq!(ids, vec![json!("verbale-2")]);
    assert_eq!(h.call(Method::GET, "/documents?q=VERBALE", None).await.json().as_array().unwrap().len(), 2);
    let r = h.call(Method::GET, "/documents?status=Done", None).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["field"], "status");
}

#[tokio::test]
async fn uploads() {
    let h = Harness::new().await;
    let r = h.upload("vuoto", "").await;
    assert_eq!(r.status, StatusCode::CREATED);
    assert_eq!(r.json()["revision"], 1);
    assert_eq!(h.upload("vuoto", "x").await.code(), "DuplicateDocument");
    let r = h.call(Method::POST, "/documents", Some(json!({"content": "no id"}))).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["field"], "doc_id");
    assert_eq!(h.upload("nul", "a\0b").await.code(), "InvalidText");

    h.dc_document("src").await;
    let html = h.call(Method::GET, "/documents/src/html", None).await.text;
    let r = h.call(Method::POST, "/documents", Some(json!({"content": html}))).await;
    assert_eq!(r.status, StatusCode::CONFLICT, "the title names an existing document");
    let r = h.call(Method::POST, "/documents", Some(json!({"doc_id": "dst", "content": html}))).await;
    assert_eq!(r.status, StatusCode::CREATED);
    assert_eq!(h.call(Method::GET, "/documents/dst/entities?category=Organizations", None).await.json().as_array().unwrap().len(), 2);

    let r = h
        .call(Method::POST, "/documents", Some(json!({"doc_id": "bad", "content": "<p><span id=\"mention-1\" typeof=\"foaf:Person\" class=\"mention person\">Moro</span></p>", "format": "html"})))
        .await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.code(), "ParseError");

    let r = h.raw(Method::POST, "/documents", Some(&h.token), Body::from("{not json"), true).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.code(), "BadRequest");
}

#[tokio::test]
async fn annotation_error_codes() {
    let h = Harness::new().await;
    h.dc_document("doc").await;
    let post = |path: &'static str, body| h.call(Method::POST, path, Some(body));
    let r = post("/documents/doc/mark", json!({"start": 27, "end": 30, "category": "People"})).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::CONFLICT, "OverlappingMention"));
    let r = post("/documents/doc/mark", json!({"start": 0, "end": 4, "category": "People"})).await;
    assert_eq!(r.status, StatusCode::OK);
    let r = post("/documents/doc/merge", json!({"source": "#Alle", "target": "#DC"})).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::UNPROCESSABLE_ENTITY, "CategoryMismatch"));
    let r = post("/documents/doc/merge", json!({"source": "#DC", "target": "#DC"})).await;
    assert_eq!(r.code(), "SelfMerge");
    let r = post("/documents/doc/relabel", json!({"entity_id": "#Nessuno", "label": "x"})).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::NOT_FOUND, "UnknownEntity"));
    let r = post("/documents/doc/move-mention", json!({"mention_id": "mention-99", "target": "#DC"})).await;
    assert_eq!(r.code(), "UnknownMention");
    let r = post("/documents/doc/mark", json!({"start": 0, "end": 999, "category": "People"})).await;
    assert_eq!(r.code(), "SelectionOutOfBounds");
    let r = post("/documents/doc/mark", json!({"start": 5, "end": 5, "category": "People"})).await;
    assert_eq!(r.code(), "EmptySelection");
    let r = post("/documents/doc/mark", json!({"start": 5, "end": 13, "category": "Luoghi"})).await;
    assert_eq!(r.code(), "UnknownCategory");
    let r = post("/documents/doc/mark", json!({"start": 4, "end": 5, "category": "People"})).await;
    assert_eq!(r.code(), "InvalidLabel");
    let r = post("/documents/doc/location", json!({"entity_id": "#Alle", "location": "bin"})).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = h.call(Method::GET, "/documents/nope", None).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::NOT_FOUND, "UnknownDocument"));
}

#[tokio::test]
async fn highlight_all_and_empty_trash() {
    let h = Harness::new().await;
    h.upload("doc", "Moro, poi Moro e ancora Moro. Morotei no.").await;
    let r = h
        .call(Method::POST, "/documents/doc/highlight-all", Some(json!({"start": 0, "end": 4, "category": "People"})))
        .await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["result"].as_array().unwrap().len(), 3);
    let r = h
        .call(Method::POST, "/documents/doc/location", Some(json!({"entity_id": "#Moro", "location": "trash"})))
        .await;
    assert_eq!(r.json()["result"]["location"], "trash");
    let html = h.call(Method::GET, "/documents/doc/html", None).await.text;
    assert!(!html.contains("#Moro"));
    let r = h.call(Method::POST, "/documents/doc/empty-trash", None).await;
    assert_eq!(r.json()["result"]["purged"], 1);
    let r = h.call(Method::POST, "/documents/doc/empty-trash", Some(json!({}))).await;
    assert_eq!(r.json()["result"]["purged"], 0);
    let stored = h.call(Method::GET, "/documents/doc", None).await.json();
    assert_eq!(stored["document"]["mentions"].as_array().map(Vec::len).unwrap_or(0), 0);
}

#[tokio::test]
async fn concordance_styles() {
    let h = Harness::new().await;
    h.dc_document("doc").await;
    let r = h.call(Method::GET, "/documents/doc/concordance?entity=%23DC", None).await;
    let entries = r.json();
    assert_eq!(entries[0]["text"], "Alle elezioni del 1948 la\tDC\tottenne la maggioranza.");
    let r = h.call(Method::GET, "/documents/doc/concordance?entity=%23DC&style=KWAC&window=2", None).await;
    assert_eq!(r.json()[0]["text"], "DC ottenne la / 1948 la");
    let r = h.call(Method::GET, "/documents/doc/concordance?entity=%23DC&style=KWOC", None).await;
    assert!(r.json()[0]["text"].as_str().unwrap().starts_with("DC "));
    let r = h.call(Method::GET, "/documents/doc/concordance?entity=%23DC&style=ZIG", None).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["field"], "style");
    let r = h.call(Method::GET, "/documents/doc/concordance?entity=%23DC&window=0", None).await;
    assert_eq!(r.json()["field"], "window");
    let r = h.call(Method::GET, "/documents/doc/concordance?entity=%23Nessuno", None).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    assert_eq!(r.code(), "UnknownEntity");
    let r = h.call(Method::GET, "/documents/doc/entities?category=Organizations", None).await.json();
    assert_eq!(r.as_array().unwrap().len(), 2);
    let r = h.call(Method::GET, "/documents/doc/entities?category=Nope", None).await;
    assert_eq!(r.code(), "UnknownCategory");
}

#[tokio::test]
async fn html_is_the_rendered_document() {
    let h = Harness::new().await;
    h.dc_document("doc").await;
    let stored = h.call(Method::GET, "/documents/doc", None).await.json();
    let doc: Document = serde_json::from_value(stored["document"].clone()).unwrap();
    let r = h.call(Method::GET, "/documents/doc/html", None).await;
    assert_eq!(r.content_type, "text/html; charset=utf-8");
    assert_eq!(r.text, render_rdfa(&doc));
    assert_eq!(parse_rdfa(&r.text).unwrap().document, doc);
}

#[tokio::test]
async fn tei_export() {
    let h = Harness::new().await;
    h.dc_document("doc").await;
    h.call(Method::POST, "/documents/doc/link", Some(json!({"entity_id": "#DC", "qid": "Q815348"}))).await;
    h.call(
        Method::PUT,
        "/documents/doc/metadata",
        Some(json!({"record": {"document_number": "007", "event_date": "09-05-1978", "event_place": "Roma & dintorni <centro>"}})),
    )
    .await;
    let r = h.call(Method::GET, "/documents/doc/tei", None).await;
    assert!(r.content_type.starts_with("application/tei+xml"));
    let xml = roxmltree::Document::parse(&r.text).unwrap();
    let org = xml.descendants().find(|n| n.has_tag_name("orgName")).unwrap();
    assert_eq!(org.attribute("ref"), Some("#DC http://www.wikidata.org/entity/Q815348"));
    assert_eq!(org.text(), Some("DC"));
    let date = xml.descendants().find(|n| n.has_tag_name("date")).unwrap();
    assert_eq!(date.attribute("when"), Some("1978-05-09"));
    assert!(xml.descendants().any(|n| n.text() == Some("Roma & dintorni <centro>")));
}

#[tokio::test]
async fn entity_import_export() {
    let h = Harness::new().await;
    h.dc_document("doc").await;
    let exported = h.call(Method::GET, "/documents/doc/entities/export", None).await;
    assert_eq!(exported.content_type, "application/json");
    h.upload("copy", DC_TEXT).await;
    let import = |body: &str| {
        h.raw(Method::POST, "/documents/copy/entities/import", Some(&h.token), Body::from(body.to_string()), false)
    };
    let r = import("[{\"entity_id\": 5}").await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::UNPROCESSABLE_ENTITY, "ImportError"));
    let r = import(&exported.text).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text);
    assert_eq!(r.json()["result"]["imported"], 2);
    let again = h.call(Method::GET, "/documents/copy/entities/export", None).await;
    assert_eq!(again.text, exported.text);
}

#[tokio::test]
async fn reconciliation_endpoints() {
    let h = Harness::new().await;
    h.dc_document("doc").await;
    let r = h.call(Method::GET, "/reconcile/search?label=Democrazia%20Cristiana", None).await.json();
    let qids: Vec<_> = r.as_array().unwrap().iter().map(|c| c["qid"].as_str().unwrap().to_string()).collect();
    assert_eq!(qids, ["Q815348", "Q1207458", "Q3706285"]);
    assert_eq!(r[0]["match_score"], 1);
    let r = h.call(Method::GET, "/reconcile/search?label=Partito%20Inesistente%20Xyzzy", None).await;
    assert_eq!(r.json(), json!([]));
    let r = h.call(Method::GET, "/reconcile/search?label=%20", None).await;
    assert_eq!(r.code(), "InvalidLabel");
    let r = h.call(Method::GET, "/reconcile/search?label=x&limit=0", None).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = h.call(Method::GET, "/reconcile/search?label=Not%20Recorded", None).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::BAD_GATEWAY, "ReconciliationUnavailable"));

    let r = h.call(Method::GET, "/reconcile/details/Q1207458", None).await.json();
    assert_eq!(r["treccani_id"], "Not Detected");
    let r = h.call(Method::GET, "/reconcile/details/Q999999999", None).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::NOT_FOUND, "NotFound"));
    let r = h.call(Method::GET, "/reconcile/details/815348", None).await;
    assert_eq!(r.code(), "InvalidQid");

    let link = |entity: &str, qid: &str| {
        h.call(Method::POST, "/documents/doc/link", Some(json!({"entity_id": entity, "qid": qid})))
    };
    let r = link("#DC", "Q999999999").await;
    assert_eq!(r.code(), "NotFound");
    let r = link("#Nessuno", "Q815348").await;
    assert_eq!(r.code(), "UnknownEntity");
    let r = link("#DC", "Q815348").await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["result"]["entity"]["treccani_id"], "democrazia-cristiana");
    let html = h.call(Method::GET, "/documents/doc/html", None).await.text;
    assert!(html.contains("resource=\"http://www.wikidata.org/entity/Q815348\""));
    let r = h.call(Method::POST, "/documents/doc/unlink", Some(json!({"entity_id": "#DC"}))).await;
    assert_eq!(r.status, StatusCode::OK);
    let r = h.call(Method::POST, "/documents/doc/unlink", Some(json!({"entity_id": "#DC"}))).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::CONFLICT, "NotLinked"));
    let html = h.call(Method::GET, "/documents/doc/html", None).await.text;
    assert!(!html.contains("wikidata.org"));
}

#[tokio::test]
async fn metadata_validation() {
    let h = Harness::new().await;
    h.upload("doc", "testo").await;
    assert_eq!(h.call(Method::GET, "/documents/doc/metadata", None).await.text, "null");
    let put = |record| h.call(Method::PUT, "/documents/doc/metadata", Some(json!({ "record": record })));
    for (record, field) in [
        (json!({"document_number": "1000"}), "document_number"),
        (json!({"document_number": "000"}), "document_number"),
        (json!({"document_number": "001", "event_date": "31-02-1960"}), "event_date"),
        (json!({"document_number": "001", "event_date": "1960-02-01"}), "event_date"),
    ] {
        let r = put(record).await;
        assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
        assert_eq!(r.code(), "ValidationError");
        assert_eq!(r.json()["field"], field);
    }
    let r = put(json!({"document_number": "999", "event_date": "29-02-1960", "document_type": ["lettera"]})).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text);
    let got = h.call(Method::GET, "/documents/doc/metadata", None).await.json();
    assert_eq!(got["document_number"], "999");
    assert_eq!(got["document_type"], json!(["lettera"]));
    let r = h.call(Method::PUT, "/documents/nope/metadata", Some(json!({"record": {"document_number": "001"}}))).await;
    assert_eq!(r.code(), "UnknownDocument");
}

#[tokio::test]
async fn save_replaces_the_document() {
    let h = Harness::new().await;
    h.dc_document("doc").await;
    let stored = h.call(Method::GET, "/documents/doc", None).await.json();
    let mut doc: Document = serde_json::from_value(stored["document"].clone()).unwrap();
    doc.mark_selection(kwicdesk_core::Span::new(0, 4), "People").unwrap();
    let r = h
        .call(Method::PUT, "/documents/doc", Some(json!({"document": doc, "base_revision": stored["revision"]})))
        .await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(h.call(Method::GET, "/documents/doc/html", None).await.text, render_rdfa(&doc));
    let mut other = doc.clone();
    other.doc_id = "elsewhere".into();
    let r = h.call(Method::PUT, "/documents/doc", Some(json!({"document": other}))).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let mut broken = serde_json::to_value(&doc).unwrap();
    broken["mentions"][0]["entity_id"] = json!("#Dangling");
    let r = h.call(Method::PUT, "/documents/doc", Some(json!({"document": broken}))).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::UNPROCESSABLE_ENTITY, "InvalidDocument"));
}

#[tokio::test]
async fn extend_to_word_is_a_preview() {
    let h = Harness::new().await;
    h.upload("doc", "l’ex segretario d’Alema").await;
    let rev = h.revision("doc").await;
    let r = h.call(Method::POST, "/documents/doc/extend-to-word", Some(json!({"start": 18, "end": 19}))).await;
    assert_eq!(r.json(), json!({"start": 16, "end": 23, "text": "d’Alema"}));
    assert_eq!(h.revision("doc").await, rev);
}
