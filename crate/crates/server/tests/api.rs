use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use http_body_util::BodyExt;
use morphtag::io::{read_project, ProjectFile};
use morphtag::pipeline::{match_records, Engine};
use morphtag_server::{router, AppState};
use serde_json::{json, Value};
use std::path::PathBuf;
use tower::ServiceExt;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn text(name: &str) -> String {
    std::fs::read_to_string(fixtures().join(name).join("text.txt")).unwrap()
}

fn project(name: &str) -> ProjectFile {
    read_project(&fixtures().join(name).join("project.json")).unwrap()
}

fn state(name: &str) -> AppState {
    AppState::new(fixtures().join(name))
}

async fn call(state: &AppState, method: Method, uri: &str, body: Option<String>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = router(state.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

async fn post(state: &AppState, uri: &str, body: Value) -> (StatusCode, Value) {
    call(state, Method::POST, uri, Some(body.to_string())).await
}

#[tokio::test]
async fn empty_session_has_no_project() {
    let (status, body) = call(&state("direction"), Method::GET, "/project", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(body["error"].is_string());
}

#[tokio::test]
async fn put_then_get_project() {
    let s = state("direction");
    let p = project("direction");
    let (status, _) = call(&s, Method::PUT, "/project", Some(p.to_json())).await;
    assert_eq!(status, StatusCode::OK);
    let (status, body) = call(&s, Method::GET, "/project", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(serde_json::from_value::<ProjectFile>(body).unwrap(), p);
}

#[tokio::test]
async fn invalid_project_is_rejected() {
    let s = state("direction");
    let mut p = project("direction");
    p.mre[0].expression = "(P".into();
    let (status, body) = call(&s, Method::PUT, "/project", Some(p.to_json())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"].as_str().unwrap().contains("direction"));
    let (status, _) = call(&s, Method::PUT, "/project", Some("{\"version\": 1".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn simulate_mbf_matches_library() {
    let s = state("direction");
    s.set_project(project("direction")).unwrap();
    let (status, body) = post(&s, "/simulate/mbf", json!({ "text": text("direction") })).await;
    assert_eq!(status, StatusCode::OK);
    let words = body["words"].as_array().unwrap();
    assert_eq!(words.len(), 41);
    let engine = Engine::load(&fixtures().join("direction/project.json")).unwrap();
    let doc = engine.document(&text("direction"));
    for (w, tags) in words.iter().zip(&doc.tags.per_word) {
        let got: Vec<&str> = w["tags"].as_array().unwrap().iter().map(|t| t.as_str().unwrap()).collect();
        assert_eq!(got, tags.iter().map(String::as_str).collect::<Vec<_>>());
    }
    assert_eq!(words[4]["tags"], json!(["P"]));
    assert_eq!(words[0]["tags"], json!(["NONE"]));
}

#[tokio::test]
async fn simulate_mre_matches_library() {
    let s = state("direction");
    let (status, body) = post(
        &s,
        "/simulate/mre",
        json!({ "text": text("direction"), "project": project("direction") }),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let engine = Engine::load(&fixtures().join("direction/project.json")).unwrap();
    let doc = engine.document(&text("direction"));
    let matches = engine.simulate(&doc).unwrap();
    assert_eq!(body["matches"], json!(match_records(&doc, &matches)));
    assert_eq!(body["matches"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn relations_endpoint() {
    let s = state("direction");
    s.set_project(project("direction")).unwrap();
    let (status, body) = post(&s, "/extract/relations", json!({ "text": text("direction") })).await;
    assert_eq!(status, StatusCode::OK);
    let labels: Vec<&str> = body["edges"].as_array().unwrap().iter().map(|e| e["label"].as_str().unwrap()).collect();
    assert!(labels.contains(&"next to") && labels.contains(&"near"));
    assert_eq!(body["nodes"].as_array().unwrap().len(), 6);
}

#[tokio::test]
async fn actions_endpoint() {
    let s = state("numbers");
    s.set_project(project("numbers")).unwrap();
    let (status, body) = post(&s, "/actions/run", json!({ "text": "دفع ثلاثة مائة خمسة وأربعون درهما" })).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["emitted"][0]["value"], json!({ "type": "number", "value": 345 }));
}

#[tokio::test]
async fn analyze_endpoint() {
    let s = state("direction");
    s.set_project(project("direction")).unwrap();
    let (status, body) = post(&s, "/analyze", json!({ "text": "بالقرب" })).await;
    assert_eq!(status, StatusCode::OK);
    let sol = &body["words"][0]["solutions"][0];
    assert_eq!(sol["stem"]["form"], "قرب");
    assert_eq!(sol["prefixes"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn diff_endpoint() {
    let s = state("direction");
    let x = |i: usize, l: usize| json!({ "index": i, "length": l, "label": "X" });
    let body = json!({
        "reference": [x(0, 4), x(10, 3)],
        "candidate": [x(0, 4), x(20, 2)],
        "predicate": "exact",
    });
    let (status, report) = post(&s, "/diff", body).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(report["precision"], json!("1/2"));
    assert_eq!(report["recall"], json!("1/2"));
    let bad = json!({ "reference": [x(0, 4)], "candidate": [], "documentLength": 3 });
    assert_eq!(post(&s, "/diff", bad).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn malformed_requests() {
    let s = state("direction");
    s.set_project(project("direction")).unwrap();
    let (status, body) = call(&s, Method::POST, "/simulate/mbf", Some("not json".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"].is_string());
    assert_eq!(post(&s, "/simulate/mre", json!({ "txt": "x" })).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(post(&s, "/diff", json!({ "reference": [] })).await.0, StatusCode::BAD_REQUEST);
    let empty = state("direction");
    assert_eq!(post(&empty, "/simulate/mre", json!({ "text": "x" })).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn step_budget_is_reported() {
    let s = state("direction").with_max_steps(5);
    s.set_project(project("direction")).unwrap();
    let (status, body) = post(&s, "/simulate/mre", json!({ "text": text("direction") })).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["stage"], "simulate");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_requests_agree() {
    let s = state("direction");
    s.set_project(project("direction")).unwrap();
    let tasks: Vec<_> = (0..8)
        .map(|_| {
            let s = s.clone();
            tokio::spawn(async move { post(&s, "/simulate/mre", json!({ "text": text("direction") })).await })
        })
        .collect();
    let mut results = Vec::new();
    for t in tasks {
        results.push(t.await.unwrap());
    }
    assert!(results.iter().all(|r| r == &results[0]));
}
