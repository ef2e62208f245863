//! The HTTP judger against a scripted local server.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::Path;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use serde_json::{json, Value};

use percept_eval::curation::{judge, CandidateQA, CurationError, HttpJudger, JudgerScores};
use percept_eval::taxonomy::Domain;

type Handler = dyn Fn(usize, &Value) -> (u16, String) + Send + Sync;

/// Serves `handler(request_index, json_body)` on an ephemeral port.
fn serve(handler: Box<Handler>) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/judge", listener.local_addr().unwrap());
    let count = Arc::new(AtomicUsize::new(0));
    let seen = Arc::clone(&count);
    let handler: Arc<Handler> = Arc::from(handler);
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let handler = Arc::clone(&handler);
            let seen = Arc::clone(&seen);
            std::thread::spawn(move || {
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut length = 0;
                loop {
                    let mut line = String::new();
                    if reader.read_line(&mut line).unwrap_or(0) == 0 {
                        return;
                    }
                    let line = line.trim_end();
                    if line.is_empty() {
                        break;
                    }
                    if let Some((k, v)) = line.split_once(':') {
                        if k.eq_ignore_ascii_case("content-length") {
                            length = v.trim().parse().unwrap_or(0);
                        }
                    }
                }
                let mut body = vec![0; length];
                reader.read_exact(&mut body).unwrap();
                let request: Value = serde_json::from_slice(&body).unwrap_or(Value::Null);
                let index = seen.fetch_add(1, Ordering::SeqCst);
                let (status, reply) = handler(index, &request);
                let response = format!(
                    "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{reply}",
                    reply.len()
                );
                let _ = stream.write_all(response.as_bytes());
            });
        }
    });
    (url, count)
}

fn scores(v: i64) -> String {
    json!({
        "question_validity": v,
        "answer_validity": v,
        "reasoning_validity": v,
        "criterion_relevance": v,
    })
    .to_string()
}

fn candidate(id: &str) -> CandidateQA {
    CandidateQA {
        id: id.into(),
        domain: Domain::Ista,
        category: "Mat.".into(),
        criterion: "Material class".into(),
        question: "What is it made of?".into(),
        options: vec!["Glass".into(), "Wood".into()],
        gold: "A".into(),
        rationale: String::new(),
    }
}

fn client(url: &str) -> HttpJudger {
    HttpJudger::new(url, Duration::from_secs(5))
}

#[test]
fn transient_failures_are_retried() {
    let (url, count) = serve(Box::new(|i, _| {
        if i == 0 {
            (503, "busy".into())
        } else {
            (200, scores(5))
        }
    }));
    let got = judge(&candidate("x"), &client(&url), 2).unwrap();
    assert_eq!(got, JudgerScores::uniform(5));
    assert_eq!(count.load(Ordering::SeqCst), 2);
}

#[test]
fn retries_are_bounded() {
    let (url, count) = serve(Box::new(|_, _| (503, "busy".into())));
    let err = judge(&candidate("x"), &client(&url), 2).unwrap_err();
    assert!(matches!(err, CurationError::JudgerUnavailable { ref id, .. } if id == "x"));
    assert_eq!(count.load(Ordering::SeqCst), 3);
}

#[test]
fn client_errors_are_not_retried() {
    let (url, count) = serve(Box::new(|_, _| (404, "no".into())));
    let err = judge(&candidate("x"), &client(&url), 5).unwrap_err();
    assert!(matches!(err, CurationError::JudgerUnavailable { .. }));
    assert_eq!(count.load(Ordering::SeqCst), 1);
}

#[test]
fn bad_bodies_are_malformed() {
    let (url, _) = serve(Box::new(|_, _| (200, "{\"question_validity\": 3}".into())));
    assert!(matches!(
        judge(&candidate("x"), &client(&url), 0),
        Err(CurationError::MalformedJudgment { .. })
    ));
    let (url, _) = serve(Box::new(|_, _| (200, scores(7))));
    assert!(matches!(
        judge(&candidate("x"), &client(&url), 0),
        Err(CurationError::MalformedJudgment { .. })
    ));
}

#[test]
fn unreachable_server_is_unavailable() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let url = format!("http://127.0.0.1:{port}/judge");
    assert!(matches!(
        judge(&candidate("x"), &client(&url), 1),
        Err(CurationError::JudgerUnavailable { .. })
    ));
}

#[test]
fn curate_over_http() {
    let (url, count) = serve(Box::new(|_, req| {
        let id = req["id"].as_str().unwrap_or_default();
        (200, scores(if id == "c2" || id == "c4" { 3 } else { 5 }))
    }));
    let dir = tempfile::tempdir().unwrap();
    let candidates = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/candidates.jsonl");
    let out = Command::new(env!("CARGO_BIN_EXE_percept-eval"))
        .args(["curate", "--candidates"])
        .arg(&candidates)
        .args(["--judger-url", &url, "--max-in-flight", "2", "--out-dir", "cur"])
        .current_dir(dir.path())
        .env_remove("PERCEPT_EVAL_CONFIG")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(count.load(Ordering::SeqCst), 4);
    let retained = std::fs::read_to_string(dir.path().join("cur/retained.jsonl")).unwrap();
    let ids: Vec<String> = retained
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["id"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(ids, vec!["c1", "c3"]);
}
