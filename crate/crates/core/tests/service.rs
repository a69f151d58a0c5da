mod common;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use lqh::service::router;
use lqh::session::Config;
use serde_json::{json, Value};
use tower::ServiceExt;

use common::{corpus, same_text};

async fn call(
    app: &axum::Router,
    method: &str,
    uri: &str,
    body: String,
    origin: Option<&str>,
) -> (StatusCode, Value, Option<String>) {
    let mut req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json");
    if let Some(o) = origin {
        req = req.header("origin", o);
    }
    let resp = app.clone().oneshot(req.body(Body::from(body)).unwrap()).await.unwrap();
    let status = resp.status();
    let cors = resp
        .headers()
        .get("access-control-allow-origin")
        .map(|v| v.to_str().unwrap().to_string());
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, v, cors)
}

async fn post(app: &axum::Router, uri: &str, body: Value) -> (StatusCode, Value) {
    let (s, v, _) = call(app, "POST", uri, body.to_string(), None).await;
    (s, v)
}

fn app() -> axum::Router {
    router(Config::default())
}

#[tokio::test]
async fn check_endpoint() {
    let app = app();
    let (s, v) = post(&app, "/v1/check", json!({ "source": corpus("odd_add.lqh") })).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["diagnostics"], json!([]));
    assert_eq!(v["holes"], json!([]));
    lqh::report::validate(&v).unwrap();
    let (_, v) = post(&app, "/v1/check", json!({ "source": "" })).await;
    assert_eq!((v["diagnostics"].clone(), v["holes"].clone()), (json!([]), json!([])));
    let (_, v) = post(&app, "/v1/check", json!({ "source": corpus("list_length_proof.lqh") })).await;
    assert_eq!(v["holes"].as_array().unwrap().len(), 1);
    assert_eq!(v["holes"][0]["actions"][0]["kind"], "split");
}

#[tokio::test]
async fn action_script() {
    let app = app();
    let (s, v) = post(
        &app,
        "/v1/action",
        json!({ "source": corpus("list_length_proof.lqh"), "hole": "_0", "action": "split", "args": "xs" }),
    )
    .await;
    assert_eq!(s, StatusCode::OK, "{v}");
    let src = v["new_source"].as_str().unwrap().to_string();
    assert!(same_text(&src, &corpus("list_length_proof_split.lqh")));
    let ids: Vec<_> = v["holes"].as_array().unwrap().iter().map(|h| h["id"].clone()).collect();
    assert_eq!(ids, [json!("_0"), json!("_1")]);
    // consistent with a fresh check of the new source
    let (_, fresh) = post(&app, "/v1/check", json!({ "source": src })).await;
    assert_eq!(fresh["holes"], v["holes"]);
    assert_eq!(fresh["diagnostics"], v["diagnostics"]);

    let (s, v) = post(
        &app,
        "/v1/action",
        json!({ "source": src, "hole": "_0", "action": "fill_unit" }),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    let src2 = v["new_source"].as_str().unwrap().to_string();
    assert!(src2.contains("listLengthProof [] = ()"));
    assert_eq!(v["holes"].as_array().unwrap().len(), 1);

    // idempotent
    let (_, again) = post(
        &app,
        "/v1/action",
        json!({ "source": src, "hole": "_0", "action": "fill_unit" }),
    )
    .await;
    assert_eq!(again, v);

    let (s, v) = post(
        &app,
        "/v1/action",
        json!({ "source": src2, "hole": "_1", "action": "fill_expr", "args": "listLengthProof ys" }),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["diagnostics"], json!([]));
    assert_eq!(v["holes"], json!([]));
}

#[tokio::test]
async fn error_statuses() {
    let app = app();
    let split = corpus("list_length_proof_split.lqh");
    let (s, _) = post(
        &app,
        "/v1/action",
        json!({ "source": split, "hole": "_1", "action": "fill_unit" }),
    )
    .await;
    assert_eq!(s, StatusCode::CONFLICT);
    let (s, _) = post(
        &app,
        "/v1/action",
        json!({ "source": split, "hole": "_9", "action": "fill_unit" }),
    )
    .await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = post(
        &app,
        "/v1/action",
        json!({ "source": split, "hole": "_1", "action": "fill_expr", "args": "(((" }),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = post(
        &app,
        "/v1/action",
        json!({ "source": split, "hole": "_1", "action": "explode" }),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _, _) = call(&app, "POST", "/v1/check", "{not json".into(), None).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let big = json!({ "source": "-- ".to_string() + &"x".repeat(300 * 1024) }).to_string();
    let (s, _, _) = call(&app, "POST", "/v1/check", big, None).await;
    assert_eq!(s, StatusCode::PAYLOAD_TOO_LARGE);
}

#[tokio::test]
async fn solver_unavailable_is_503() {
    let mut c = Config::default();
    c.solver.path = Some("/no/such/z3".into());
    let app = router(c);
    let (s, _) = post(&app, "/v1/check", json!({ "source": corpus("odd_add.lqh") })).await;
    assert_eq!(s, StatusCode::SERVICE_UNAVAILABLE);
    let (s, v, _) = call(&app, "GET", "/healthz", String::new(), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["solver"]["ok"], false);
}

#[tokio::test]
async fn healthz_and_cors() {
    let app = app();
    let (s, v, _) = call(&app, "GET", "/healthz", String::new(), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["solver"]["ok"], true);
    let body = json!({ "source": "" }).to_string();
    let (_, _, cors) = call(&app, "POST", "/v1/check", body.clone(), Some("http://localhost:5173")).await;
    assert_eq!(cors.as_deref(), Some("http://localhost:5173"));
    let (_, _, cors) = call(&app, "POST", "/v1/check", body, Some("https://example.com")).await;
    assert_eq!(cors, None);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_requests_agree() {
    let app = app();
    let src = corpus("list_length_proof_split.lqh");
    let tasks: Vec<_> = (0..8)
        .map(|_| {
            let app = app.clone();
            let src = src.clone();
            tokio::spawn(async move { post(&app, "/v1/check", json!({ "source": src })).await })
        })
        .collect();
    let mut outs = Vec::new();
    for t in tasks {
        outs.push(t.await.unwrap());
    }
    assert!(outs.iter().all(|o| o == &outs[0]));
    assert_eq!(outs[0].0, StatusCode::OK);
}
