use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use strokesynth::Stroke;
use tower::ServiceExt;

struct Reply {
    status: StatusCode,
    etag: Option<String>,
    body: Vec<u8>,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.body).expect("json body")
    }
}

async fn call(app: &Router, method: Method, uri: &str, body: Vec<u8>, if_match: Option<&str>) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(m) = if_match {
        req = req.header(header::IF_MATCH, m);
    }
    let res = app.clone().oneshot(req.body(Body::from(body)).unwrap()).await.unwrap();
    let status = res.status();
    let etag = res.headers().get(header::ETAG).map(|v| v.to_str().unwrap().to_string());
    let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply { status, etag, body }
}

async fn json_call(app: &Router, method: Method, uri: &str, body: Value) -> Reply {
    call(app, method, uri, serde_json::to_vec(&body).unwrap(), None).await
}

async fn new_session(app: &Router) -> String {
    let r = call(app, Method::POST, "/sessions", Vec::new(), None).await;
    assert_eq!(r.status, StatusCode::CREATED);
    assert_eq!(r.json()["revision"], 0);
    r.json()["id"].as_str().unwrap().to_string()
}

/// Short vertical hatches on a 3 x 6 grid with uneven spacing.
fn hatches() -> Vec<Stroke> {
    let mut out = Vec::new();
    for row in 0..3 {
        for col in 0..6 {
            let x = 10.0 * col as f64 + [0.0, 1.5, -1.0, 0.5, -0.5, 1.0][col];
            let y = 40.0 * row as f64 + [0.0, 2.0, -1.0][row];
            let i = out.len() as u32;
            out.push(Stroke::from_coords(&[(x, y), (x + 0.5, y + 25.0)], i));
        }
    }
    out
}

fn params(epsilon: f64) -> Value {
    json!({
        "pattern_type": "hatching",
        "frame": {"kind": "two_d", "region": [[-5.0, -5.0], [60.0, -5.0], [60.0, 110.0], [-5.0, 110.0]]},
        "epsilon": epsilon,
    })
}

fn synth_request(alpha: f64, seed: u64) -> Value {
    json!({
        "region": {"kind": "polygon", "points": [[0.0, 0.0], [120.0, 0.0], [120.0, 120.0], [0.0, 120.0]]},
        "behavior": "sampling",
        "alpha": alpha,
        "seed": seed,
    })
}

async fn prepared(app: &Router) -> String {
    let id = new_session(app).await;
    let r = json_call(app, Method::PUT, &format!("/sessions/{id}/strokes"), json!({"strokes": hatches()})).await;
    assert_eq!(r.status, StatusCode::OK);
    let r = json_call(app, Method::PUT, &format!("/sessions/{id}/params"), params(2.0)).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["revision"], 2);
    id
}

#[tokio::test]
async fn analysis_and_synthesis_round() {
    let app = strokesynth_service::router();
    let id = prepared(&app).await;
    let a = call(&app, Method::GET, &format!("/sessions/{id}/analysis"), Vec::new(), None).await;
    assert_eq!(a.status, StatusCode::OK);
    assert_eq!(a.etag.as_deref(), Some("\"2\""));
    assert_eq!(a.json()["analysis"]["elements"].as_array().unwrap().len(), 18);

    let s = json_call(&app, Method::POST, &format!("/sessions/{id}/synthesize"), synth_request(1.0, 7)).await;
    assert_eq!(s.status, StatusCode::OK, "{}", String::from_utf8_lossy(&s.body));
    let v = s.json();
    assert_eq!(v["revision"], 2);
    assert!(v["svg"].as_str().unwrap().contains("<svg"));
    assert!(!v["pattern"]["elements"].as_array().unwrap().is_empty());

    let d = call(&app, Method::GET, &format!("/sessions/{id}/document"), Vec::new(), None).await;
    assert_eq!(d.status, StatusCode::OK);
    let doc = strokesynth::io::load_document(&d.body).expect("document loads");
    assert_eq!(doc.strokes, hatches());
    assert!(doc.analysis.is_some());
    assert_eq!(doc.patterns.len(), 1);
}

#[tokio::test]
async fn epsilon_change_reanalyzes() {
    let app = strokesynth_service::router();
    let id = prepared(&app).await;
    let uri = format!("/sessions/{id}/analysis");
    let fine = call(&app, Method::GET, &uri, Vec::new(), None).await.json();
    let r = json_call(&app, Method::PUT, &format!("/sessions/{id}/params"), params(15.0)).await;
    assert_eq!(r.json()["revision"], 3);
    let coarse = call(&app, Method::GET, &uri, Vec::new(), None).await.json();
    assert_eq!(coarse["revision"], 3);
    let count = |v: &Value| v["analysis"]["elements"].as_array().unwrap().len();
    assert!(count(&coarse) < count(&fine), "{} vs {}", count(&coarse), count(&fine));
}

#[tokio::test]
async fn alpha_does_not_move_nodes() {
    let app = strokesynth_service::router();
    let id = prepared(&app).await;
    let uri = format!("/sessions/{id}/synthesize");
    let raw = json_call(&app, Method::POST, &uri, synth_request(0.0, 3)).await.json();
    let corrected = json_call(&app, Method::POST, &uri, synth_request(1.0, 3)).await.json();
    assert_eq!(raw["pattern"]["node_positions"], corrected["pattern"]["node_positions"]);
    assert_ne!(raw["pattern"]["elements"], corrected["pattern"]["elements"]);
}

#[tokio::test]
async fn sessions_are_isolated() {
    let app = strokesynth_service::router();
    let a = prepared(&app).await;
    let b = new_session(&app).await;
    assert_ne!(a, b);
    let lone = vec![Stroke::from_coords(&[(0.0, 0.0), (0.0, 20.0)], 0)];
    json_call(&app, Method::PUT, &format!("/sessions/{b}/strokes"), json!({"strokes": lone})).await;
    json_call(&app, Method::PUT, &format!("/sessions/{a}/params"), params(3.0)).await;

    let ga = call(&app, Method::GET, &format!("/sessions/{a}"), Vec::new(), None).await.json();
    let gb = call(&app, Method::GET, &format!("/sessions/{b}"), Vec::new(), None).await.json();
    assert_eq!(ga["revision"], 3);
    assert_eq!(gb["revision"], 1);
    assert_eq!(ga["strokes"].as_array().unwrap().len(), 18);
    assert_eq!(gb["strokes"].as_array().unwrap().len(), 1);
    assert_eq!(ga["params"]["epsilon"], 3.0);
    assert_eq!(gb["params"]["epsilon"], strokesynth_service::http::DEFAULT_EPSILON);
    let an = call(&app, Method::GET, &format!("/sessions/{b}/analysis"), Vec::new(), None).await;
    assert_eq!(an.status, StatusCode::UNPROCESSABLE_ENTITY);
    let an = call(&app, Method::GET, &format!("/sessions/{a}/analysis"), Vec::new(), None).await;
    assert_eq!(an.status, StatusCode::OK);
}

#[tokio::test]
async fn error_statuses() {
    let app = strokesynth_service::router();
    let r = call(&app, Method::GET, "/sessions/nope", Vec::new(), None).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    assert!(r.json()["error"].is_string());

    let id = new_session(&app).await;
    let r = call(&app, Method::GET, &format!("/sessions/{id}/analysis"), Vec::new(), None).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);

    let uri = format!("/sessions/{id}/strokes");
    let r = call(&app, Method::PUT, &uri, b"{\"strokes\": [".to_vec(), None).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert!(r.json()["error"].is_string());
    let r = json_call(&app, Method::PUT, &uri, json!({"strokes": 3})).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);

    let body = serde_json::to_vec(&json!({"strokes": hatches()})).unwrap();
    let r = call(&app, Method::PUT, &uri, body.clone(), Some("\"0\"")).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.etag.as_deref(), Some("\"1\""));
    let r = call(&app, Method::PUT, &uri, body, Some("\"0\"")).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    let g = call(&app, Method::GET, &format!("/sessions/{id}"), Vec::new(), None).await.json();
    assert_eq!(g["revision"], 1);

    let r = json_call(&app, Method::POST, &format!("/sessions/{id}/synthesize"), json!({"alpha": 2})).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let mut bad = synth_request(2.0, 0);
    bad["seed"] = json!(1);
    let r = json_call(&app, Method::POST, &format!("/sessions/{id}/synthesize"), bad).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);

    let r = call(&app, Method::POST, &format!("/sessions/{id}/background"), b"not a png".to_vec(), None).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
}

fn gradient_png() -> Vec<u8> {
    let img = image::GrayImage::from_fn(64, 64, |x, _| image::Luma([(x * 4) as u8]));
    let mut out = std::io::Cursor::new(Vec::new());
    img.write_to(&mut out, image::ImageFormat::Png).unwrap();
    out.into_inner()
}

#[tokio::test]
async fn modulation_embeds_background() {
    let app = strokesynth_service::router();
    let id = prepared(&app).await;
    let map = json!({"map": {"width": [{"at": 0.0, "value": 3.0}, {"at": 1.0, "value": 0.5}]}, "pixel_size": 2.0});

    let r = json_call(&app, Method::POST, &format!("/sessions/{id}/modulate"), map.clone()).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);

    let r = call(&app, Method::POST, &format!("/sessions/{id}/background"), gradient_png(), None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["revision"], 3);
    let s = json_call(&app, Method::POST, &format!("/sessions/{id}/synthesize"), synth_request(1.0, 1)).await;
    assert_eq!(s.status, StatusCode::OK);
    let plain = s.json()["svg"].as_str().unwrap().to_string();

    let r = json_call(&app, Method::POST, &format!("/sessions/{id}/modulate"), map).await;
    assert_eq!(r.status, StatusCode::OK, "{}", String::from_utf8_lossy(&r.body));
    let svg = String::from_utf8(r.body).unwrap();
    assert!(svg.contains("data:image/png;base64,"));
    assert_ne!(svg, plain);
    assert!(svg.trim_end().ends_with("</svg>"));
}

#[tokio::test]
async fn identical_requests_identical_patterns() {
    let app = strokesynth_service::router();
    let id = prepared(&app).await;
    let uri = format!("/sessions/{id}/synthesize");
    let a = json_call(&app, Method::POST, &uri, synth_request(0.6, 42)).await;
    let b = json_call(&app, Method::POST, &uri, synth_request(0.6, 42)).await;
    assert_eq!(a.status, StatusCode::OK);
    assert_eq!(a.body, b.body);
    let g1 = call(&app, Method::GET, &format!("/sessions/{id}/analysis"), Vec::new(), None).await;
    let g2 = call(&app, Method::GET, &format!("/sessions/{id}/analysis"), Vec::new(), None).await;
    assert_eq!(g1.body, g2.body);
}

fn p95(mut samples: Vec<std::time::Duration>) -> std::time::Duration {
    samples.sort();
    samples[(samples.len() * 95).div_ceil(100) - 1]
}

#[tokio::test]
async fn interactive_latency_budget() {
    let app = strokesynth_service::router();
    let id = new_session(&app).await;
    let strokes: Vec<Stroke> = (0..200)
        .map(|i| {
            let (x, y) = ((i % 20) as f64 * 8.0 + (i % 7) as f64 * 0.4, (i / 20) as f64 * 14.0 + (i % 5) as f64 * 0.3);
            Stroke::from_coords(&[(x, y), (x + 1.0, y + 4.0), (x + 1.5, y + 9.0)], i)
        })
        .collect();
    json_call(&app, Method::PUT, &format!("/sessions/{id}/strokes"), json!({"strokes": strokes})).await;
    let mut analysis = Vec::new();
    for k in 0..20 {
        let eps = 2.0 + 0.01 * k as f64;
        let p = json!({"pattern_type": "hatching", "frame": {"kind": "two_d"}, "epsilon": eps});
        json_call(&app, Method::PUT, &format!("/sessions/{id}/params"), p).await;
        let t = std::time::Instant::now();
        let r = call(&app, Method::GET, &format!("/sessions/{id}/analysis"), Vec::new(), None).await;
        analysis.push(t.elapsed());
        assert_eq!(r.status, StatusCode::OK);
        assert_eq!(r.json()["analysis"]["elements"].as_array().unwrap().len(), 200);
    }
    let mut synth = Vec::new();
    for seed in 0..20 {
        let req = json!({
            "region": {"kind": "polygon", "points": [[0.0, 0.0], [200.0, 0.0], [200.0, 200.0], [0.0, 200.0]]},
            "behavior": "sampling", "alpha": 1.0, "seed": seed, "overrides": {"n": 300},
        });
        let t = std::time::Instant::now();
        let r = json_call(&app, Method::POST, &format!("/sessions/{id}/synthesize"), req).await;
        synth.push(t.elapsed());
        assert_eq!(r.status, StatusCode::OK);
        assert_eq!(r.json()["pattern"]["elements"].as_array().unwrap().len(), 300);
    }
    let (a, s) = (p95(analysis), p95(synth));
    assert!(a.as_millis() <= 100, "analysis p95 {a:?}");
    assert!(s.as_millis() <= 100, "synthesis p95 {s:?}");
}
