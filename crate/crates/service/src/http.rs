//! Session-based JSON API used by the studio front end.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::json;
use strokesynth::io::svg::Background;
use strokesynth::io::{export_svg, modulate_attributes, AttributeMap, LuminanceImage, PatternDocument, SvgStyle};
use strokesynth::model::check_unique_draw_indices;
use strokesynth::{
    analyze, AnalysisParams, Error, PatternAnalysis, PatternType, Point, ReferenceFrame, Stroke,
    SynthesisRequest, SynthesizedPattern, Vec2,
};

pub const DEFAULT_EPSILON: f64 = 5.0;

pub fn default_params() -> AnalysisParams {
    AnalysisParams::new(PatternType::Hatching, ReferenceFrame::two_d(), DEFAULT_EPSILON)
}

#[derive(Debug)]
struct Session {
    revision: u64,
    strokes: Vec<Stroke>,
    params: AnalysisParams,
    background: Option<Vec<u8>>,
    analysis: Option<(u64, Arc<PatternAnalysis>)>,
    latest: Option<(u64, SynthesizedPattern)>,
}

impl Session {
    fn new() -> Self {
        Session {
            revision: 0,
            strokes: Vec::new(),
            params: default_params(),
            background: None,
            analysis: None,
            latest: None,
        }
    }

    fn bump(&mut self) {
        self.revision += 1;
    }

    fn analysis(&mut self) -> Result<Arc<PatternAnalysis>, ApiError> {
        if let Some((rev, a)) = &self.analysis {
            if *rev == self.revision {
                return Ok(a.clone());
            }
        }
        let a = Arc::new(analyze(&self.strokes, &self.params).map_err(ApiError::from)?);
        self.analysis = Some((self.revision, a.clone()));
        Ok(a)
    }
}

#[derive(Default)]
pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
}

type Shared = Arc<AppState>;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } | Error::UnsupportedVersion(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("malformed body: {e}")))
}

fn etag(revision: u64) -> HeaderValue {
    HeaderValue::from_str(&format!("\"{revision}\"")).expect("ascii etag")
}

fn with_etag(revision: u64, status: StatusCode, body: impl IntoResponse) -> Response {
    let mut r = (status, body).into_response();
    r.headers_mut().insert(header::ETAG, etag(revision));
    r
}

/// Rejects the request when `If-Match` names another revision.
fn check_revision(headers: &HeaderMap, current: u64) -> Result<(), ApiError> {
    let Some(v) = headers.get(header::IF_MATCH) else {
        return Ok(());
    };
    let v = v
        .to_str()
        .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "malformed If-Match"))?
        .trim();
    if v == "*" {
        return Ok(());
    }
    let rev: u64 = v
        .trim_start_matches("W/")
        .trim_matches('"')
        .parse()
        .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "malformed If-Match"))?;
    if rev != current {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            format!("stale revision {rev}, current is {current}"),
        ));
    }
    Ok(())
}

fn session(state: &AppState, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
    state
        .sessions
        .read()
        .expect("session table poisoned")
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown session {id}")))
}

fn lock(s: &Mutex<Session>) -> std::sync::MutexGuard<'_, Session> {
    s.lock().unwrap_or_else(|e| e.into_inner())
}

async fn create_session(State(state): State<Shared>) -> Response {
    let id = format!("s{}", state.next_id.fetch_add(1, Ordering::Relaxed) + 1);
    state
        .sessions
        .write()
        .expect("session table poisoned")
        .insert(id.clone(), Arc::new(Mutex::new(Session::new())));
    let mut r = with_etag(0, StatusCode::CREATED, Json(json!({ "id": id, "revision": 0 })));
    if let Ok(loc) = HeaderValue::from_str(&format!("/sessions/{id}")) {
        r.headers_mut().insert(header::LOCATION, loc);
    }
    r
}

async fn get_session(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let s = session(&state, &id)?;
    let s = lock(&s);
    Ok(with_etag(
        s.revision,
        StatusCode::OK,
        Json(json!({
            "id": id,
            "revision": s.revision,
            "strokes": s.strokes,
            "params": s.params,
            "has_background": s.background.is_some(),
        })),
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StrokesBody {
    strokes: Vec<Stroke>,
}

fn revision_response(s: &Session) -> Response {
    with_etag(s.revision, StatusCode::OK, Json(json!({ "revision": s.revision })))
}

async fn put_strokes(
    State(state): State<Shared>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let s = session(&state, &id)?;
    let body: StrokesBody = parse(&body)?;
    for st in &body.strokes {
        st.validate()?;
    }
    check_unique_draw_indices(&body.strokes)?;
    let mut s = lock(&s);
    check_revision(&headers, s.revision)?;
    s.strokes = body.strokes;
    s.bump();
    Ok(revision_response(&s))
}

async fn put_params(
    State(state): State<Shared>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let s = session(&state, &id)?;
    let params: AnalysisParams = parse(&body)?;
    params.validate()?;
    let mut s = lock(&s);
    check_revision(&headers, s.revision)?;
    s.params = params;
    s.bump();
    Ok(revision_response(&s))
}

async fn get_analysis(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let s = session(&state, &id)?;
    let mut s = lock(&s);
    let analysis = s.analysis()?;
    Ok(with_etag(
        s.revision,
        StatusCode::OK,
        Json(json!({ "revision": s.revision, "analysis": &*analysis })),
    ))
}

async fn synthesize(
    State(state): State<Shared>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let s = session(&state, &id)?;
    let request: SynthesisRequest = parse(&body)?;
    request.validate()?;
    let mut s = lock(&s);
    check_revision(&headers, s.revision)?;
    let analysis = s.analysis()?;
    let pattern = strokesynth::synthesize(&analysis, &request)?;
    let svg = export_svg(&pattern, &SvgStyle::default());
    let rev = s.revision;
    let body = Json(json!({ "revision": rev, "pattern": &pattern, "svg": svg }));
    s.latest = Some((rev, pattern));
    Ok(with_etag(rev, StatusCode::OK, body))
}

async fn put_background(
    State(state): State<Shared>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let s = session(&state, &id)?;
    LuminanceImage::from_png(&body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let mut s = lock(&s);
    check_revision(&headers, s.revision)?;
    s.background = Some(body.to_vec());
    s.bump();
    Ok(revision_response(&s))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModulateBody {
    map: AttributeMap,
    #[serde(default)]
    origin: Option<Point>,
    #[serde(default)]
    pixel_size: Option<f64>,
}

async fn modulate(State(state): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let s = session(&state, &id)?;
    let body: ModulateBody = parse(&body)?;
    let origin = body.origin.unwrap_or(Vec2::ZERO);
    let pixel_size = body.pixel_size.unwrap_or(1.0);
    if !(pixel_size > 0.0 && pixel_size.is_finite()) || !origin.is_finite() {
        return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid background placement"));
    }
    let s = lock(&s);
    let png = s
        .background
        .clone()
        .ok_or_else(|| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "session has no background"))?;
    let pattern = s
        .latest
        .as_ref()
        .map(|(_, p)| p)
        .ok_or_else(|| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "session has no synthesized pattern"))?;
    let lum = LuminanceImage::from_png(&png)?.placed(origin, pixel_size);
    let modulated = modulate_attributes(pattern, &lum, &body.map)?;
    let style = SvgStyle {
        background: Some(Background {
            width_px: lum.width,
            height_px: lum.height,
            png,
            origin,
            pixel_size,
        }),
        ..Default::default()
    };
    let svg = export_svg(&modulated, &style);
    let mut r = with_etag(s.revision, StatusCode::OK, svg);
    r.headers_mut()
        .insert(header::CONTENT_TYPE, HeaderValue::from_static("image/svg+xml"));
    Ok(r)
}

async fn get_document(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let s = session(&state, &id)?;
    let s = lock(&s);
    let mut doc = PatternDocument::with_strokes(s.strokes.clone());
    doc.params = Some(s.params.clone());
    if let Some((rev, a)) = &s.analysis {
        if *rev == s.revision {
            doc.analysis = Some((**a).clone());
            if let Some((prev, p)) = &s.latest {
                if *prev == s.revision {
                    doc.patterns.push(p.clone());
                }
            }
        }
    }
    let bytes = strokesynth::io::save_document(&doc);
    let mut r = with_etag(s.revision, StatusCode::OK, bytes);
    r.headers_mut()
        .insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
    Ok(r)
}

pub fn router() -> Router {
    router_with_state(Arc::new(AppState::default()))
}

pub fn router_with_state(state: Shared) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/strokes", put(put_strokes))
        .route("/sessions/{id}/params", put(put_params))
        .route("/sessions/{id}/analysis", get(get_analysis))
        .route("/sessions/{id}/synthesize", post(synthesize))
        .route("/sessions/{id}/background", post(put_background))
        .route("/sessions/{id}/modulate", post(modulate))
        .route("/sessions/{id}/document", get(get_document))
        .with_state(state)
}

pub async fn serve(addr: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router()).await
}
