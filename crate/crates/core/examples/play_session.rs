//! Drives the HTTP service in-process: creates a session and walks the
//! evader toward a corner until the pursuer catches it.
//!
//! cargo run --example play_session

use axum::body::Body;
use axum::http::Request;
use chordguard::service::{router, Sessions, StateView};
use http_body_util::BodyExt;
use serde_json::json;
use tower::ServiceExt;

async fn post(app: &axum::Router, uri: &str, body: serde_json::Value) -> (u16, Vec<u8>) {
    let req = Request::post(uri).header("content-type", "application/json").body(Body::from(body.to_string())).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status().as_u16();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

#[tokio::main]
async fn main() {
    let app = router(Sessions::default());
    let (status, bytes) = post(
        &app,
        "/sessions",
        json!({
            "workspace": {"vertices": [[0, 0], [20, 0], [20, 20], [0, 20]]},
            "pursuer_start": [3.0, 3.0, 0.0],
            "evader_start": [12.0, 12.0]
        }),
    )
    .await;
    assert_eq!(status, 201);
    let mut view: StateView = serde_json::from_slice(&bytes).unwrap();
    let uri = format!("/sessions/{}/move", view.session_id);
    let corner = (18.5, 18.5);
    while !view.captured {
        let (dx, dy) = (corner.0 - view.evader.x, corner.1 - view.evader.y);
        let n = (dx * dx + dy * dy).sqrt().max(1e-12);
        let step = n.min(1.0);
        let (status, bytes) = post(&app, &uri, json!({"target": [view.evader.x + dx / n * step, view.evader.y + dy / n * step]})).await;
        if status != 200 {
            println!("move rejected: {}", String::from_utf8_lossy(&bytes));
            break;
        }
        view = serde_json::from_slice(&bytes).unwrap();
        println!(
            "step {:>3} {:>13} evader ({:6.2}, {:6.2}) pursuer ({:6.2}, {:6.2}) {}",
            view.step,
            format!("{:?}", view.phase),
            view.evader.x,
            view.evader.y,
            view.pursuer.x,
            view.pursuer.y,
            view.last_case.map(|c| c.to_string()).unwrap_or_default(),
        );
    }
    println!("captured by {:?}", view.captured_by);
}
