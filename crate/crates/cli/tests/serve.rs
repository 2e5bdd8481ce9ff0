use std::collections::BTreeSet;
use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use hptree::discovery::Mode;
use hptree::export::json::from_json_value;
use hptree::heuristics::{nested_calls, structured_names};
use hptree::{HierLog, HierTrace, Tree};
use hptree_cli::serve::{router, AppState};
use tower::ServiceExt;

const EXPECTED_MODEL: &str = r#"sub:"Main.main()"(seq("Main.input()", sub:"B.process()"(xor("A.process()", seq("B.stepPre()", rec:"B.process()", "B.stepPost()"))), "Main.output()"))"#;

fn running_example() -> HierLog {
    let xes = include_bytes!("../../core/tests/fixtures/running_example.xes");
    nested_calls(&hptree::xes::parse_xes(xes).unwrap()).unwrap()
}

async fn get(app: &Router, uri: &str) -> (StatusCode, String) {
    let res = app
        .clone()
        .oneshot(Request::get(uri).body(Body::empty()).unwrap())
        .await
        .unwrap();
    let status = res.status();
    let body = to_bytes(res.into_body(), usize::MAX).await.unwrap();
    (status, String::from_utf8(body.to_vec()).unwrap())
}

fn tree_of(body: &str) -> Tree {
    from_json_value(&serde_json::from_str(body).unwrap()).unwrap()
}

#[tokio::test]
async fn model_of_the_running_example() {
    let state = Arc::new(AppState::new(running_example(), Mode::Rad));
    let app = router(state.clone());
    let (status, body) = get(&app, "/api/model?paths=1.0").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(tree_of(&body), EXPECTED_MODEL.parse().unwrap());
    let (_, again) = get(&app, "/api/model?paths=1").await;
    assert_eq!(again, body);
    assert_eq!(get(&app, "/api/model").await.1, body);
    assert_eq!(state.cached(), 1);

    let (_, cut) = get(&app, "/api/model?max_depth=1").await;
    assert_eq!(
        tree_of(&cut),
        r#"sub:"Main.main()"(seq("Main.input()", "B.process()", "Main.output()"))"#
            .parse()
            .unwrap()
    );
}

#[tokio::test]
async fn invalid_parameters_are_rejected() {
    let app = router(Arc::new(AppState::new(running_example(), Mode::Rad)));
    for uri in [
        "/api/model?paths=2",
        "/api/model?paths=-0.1",
        "/api/model?paths=abc",
        "/api/model?paths=NaN",
        "/api/model?min_depth=3&max_depth=1",
        "/api/model?min_depth=-1",
        "/api/search?q=a&paths=7",
    ] {
        assert_eq!(get(&app, uri).await.0, StatusCode::BAD_REQUEST, "{uri}");
    }
}

/// Lower `paths` drops infrequent behavior, never activities that the full
/// model does not have.
#[tokio::test]
async fn lower_paths_give_a_smaller_alphabet() {
    let traces = ["a.x b.y c", "a.x b.y c", "a.x b.y c", "a.x c b.y", "a.z b.y c"].map(|t| {
        HierTrace::from_paths(t.split(' ').map(|e| {
            e.split('.')
                .map(|s| hptree::Activity::new(s).unwrap())
                .collect::<Vec<_>>()
        }))
    });
    let log = structured_names(&HierLog::new(traces.to_vec()), ".").unwrap();
    let app = router(Arc::new(AppState::new(log, Mode::Rad)));
    let alphabet = |b: &str| tree_of(b).alphabet();
    let low = alphabet(&get(&app, "/api/model?paths=0.8").await.1);
    let full = alphabet(&get(&app, "/api/model?paths=1.0").await.1);
    assert!(low.is_subset(&full), "{low:?} vs {full:?}");

    let fixture = router(Arc::new(AppState::new(running_example(), Mode::Rad)));
    let low = alphabet(&get(&fixture, "/api/model?paths=0.8").await.1);
    let full = alphabet(&get(&fixture, "/api/model?paths=1.0").await.1);
    assert!(low.is_subset(&full));
}

#[tokio::test]
async fn search_and_stats() {
    let app = router(Arc::new(AppState::new(running_example(), Mode::Rad)));
    let (status, body) = get(&app, "/api/search?q=process").await;
    assert_eq!(status, StatusCode::OK);
    let ids: Vec<String> = serde_json::from_str(&body).unwrap();
    assert_eq!(ids, ["r.0.1", "r.0.1.0.0"]);
    assert_eq!(get(&app, "/api/search?q=").await.1, "[]");
    assert_eq!(get(&app, "/api/search?q=zzz").await.1, "[]");

    let (status, body) = get(&app, "/api/stats").await;
    assert_eq!(status, StatusCode::OK);
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["traces"], 1);
    assert_eq!(v["events"], 5);
    assert_eq!(v["depth"], 4);
    assert_eq!(v["alphabet"].as_array().unwrap().len(), 7);
}

#[tokio::test]
async fn workbench_assets() {
    let app = router(Arc::new(AppState::new(running_example(), Mode::Rad)));
    let (status, html) = get(&app, "/").await;
    assert_eq!(status, StatusCode::OK);
    assert!(html.contains("/app.js") && html.contains("id=\"paths\""));
    let (status, js) = get(&app, "/app.js").await;
    assert_eq!(status, StatusCode::OK);
    assert!(js.contains("/api/model") && js.contains("/api/search"));
    assert_eq!(get(&app, "/style.css").await.0, StatusCode::OK);
    assert_eq!(get(&app, "/missing").await.0, StatusCode::NOT_FOUND);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_requests_share_one_discovery() {
    let state = Arc::new(AppState::new(running_example(), Mode::Rad));
    let app = router(state.clone());
    let tasks: Vec<_> = (0..16)
        .map(|i| {
            let app = app.clone();
            let uri = if i % 2 == 0 {
                "/api/model?paths=0.5"
            } else {
                "/api/model?paths=1.0"
            };
            tokio::spawn(async move { (uri, get(&app, uri).await.1) })
        })
        .collect();
    let mut bodies = std::collections::BTreeMap::<&str, BTreeSet<String>>::new();
    for t in tasks {
        let (uri, body) = t.await.unwrap();
        bodies.entry(uri).or_default().insert(body);
    }
    assert!(bodies.values().all(|b| b.len() == 1));
    assert_eq!(state.cached(), 2);
}
