use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::appsim::{AppModel, DeviceSession};
use crate::extract::{extract_s2rs, S2r};
use crate::graph::{systematic_explore, ExecutionGraph};
use crate::ingest::parse_report;
use crate::labeling::DiscoursePatternLabeler;
use crate::resolve::{InputCounter, ResolvedInteraction};

const FIXTURE: &str = include_str!("../../fixtures/expensedroid.app.json");

fn model() -> AppModel {
    AppModel::from_json(FIXTURE).unwrap()
}

fn explored(m: &AppModel) -> ExecutionGraph {
    ExecutionGraph::build(m.app_name(), m.screen_size(), &systematic_explore(m, 200))
}

fn cfg(m: &AppModel) -> AssessConfig {
    let mut c = AssessConfig::default();
    c.matching = c.matching.for_app(m.app_name(), m.synonyms());
    c
}

fn step(text: &str) -> S2r {
    let r = parse_report(text).unwrap();
    extract_s2rs(&r.paragraphs[0].sentences[0], 0)
        .unwrap()
        .steps
        .remove(0)
}

fn session_at<'m>(m: &'m AppModel, taps: &[&str]) -> DeviceSession<'m> {
    let mut s = DeviceSession::new(m);
    s.execute(EventKind::OpenApp, None, None).unwrap();
    for id in taps {
        s.execute(EventKind::Tap, Some(id), None).unwrap();
    }
    s
}

fn assess_text(text: &str) -> QualityReport {
    let m = model();
    let r = parse_report(text).unwrap();
    assess(
        &r,
        &m,
        &explored(&m),
        &AssessConfig::default(),
        &DiscoursePatternLabeler,
    )
}

#[test]
fn default_calibration() {
    let c = AssessConfig::default();
    assert_eq!(
        (c.depth, c.random_iterations, c.random_steps, c.seed),
        (6, 3, 10, 0)
    );
    assert_eq!(c.matching.similarity_threshold, 0.5);
    assert_eq!(c.validate(), Ok(()));
    let bad = AssessConfig {
        random_steps: 0,
        ..AssessConfig::default()
    };
    assert_eq!(bad.validate(), Err(AssessError::NoRandomSteps));
}

#[test]
fn score_formula() {
    let vm = |distance| VertexMatch {
        vertex: 1,
        distance,
        interaction: ResolvedInteraction {
            event: EventKind::SwipeUp,
            component: None,
            input: None,
            generated_input: false,
        },
        exec_order: None,
    };
    assert_eq!(vm(0).score(), 1.0);
    assert!((vm(2).score() - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn step_on_current_screen_has_distance_zero() {
    let m = model();
    let g = explored(&m);
    let s = session_at(&m, &["btn_add"]);
    let live = s.current_screen();
    let current = g.vertex_for(&live).unwrap();
    let sm = match_step(
        &g,
        current,
        &live,
        &step("Tap save"),
        &cfg(&m),
        &InputCounter::default(),
    )
    .unwrap();
    assert_eq!(sm.distance(), 0);
    assert_eq!(sm.score(), 1.0);
    assert_eq!(sm.chosen.interaction.component.as_deref(), Some("btn_save"));
}

#[test]
fn nearest_resolution_wins() {
    let m = model();
    let g = explored(&m);
    let s = session_at(&m, &[]);
    let live = s.current_screen();
    let current = g.vertex_for(&live).unwrap();
    let sm = match_step(
        &g,
        current,
        &live,
        &step("Choose blue"),
        &cfg(&m),
        &InputCounter::default(),
    )
    .unwrap();
    assert_eq!(g.vertices[sm.chosen.vertex].screen.name, "ColorPicker");
    assert_eq!(sm.distance(), 3);
    assert!(sm.resolutions.iter().all(|r| r.distance >= sm.distance()));
}

#[test]
fn no_resolution_reports_nearest_failure() {
    let m = model();
    let g = explored(&m);
    let s = session_at(&m, &["btn_add"]);
    let live = s.current_screen();
    let current = g.vertex_for(&live).unwrap();
    let err = match_step(
        &g,
        current,
        &live,
        &step("Tap the field"),
        &cfg(&m),
        &InputCounter::default(),
    )
    .unwrap_err();
    assert!(
        matches!(err, crate::resolve::Resolution::MultipleMatch { ref candidates } if candidates.len() == 2)
    );
}

#[test]
fn inference_walks_the_shortest_path() {
    let m = model();
    let mut g = explored(&m);
    let mut s = session_at(&m, &["btn_menu", "menu_settings"]);
    let live = s.current_screen();
    let current = g.vertex_for(&live).unwrap();
    let sm = match_step(
        &g,
        current,
        &live,
        &step("Choose blue"),
        &cfg(&m),
        &InputCounter::default(),
    )
    .unwrap();
    let ex = execute_and_infer(&mut s, &mut g, current, &sm.chosen).unwrap();
    let path: Vec<&str> = ex
        .inferred
        .iter()
        .filter_map(|t| t.component.as_deref())
        .collect();
    assert_eq!(path, ["btn_color"]);
    assert_eq!(ex.executed.component.as_deref(), Some("opt_blue"));
    assert_eq!(s.current_name(), Some("Settings"));
}

#[test]
fn distance_zero_infers_nothing() {
    let m = model();
    let mut g = explored(&m);
    let mut s = session_at(&m, &["btn_add"]);
    let live = s.current_screen();
    let current = g.vertex_for(&live).unwrap();
    let sm = match_step(
        &g,
        current,
        &live,
        &step("Tap save"),
        &cfg(&m),
        &InputCounter::default(),
    )
    .unwrap();
    let ex = execute_and_infer(&mut s, &mut g, current, &sm.chosen).unwrap();
    assert!(ex.inferred.is_empty());
}

#[test]
fn unreachable_source_is_a_divergence() {
    let m = model();
    let mut g = explored(&m);
    let mut s = session_at(&m, &["btn_stats"]);
    let stats = g.vertex_for(&s.current_screen()).unwrap();
    let main = g.vertex_for(m.screen("Main").unwrap()).unwrap();
    let vm = VertexMatch {
        vertex: main,
        distance: 1,
        interaction: ResolvedInteraction {
            event: EventKind::Tap,
            component: Some("btn_add".into()),
            input: None,
            generated_input: false,
        },
        exec_order: None,
    };
    let div = execute_and_infer(&mut s, &mut g, stats, &vm).unwrap_err();
    assert!(div.executed.is_empty());
    assert!(div.reason.contains("no path"), "{}", div.reason);
}

#[test]
fn zero_random_iterations_change_nothing() {
    let m = model();
    let mut g = explored(&m);
    let before = g.to_cache_json();
    let mut s = session_at(&m, &[]);
    let c = AssessConfig {
        random_iterations: 0,
        ..cfg(&m)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let out = random_explore(
        &mut s,
        &mut g,
        &step("Fix the sorting"),
        &c,
        &mut rng,
        &InputCounter::default(),
    );
    assert_eq!(out.matched, None);
    assert_eq!(out.iterations, 0);
    assert_eq!(g.to_cache_json(), before);
}

#[test]
fn random_iteration_stops_without_candidates() {
    let doc = r#"{"version":1,"appName":"Still","initialScreen":"S","screens":[{"name":"S","components":[
        {"type":"Layout","id":"root","bounds":{"x":0,"y":0,"width":360,"height":640},"children":[
          {"type":"Button","id":"only","label":"Only","bounds":{"x":0,"y":0,"width":50,"height":40},"flags":{"tappable":true}}
        ]}]}]}"#;
    let m = AppModel::from_json(doc).unwrap();
    let mut g = ExecutionGraph::new(m.app_name(), m.screen_size());
    let mut s = session_at(&m, &[]);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let out = random_explore(
        &mut s,
        &mut g,
        &step("Fix the sorting"),
        &cfg(&m),
        &mut rng,
        &InputCounter::default(),
    );
    assert_eq!(out.iterations, 3);
    assert_eq!(out.steps, 3);
}

#[test]
fn report_without_steps_has_diagnostics_only() {
    let qr = assess_text("The total is always zero.\nI expected the sum of all entries.");
    assert!(qr.s2rs.is_empty());
    assert_eq!(qr.diagnostics.sentence_count, 2);
    let html = render_html(&qr);
    assert!(html.contains("Diagnostics"));
    assert!(render_json(&qr).contains("\"diagnostics\""));
}

#[test]
fn annotations_follow_resolution_outcomes() {
    let qr = assess_text(
        "Open the app.\nTap the add entry button.\nTap the field.\nFix the sorting.\nTap save.",
    );
    let kinds: Vec<Vec<AnnotationKind>> = qr.s2rs.iter().map(S2rEntry::kinds).collect();
    use AnnotationKind::*;
    assert_eq!(
        kinds,
        [
            vec![HighQuality],
            vec![HighQuality],
            vec![AmbiguousStep],
            vec![VocabularyMismatch],
            vec![HighQuality]
        ]
    );
}

#[test]
fn every_wireframe_ref_resolves() {
    let qr = assess_text("Open the app.\nTap the theme color button.\nChoose blue.");
    assert!(!qr.wireframe_refs().is_empty());
    for r in qr.wireframe_refs() {
        assert!(qr.wireframes.contains_key(r), "{r}");
    }
}

#[test]
fn missing_steps_render_in_order_with_links() {
    let qr = assess_text("Open the app.\nTap the theme color button.");
    let ms = qr.s2rs[1].annotation(AnnotationKind::MissingSteps).unwrap();
    let Evidence::Steps { steps } = &ms.evidence else {
        panic!("MS carries steps");
    };
    let ids: Vec<&str> = steps
        .iter()
        .filter_map(|s| s.component.as_deref())
        .collect();
    assert_eq!(ids, ["btn_menu", "menu_settings"]);
    assert_eq!(ms.wireframe_refs.len(), 2);
    let html = render_html(&qr);
    let first = html
        .find(&format!("href=\"#{}\"", steps[0].wireframe_ref))
        .unwrap();
    let second = html
        .find(&format!("href=\"#{}\"", steps[1].wireframe_ref))
        .unwrap();
    assert!(first < second);
    for s in steps {
        assert!(html.contains(&format!("id=\"{}\"", s.wireframe_ref)));
    }
}

#[test]
fn machine_report_round_trips() {
    let qr = assess_text("Open the app.\nTap the field.\nTap the theme color button.\nFix it.");
    let json = render_json(&qr);
    let back: QualityReport = serde_json::from_str(&json).unwrap();
    assert_eq!(render_json(&back), json);
}
