#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;

use serde_json::json;

use reprolint_core::appsim::{AppModel, DeviceSession, EventKind, ScreenInstance, ScreenSize};
use reprolint_core::graph::{systematic_explore, ExecutionGraph, TraceStep};
use reprolint_core::ingest::parse_report;
use reprolint_core::labeling::DiscoursePatternLabeler;
use reprolint_core::quality::{assess, AssessConfig, QualityReport};

pub const APP: &str = include_str!("../../fixtures/expensedroid.app.json");

pub const REPORTS: [&str; 12] = [
    "complete",
    "missing_two",
    "ambiguous",
    "fix_sorting",
    "missing_settings",
    "conditional",
    "after_ordering",
    "open_not_first",
    "restore_backup",
    "lone_literal",
    "declarative",
    "ob_only",
];

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn model() -> &'static AppModel {
    static M: OnceLock<AppModel> = OnceLock::new();
    M.get_or_init(|| AppModel::from_json(APP).unwrap())
}

/// Graph from systematic exploration with the default budget.
pub fn fixture_graph() -> &'static ExecutionGraph {
    static G: OnceLock<ExecutionGraph> = OnceLock::new();
    G.get_or_init(|| {
        let m = model();
        ExecutionGraph::build(m.app_name(), m.screen_size(), &systematic_explore(m, 200))
    })
}

pub fn report_text(name: &str) -> String {
    std::fs::read_to_string(fixtures_dir().join("reports").join(format!("{name}.txt"))).unwrap()
}

pub fn assess_with(text: &str, g: &ExecutionGraph, cfg: &AssessConfig) -> QualityReport {
    let r = parse_report(text).unwrap();
    assess(&r, model(), g, cfg, &DiscoursePatternLabeler)
}

pub fn assess_fixture(name: &str) -> QualityReport {
    assess_with(
        &report_text(name),
        fixture_graph(),
        &AssessConfig::default(),
    )
}

/// Compares `actual` with the golden file, or rewrites it when
/// `UPDATE_GOLDEN` is set.
pub fn check_golden(file: &str, actual: &str) -> bool {
    let path = fixtures_dir().join("golden").join(file);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return true;
    }
    match std::fs::read_to_string(&path) {
        Ok(expected) => expected == actual,
        Err(_) => false,
    }
}

/// Graph from a short hand trace that opens the app and visits the entry
/// form and the statistics screen, never touching the menu.
pub fn partial_graph() -> ExecutionGraph {
    let m = model();
    let mut trace: Vec<TraceStep> = Vec::new();
    for tap in ["btn_add", "btn_stats"] {
        let mut s = DeviceSession::new(m);
        for (event, component) in [(EventKind::OpenApp, None), (EventKind::Tap, Some(tap))] {
            let from = s.current_screen();
            let to = s.execute(event, component, None).unwrap();
            trace.push(TraceStep {
                from,
                event,
                component: component.map(str::to_string),
                input: None,
                to,
            });
        }
    }
    ExecutionGraph::build(m.app_name(), m.screen_size(), &trace)
}

/// Screen `S{i}` with one button; `i` makes its signature unique.
pub fn screen(i: usize, label: &str) -> ScreenInstance {
    serde_json::from_value(json!({
        "name": format!("S{i}"),
        "root": {
            "type": "Layout", "id": "root",
            "bounds": {"x": 0, "y": 0, "width": 100 + i, "height": 640},
            "children": [{
                "type": "Button", "id": format!("b{i}"), "label": label,
                "bounds": {"x": 0, "y": 0, "width": 50, "height": 40},
                "flags": {"tappable": true}
            }]
        }
    }))
    .unwrap()
}

/// Graph over vertices S1..=Sn (ids 1..=n) with the given edges.
pub fn graph(screens: &[ScreenInstance], edges: &[(usize, usize)]) -> ExecutionGraph {
    let mut g = ExecutionGraph::new("random", ScreenSize::default());
    for s in screens {
        g.ensure_vertex(s);
    }
    for &(u, v) in edges {
        g.add_step(&TraceStep {
            from: screens[u - 1].clone(),
            event: EventKind::Tap,
            component: Some(format!("to{v}")),
            input: None,
            to: screens[v - 1].clone(),
        });
    }
    g
}

pub const INF: usize = usize::MAX / 4;

/// All-pairs edge-count distances over vertex ids 0..=n.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut d = vec![vec![INF; n + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(u, v) in edges {
        if u != v {
            d[u][v] = 1;
        }
    }
    for k in 0..=n {
        for i in 0..=n {
            for j in 0..=n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}
