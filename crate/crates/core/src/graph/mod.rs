//! Execution graph `G = (V, E)`: screens deduplicated by structural
//! signature, interactions stored as `(source, target, event, component)`
//! edges with input and execution order.

mod explore;
mod paths;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::appsim::{
    input_class, launcher_screen, render_wireframe, wireframe_ref, EventKind, GuiComponent,
    ScreenInstance, ScreenSize, LAUNCHER,
};
use crate::canon::to_canonical_json;

pub use explore::{systematic_explore, GENERATED_EXPLORATION_INPUT};
pub use paths::{neighborhood, shortest_path};

pub const GRAPH_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("no path from vertex {from} to vertex {to}")]
    NoPath { from: usize, to: usize },
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("malformed graph cache: {0}")]
    Malformed(String),
    #[error("unsupported graph cache version {0}")]
    UnknownVersion(u32),
}

/// Structural fingerprint of a screen: component types and sizes in
/// hierarchy order. Labels, ids, text and positions are not part of it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScreenSignature(pub String);

impl fmt::Display for ScreenSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn encode(c: &GuiComponent, out: &mut String) {
    out.push_str(c.comp_type.as_str());
    out.push(':');
    out.push_str(&c.bounds.width.to_string());
    out.push('x');
    out.push_str(&c.bounds.height.to_string());
    if !c.children.is_empty() {
        out.push('(');
        for (i, child) in c.children.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            encode(child, out);
        }
        out.push(')');
    }
}

pub fn signature(screen: &ScreenInstance) -> ScreenSignature {
    if screen.name == LAUNCHER {
        return ScreenSignature(LAUNCHER.to_string());
    }
    let mut s = String::new();
    encode(&screen.root, &mut s);
    ScreenSignature(s)
}

/// One executed event with the screens before and after it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub from: ScreenInstance,
    pub event: EventKind,
    pub component: Option<String>,
    pub input: Option<String>,
    pub to: ScreenInstance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Vertex {
    pub id: usize,
    pub signature: ScreenSignature,
    /// First screen seen with this signature.
    pub screen: ScreenInstance,
    pub wireframe_ref: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Interaction {
    pub source: usize,
    pub target: Option<usize>,
    pub event: EventKind,
    pub component: Option<String>,
    pub input: Option<String>,
    pub input_class: Option<String>,
    pub exec_order: u64,
}

impl Interaction {
    /// Identity used when matching resolved interactions against edges.
    pub fn matches(&self, source: usize, event: EventKind, component: Option<&str>) -> bool {
        self.source == source
            && self.event.edge_kind() == event.edge_kind()
            && self.component.as_deref() == component
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExecutionGraph {
    pub version: u32,
    pub app_name: String,
    pub screen_size: ScreenSize,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Interaction>,
    pub next_order: u64,
    #[serde(skip)]
    by_signature: HashMap<ScreenSignature, usize>,
}

type EdgeKey = (usize, EventKind, Option<String>, Option<String>);

impl ExecutionGraph {
    /// A graph holding only the pre-launch start vertex.
    pub fn new(app_name: &str, screen_size: ScreenSize) -> ExecutionGraph {
        let mut g = ExecutionGraph {
            version: GRAPH_VERSION,
            app_name: app_name.to_string(),
            screen_size,
            vertices: Vec::new(),
            edges: Vec::new(),
            next_order: 0,
            by_signature: HashMap::new(),
        };
        g.ensure_vertex(&launcher_screen(screen_size));
        g
    }

    pub const START: usize = 0;

    pub fn vertex(&self, id: usize) -> Option<&Vertex> {
        self.vertices.get(id)
    }

    pub fn vertex_for(&self, screen: &ScreenInstance) -> Option<usize> {
        self.by_signature.get(&signature(screen)).copied()
    }

    /// Vertex id for `screen`, adding a vertex if its signature is new.
    pub fn ensure_vertex(&mut self, screen: &ScreenInstance) -> usize {
        let sig = signature(screen);
        if let Some(&id) = self.by_signature.get(&sig) {
            return id;
        }
        let id = self.vertices.len();
        let svg = render_wireframe(screen, self.screen_size, None);
        self.vertices.push(Vertex {
            id,
            signature: sig.clone(),
            screen: screen.clone(),
            wireframe_ref: wireframe_ref(&svg),
        });
        self.by_signature.insert(sig, id);
        id
    }

    fn key(
        source: usize,
        event: EventKind,
        component: Option<&str>,
        input: Option<&str>,
    ) -> EdgeKey {
        (
            source,
            event,
            component.map(str::to_string),
            input.map(|i| input_class(i).to_string()),
        )
    }

    fn find_key(&self, key: &EdgeKey) -> Option<usize> {
        self.edges.iter().position(|e| {
            (
                e.source,
                e.event,
                e.component.clone(),
                e.input_class.clone(),
            ) == *key
        })
    }

    /// Adds the step as an edge unless an edge with the same
    /// `(source, event, component, input class)` exists. Returns the index
    /// of the edge now representing the step.
    pub fn add_step(&mut self, step: &TraceStep) -> usize {
        let source = self.ensure_vertex(&step.from);
        let target = self.ensure_vertex(&step.to);
        let key = Self::key(
            source,
            step.event,
            step.component.as_deref(),
            step.input.as_deref(),
        );
        if let Some(idx) = self.find_key(&key) {
            return idx;
        }
        self.edges.push(Interaction {
            source,
            target: Some(target),
            event: step.event,
            component: step.component.clone(),
            input: step.input.clone(),
            input_class: key.3,
            exec_order: self.next_order,
        });
        self.next_order += 1;
        self.edges.len() - 1
    }

    pub fn merge_trace(&mut self, trace: &[TraceStep]) {
        for step in trace {
            self.add_step(step);
        }
    }

    pub fn build(app_name: &str, screen_size: ScreenSize, trace: &[TraceStep]) -> ExecutionGraph {
        let mut g = ExecutionGraph::new(app_name, screen_size);
        g.merge_trace(trace);
        g
    }

    /// Outgoing edges with a known target, in execution order.
    pub fn out_edges(&self, v: usize) -> Vec<&Interaction> {
        let mut out: Vec<&Interaction> = self
            .edges
            .iter()
            .filter(|e| e.source == v && e.target.is_some())
            .collect();
        out.sort_by_key(|e| e.exec_order);
        out
    }

    /// Edges matching `(source, event, component)`, earliest first.
    pub fn matching_edges(
        &self,
        source: usize,
        event: EventKind,
        component: Option<&str>,
    ) -> Vec<&Interaction> {
        let mut out: Vec<&Interaction> = self
            .edges
            .iter()
            .filter(|e| e.matches(source, event, component))
            .collect();
        out.sort_by_key(|e| e.exec_order);
        out
    }

    /// Deterministic cache document; byte-equal documents mean equal graphs.
    pub fn to_cache_json(&self) -> String {
        to_canonical_json(self).expect("graph serializes")
    }

    pub fn from_cache_json(text: &str) -> Result<ExecutionGraph, GraphError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
        if let Some(v) = value.get("version").and_then(|v| v.as_u64()) {
            if v != GRAPH_VERSION as u64 {
                return Err(GraphError::UnknownVersion(v as u32));
            }
        }
        let mut g: ExecutionGraph =
            serde_json::from_value(value).map_err(|e| GraphError::Malformed(e.to_string()))?;
        for (i, v) in g.vertices.iter().enumerate() {
            if v.id != i {
                return Err(GraphError::Malformed(format!(
                    "vertex {} stored at position {i}",
                    v.id
                )));
            }
            g.by_signature.insert(v.signature.clone(), i);
        }
        let n = g.vertices.len();
        if n == 0 || g.vertices[0].signature.0 != LAUNCHER {
            return Err(GraphError::Malformed("missing start vertex".into()));
        }
        if g.edges
            .iter()
            .any(|e| e.source >= n || e.target.is_some_and(|t| t >= n))
        {
            return Err(GraphError::Malformed("edge endpoint out of range".into()));
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::appsim::{AppModel, DeviceSession};

    const FIXTURE: &str = include_str!("../../fixtures/expensedroid.app.json");

    fn fixture() -> AppModel {
        AppModel::from_json(FIXTURE).unwrap()
    }

    #[test]
    fn labels_do_not_change_signature() {
        let m = fixture();
        let a = m.screen("Main").unwrap().clone();
        let mut b = a.clone();
        b.root.find_mut("title").unwrap().label = "Something else".into();
        b.root.find_mut("btn_add").unwrap().id = "renamed".into();
        assert_eq!(signature(&a), signature(&b));
        assert_eq!(signature(&a), signature(&a.clone()));
    }

    #[test]
    fn extra_row_changes_signature() {
        let m = fixture();
        assert_ne!(
            signature(m.screen("Main").unwrap()),
            signature(m.screen("MainWithEntry").unwrap())
        );
    }

    #[test]
    fn fixture_screens_have_distinct_signatures() {
        let m = fixture();
        let mut sigs: Vec<ScreenSignature> = m
            .screen_names()
            .map(|n| signature(m.screen(n).unwrap()))
            .collect();
        sigs.sort();
        sigs.dedup();
        assert_eq!(sigs.len(), 10);
    }

    #[test]
    fn self_merge_is_idempotent() {
        let m = fixture();
        let trace = systematic_explore(&m, 200);
        let g = ExecutionGraph::build(m.app_name(), m.screen_size(), &trace);
        let mut again = g.clone();
        again.merge_trace(&trace);
        assert_eq!(g.to_cache_json(), again.to_cache_json());
    }

    #[test]
    fn shared_screens_merge() {
        let m = fixture();
        let mut s = DeviceSession::new(&m);
        let step = |s: &mut DeviceSession, e, c: Option<&str>| {
            let from = s.current_screen();
            let to = s.execute(e, c, None).unwrap();
            TraceStep {
                from,
                event: e,
                component: c.map(str::to_string),
                input: None,
                to,
            }
        };
        let t1 = vec![
            step(&mut s, EventKind::OpenApp, None),
            step(&mut s, EventKind::Tap, Some("btn_add")),
        ];
        let mut s2 = DeviceSession::new(&m);
        let t2 = vec![
            step(&mut s2, EventKind::OpenApp, None),
            step(&mut s2, EventKind::Tap, Some("btn_stats")),
        ];
        let mut g = ExecutionGraph::build("x", m.screen_size(), &t1);
        g.merge_trace(&t2);
        assert_eq!(g.vertices.len(), 4);
        assert_eq!(g.edges.len(), 3);
        assert_eq!(g.out_edges(ExecutionGraph::START).len(), 1);
    }

    #[test]
    fn cache_round_trip() {
        let m = fixture();
        let g = ExecutionGraph::build(m.app_name(), m.screen_size(), &systematic_explore(&m, 200));
        let text = g.to_cache_json();
        let back = ExecutionGraph::from_cache_json(&text).unwrap();
        assert_eq!(back.to_cache_json(), text);
        assert_eq!(
            back.vertex_for(m.screen("Settings").unwrap()),
            g.vertex_for(m.screen("Settings").unwrap())
        );
        assert!(matches!(
            ExecutionGraph::from_cache_json(&text.replacen("\"version\": 1", "\"version\": 9", 1)),
            Err(GraphError::UnknownVersion(9))
        ));
    }
}
