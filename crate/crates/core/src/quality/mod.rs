//! Quality assessment of a bug report's steps against an app.
//!
//! Each extracted step is matched against the execution graph, executed on
//! a simulated device (inferring the steps the report skipped), and given
//! quality annotations: HQ, AS, VM and MS.

mod engine;
mod render;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::appsim::EventKind;
use crate::ingest::Span;
use crate::resolve::{Candidate, ConfigError, Constituent, MatchConfig};

pub use engine::{
    assess, execute_and_infer, match_step, random_explore, Divergence, Execution, RandomOutcome,
    StepMatch, VertexMatch,
};
pub use render::{render_html, render_json};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct AssessConfig {
    /// Levels of the graph searched around the current state.
    pub depth: usize,
    pub random_iterations: usize,
    pub random_steps: usize,
    pub seed: u64,
    pub matching: MatchConfig,
}

impl Default for AssessConfig {
    fn default() -> AssessConfig {
        AssessConfig {
            depth: 6,
            random_iterations: 3,
            random_steps: 10,
            seed: 0,
            matching: MatchConfig::default(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AssessError {
    #[error("random exploration needs at least one step per iteration")]
    NoRandomSteps,
    #[error(transparent)]
    Matching(#[from] ConfigError),
}

impl AssessConfig {
    pub fn validate(&self) -> Result<(), AssessError> {
        if self.random_steps == 0 {
            return Err(AssessError::NoRandomSteps);
        }
        self.matching.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AnnotationKind {
    #[serde(rename = "HQ")]
    HighQuality,
    #[serde(rename = "AS")]
    AmbiguousStep,
    #[serde(rename = "VM")]
    VocabularyMismatch,
    #[serde(rename = "MS")]
    MissingSteps,
}

impl AnnotationKind {
    pub fn code(self) -> &'static str {
        match self {
            AnnotationKind::HighQuality => "HQ",
            AnnotationKind::AmbiguousStep => "AS",
            AnnotationKind::VocabularyMismatch => "VM",
            AnnotationKind::MissingSteps => "MS",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            AnnotationKind::HighQuality => "High quality",
            AnnotationKind::AmbiguousStep => "Ambiguous step",
            AnnotationKind::VocabularyMismatch => "Vocabulary mismatch",
            AnnotationKind::MissingSteps => "Missing steps",
        }
    }
}

impl fmt::Display for AnnotationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// An interaction as shown in a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InteractionView {
    /// Screen the interaction starts from.
    pub screen: String,
    pub event: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    pub wireframe_ref: String,
}

impl fmt::Display for InteractionView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.event.verb())?;
        if let Some(input) = &self.input {
            write!(f, " \"{input}\" into")?;
        }
        match (&self.label, &self.component) {
            (Some(l), _) => write!(f, " \"{l}\"")?,
            (None, Some(c)) => write!(f, " {c}")?,
            _ => {}
        }
        write!(f, " on {}", self.screen)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstituentView {
    pub role: Constituent,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Evidence {
    Interaction { interaction: InteractionView },
    Candidates { candidates: Vec<Candidate> },
    Constituents { constituents: Vec<ConstituentView> },
    Steps { steps: Vec<InteractionView> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QualityAnnotation {
    pub kind: AnnotationKind,
    pub evidence: Evidence,
    pub wireframe_refs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct S2rEntry {
    pub index: usize,
    /// Source sentence.
    pub text: String,
    pub tuple: String,
    pub sentence_index: usize,
    pub span: Span,
    pub annotations: Vec<QualityAnnotation>,
}

impl S2rEntry {
    pub fn kinds(&self) -> Vec<AnnotationKind> {
        self.annotations.iter().map(|a| a.kind).collect()
    }

    pub fn annotation(&self, kind: AnnotationKind) -> Option<&QualityAnnotation> {
        self.annotations.iter().find(|a| a.kind == kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DroppedView {
    pub sentence_index: usize,
    pub text: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Diagnostics {
    pub sentence_count: usize,
    pub s2r_count: usize,
    pub dropped_sentences: Vec<DroppedView>,
    pub first_step_open_app: bool,
    pub graph_vertices_initial: usize,
    pub graph_vertices_final: usize,
    pub graph_edges_initial: usize,
    pub graph_edges_final: usize,
    pub random_iterations_run: usize,
    pub random_steps_executed: usize,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConfigEcho {
    pub depth: usize,
    pub random_iterations: usize,
    pub random_steps: usize,
    pub similarity_threshold: f64,
    pub seed: u64,
    pub labeler: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QualityReport {
    pub schema_version: u32,
    pub report_id: String,
    pub title: String,
    pub app_name: String,
    pub s2rs: Vec<S2rEntry>,
    pub diagnostics: Diagnostics,
    pub config_echo: ConfigEcho,
    /// Wireframe documents by reference. Served alongside the report, not
    /// part of the machine format.
    #[serde(skip)]
    pub wireframes: BTreeMap<String, String>,
}

impl QualityReport {
    /// All wireframe references the report mentions.
    pub fn wireframe_refs(&self) -> Vec<&str> {
        let mut refs: Vec<&str> = self
            .s2rs
            .iter()
            .flat_map(|s| &s.annotations)
            .flat_map(|a| a.wireframe_refs.iter().map(String::as_str))
            .collect();
        refs.sort();
        refs.dedup();
        refs
    }
}

#[cfg(test)]
mod tests;
