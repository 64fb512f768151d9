//! The assessment run shared by the CLI and the HTTP service, so both
//! produce the same report for the same inputs.

use thiserror::Error;

use reprolint_core::appsim::AppModel;
use reprolint_core::graph::{systematic_explore, ExecutionGraph};
use reprolint_core::ingest::{parse_report, IngestError};
use reprolint_core::labeling::{DiscoursePatternLabeler, S2rLabeler, SidecarError, SidecarLabeler};
use reprolint_core::quality::{assess, AssessConfig, QualityReport};

/// Systematic exploration steps used when no graph cache is supplied.
pub const EXPLORATION_BUDGET: usize = 200;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Report(#[from] IngestError),
    #[error("labels: {0}")]
    Labels(#[from] SidecarError),
    #[error("graph cache was built for app `{found}`, not `{expected}`")]
    ForeignGraph { expected: String, found: String },
}

pub fn explore(model: &AppModel, budget: usize) -> ExecutionGraph {
    ExecutionGraph::build(
        model.app_name(),
        model.screen_size(),
        &systematic_explore(model, budget),
    )
}

pub fn check_graph(model: &AppModel, graph: &ExecutionGraph) -> Result<(), PipelineError> {
    if graph.app_name != model.app_name() {
        return Err(PipelineError::ForeignGraph {
            expected: model.app_name().to_string(),
            found: graph.app_name.clone(),
        });
    }
    Ok(())
}

/// Parses the report (and optional sentence labels) without assessing it.
pub fn validate_inputs(report: &str, labels: Option<&str>) -> Result<(), PipelineError> {
    let parsed = parse_report(report)?;
    if let Some(l) = labels {
        SidecarLabeler::for_report(l, &parsed)?;
    }
    Ok(())
}

pub fn run(
    report: &str,
    labels: Option<&str>,
    model: &AppModel,
    graph: &ExecutionGraph,
    cfg: &AssessConfig,
) -> Result<QualityReport, PipelineError> {
    check_graph(model, graph)?;
    let parsed = parse_report(report)?;
    let sidecar = labels
        .map(|l| SidecarLabeler::for_report(l, &parsed))
        .transpose()?;
    let labeler: &dyn S2rLabeler = match &sidecar {
        Some(s) => s,
        None => &DiscoursePatternLabeler,
    };
    Ok(assess(&parsed, model, graph, cfg, labeler))
}
