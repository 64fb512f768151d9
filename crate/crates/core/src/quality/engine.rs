use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    AnnotationKind, AssessConfig, ConfigEcho, ConstituentView, Diagnostics, DroppedView, Evidence,
    InteractionView, QualityAnnotation, QualityReport, S2rEntry, REPORT_SCHEMA_VERSION,
};
use crate::appsim::{
    launcher_screen, render_wireframe, wireframe_ref, AppModel, ComponentType, DeviceSession,
    EventKind, ScreenInstance,
};
use crate::extract::{extract_report, S2r};
use crate::graph::{
    neighborhood, shortest_path, signature, ExecutionGraph, Interaction, ScreenSignature, TraceStep,
};
use crate::ingest::BugReport;
use crate::labeling::S2rLabeler;
use crate::resolve::{
    resolve_event, resolve_step, Constituent, InputCounter, Resolution, ResolvedInteraction,
};

/// A step resolved on one vertex of the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexMatch {
    pub vertex: usize,
    /// Levels between the current vertex and `vertex`.
    pub distance: usize,
    pub interaction: ResolvedInteraction,
    /// Execution order of the graph edge the interaction matched, if any.
    pub exec_order: Option<u64>,
}

impl VertexMatch {
    pub fn score(&self) -> f64 {
        1.0 / (self.distance as f64 + 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepMatch {
    /// Resolutions on every vertex where the step resolved, in visiting order.
    pub resolutions: Vec<VertexMatch>,
    pub chosen: VertexMatch,
}

impl StepMatch {
    pub fn distance(&self) -> usize {
        self.chosen.distance
    }

    pub fn score(&self) -> f64 {
        self.chosen.score()
    }
}

/// Picks the match with the highest score. Ties go to the interaction
/// executed earliest during exploration, then to visiting order.
fn choose(resolutions: &[VertexMatch]) -> Option<&VertexMatch> {
    resolutions
        .iter()
        .enumerate()
        .min_by_key(|(i, m)| (m.distance, m.exec_order.unwrap_or(u64::MAX), *i))
        .map(|(_, m)| m)
}

/// Resolves `s2r` on every vertex within `cfg.depth` levels of `current`.
/// The current vertex is resolved on `live`, the screen actually shown.
/// When no vertex resolves, returns the outcome on the nearest vertex.
pub fn match_step(
    graph: &ExecutionGraph,
    current: usize,
    live: &ScreenInstance,
    s2r: &S2r,
    cfg: &AssessConfig,
    counter: &InputCounter,
) -> Result<StepMatch, Resolution> {
    let mut resolutions = Vec::new();
    let mut nearest_failure = None;
    for (v, d) in neighborhood(graph, current, cfg.depth) {
        let screen = if v == current {
            live
        } else {
            &graph.vertices[v].screen
        };
        match resolve_step(s2r, screen, &cfg.matching, counter) {
            Resolution::Resolved(interaction) => {
                let exec_order = graph
                    .matching_edges(v, interaction.event, interaction.component.as_deref())
                    .first()
                    .map(|e| e.exec_order);
                resolutions.push(VertexMatch {
                    vertex: v,
                    distance: d,
                    interaction,
                    exec_order,
                });
            }
            failure => {
                nearest_failure.get_or_insert(failure);
            }
        }
    }
    match choose(&resolutions).cloned() {
        Some(chosen) => Ok(StepMatch {
            resolutions,
            chosen,
        }),
        None => Err(nearest_failure.unwrap_or(Resolution::Mismatch {
            constituents: vec![Constituent::Action],
        })),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    /// Path interactions executed to reach the match's screen.
    pub inferred: Vec<TraceStep>,
    pub executed: TraceStep,
}

/// The device did not behave as the graph predicted. `executed` holds the
/// steps that did run.
#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    pub executed: Vec<TraceStep>,
    pub reason: String,
}

fn run(
    session: &mut DeviceSession,
    event: EventKind,
    component: Option<&str>,
    input: Option<&str>,
) -> Result<TraceStep, String> {
    let from = session.current_screen();
    let to = session
        .execute(event, component, input)
        .map_err(|e| e.to_string())?;
    Ok(TraceStep {
        from,
        event,
        component: component.map(str::to_string),
        input: input.map(str::to_string),
        to,
    })
}

/// Walks the shortest graph path from `current` to the match's vertex,
/// then executes the matched interaction. The path is the inferred
/// missing steps. The executed interaction is added to the graph.
pub fn execute_and_infer(
    session: &mut DeviceSession,
    graph: &mut ExecutionGraph,
    current: usize,
    m: &VertexMatch,
) -> Result<Execution, Divergence> {
    let path: Vec<Interaction> =
        shortest_path(graph, current, m.vertex).map_err(|e| Divergence {
            executed: Vec::new(),
            reason: e.to_string(),
        })?;
    let mut inferred = Vec::new();
    for edge in &path {
        let diverged = |inferred: &mut Vec<TraceStep>, reason: String| Divergence {
            executed: std::mem::take(inferred),
            reason,
        };
        if graph.vertex_for(&session.current_screen()) != Some(edge.source) {
            return Err(diverged(
                &mut inferred,
                "device is not on the expected screen".into(),
            ));
        }
        match run(
            session,
            edge.event,
            edge.component.as_deref(),
            edge.input.as_deref(),
        ) {
            Ok(step) => {
                let arrived = graph.vertex_for(&step.to);
                inferred.push(step);
                if arrived != edge.target {
                    return Err(diverged(
                        &mut inferred,
                        "transition led to an unexpected screen".into(),
                    ));
                }
            }
            Err(reason) => return Err(diverged(&mut inferred, reason)),
        }
    }
    let i = &m.interaction;
    match run(session, i.event, i.component.as_deref(), i.input.as_deref()) {
        Ok(executed) => {
            graph.add_step(&executed);
            Ok(Execution { inferred, executed })
        }
        Err(reason) => Err(Divergence {
            executed: inferred,
            reason,
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomOutcome {
    pub matched: Option<StepMatch>,
    pub iterations: usize,
    pub steps: usize,
}

fn random_candidates(
    screen: &ScreenInstance,
    done: &HashSet<(ScreenSignature, String)>,
) -> Vec<String> {
    let sig = signature(screen);
    screen
        .components()
        .into_iter()
        .filter(|c| c.flags.enabled && c.flags.tappable)
        .filter(|c| !matches!(c.comp_type, ComponentType::Layout | ComponentType::List))
        .filter(|c| !done.contains(&(sig.clone(), c.id.clone())))
        .map(|c| c.id.clone())
        .collect()
}

/// Up to `cfg.random_iterations` rounds of up to `cfg.random_steps` random
/// taps, each on a component not yet tapped in the round. After each round
/// the trace joins the graph, the device returns to where it started and
/// the step is matched again.
pub fn random_explore(
    session: &mut DeviceSession,
    graph: &mut ExecutionGraph,
    s2r: &S2r,
    cfg: &AssessConfig,
    rng: &mut ChaCha8Rng,
    counter: &InputCounter,
) -> RandomOutcome {
    let mut outcome = RandomOutcome {
        matched: None,
        iterations: 0,
        steps: 0,
    };
    let start = session.checkpoint();
    for _ in 0..cfg.random_iterations {
        outcome.iterations += 1;
        let mut trace = Vec::new();
        let mut done = HashSet::new();
        for _ in 0..cfg.random_steps {
            let screen = session.current_screen();
            let candidates = random_candidates(&screen, &done);
            if candidates.is_empty() {
                break;
            }
            let id = &candidates[rng.random_range(0..candidates.len())];
            done.insert((signature(&screen), id.clone()));
            if let Ok(step) = run(session, EventKind::Tap, Some(id), None) {
                trace.push(step);
            }
        }
        outcome.steps += trace.len();
        graph.merge_trace(&trace);
        session
            .restore(&start)
            .expect("checkpoint taken from this session");
        let live = session.current_screen();
        let current = graph.ensure_vertex(&live);
        if let Ok(m) = match_step(graph, current, &live, s2r, cfg, counter) {
            outcome.matched = Some(m);
            break;
        }
    }
    outcome
}

struct Assessment<'m> {
    model: &'m AppModel,
    cfg: AssessConfig,
    session: DeviceSession<'m>,
    graph: ExecutionGraph,
    counter: InputCounter,
    rng: ChaCha8Rng,
    wireframes: BTreeMap<String, String>,
    diag: Diagnostics,
}

impl Assessment<'_> {
    fn wireframe(&mut self, screen: &ScreenInstance, highlight: Option<&str>) -> String {
        let svg = render_wireframe(screen, self.model.screen_size(), highlight);
        let r = wireframe_ref(&svg);
        self.wireframes.entry(r.clone()).or_insert(svg);
        r
    }

    fn view(&mut self, step: &TraceStep) -> InteractionView {
        let label = step
            .component
            .as_deref()
            .and_then(|id| step.from.component(id))
            .and_then(|c| {
                [&c.label, &c.description]
                    .into_iter()
                    .find(|s| !s.is_empty())
                    .cloned()
            });
        InteractionView {
            screen: step.from.name.clone(),
            event: step.event,
            component: step.component.clone(),
            label,
            input: step.input.clone(),
            wireframe_ref: self.wireframe(&step.from, step.component.as_deref()),
        }
    }

    fn success(&mut self, inferred: &[TraceStep], executed: &TraceStep) -> Vec<QualityAnnotation> {
        let hq = self.view(executed);
        let mut out = vec![QualityAnnotation {
            kind: AnnotationKind::HighQuality,
            wireframe_refs: vec![hq.wireframe_ref.clone()],
            evidence: Evidence::Interaction { interaction: hq },
        }];
        if !inferred.is_empty() {
            let steps: Vec<InteractionView> = inferred.iter().map(|s| self.view(s)).collect();
            out.push(QualityAnnotation {
                kind: AnnotationKind::MissingSteps,
                wireframe_refs: steps.iter().map(|s| s.wireframe_ref.clone()).collect(),
                evidence: Evidence::Steps { steps },
            });
        }
        out
    }

    fn failure(&mut self, s2r: &S2r, failure: Resolution) -> Vec<QualityAnnotation> {
        let screen = self.session.current_screen();
        let wf = vec![self.wireframe(&screen, None)];
        let annotation = match failure {
            Resolution::MultipleMatch { candidates } => QualityAnnotation {
                kind: AnnotationKind::AmbiguousStep,
                evidence: Evidence::Candidates { candidates },
                wireframe_refs: wf,
            },
            Resolution::Mismatch { constituents } => QualityAnnotation {
                kind: AnnotationKind::VocabularyMismatch,
                evidence: Evidence::Constituents {
                    constituents: constituents
                        .into_iter()
                        .map(|role| ConstituentView {
                            text: match role {
                                Constituent::Action => s2r.action.clone(),
                                Constituent::Object => s2r.object_text(),
                                Constituent::Preposition => s2r.preposition_text(),
                                Constituent::Object2 => s2r.object2_text(),
                            },
                            role,
                        })
                        .collect(),
                },
                wireframe_refs: wf,
            },
            Resolution::Resolved(_) => unreachable!("failure outcomes only"),
        };
        vec![annotation]
    }

    fn find_match(&mut self, s2r: &S2r) -> Result<(usize, StepMatch), Resolution> {
        let live = self.session.current_screen();
        let current = self.graph.ensure_vertex(&live);
        match match_step(&self.graph, current, &live, s2r, &self.cfg, &self.counter) {
            Ok(m) => Ok((current, m)),
            Err(failure) => {
                let outcome = random_explore(
                    &mut self.session,
                    &mut self.graph,
                    s2r,
                    &self.cfg,
                    &mut self.rng,
                    &self.counter,
                );
                self.diag.random_iterations_run += outcome.iterations;
                self.diag.random_steps_executed += outcome.steps;
                outcome.matched.map(|m| (current, m)).ok_or(failure)
            }
        }
    }

    fn step(&mut self, index: usize, s2r: &S2r) -> Vec<QualityAnnotation> {
        let before = self.session.checkpoint();
        let mut inferred: Vec<TraceStep> = Vec::new();
        for attempt in 0..2 {
            let (current, m) = match self.find_match(s2r) {
                Ok(found) => found,
                Err(failure) => {
                    self.session.restore(&before).expect("own checkpoint");
                    return self.failure(s2r, failure);
                }
            };
            match execute_and_infer(&mut self.session, &mut self.graph, current, &m.chosen) {
                Ok(ex) => {
                    if m.chosen.interaction.generated_input {
                        self.counter.advance();
                    }
                    inferred.extend(ex.inferred);
                    return self.success(&inferred, &ex.executed);
                }
                Err(div) => {
                    self.graph.merge_trace(&div.executed);
                    inferred.extend(div.executed);
                    self.diag.notes.push(format!(
                        "step {}: execution diverged from the graph (attempt {}): {}",
                        index + 1,
                        attempt + 1,
                        div.reason
                    ));
                }
            }
        }
        self.session.restore(&before).expect("own checkpoint");
        self.diag.notes.push(format!(
            "step {}: could not be executed; reported as a vocabulary mismatch",
            index + 1
        ));
        let mut constituents = Vec::new();
        if !s2r.object.is_empty() {
            constituents.push(Constituent::Object);
        }
        if !s2r.object2.is_empty() {
            constituents.push(Constituent::Object2);
        }
        if constituents.is_empty() {
            constituents.push(Constituent::Action);
        }
        self.failure(s2r, Resolution::Mismatch { constituents })
    }

    fn open_app(&mut self) -> TraceStep {
        let step = run(&mut self.session, EventKind::OpenApp, None, None)
            .expect("the app can always be launched");
        self.graph.add_step(&step);
        step
    }
}

/// Assesses every step of `report` against `model`, starting from `graph`
/// (which is copied, not modified).
pub fn assess(
    report: &BugReport,
    model: &AppModel,
    graph: &ExecutionGraph,
    cfg: &AssessConfig,
    labeler: &dyn S2rLabeler,
) -> QualityReport {
    let mut cfg = cfg.clone();
    cfg.matching = cfg.matching.for_app(model.app_name(), model.synonyms());
    let extraction = extract_report(report, labeler);
    let sentences: Vec<_> = report.sentences().collect();
    let mut a = Assessment {
        model,
        session: DeviceSession::new(model),
        graph: graph.clone(),
        counter: InputCounter::default(),
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        wireframes: BTreeMap::new(),
        diag: Diagnostics {
            sentence_count: sentences.len(),
            s2r_count: extraction.steps.len(),
            dropped_sentences: extraction
                .dropped
                .iter()
                .map(|d| DroppedView {
                    sentence_index: d.sentence_index,
                    text: d.text.clone(),
                    reason: d.reason.clone(),
                })
                .collect(),
            graph_vertices_initial: graph.vertices.len(),
            graph_edges_initial: graph.edges.len(),
            ..Diagnostics::default()
        },
        cfg,
    };

    let mut entries = Vec::with_capacity(extraction.steps.len());
    if !extraction.steps.is_empty() {
        let launcher = launcher_screen(model.screen_size());
        let first_is_open = resolve_event(&extraction.steps[0], &launcher, &a.cfg.matching)
            == Ok(EventKind::OpenApp);
        a.diag.first_step_open_app = first_is_open;
        if !first_is_open {
            a.diag.notes.push(
                "the first step does not open the app; the app was launched before it".into(),
            );
        }
        let launch = a.open_app();
        for (i, s2r) in extraction.steps.iter().enumerate() {
            let annotations = if i == 0 && first_is_open {
                a.success(&[], &launch)
            } else {
                a.step(i, s2r)
            };
            let sentence = sentences.get(s2r.sentence_index);
            entries.push(S2rEntry {
                index: i,
                text: sentence
                    .map(|s| s.raw.clone())
                    .unwrap_or_else(|| s2r.to_string()),
                tuple: s2r.tuple_string(),
                sentence_index: s2r.sentence_index,
                span: s2r.sentence_span,
                annotations,
            });
        }
    }
    a.diag.graph_vertices_final = a.graph.vertices.len();
    a.diag.graph_edges_final = a.graph.edges.len();

    QualityReport {
        schema_version: REPORT_SCHEMA_VERSION,
        report_id: report.id.clone(),
        title: report.title.clone(),
        app_name: model.app_name().to_string(),
        s2rs: entries,
        diagnostics: a.diag,
        config_echo: ConfigEcho {
            depth: a.cfg.depth,
            random_iterations: a.cfg.random_iterations,
            random_steps: a.cfg.random_steps,
            similarity_threshold: a.cfg.matching.similarity_threshold,
            seed: a.cfg.seed,
            labeler: labeler.name().to_string(),
        },
        wireframes: a.wireframes,
    }
}
