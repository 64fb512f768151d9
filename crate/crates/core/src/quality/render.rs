use std::fmt::Write as _;

use super::{Evidence, InteractionView, QualityAnnotation, QualityReport};
use crate::appsim::escape;
use crate::canon::to_canonical_json;
use crate::resolve::Candidate;

/// Machine format: canonical JSON, byte-stable for equal reports.
pub fn render_json(qr: &QualityReport) -> String {
    to_canonical_json(qr).expect("quality report serializes")
}

const STYLE: &str = "
body { font-family: sans-serif; margin: 2em auto; max-width: 60em; color: #222; }
h1 { font-size: 1.4em; }
ol.steps > li { margin-bottom: 1.2em; }
.tuple { font-family: monospace; color: #555; }
.badge { display: inline-block; padding: 0 .5em; margin-right: .4em; border-radius: 3px; color: #fff; font-weight: bold; }
.HQ { background: #2e7d32; } .AS { background: #ef6c00; } .VM { background: #c62828; } .MS { background: #1565c0; }
.evidence { margin: .3em 0 0 1.5em; }
.modal { display: none; position: fixed; inset: 0; background: rgba(0,0,0,.6); }
.modal:target { display: flex; align-items: center; justify-content: center; }
.modal .frame { background: #fff; padding: 1em; }
table.diag td { padding: 0 1em 0 0; }
";

fn interaction_html(out: &mut String, v: &InteractionView) {
    let _ = write!(
        out,
        "{} <a href=\"#{}\">screen</a>",
        escape(&v.to_string()),
        escape(&v.wireframe_ref)
    );
}

fn annotation_html(out: &mut String, a: &QualityAnnotation) {
    let code = a.kind.code();
    let _ = write!(
        out,
        "<div class=\"evidence\"><span class=\"badge {code}\">{code}</span>{}",
        a.kind.title()
    );
    match &a.evidence {
        Evidence::Interaction { interaction } => {
            out.push_str(": ");
            interaction_html(out, interaction);
        }
        Evidence::Steps { steps } => {
            out.push_str(". Steps the report skipped:<ol>");
            for s in steps {
                out.push_str("<li>");
                interaction_html(out, s);
                out.push_str("</li>");
            }
            out.push_str("</ol>");
        }
        Evidence::Candidates { candidates } => {
            out.push_str(". The step matches several options:<ul>");
            for c in candidates {
                let text = match c {
                    Candidate::Event { group } => format!("action group {group}"),
                    Candidate::Component {
                        id,
                        label,
                        comp_type,
                        ..
                    } => format!("{} \"{}\" ({id})", comp_type.as_str(), label),
                };
                let _ = write!(out, "<li>{}</li>", escape(&text));
            }
            out.push_str("</ul>");
            if let Some(r) = a.wireframe_refs.first() {
                let _ = write!(out, "<a href=\"#{}\">screen</a>", escape(r));
            }
        }
        Evidence::Constituents { constituents } => {
            out.push_str(". No app interaction matches:<ul>");
            for c in constituents {
                let role = serde_json::to_value(c.role)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default();
                let _ = write!(out, "<li>{role}: \"{}\"</li>", escape(&c.text));
            }
            out.push_str("</ul>");
        }
    }
    out.push_str("</div>");
}

/// Human format: one self-contained page. Wireframes open in place.
pub fn render_html(qr: &QualityReport) -> String {
    let mut out = String::new();
    let title = if qr.title.is_empty() {
        format!("Quality report {}", qr.report_id)
    } else {
        format!("Quality report: {}", qr.title)
    };
    let _ = write!(
        out,
        "<!DOCTYPE html>\n<html lang=\"en\"><head><meta charset=\"utf-8\"><title>{t}</title><style>{STYLE}</style></head><body>\n<h1>{t}</h1>\n<p>App: {app}. Report {id}.</p>\n",
        t = escape(&title),
        app = escape(&qr.app_name),
        id = escape(&qr.report_id)
    );
    if qr.s2rs.is_empty() {
        out.push_str("<p>No steps to reproduce were found.</p>\n");
    } else {
        out.push_str("<ol class=\"steps\">\n");
        for s in &qr.s2rs {
            let badges: String = s
                .kinds()
                .iter()
                .map(|k| format!("<span class=\"badge {0}\">{0}</span>", k.code()))
                .collect();
            let _ = write!(
                out,
                "<li>{badges} {} <span class=\"tuple\">{}</span>",
                escape(&s.text),
                escape(&s.tuple)
            );
            for a in &s.annotations {
                annotation_html(&mut out, a);
            }
            out.push_str("</li>\n");
        }
        out.push_str("</ol>\n");
    }
    let d = &qr.diagnostics;
    let _ = write!(
        out,
        "<h2>Diagnostics</h2>\n<table class=\"diag\"><tr><td>Sentences</td><td>{}</td></tr><tr><td>Steps</td><td>{}</td></tr><tr><td>Random exploration</td><td>{} iterations, {} taps</td></tr><tr><td>Graph</td><td>{} to {} screens</td></tr></table>\n",
        d.sentence_count,
        d.s2r_count,
        d.random_iterations_run,
        d.random_steps_executed,
        d.graph_vertices_initial,
        d.graph_vertices_final
    );
    if !d.dropped_sentences.is_empty() {
        out.push_str("<p>Sentences without a usable step:</p><ul>");
        for s in &d.dropped_sentences {
            let _ = write!(out, "<li>{} ({})</li>", escape(&s.text), escape(&s.reason));
        }
        out.push_str("</ul>\n");
    }
    if !d.notes.is_empty() {
        out.push_str("<ul>");
        for n in &d.notes {
            let _ = write!(out, "<li>{}</li>", escape(n));
        }
        out.push_str("</ul>\n");
    }
    let c = &qr.config_echo;
    let _ = writeln!(
        out,
        "<p>Depth {}, {} random iterations of {} steps, threshold {}, seed {}, labeler {}.</p>",
        c.depth,
        c.random_iterations,
        c.random_steps,
        c.similarity_threshold,
        c.seed,
        escape(&c.labeler)
    );
    for r in qr.wireframe_refs() {
        if let Some(svg) = qr.wireframes.get(r) {
            let _ = writeln!(
                out,
                "<div class=\"modal\" id=\"{}\"><div class=\"frame\">{svg}<p><a href=\"#\">close</a></p></div></div>",
                escape(r)
            );
        }
    }
    out.push_str("</body></html>\n");
    out
}
