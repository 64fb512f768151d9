//! Individual step extraction from S2R-labeled sentences.
//!
//! A sentence is cut into clauses at subordinators ("when", "if", "after",
//! ...) and clause punctuation. Each actionable clause yields one or more
//! `[action] [object] [preposition] [object2]` tuples: the clause verb is
//! the action, the following noun phrase is the object, and a prepositional
//! phrase after it supplies the preposition and second object. Conjoined
//! verb phrases ("tap A and type B") yield one step each.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{BugReport, Sentence, SentenceKind, Span, Token};
use crate::labeling::{label_sentences, S2rLabeler, SentenceLabel, PERSON_SUBJECTS, SUBORDINATORS};
use crate::lexicon::Pos;

/// One extracted step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct S2r {
    /// Verb lemma.
    pub action: String,
    pub object: Vec<Token>,
    pub preposition: Option<Token>,
    pub object2: Vec<Token>,
    /// Global index of the source sentence in the report.
    pub sentence_index: usize,
    /// Clause position within the source sentence.
    pub clause_index: usize,
    /// Position among the steps of the same clause.
    pub step_in_clause: usize,
    /// Clause introduced by "after", which orders before its main clause.
    pub after_clause: bool,
    /// Position in the ordered step sequence of the report.
    pub order_index: usize,
    pub sentence_span: Span,
}

fn phrase(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

impl S2r {
    pub fn object_text(&self) -> String {
        phrase(&self.object)
    }

    pub fn object2_text(&self) -> String {
        phrase(&self.object2)
    }

    pub fn preposition_text(&self) -> String {
        self.preposition
            .as_ref()
            .map(|p| p.lemma.clone())
            .unwrap_or_default()
    }

    pub fn object_terms(&self) -> Vec<String> {
        self.object.iter().map(|t| t.lemma.clone()).collect()
    }

    pub fn object2_terms(&self) -> Vec<String> {
        self.object2.iter().map(|t| t.lemma.clone()).collect()
    }

    /// `[action] [object] [prep] [object2]` with empty brackets for missing parts.
    pub fn tuple_string(&self) -> String {
        format!(
            "[{}] [{}] [{}] [{}]",
            self.action,
            self.object_text(),
            self.preposition_text(),
            self.object2_text()
        )
    }
}

impl fmt::Display for S2r {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![self.action.clone()];
        for p in [
            self.object_text(),
            self.preposition_text(),
            self.object2_text(),
        ] {
            if !p.is_empty() {
                parts.push(p);
            }
        }
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtractError {
    #[error("no actionable verb found")]
    NoVerb,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceExtraction {
    pub kind: SentenceKind,
    pub steps: Vec<S2r>,
}

#[derive(Debug, Clone)]
struct Clause<'a> {
    tokens: Vec<&'a Token>,
    subordinator: Option<String>,
}

fn is_word(t: &Token) -> bool {
    t.is_literal() || t.surface.chars().next().is_some_and(char::is_alphanumeric)
}

fn split_clauses(sentence: &Sentence) -> Vec<Clause<'_>> {
    let mut clauses = Vec::new();
    let mut current = Clause {
        tokens: Vec::new(),
        subordinator: None,
    };
    let toks = &sentence.tokens;
    for (i, t) in toks.iter().enumerate() {
        if !is_word(t) {
            if matches!(t.surface.as_str(), "," | ";" | ":" | "(" | ")")
                && !current.tokens.is_empty()
            {
                clauses.push(std::mem::replace(
                    &mut current,
                    Clause {
                        tokens: Vec::new(),
                        subordinator: None,
                    },
                ));
            }
            continue;
        }
        let opens_clause = SUBORDINATORS.contains(&t.lemma.as_str())
            && matches!(t.pos, Pos::Adv | Pos::Adp | Pos::Other)
            && clause_has_verb_ahead(&toks[i + 1..]);
        if opens_clause {
            if !current.tokens.is_empty() {
                clauses.push(std::mem::replace(
                    &mut current,
                    Clause {
                        tokens: Vec::new(),
                        subordinator: None,
                    },
                ));
            }
            current.subordinator = Some(t.lemma.clone());
            continue;
        }
        current.tokens.push(t);
    }
    if !current.tokens.is_empty() {
        clauses.push(current);
    }
    clauses
}

fn clause_has_verb_ahead(rest: &[Token]) -> bool {
    rest.iter()
        .take_while(|t| !matches!(t.surface.as_str(), "," | ";" | ":" | "." | "!" | "?"))
        .take(4)
        .any(|t| t.pos == Pos::Verb)
}

const LEADING_SKIP: &[&str] = &[
    "then",
    "next",
    "first",
    "now",
    "finally",
    "please",
    "also",
    "and",
    "afterwards",
    "again",
    "just",
    "second",
    "third",
    "lastly",
    "so",
    "or",
];
const CONTROL_VERBS: &[&str] = &["try", "want", "need", "start", "begin", "continue"];
const AUX: &[&str] = &["be", "have", "do"];
const PARTICLES: &[&str] = &["up", "down", "left", "right", "back", "out"];

/// Who performs the clause, if anyone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Subject {
    None,
    Person,
    Thing,
}

/// Skips leading discourse markers and a subject; returns the index of the
/// first token after the subject.
fn skip_subject(tokens: &[&Token]) -> (usize, Subject) {
    let mut i = 0;
    while i < tokens.len()
        && LEADING_SKIP.contains(&tokens[i].lemma.as_str())
        && tokens[i].pos != Pos::Verb
    {
        i += 1;
    }
    let Some(t) = tokens.get(i) else {
        return (i, Subject::None);
    };
    if t.pos == Pos::Pron || t.lemma == "user" {
        let person = PERSON_SUBJECTS.contains(&t.lemma.as_str());
        return (
            i + 1,
            if person {
                Subject::Person
            } else {
                Subject::Thing
            },
        );
    }
    if t.lemma == "the" && tokens.get(i + 1).is_some_and(|n| n.lemma == "user") {
        return (i + 2, Subject::Person);
    }
    if matches!(
        t.pos,
        Pos::Det | Pos::Noun | Pos::Adj | Pos::Literal | Pos::Num
    ) {
        let mut j = i;
        while j < tokens.len() && is_np(tokens[j]) {
            j += 1;
        }
        return (j, Subject::Thing);
    }
    (i, Subject::None)
}

fn is_np(t: &Token) -> bool {
    matches!(
        t.pos,
        Pos::Det | Pos::Adj | Pos::Noun | Pos::Literal | Pos::Num
    )
}

/// Noun phrase starting at `i`; determiners are dropped from the result.
fn take_np(tokens: &[&Token], mut i: usize) -> (Vec<Token>, usize) {
    let mut out = Vec::new();
    let np_at = |i: usize| {
        is_np(tokens[i])
            || (tokens[i].pos == Pos::Adv
                && PARTICLES.contains(&tokens[i].lemma.as_str())
                && tokens.get(i + 1).is_some_and(|n| n.pos == Pos::Noun))
    };
    while i < tokens.len() && np_at(i) {
        if tokens[i].pos != Pos::Det {
            out.push(tokens[i].clone());
        }
        i += 1;
    }
    (out, i)
}

struct Phrase {
    action: String,
    object: Vec<Token>,
    preposition: Option<Token>,
    object2: Vec<Token>,
}

/// Verb phrases in a clause, starting at `start`.
fn verb_phrases(tokens: &[&Token], start: usize) -> Vec<Phrase> {
    let mut out = Vec::new();
    let mut i = start;
    loop {
        // locate the main verb, skipping adverbs, modals, auxiliaries and
        // control verbs ("try to open")
        let mut verb = None;
        while i < tokens.len() {
            let t = tokens[i];
            match t.pos {
                Pos::Verb => {
                    let next_is_verb = tokens[i + 1..].iter().take(2).any(|n| n.pos == Pos::Verb);
                    let control = CONTROL_VERBS.contains(&t.lemma.as_str())
                        && tokens.get(i + 1).is_some_and(|n| n.lemma == "to");
                    if (AUX.contains(&t.lemma.as_str()) && next_is_verb) || control {
                        i += 1;
                        continue;
                    }
                    verb = Some(i);
                    break;
                }
                Pos::Adv | Pos::Other => i += 1,
                Pos::Adp if t.lemma == "to" => i += 1,
                _ => break,
            }
        }
        let Some(v) = verb else { break };
        let action = tokens[v].lemma.clone();
        i = v + 1;

        let mut object = Vec::new();
        if i < tokens.len()
            && tokens[i].pos == Pos::Adv
            && PARTICLES.contains(&tokens[i].lemma.as_str())
        {
            object.push(tokens[i].clone());
            i += 1;
        }
        let (np, next) = take_np(tokens, i);
        object.extend(np);
        i = next;
        // a bare trailing word such as "Tap About" names the target itself
        if object.is_empty()
            && i < tokens.len()
            && matches!(tokens[i].pos, Pos::Adp | Pos::Adv)
            && tokens
                .get(i + 1)
                .is_none_or(|n| !n.surface.starts_with(char::is_alphanumeric))
        {
            object.push(tokens[i].clone());
            i += 1;
        }

        let mut preposition = None;
        let mut object2 = Vec::new();
        if i < tokens.len() && tokens[i].pos == Pos::Adp {
            let (np2, next) = take_np(tokens, i + 1);
            if !np2.is_empty() {
                preposition = Some(tokens[i].clone());
                object2 = np2;
                i = next;
            }
        }
        out.push(Phrase {
            action,
            object,
            preposition,
            object2,
        });

        // a coordinated verb phrase continues the clause
        let mut j = i;
        let mut saw_coordination = false;
        while j < tokens.len() && tokens[j].pos != Pos::Verb {
            if matches!(tokens[j].lemma.as_str(), "and" | "then" | "or") {
                saw_coordination = true;
                j += 1;
            } else if tokens[j].pos == Pos::Adv {
                j += 1;
            } else {
                break;
            }
        }
        if saw_coordination && j < tokens.len() && tokens[j].pos == Pos::Verb {
            i = j;
            continue;
        }
        break;
    }
    out
}

fn passive_phrase(tokens: &[&Token]) -> Option<Phrase> {
    let (after_subject, subject) = skip_subject(tokens);
    if subject != Subject::Thing {
        return None;
    }
    let be = tokens.get(after_subject)?;
    let participle = tokens.get(after_subject + 1)?;
    let inflected = participle.surface.to_lowercase() != participle.lemma;
    if be.lemma != "be" || participle.pos != Pos::Verb || !inflected {
        return None;
    }
    if tokens[after_subject + 2..].iter().any(|t| t.lemma == "by") {
        return None;
    }
    let (object, _) = take_np(tokens, 0);
    Some(Phrase {
        action: participle.lemma.clone(),
        object,
        preposition: None,
        object2: Vec::new(),
    })
}

/// Classifies `sentence` and extracts its steps. `sentence_index` is the
/// global index of the sentence in its report.
pub fn extract_s2rs(
    sentence: &Sentence,
    sentence_index: usize,
) -> Result<SentenceExtraction, ExtractError> {
    let clauses = split_clauses(sentence);
    let mut kind = SentenceKind::Other;
    let mut per_clause: Vec<(usize, bool, Vec<Phrase>)> = Vec::new();

    for (ci, clause) in clauses.iter().enumerate() {
        let (after_subject, subject) = skip_subject(&clause.tokens);
        let starts_with_verb = clause.tokens.get(after_subject).is_some_and(|t| {
            t.pos == Pos::Verb
                || (matches!(t.pos, Pos::Adv | Pos::Other)
                    && clause.tokens[after_subject..]
                        .iter()
                        .take(3)
                        .any(|t| t.pos == Pos::Verb))
        });
        let actionable = match (&clause.subordinator, subject) {
            (Some(_), Subject::Person | Subject::None) => starts_with_verb,
            (None, Subject::None) => starts_with_verb,
            (None, Subject::Person) => starts_with_verb,
            _ => false,
        };
        if !actionable {
            continue;
        }
        let phrases = verb_phrases(&clause.tokens, after_subject);
        if phrases.is_empty() {
            continue;
        }
        let clause_kind = match (&clause.subordinator, subject) {
            (Some(_), _) => SentenceKind::Conditional,
            (None, Subject::Person) => SentenceKind::Declarative,
            _ => SentenceKind::Imperative,
        };
        kind = match (kind, clause_kind) {
            (SentenceKind::Conditional, _) | (_, SentenceKind::Conditional) => {
                SentenceKind::Conditional
            }
            (SentenceKind::Other, k) => k,
            (k, _) => k,
        };
        let after = clause.subordinator.as_deref() == Some("after");
        per_clause.push((ci, after, phrases));
    }

    if per_clause.is_empty() {
        if let Some((ci, phrase)) = clauses
            .iter()
            .enumerate()
            .find_map(|(ci, c)| passive_phrase(&c.tokens).map(|p| (ci, p)))
        {
            kind = SentenceKind::Passive;
            per_clause.push((ci, false, vec![phrase]));
        }
    }
    if per_clause.is_empty() {
        return Err(ExtractError::NoVerb);
    }

    let steps = per_clause
        .into_iter()
        .flat_map(|(ci, after, phrases)| {
            phrases.into_iter().enumerate().map(move |(si, p)| S2r {
                action: p.action,
                object: p.object,
                preposition: p.preposition,
                object2: p.object2,
                sentence_index,
                clause_index: ci,
                step_in_clause: si,
                after_clause: after,
                order_index: 0,
                sentence_span: sentence.span,
            })
        })
        .collect();
    Ok(SentenceExtraction { kind, steps })
}

/// Orders steps top-down and left-to-right, except that a clause governed
/// by "after" precedes the clause it modifies ("do x after doing y").
/// Assigns contiguous `order_index` values.
pub fn order_s2rs(mut steps: Vec<S2r>) -> Vec<S2r> {
    steps.sort_by_key(|s| (s.sentence_index, s.clause_index, s.step_in_clause));
    let mut groups: Vec<Vec<S2r>> = Vec::new();
    for s in steps {
        match groups.last_mut() {
            Some(g)
                if g[0].sentence_index == s.sentence_index
                    && g[0].clause_index == s.clause_index =>
            {
                g.push(s)
            }
            _ => groups.push(vec![s]),
        }
    }
    let mut ordered: Vec<Vec<S2r>> = Vec::with_capacity(groups.len());
    for g in groups {
        let hoist = g[0].after_clause
            && ordered.last().is_some_and(|prev| {
                prev[0].sentence_index == g[0].sentence_index && !prev[0].after_clause
            });
        if hoist {
            let at = ordered.len() - 1;
            ordered.insert(at, g);
        } else {
            ordered.push(g);
        }
    }
    ordered
        .into_iter()
        .flatten()
        .enumerate()
        .map(|(i, mut s)| {
            s.order_index = i;
            s
        })
        .collect()
}

/// A labeled sentence that produced no step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedSentence {
    pub sentence_index: usize,
    pub text: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct ReportExtraction {
    pub labels: Vec<SentenceLabel>,
    pub kinds: Vec<SentenceKind>,
    pub steps: Vec<S2r>,
    pub dropped: Vec<DroppedSentence>,
}

/// Labels, extracts and orders the steps of a whole report.
pub fn extract_report(report: &BugReport, labeler: &dyn S2rLabeler) -> ReportExtraction {
    let labels: Vec<SentenceLabel> = label_sentences(report, labeler)
        .into_iter()
        .flatten()
        .collect();
    let mut kinds = Vec::with_capacity(labels.len());
    let mut steps = Vec::new();
    let mut dropped = Vec::new();
    for (idx, (sentence, label)) in report.sentences().zip(&labels).enumerate() {
        if !label.is_s2r() {
            kinds.push(SentenceKind::Other);
            continue;
        }
        match extract_s2rs(sentence, idx) {
            Ok(ex) => {
                kinds.push(ex.kind);
                steps.extend(ex.steps);
            }
            Err(e) => {
                kinds.push(SentenceKind::Other);
                dropped.push(DroppedSentence {
                    sentence_index: idx,
                    text: sentence.raw.clone(),
                    reason: e.to_string(),
                });
            }
        }
    }
    ReportExtraction {
        labels,
        kinds,
        steps: order_s2rs(steps),
        dropped,
    }
}
