//! Sentence-level BIO labeling of steps-to-reproduce.
//!
//! The default labeler is rule based: it recognizes imperative, conditional,
//! first/second-person action and sequential discourse patterns, and forces
//! observed/expected-behavior sentences to `O`. Precomputed labels from an
//! external tagger can be plugged in through [`SidecarLabeler`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{BugReport, Paragraph, Sentence, Token};
use crate::lexicon::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SentenceLabel {
    #[serde(rename = "B-S2R")]
    BeginS2r,
    #[serde(rename = "I-S2R")]
    InsideS2r,
    #[serde(rename = "O")]
    Outside,
}

impl SentenceLabel {
    pub fn is_s2r(self) -> bool {
        !matches!(self, SentenceLabel::Outside)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SentenceLabel::BeginS2r => "B-S2R",
            SentenceLabel::InsideS2r => "I-S2R",
            SentenceLabel::Outside => "O",
        }
    }
}

/// Labels the sentences of one paragraph.
pub trait S2rLabeler {
    fn name(&self) -> &str;

    /// Must return exactly one label per sentence of `paragraph`.
    fn label(&self, paragraph_index: usize, paragraph: &Paragraph) -> Vec<SentenceLabel>;
}

/// Promotes any `I-S2R` that starts a paragraph or follows `O` to `B-S2R`.
pub fn repair_bio(labels: &mut [SentenceLabel]) {
    let mut prev = SentenceLabel::Outside;
    for label in labels.iter_mut() {
        if *label == SentenceLabel::InsideS2r && prev == SentenceLabel::Outside {
            *label = SentenceLabel::BeginS2r;
        }
        prev = *label;
    }
}

/// Labels every paragraph of `report`, one vector per paragraph.
pub fn label_sentences(report: &BugReport, labeler: &dyn S2rLabeler) -> Vec<Vec<SentenceLabel>> {
    report
        .paragraphs
        .iter()
        .enumerate()
        .map(|(idx, p)| {
            let mut labels = labeler.label(idx, p);
            labels.resize(p.sentences.len(), SentenceLabel::Outside);
            repair_bio(&mut labels);
            labels
        })
        .collect()
}

pub(crate) const SUBORDINATORS: &[&str] =
    &["when", "whenever", "if", "after", "once", "while", "before"];
pub(crate) const PERSON_SUBJECTS: &[&str] = &["i", "you", "we", "user"];
const CONTINUATION_MARKERS: &[&str] = &["then", "next", "and", "also", "afterwards", "finally"];
const LEADING_MARKERS: &[&str] = &[
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
];
const EXPECTATION_MARKERS: &[&str] = &["should", "expect", "supposed", "instead", "ought"];
/// Verbs that describe what the reporter observed rather than did.
const OBSERVATION_VERBS: &[&str] = &[
    "see", "get", "notice", "observe", "expect", "think", "want", "believe", "receive", "find",
    "happen", "appear", "seem", "occur", "crash", "show", "be", "have",
];

fn words(sentence: &Sentence) -> Vec<&Token> {
    sentence
        .tokens
        .iter()
        .filter(|t| t.is_literal() || t.surface.chars().next().is_some_and(char::is_alphanumeric))
        .collect()
}

/// Rule-based labeler over discourse patterns.
#[derive(Debug, Clone, Copy, Default)]
pub struct DiscoursePatternLabeler;

impl DiscoursePatternLabeler {
    pub const NAME: &'static str = "discourse-patterns";

    fn starts_with_continuation(words: &[&Token]) -> bool {
        words
            .first()
            .is_some_and(|t| CONTINUATION_MARKERS.contains(&t.lemma.as_str()))
    }

    fn is_conditional_step(words: &[&Token]) -> bool {
        words.iter().enumerate().any(|(i, t)| {
            if !SUBORDINATORS.contains(&t.lemma.as_str()) {
                return false;
            }
            let mut j = i + 1;
            if words.get(j).is_some_and(|w| w.lemma == "the")
                && words.get(j + 1).is_some_and(|w| w.lemma == "user")
            {
                j += 1;
            }
            match words.get(j) {
                Some(w) if PERSON_SUBJECTS.contains(&w.lemma.as_str()) => {
                    words[j + 1..].iter().take(3).any(|w| w.pos == Pos::Verb)
                }
                // gerund clause: "after saving the entry"
                Some(w) => w.pos == Pos::Verb && w.surface.to_lowercase().ends_with("ing"),
                None => false,
            }
        })
    }

    fn has_expectation(words: &[&Token]) -> bool {
        words
            .iter()
            .any(|t| EXPECTATION_MARKERS.contains(&t.lemma.as_str()))
    }

    fn is_imperative(words: &[&Token]) -> bool {
        let first = words
            .iter()
            .find(|t| !LEADING_MARKERS.contains(&t.lemma.as_str()));
        first.is_some_and(|t| t.pos == Pos::Verb && !OBSERVATION_VERBS.contains(&t.lemma.as_str()))
    }

    fn is_person_action(words: &[&Token]) -> bool {
        words.iter().enumerate().any(|(i, t)| {
            if !PERSON_SUBJECTS.contains(&t.lemma.as_str()) || t.lemma == "user" && i > 1 {
                return false;
            }
            words[i + 1..]
                .iter()
                .take_while(|w| matches!(w.pos, Pos::Verb | Pos::Adv | Pos::Other))
                .find(|w| w.pos == Pos::Verb && !matches!(w.lemma.as_str(), "be" | "have" | "do"))
                .is_some_and(|v| !OBSERVATION_VERBS.contains(&v.lemma.as_str()))
        })
    }

    fn is_sequential(words: &[&Token]) -> bool {
        words
            .first()
            .is_some_and(|t| matches!(t.lemma.as_str(), "then" | "next" | "afterwards" | "finally"))
            && words.iter().any(|t| t.pos == Pos::Verb)
    }

    /// Whether a single sentence reads as a step.
    pub fn is_step(sentence: &Sentence) -> bool {
        let w = words(sentence);
        if w.is_empty() {
            return false;
        }
        if Self::is_conditional_step(&w) {
            return true;
        }
        if Self::has_expectation(&w) {
            return false;
        }
        Self::is_imperative(&w) || Self::is_person_action(&w) || Self::is_sequential(&w)
    }
}

impl S2rLabeler for DiscoursePatternLabeler {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn label(&self, _paragraph_index: usize, paragraph: &Paragraph) -> Vec<SentenceLabel> {
        let mut labels = Vec::with_capacity(paragraph.sentences.len());
        let mut prev_step = false;
        for sentence in &paragraph.sentences {
            let step = Self::is_step(sentence);
            let label = if !step {
                SentenceLabel::Outside
            } else if prev_step && Self::starts_with_continuation(&words(sentence)) {
                SentenceLabel::InsideS2r
            } else {
                SentenceLabel::BeginS2r
            };
            prev_step = step;
            labels.push(label);
        }
        labels
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SidecarError {
    #[error("line {line}: unknown label `{text}`")]
    BadLabel { line: usize, text: String },
    #[error("label file has {found} labels but the report has {expected} sentences")]
    CountMismatch { expected: usize, found: usize },
}

/// Labels read from a line-oriented file, one `B`/`I`/`O` per sentence in
/// report order. Blank lines and `#` comments are skipped.
#[derive(Debug, Clone)]
pub struct SidecarLabeler {
    per_paragraph: Vec<Vec<SentenceLabel>>,
}

impl SidecarLabeler {
    pub const NAME: &'static str = "sidecar";

    pub fn parse_labels(text: &str) -> Result<Vec<SentenceLabel>, SidecarError> {
        let mut out = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let l = line.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            out.push(match l.to_ascii_uppercase().as_str() {
                "B" | "B-S2R" => SentenceLabel::BeginS2r,
                "I" | "I-S2R" => SentenceLabel::InsideS2r,
                "O" => SentenceLabel::Outside,
                _ => {
                    return Err(SidecarError::BadLabel {
                        line: idx + 1,
                        text: l.to_string(),
                    })
                }
            });
        }
        Ok(out)
    }

    pub fn for_report(text: &str, report: &BugReport) -> Result<SidecarLabeler, SidecarError> {
        let flat = Self::parse_labels(text)?;
        let expected = report.sentence_count();
        if flat.len() != expected {
            return Err(SidecarError::CountMismatch {
                expected,
                found: flat.len(),
            });
        }
        let mut it = flat.into_iter();
        let per_paragraph = report
            .paragraphs
            .iter()
            .map(|p| it.by_ref().take(p.sentences.len()).collect())
            .collect();
        Ok(SidecarLabeler { per_paragraph })
    }
}

impl S2rLabeler for SidecarLabeler {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn label(&self, paragraph_index: usize, paragraph: &Paragraph) -> Vec<SentenceLabel> {
        self.per_paragraph
            .get(paragraph_index)
            .cloned()
            .unwrap_or_else(|| vec![SentenceLabel::Outside; paragraph.sentences.len()])
    }
}
