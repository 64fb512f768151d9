//! Bug-report ingestion: paragraph and sentence segmentation, tokenization,
//! lemmatization and coarse part-of-speech tagging.
//!
//! Segmentation rules:
//! - blank lines separate paragraphs;
//! - every list item (`1.`, `2)`, `-`, `*`, `+`, `•`) is its own paragraph,
//!   with indented continuation lines folded into it;
//! - a line break ends a sentence, as does `.`, `!` or `?` followed by the
//!   end of the line or by whitespace and a capital letter, quote or bracket;
//! - terminators inside quoted text never split.
//!
//! A leading `# Title` line is taken as the report title.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::lexicon::{Lexicon, Pos};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IngestError {
    #[error("bug report is empty")]
    EmptyReport,
}

/// Byte offsets `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Lowercase lemma. For quoted literals this is the unquoted text.
    pub lemma: String,
    pub pos: Pos,
    /// Offsets into the owning sentence's `raw` text.
    pub span: Span,
}

impl Token {
    pub fn is_literal(&self) -> bool {
        self.pos == Pos::Literal
    }

    /// The literal value with surrounding quotes removed, case preserved.
    pub fn literal_value(&self) -> &str {
        strip_quotes(&self.surface)
    }
}

/// Grammatical sentence type, assigned during extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SentenceKind {
    Imperative,
    Conditional,
    Declarative,
    Passive,
    #[default]
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub raw: String,
    /// Offsets into the report body.
    pub span: Span,
    pub tokens: Vec<Token>,
    pub kind: SentenceKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paragraph {
    pub sentences: Vec<Sentence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugReport {
    pub id: String,
    pub title: String,
    pub paragraphs: Vec<Paragraph>,
}

impl BugReport {
    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.paragraphs.iter().flat_map(|p| p.sentences.iter())
    }

    pub fn sentence_count(&self) -> usize {
        self.paragraphs.iter().map(|p| p.sentences.len()).sum()
    }

    /// Global index of the first sentence of each paragraph.
    pub fn paragraph_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.paragraphs.len());
        let mut acc = 0;
        for p in &self.paragraphs {
            offsets.push(acc);
            acc += p.sentences.len();
        }
        offsets
    }

    /// Plain-text rendering that parses back to the same structure.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if !self.title.is_empty() {
            out.push_str("# ");
            out.push_str(&self.title);
            out.push_str("\n\n");
        }
        let paragraphs: Vec<String> = self
            .paragraphs
            .iter()
            .map(|p| {
                p.sentences
                    .iter()
                    .map(|s| s.raw.as_str())
                    .collect::<Vec<_>>()
                    .join("\n")
            })
            .collect();
        out.push_str(&paragraphs.join("\n\n"));
        out
    }
}

/// Stable identifier of a report body.
pub fn report_id(raw: &str) -> String {
    let digest = Sha256::digest(raw.as_bytes());
    hex::encode(&digest[..8])
}

pub fn parse_report(raw: &str) -> Result<BugReport, IngestError> {
    if raw.trim().is_empty() {
        return Err(IngestError::EmptyReport);
    }
    let lines = split_lines(raw);
    let mut title = String::new();
    let mut first_content = true;
    let mut blocks: Vec<Vec<Span>> = Vec::new();
    let mut current: Vec<Span> = Vec::new();
    let mut in_list_item = false;

    for line in lines {
        let text = &raw[line.start..line.end];
        let trimmed = text.trim();
        if trimmed.is_empty() {
            flush(&mut blocks, &mut current);
            in_list_item = false;
            continue;
        }
        if first_content {
            first_content = false;
            if let Some(t) = trimmed.strip_prefix("# ") {
                if !t.trim().is_empty() {
                    title = t.trim().to_string();
                    continue;
                }
            }
        }
        let indent = text.len() - text.trim_start().len();
        let body_start = line.start + indent;
        if let Some(marker_len) = list_marker_len(&raw[body_start..line.end]) {
            flush(&mut blocks, &mut current);
            current.push(Span::new(body_start + marker_len, line.end));
            in_list_item = true;
        } else if in_list_item && indent == 0 {
            flush(&mut blocks, &mut current);
            current.push(Span::new(body_start, line.end));
            in_list_item = false;
        } else {
            current.push(Span::new(body_start, line.end));
        }
    }
    flush(&mut blocks, &mut current);

    let paragraphs = blocks
        .into_iter()
        .filter_map(|segments| {
            let sentences: Vec<Sentence> = segments
                .into_iter()
                .flat_map(|seg| split_sentences(raw, seg))
                .map(|span| {
                    let text = &raw[span.start..span.end];
                    Sentence {
                        raw: text.to_string(),
                        span,
                        tokens: tokenize(text),
                        kind: SentenceKind::Other,
                    }
                })
                .collect();
            (!sentences.is_empty()).then_some(Paragraph { sentences })
        })
        .collect::<Vec<_>>();

    if paragraphs.is_empty() {
        return Err(IngestError::EmptyReport);
    }
    Ok(BugReport {
        id: report_id(raw),
        title,
        paragraphs,
    })
}

fn flush(blocks: &mut Vec<Vec<Span>>, current: &mut Vec<Span>) {
    if !current.is_empty() {
        blocks.push(std::mem::take(current));
    }
}

fn split_lines(raw: &str) -> Vec<Span> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, b) in raw.bytes().enumerate() {
        if b == b'\n' {
            let end = if i > start && raw.as_bytes()[i - 1] == b'\r' {
                i - 1
            } else {
                i
            };
            out.push(Span::new(start, end));
            start = i + 1;
        }
    }
    if start < raw.len() {
        out.push(Span::new(start, raw.len()));
    }
    out
}

/// Length of a list marker (including trailing whitespace) at the start of
/// `text`, if any.
fn list_marker_len(text: &str) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut marker_end = None;
    for bullet in ["- ", "* ", "+ ", "• "] {
        if text.starts_with(bullet) {
            marker_end = Some(bullet.len() - 1);
        }
    }
    if marker_end.is_none() {
        let digits = bytes.iter().take_while(|b| b.is_ascii_digit()).count();
        if (1..=3).contains(&digits)
            && matches!(bytes.get(digits), Some(b'.') | Some(b')'))
            && bytes
                .get(digits + 1)
                .is_some_and(|b| b.is_ascii_whitespace())
        {
            marker_end = Some(digits + 1);
        }
    }
    let end = marker_end?;
    let ws = text[end..].len() - text[end..].trim_start().len();
    Some(end + ws)
}

fn split_sentences(raw: &str, segment: Span) -> Vec<Span> {
    let text = &raw[segment.start..segment.end];
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut spans = Vec::new();
    let mut sentence_start = 0;
    let mut i = 0;
    while i < chars.len() {
        let (_, c) = chars[i];
        if let Some(close) = quoted_end(&chars, i) {
            i = close + 1;
            continue;
        }
        if matches!(c, '.' | '!' | '?') {
            let mut j = i + 1;
            while j < chars.len()
                && matches!(
                    chars[j].1,
                    '.' | '!' | '?' | ')' | ']' | '"' | '\'' | '”' | '’'
                )
            {
                j += 1;
            }
            let boundary = if j >= chars.len() {
                true
            } else if chars[j].1.is_whitespace() {
                let k = (j..chars.len()).find(|&k| !chars[k].1.is_whitespace());
                match k {
                    None => true,
                    Some(k) => {
                        let n = chars[k].1;
                        n.is_uppercase() || matches!(n, '"' | '\'' | '“' | '‘' | '(' | '[')
                    }
                }
            } else {
                false
            };
            if boundary {
                let end = if j >= chars.len() {
                    text.len()
                } else {
                    chars[j].0
                };
                push_trimmed(&mut spans, text, segment.start, sentence_start, end);
                sentence_start = end;
            }
            i = j;
            continue;
        }
        i += 1;
    }
    push_trimmed(&mut spans, text, segment.start, sentence_start, text.len());
    spans
}

fn push_trimmed(spans: &mut Vec<Span>, text: &str, base: usize, start: usize, end: usize) {
    let piece = &text[start..end];
    let lead = piece.len() - piece.trim_start().len();
    let trail = piece.len() - piece.trim_end().len();
    if lead + trail < piece.len() {
        spans.push(Span::new(base + start + lead, base + end - trail));
    }
}

fn closing_quote(open: char) -> Option<char> {
    match open {
        '"' => Some('"'),
        '\'' => Some('\''),
        '`' => Some('`'),
        '“' => Some('”'),
        '‘' => Some('’'),
        _ => None,
    }
}

/// If a quoted span opens at `i`, the index of its closing quote. A quote
/// opens only at a word boundary and must close before a word boundary, so
/// apostrophes in "don't" or "user's" never start literals.
fn quoted_end(chars: &[(usize, char)], i: usize) -> Option<usize> {
    let close = closing_quote(chars[i].1)?;
    if i > 0 && chars[i - 1].1.is_alphanumeric() {
        return None;
    }
    let first = chars.get(i + 1)?;
    if first.1.is_whitespace() || first.1 == close {
        return None;
    }
    (i + 1..chars.len()).find(|&j| {
        chars[j].1 == close
            && !chars[j - 1].1.is_whitespace()
            && chars.get(j + 1).is_none_or(|n| !n.1.is_alphanumeric())
    })
}

fn strip_quotes(s: &str) -> &str {
    let mut it = s.chars();
    match (it.next(), s.chars().last()) {
        (Some(open), Some(last)) if s.chars().count() >= 2 && closing_quote(open) == Some(last) => {
            &s[open.len_utf8()..s.len() - last.len_utf8()]
        }
        _ => s,
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Splits a sentence into tokens and assigns lemmas and coarse tags.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let byte_at = |k: usize| chars.get(k).map(|c| c.0).unwrap_or(text.len());
    let mut raw_tokens: Vec<(Span, bool)> = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i].1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if let Some(close) = quoted_end(&chars, i) {
            raw_tokens.push((Span::new(chars[i].0, byte_at(close + 1)), true));
            i = close + 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i + 1;
            while j < chars.len() {
                let cj = chars[j].1;
                if cj.is_ascii_digit() {
                    j += 1;
                } else if matches!(cj, '.' | ',' | ':')
                    && chars.get(j + 1).is_some_and(|n| n.1.is_ascii_digit())
                {
                    j += 2;
                } else {
                    break;
                }
            }
            if j < chars.len() && is_word_char(chars[j].1) {
                // mixed alphanumerics ("v2", "3rd") are words
                while j < chars.len() && is_word_char(chars[j].1) {
                    j += 1;
                }
                raw_tokens.push((Span::new(chars[i].0, byte_at(j)), false));
            } else {
                raw_tokens.push((Span::new(chars[i].0, byte_at(j)), true));
            }
            i = j;
            continue;
        }
        if is_word_char(c) {
            let mut j = i + 1;
            while j < chars.len() {
                let cj = chars[j].1;
                if is_word_char(cj) {
                    j += 1;
                } else if matches!(cj, '\'' | '’' | '-')
                    && chars.get(j + 1).is_some_and(|n| n.1.is_alphanumeric())
                {
                    j += 2;
                } else {
                    break;
                }
            }
            raw_tokens.push((Span::new(chars[i].0, byte_at(j)), false));
            i = j;
            continue;
        }
        raw_tokens.push((Span::new(chars[i].0, byte_at(i + 1)), false));
        i += 1;
    }

    let mut tokens: Vec<Token> = raw_tokens
        .into_iter()
        .map(|(span, literal)| {
            let surface = text[span.start..span.end].to_string();
            let lemma = if literal {
                strip_quotes(&surface).to_lowercase()
            } else {
                surface.to_lowercase()
            };
            Token {
                surface,
                lemma,
                pos: if literal { Pos::Literal } else { Pos::Other },
                span,
            }
        })
        .collect();
    tag(&mut tokens, Lexicon::shipped());
    tokens
}

const DISCOURSE_MARKERS: &[&str] = &[
    "then",
    "next",
    "first",
    "now",
    "finally",
    "please",
    "also",
    "and",
    "or",
    "just",
    "again",
    "afterwards",
    "second",
    "third",
    "lastly",
];
const SUBJECT_PRONOUNS: &[&str] = &["i", "you", "we", "he", "she", "they"];
const AUXILIARIES: &[&str] = &["be", "have", "do"];

fn is_word(t: &Token) -> bool {
    t.surface.chars().next().is_some_and(is_word_char) && t.pos != Pos::Literal
}

fn clause_initial(tokens: &[Token], i: usize) -> bool {
    let mut k = i;
    while k > 0 {
        k -= 1;
        let prev = &tokens[k];
        if !is_word(prev) && !prev.is_literal() {
            return matches!(
                prev.surface.as_str(),
                "," | ";" | ":" | "(" | "-" | "." | "!" | "?"
            );
        }
        if DISCOURSE_MARKERS.contains(&prev.lemma.as_str()) {
            continue;
        }
        return false;
    }
    true
}

fn prev_word(tokens: &[Token], i: usize) -> Option<&Token> {
    tokens[..i]
        .iter()
        .rev()
        .find(|t| is_word(t) || t.is_literal())
}

fn next_looks_nominal(tokens: &[Token], i: usize, lex: &Lexicon) -> bool {
    match tokens.get(i + 1) {
        Some(t) if t.is_literal() => true,
        Some(t) if is_word(t) => {
            let r = lex.readings(&t.surface);
            r.is_empty()
                || r.iter().any(|r| {
                    matches!(
                        r.pos,
                        Pos::Det | Pos::Pron | Pos::Noun | Pos::Adj | Pos::Adp
                    )
                })
        }
        _ => false,
    }
}

fn tag(tokens: &mut [Token], lex: &Lexicon) {
    for i in 0..tokens.len() {
        if tokens[i].is_literal() {
            continue;
        }
        if !is_word(&tokens[i]) {
            tokens[i].pos = Pos::Other;
            continue;
        }
        let surface = tokens[i].surface.clone();
        let lower = surface.to_lowercase();
        let readings = lex.readings(&lower);
        let initial = clause_initial(tokens, i);
        let prev = prev_word(tokens, i).cloned();
        let prev_pos = prev.as_ref().map(|p| p.pos);
        let has = |pos: Pos| readings.iter().any(|r| r.pos == pos);
        let inflected_verb = has(Pos::Verb) && lex.lemma_as(&lower, Pos::Verb) != lower;

        let verb_context = match &prev {
            None => true,
            Some(p) => {
                initial
                    || SUBJECT_PRONOUNS.contains(&p.lemma.as_str())
                    || (p.pos == Pos::Other
                        && matches!(
                            p.lemma.as_str(),
                            "should"
                                | "would"
                                | "could"
                                | "can"
                                | "will"
                                | "must"
                                | "may"
                                | "might"
                                | "cannot"
                                | "do"
                        ))
                    || (p.pos == Pos::Adv
                        && matches!(
                            p.lemma.as_str(),
                            "not"
                                | "never"
                                | "also"
                                | "just"
                                | "then"
                                | "again"
                                | "immediately"
                                | "still"
                        ))
                    || (p.pos == Pos::Verb
                        && AUXILIARIES.contains(&p.lemma.as_str())
                        && inflected_verb)
                    || (p.lemma == "to"
                        && prev_word(tokens, i - 1).is_some_and(|pp| pp.pos == Pos::Verb))
            }
        };
        let nominal_context = matches!(
            prev_pos,
            Some(Pos::Det) | Some(Pos::Adj) | Some(Pos::Noun) | Some(Pos::Num) | Some(Pos::Literal)
        ) || matches!(prev_pos, Some(Pos::Adp))
            || (prev_pos == Some(Pos::Verb) && !inflected_verb);

        let (pos, lemma) = if readings.is_empty() {
            let fallback = lex.fallback_lemma(&lower);
            let known_verb_stem = fallback != lower && lex.has_reading(&fallback, Pos::Verb);
            if (known_verb_stem && !nominal_context)
                || (initial && next_looks_nominal(tokens, i, lex) && !has_upper_inside(&surface))
            {
                (Pos::Verb, fallback)
            } else {
                (Pos::Noun, fallback)
            }
        } else if has(Pos::Verb)
            && verb_context
            && !(prev_pos == Some(Pos::Det) || prev_pos == Some(Pos::Adj))
        {
            (Pos::Verb, lex.lemma_as(&lower, Pos::Verb))
        } else if readings.len() == 1 || readings.iter().all(|r| r.pos == readings[0].pos) {
            let only = readings[0].pos;
            if only == Pos::Verb
                && (nominal_context || prev_pos == Some(Pos::Verb))
                && !inflected_verb
            {
                (Pos::Noun, lex.lemma_as(&lower, Pos::Verb))
            } else if only == Pos::Verb && matches!(prev_pos, Some(Pos::Det) | Some(Pos::Adj)) {
                (Pos::Adj, lower.clone())
            } else {
                (only, readings[0].lemma.clone())
            }
        } else {
            let next_nominal = next_looks_nominal(tokens, i, lex);
            let choice = if has(Pos::Noun) && nominal_context {
                Pos::Noun
            } else if has(Pos::Adj)
                && next_nominal
                && !matches!(tokens.get(i + 1), Some(t) if t.pos == Pos::Literal)
            {
                Pos::Adj
            } else if has(Pos::Adv) && !next_nominal {
                Pos::Adv
            } else if has(Pos::Verb) && !nominal_context {
                Pos::Verb
            } else if has(Pos::Noun) {
                Pos::Noun
            } else {
                readings[0].pos
            };
            (choice, lex.lemma_as(&lower, choice))
        };
        tokens[i].pos = pos;
        tokens[i].lemma = lemma;
    }
}

fn has_upper_inside(s: &str) -> bool {
    s.chars().skip(1).any(char::is_uppercase)
}
