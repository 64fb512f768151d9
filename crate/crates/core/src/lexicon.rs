//! Shipped lemma/part-of-speech lexicon and the rule-based lemmatizer.
//!
//! The table in `data/lexicon.txt` lists base forms per coarse tag. Regular
//! verb and noun inflections are generated on load, so the effective table
//! maps every known surface form to one or more `(lemma, tag)` readings.
//! Words outside the table go through a suffix-stripping fallback.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const SHIPPED: &str = include_str!("../data/lexicon.txt");

/// Coarse part-of-speech tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pos {
    Verb,
    Noun,
    Pron,
    Adp,
    Adv,
    Det,
    Adj,
    Num,
    Literal,
    Other,
}

impl Pos {
    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Verb => "VERB",
            Pos::Noun => "NOUN",
            Pos::Pron => "PRON",
            Pos::Adp => "ADP",
            Pos::Adv => "ADV",
            Pos::Det => "DET",
            Pos::Adj => "ADJ",
            Pos::Num => "NUM",
            Pos::Literal => "LITERAL",
            Pos::Other => "OTHER",
        }
    }

    fn from_tag(tag: &str) -> Option<Pos> {
        Some(match tag.to_ascii_uppercase().as_str() {
            "VERB" => Pos::Verb,
            "NOUN" => Pos::Noun,
            "PRON" => Pos::Pron,
            "ADP" => Pos::Adp,
            "ADV" => Pos::Adv,
            "DET" => Pos::Det,
            "ADJ" => Pos::Adj,
            "NUM" => Pos::Num,
            "LITERAL" => Pos::Literal,
            "OTHER" => Pos::Other,
            _ => return None,
        })
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One reading of a surface form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reading {
    pub lemma: String,
    pub pos: Pos,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: entry outside of any section")]
    NoSection { line: usize },
    #[error("line {line}: unknown section `{name}`")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: malformed entry `{text}`")]
    Malformed { line: usize, text: String },
}

#[derive(Debug, Default)]
pub struct Lexicon {
    forms: HashMap<String, Vec<Reading>>,
}

#[derive(Clone, Copy)]
enum Section {
    Verb,
    Noun,
    Plain(Pos),
    Form,
}

impl Lexicon {
    /// The lexicon compiled into the crate.
    pub fn shipped() -> &'static Lexicon {
        static LEXICON: OnceLock<Lexicon> = OnceLock::new();
        LEXICON.get_or_init(|| Lexicon::parse(SHIPPED).expect("shipped lexicon is well-formed"))
    }

    pub fn parse(text: &str) -> Result<Lexicon, LexiconError> {
        let mut lex = Lexicon::default();
        let mut section = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = Some(match name {
                    "verb" => Section::Verb,
                    "noun" => Section::Noun,
                    "form" => Section::Form,
                    other => match Pos::from_tag(other) {
                        Some(pos) => Section::Plain(pos),
                        None => {
                            return Err(LexiconError::UnknownSection {
                                line: line_no,
                                name: other.to_string(),
                            })
                        }
                    },
                });
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let malformed = || LexiconError::Malformed {
                line: line_no,
                text: line.to_string(),
            };
            match section.ok_or(LexiconError::NoSection { line: line_no })? {
                Section::Verb => {
                    if fields.len() > 4 {
                        return Err(malformed());
                    }
                    lex.add_verb(&fields);
                }
                Section::Noun => {
                    if fields.len() > 2 {
                        return Err(malformed());
                    }
                    let singular = fields[0].to_lowercase();
                    let plural = fields
                        .get(1)
                        .map(|p| p.to_lowercase())
                        .unwrap_or_else(|| pluralize(&singular));
                    lex.insert(&singular, &singular, Pos::Noun);
                    lex.insert(&plural, &singular, Pos::Noun);
                }
                Section::Plain(pos) => {
                    if fields.len() != 1 {
                        return Err(malformed());
                    }
                    let word = fields[0].to_lowercase();
                    lex.insert(&word, &word, pos);
                }
                Section::Form => {
                    if fields.len() != 3 {
                        return Err(malformed());
                    }
                    let pos = Pos::from_tag(fields[2]).ok_or_else(malformed)?;
                    lex.insert(&fields[0].to_lowercase(), &fields[1].to_lowercase(), pos);
                }
            }
        }
        Ok(lex)
    }

    fn add_verb(&mut self, fields: &[&str]) {
        let base = fields[0].to_lowercase();
        let pick = |i: usize, generated: String| match fields.get(i) {
            Some(&"-") | None => generated,
            Some(form) => form.to_lowercase(),
        };
        let third = third_person(&base);
        let past = pick(1, past_form(&base));
        let participle = pick(2, past.clone());
        let gerund = pick(3, gerund_form(&base));
        for form in [&base, &third, &past, &participle, &gerund] {
            self.insert(form, &base, Pos::Verb);
        }
    }

    fn insert(&mut self, surface: &str, lemma: &str, pos: Pos) {
        let readings = self.forms.entry(surface.to_string()).or_default();
        if !readings.iter().any(|r| r.lemma == lemma && r.pos == pos) {
            readings.push(Reading {
                lemma: lemma.to_string(),
                pos,
            });
        }
    }

    /// Number of distinct surface forms.
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    /// All readings of `word` (case-insensitive); empty when unknown.
    pub fn readings(&self, word: &str) -> &[Reading] {
        self.forms
            .get(&word.to_lowercase())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn has_reading(&self, word: &str, pos: Pos) -> bool {
        self.readings(word).iter().any(|r| r.pos == pos)
    }

    /// Lemma of `word`, preferring a reading with the given tag.
    pub fn lemma_as(&self, word: &str, pos: Pos) -> String {
        let readings = self.readings(word);
        readings
            .iter()
            .find(|r| r.pos == pos)
            .or_else(|| readings.first())
            .map(|r| r.lemma.clone())
            .unwrap_or_else(|| self.fallback_lemma(&word.to_lowercase()))
    }

    /// Lemma of `word` from its first reading, or the suffix-stripping
    /// fallback for unknown words.
    pub fn lemmatize(&self, word: &str) -> String {
        let lower = word.to_lowercase();
        match self.forms.get(&lower).and_then(|r| r.first()) {
            Some(reading) => reading.lemma.clone(),
            None => self.fallback_lemma(&lower),
        }
    }

    /// Strips "-ies", "-es", "-s", "-ed" and "-ing", repairing consonant
    /// doubling and the silent "e" when the repaired stem is a known verb.
    pub fn fallback_lemma(&self, lower: &str) -> String {
        let n = lower.chars().count();
        if !lower
            .chars()
            .all(|c| c.is_alphabetic() || c == '-' || c == '\'')
        {
            return lower.to_string();
        }
        if n > 4 && lower.ends_with("ies") {
            return format!("{}y", &lower[..lower.len() - 3]);
        }
        if n > 4 && lower.ends_with("ied") {
            return format!("{}y", &lower[..lower.len() - 3]);
        }
        for suffix in ["sses", "xes", "ches", "shes", "zes"] {
            if lower.ends_with(suffix) && n > suffix.len() + 1 {
                return lower[..lower.len() - 2].to_string();
            }
        }
        if n > 3
            && lower.ends_with('s')
            && !lower.ends_with("ss")
            && !lower.ends_with("us")
            && !lower.ends_with("is")
        {
            return lower[..lower.len() - 1].to_string();
        }
        for suffix in ["ed", "ing"] {
            if lower.ends_with(suffix) && n > suffix.len() + 2 {
                let stem = &lower[..lower.len() - suffix.len()];
                return self.repair_stem(stem);
            }
        }
        lower.to_string()
    }

    fn repair_stem(&self, stem: &str) -> String {
        let bytes = stem.as_bytes();
        let len = bytes.len();
        if len >= 2 && bytes[len - 1] == bytes[len - 2] && !is_vowel(bytes[len - 1]) {
            let undoubled = &stem[..len - 1];
            if !matches!(bytes[len - 1], b'l' | b's' | b'z' | b'f') || self.is_known_verb(undoubled)
            {
                return undoubled.to_string();
            }
        }
        if self.is_known_verb(stem) {
            return stem.to_string();
        }
        let with_e = format!("{stem}e");
        if self.is_known_verb(&with_e) {
            return with_e;
        }
        stem.to_string()
    }

    fn is_known_verb(&self, word: &str) -> bool {
        self.readings(word)
            .iter()
            .any(|r| r.pos == Pos::Verb && r.lemma == word)
    }
}

fn is_vowel(b: u8) -> bool {
    matches!(b, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn vowel_groups(word: &str) -> usize {
    let mut groups = 0;
    let mut prev_vowel = false;
    for b in word.bytes() {
        let v = is_vowel(b);
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    groups
}

/// Monosyllabic consonant-vowel-consonant words double their final
/// consonant before "-ed"/"-ing" ("tap" -> "tapped").
fn doubles_final(word: &str) -> bool {
    let b = word.as_bytes();
    let n = b.len();
    n >= 3
        && vowel_groups(word) == 1
        && !is_vowel(b[n - 1])
        && !matches!(b[n - 1], b'w' | b'x' | b'y')
        && is_vowel(b[n - 2])
        && !is_vowel(b[n - 3])
}

fn ends_with_consonant_y(word: &str) -> bool {
    let b = word.as_bytes();
    b.len() >= 2 && b[b.len() - 1] == b'y' && !is_vowel(b[b.len() - 2])
}

fn sibilant(word: &str) -> bool {
    ["s", "x", "z", "ch", "sh"]
        .iter()
        .any(|s| word.ends_with(s))
}

fn pluralize(word: &str) -> String {
    if ends_with_consonant_y(word) {
        format!("{}ies", &word[..word.len() - 1])
    } else if sibilant(word) {
        format!("{word}es")
    } else {
        format!("{word}s")
    }
}

fn third_person(word: &str) -> String {
    if ends_with_consonant_y(word) {
        format!("{}ies", &word[..word.len() - 1])
    } else if sibilant(word) || word.ends_with('o') {
        format!("{word}es")
    } else {
        format!("{word}s")
    }
}

fn past_form(word: &str) -> String {
    if word.ends_with('e') {
        format!("{word}d")
    } else if ends_with_consonant_y(word) {
        format!("{}ied", &word[..word.len() - 1])
    } else if doubles_final(word) {
        format!("{word}{}ed", &word[word.len() - 1..])
    } else {
        format!("{word}ed")
    }
}

fn gerund_form(word: &str) -> String {
    if let Some(stem) = word.strip_suffix("ie") {
        format!("{stem}ying")
    } else if word.ends_with('e')
        && !word.ends_with("ee")
        && !word.ends_with("ye")
        && word.len() > 2
    {
        format!("{}ing", &word[..word.len() - 1])
    } else if doubles_final(word) {
        format!("{word}{}ing", &word[word.len() - 1..])
    } else {
        format!("{word}ing")
    }
}
