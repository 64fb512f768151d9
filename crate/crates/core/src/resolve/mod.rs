//! Step resolution: mapping one S2R to an interaction on one screen.
//!
//! Resolution runs in three stages. Event resolution maps the action verb
//! to an action group and then to a concrete event. Component resolution
//! queries the screen's components with S2R constituents. Input resolution
//! picks the text for type events.

mod config;
mod similarity;

use serde::{Deserialize, Serialize};

use crate::appsim::{ComponentType, EventKind, GuiComponent, ScreenInstance};
use crate::extract::S2r;
use crate::ingest::{tokenize, Token};
use crate::lexicon::Lexicon;

pub use config::{
    ActionGroup, ConfigError, DirectionKeywords, MatchConfig, SynonymEntry, MATCH_CONFIG_VERSION,
};
pub use similarity::{longest_common_substring, similarity};

/// Normalized matching terms of free text: lowercase lemmas of its words.
pub fn terms(text: &str) -> Vec<String> {
    token_terms(&tokenize(text))
}

/// Matching terms of tokens. Lemmas are taken without context so that
/// query and component text normalize identically.
pub fn token_terms(tokens: &[Token]) -> Vec<String> {
    let lex = Lexicon::shipped();
    let mut out = Vec::new();
    for t in tokens {
        if t.is_literal() {
            out.extend(t.literal_value().split_whitespace().map(str::to_lowercase));
        } else if t.surface.chars().next().is_some_and(char::is_alphanumeric) {
            out.push(lex.lemmatize(&t.surface));
        }
    }
    out
}

/// Terms of a component id: split on separators and case changes.
pub fn id_terms(id: &str) -> Vec<String> {
    let lex = Lexicon::shipped();
    let mut words: Vec<String> = Vec::new();
    let mut cur = String::new();
    let mut prev_lower = false;
    for ch in id.chars() {
        if !ch.is_alphanumeric() {
            if !cur.is_empty() {
                words.push(std::mem::take(&mut cur));
            }
            prev_lower = false;
            continue;
        }
        if ch.is_uppercase() && prev_lower && !cur.is_empty() {
            words.push(std::mem::take(&mut cur));
        }
        prev_lower = ch.is_lowercase() || ch.is_ascii_digit();
        cur.push(ch);
    }
    if !cur.is_empty() {
        words.push(cur);
    }
    words.iter().map(|w| lex.lemmatize(w)).collect()
}

fn find_phrase(hay: &[String], needle: &[String]) -> Option<usize> {
    if needle.is_empty() || needle.len() > hay.len() {
        return None;
    }
    (0..=hay.len() - needle.len()).find(|&i| hay[i..i + needle.len()] == *needle)
}

fn contains_any(hay: &[String], phrases: &[String]) -> bool {
    phrases
        .iter()
        .any(|p| find_phrase(hay, &terms(p)).is_some())
}

/// A step resolved to a concrete interaction on a screen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResolvedInteraction {
    pub event: EventKind,
    pub component: Option<String>,
    pub input: Option<String>,
    /// The input came from the counter rather than the report.
    pub generated_input: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constituent {
    Action,
    Object,
    Preposition,
    Object2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Candidate {
    Event {
        group: ActionGroup,
    },
    #[serde(rename_all = "camelCase")]
    Component {
        id: String,
        label: String,
        comp_type: ComponentType,
        score: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Resolution {
    Resolved(ResolvedInteraction),
    Mismatch { constituents: Vec<Constituent> },
    MultipleMatch { candidates: Vec<Candidate> },
}

impl Resolution {
    pub fn is_resolved(&self) -> bool {
        matches!(self, Resolution::Resolved(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComponentMatch {
    Found(String),
    /// Candidates sorted by non-increasing score, ties in screen order.
    Multiple(Vec<Candidate>),
    NoMatch,
}

/// Source of generated inputs: 1, 2, 3, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputCounter {
    next: u64,
}

impl Default for InputCounter {
    fn default() -> InputCounter {
        InputCounter { next: 1 }
    }
}

impl InputCounter {
    pub fn peek(&self) -> u64 {
        self.next
    }

    pub fn advance(&mut self) -> u64 {
        let v = self.next;
        self.next += 1;
        v
    }
}

fn component_score(query: &[String], c: &GuiComponent) -> f64 {
    [terms(&c.label), terms(&c.description), id_terms(&c.id)]
        .iter()
        .map(|source| similarity(query, source))
        .find(|s| *s > 0.0)
        .unwrap_or(0.0)
}

fn as_candidate(c: &GuiComponent, score: f64) -> Candidate {
    Candidate::Component {
        id: c.id.clone(),
        label: if c.label.is_empty() {
            c.description.clone()
        } else {
            c.label.clone()
        },
        comp_type: c.comp_type,
        score,
    }
}

/// First component-type phrase in `query`: position, length and type.
fn find_type_word(query: &[String], cfg: &MatchConfig) -> Option<(usize, usize, ComponentType)> {
    let mut phrases: Vec<(Vec<String>, ComponentType)> = cfg
        .component_type_words
        .iter()
        .map(|(w, t)| (terms(w), *t))
        .filter(|(w, _)| !w.is_empty())
        .collect();
    phrases.sort_by_key(|p| std::cmp::Reverse(p.0.len()));
    for i in 0..query.len() {
        for (p, t) in &phrases {
            if query[i..].starts_with(p) {
                return Some((i, p.len(), *t));
            }
        }
    }
    None
}

/// Scores `components` and keeps those at or above the threshold, sorted
/// by non-increasing score with ties in screen order.
fn scored<'a>(
    query: &[String],
    components: &[&'a GuiComponent],
    cfg: &MatchConfig,
) -> Vec<(&'a GuiComponent, f64)> {
    let mut out: Vec<(&GuiComponent, f64)> = components
        .iter()
        .map(|c| (*c, component_score(query, c)))
        .filter(|(_, s)| *s >= cfg.similarity_threshold)
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    out
}

fn select(cands: &[(&GuiComponent, f64)], event: EventKind) -> ComponentMatch {
    match cands {
        [] => return ComponentMatch::NoMatch,
        [(c, _)] => return ComponentMatch::Found(c.id.clone()),
        _ => {}
    }
    for (c, _) in cands {
        if c.comp_type == ComponentType::Layout && c.children.len() == 1 {
            return ComponentMatch::Found(c.children[0].id.clone());
        }
    }
    let first_type = cands[0].0.comp_type;
    if cands.iter().all(|(c, _)| c.comp_type == first_type) {
        return ComponentMatch::Found(cands[0].0.id.clone());
    }
    let only = |ty: ComponentType| {
        let mut it = cands.iter().filter(|(c, _)| c.comp_type == ty);
        match (it.next(), it.next()) {
            (Some((c, _)), None) => Some(c.id.clone()),
            _ => None,
        }
    };
    let by_event = match event {
        EventKind::Type => only(ComponentType::TextField),
        EventKind::Tap | EventKind::LongTap | EventKind::TapMenu => only(ComponentType::Button),
        _ => None,
    };
    match by_event {
        Some(id) => ComponentMatch::Found(id),
        None => ComponentMatch::Multiple(cands.iter().map(|(c, s)| as_candidate(c, *s)).collect()),
    }
}

fn match_once(
    query: &[String],
    components: &[&GuiComponent],
    event: EventKind,
    cfg: &MatchConfig,
) -> ComponentMatch {
    if query.is_empty() {
        return ComponentMatch::NoMatch;
    }
    if contains_any(query, &cfg.screen_keywords) {
        return components
            .iter()
            .find(|c| !c.flags.tappable)
            .map(|c| ComponentMatch::Found(c.id.clone()))
            .unwrap_or(ComponentMatch::NoMatch);
    }
    if let Some((pos, len, ty)) = find_type_word(query, cfg) {
        let instances: Vec<&GuiComponent> = components
            .iter()
            .copied()
            .filter(|c| c.comp_type == ty)
            .collect();
        if !instances.is_empty() {
            let mut stripped = query[..pos].to_vec();
            stripped.extend_from_slice(&query[pos + len..]);
            if stripped.is_empty() {
                return match instances.as_slice() {
                    [only] => ComponentMatch::Found(only.id.clone()),
                    _ => ComponentMatch::Multiple(
                        instances.iter().map(|c| as_candidate(c, 0.0)).collect(),
                    ),
                };
            }
            let within = scored(&stripped, &instances, cfg);
            if !within.is_empty() {
                return select(&within, event);
            }
            let anywhere = scored(&stripped, components, cfg);
            if !anywhere.is_empty() {
                return select(&anywhere, event);
            }
            if instances.len() > 1 {
                let mut all: Vec<(&GuiComponent, f64)> = instances
                    .iter()
                    .map(|c| (*c, component_score(&stripped, c)))
                    .collect();
                all.sort_by(|a, b| b.1.total_cmp(&a.1));
                return ComponentMatch::Multiple(
                    all.iter().map(|(c, s)| as_candidate(c, *s)).collect(),
                );
            }
            return ComponentMatch::NoMatch;
        }
    }
    select(&scored(query, components, cfg), event)
}

/// Finds the component `query` refers to among `components` (screen
/// order). When the query does not single out a component, each synonym
/// substitution of a query term is tried in table order.
pub fn match_component(
    query: &[String],
    components: &[&GuiComponent],
    event: EventKind,
    cfg: &MatchConfig,
) -> ComponentMatch {
    let direct = match match_once(query, components, event, cfg) {
        ComponentMatch::Found(id) => return ComponentMatch::Found(id),
        other => other,
    };
    for entry in &cfg.synonyms {
        let term = terms(&entry.term);
        let Some(pos) = find_phrase(query, &term) else {
            continue;
        };
        for replacement in &entry.replacements {
            let mut q = query[..pos].to_vec();
            q.extend(terms(replacement));
            q.extend_from_slice(&query[pos + term.len()..]);
            if let ComponentMatch::Found(id) = match_once(&q, components, event, cfg) {
                return ComponentMatch::Found(id);
            }
        }
    }
    direct
}

struct Parts {
    action: Vec<String>,
    object: Vec<String>,
    preposition: Vec<String>,
    object2: Vec<String>,
}

impl Parts {
    fn of(s2r: &S2r) -> Parts {
        Parts {
            action: vec![s2r.action.clone()],
            object: token_terms(&s2r.object),
            preposition: s2r.preposition.iter().map(|t| t.lemma.clone()).collect(),
            object2: token_terms(&s2r.object2),
        }
    }

    fn full(&self) -> Vec<String> {
        [
            &self.action[..],
            &self.object,
            &self.preposition,
            &self.object2,
        ]
        .concat()
    }
}

fn is_back(terms_: &[String], cfg: &MatchConfig) -> bool {
    let kept: Vec<String> = terms_
        .iter()
        .filter(|t| !cfg.component_type_words.contains_key(t.as_str()))
        .cloned()
        .collect();
    !kept.is_empty() && cfg.back_keywords.iter().any(|k| terms(k) == kept)
}

fn mentions_app(terms_: &[String], cfg: &MatchConfig) -> bool {
    contains_any(terms_, &cfg.app_keywords) || contains_any(terms_, &cfg.app_names)
}

fn group_event(group: ActionGroup, p: &Parts, cfg: &MatchConfig) -> EventKind {
    let either = |f: &dyn Fn(&[String]) -> bool| f(&p.object) || f(&p.object2);
    let dirs = &cfg.direction_keywords;
    match group {
        ActionGroup::Open if either(&|t| mentions_app(t, cfg)) => EventKind::OpenApp,
        ActionGroup::Open | ActionGroup::Click if either(&|t| is_back(t, cfg)) => {
            EventKind::TapBack
        }
        ActionGroup::Open => EventKind::Tap,
        ActionGroup::Click if either(&|t| contains_any(t, &cfg.menu_keywords)) => {
            EventKind::TapMenu
        }
        ActionGroup::Click => EventKind::Tap,
        ActionGroup::LongClick => EventKind::LongTap,
        ActionGroup::Type => EventKind::Type,
        ActionGroup::Swipe => {
            if either(&|t| contains_any(t, &dirs.down)) {
                EventKind::SwipeDown
            } else if either(&|t| contains_any(t, &dirs.left)) {
                EventKind::SwipeLeft
            } else if either(&|t| contains_any(t, &dirs.right)) {
                EventKind::SwipeRight
            } else {
                EventKind::SwipeUp
            }
        }
        ActionGroup::Rotate => {
            if either(&|t| contains_any(t, &dirs.portrait)) {
                EventKind::RotatePortrait
            } else {
                EventKind::RotateLandscape
            }
        }
    }
}

fn group_from_component(c: &GuiComponent, allowed: &[ActionGroup]) -> Option<ActionGroup> {
    let options = [
        (c.flags.tappable, ActionGroup::Click),
        (c.flags.long_tappable, ActionGroup::LongClick),
        (c.flags.typeable, ActionGroup::Type),
    ];
    options
        .iter()
        .find(|(flag, g)| *flag && allowed.contains(g))
        .map(|(_, g)| *g)
}

fn disambiguate(
    groups: &[ActionGroup],
    p: &Parts,
    screen: &ScreenInstance,
    cfg: &MatchConfig,
) -> Option<ActionGroup> {
    for part in [&p.object, &p.object2] {
        if let Some((_, _, ty)) = find_type_word(part, cfg) {
            let g = if ty == ComponentType::TextField {
                ActionGroup::Type
            } else {
                ActionGroup::Click
            };
            if groups.contains(&g) {
                return Some(g);
            }
        }
    }
    if groups.contains(&ActionGroup::Rotate)
        && (contains_any(&p.object, &cfg.rotate_keywords)
            || contains_any(&p.object2, &cfg.rotate_keywords))
    {
        return Some(ActionGroup::Rotate);
    }
    let comps = screen.components();
    for part in [&p.object, &p.object2] {
        if let ComponentMatch::Found(id) = match_component(part, &comps, EventKind::Tap, cfg) {
            let c = screen.component(&id)?;
            // typing wins over tapping for a field
            let order: Vec<ActionGroup> = [
                ActionGroup::Type,
                ActionGroup::Click,
                ActionGroup::LongClick,
            ]
            .into_iter()
            .filter(|g| groups.contains(g))
            .collect();
            if let Some(g) = order
                .iter()
                .find(|g| group_from_component(c, &[**g]).is_some())
            {
                return Some(*g);
            }
        }
    }
    None
}

/// Determines the event an S2R refers to on `screen`.
pub fn resolve_event(
    s2r: &S2r,
    screen: &ScreenInstance,
    cfg: &MatchConfig,
) -> Result<EventKind, Resolution> {
    let p = Parts::of(s2r);
    let groups = cfg.groups_for(&s2r.action);
    let group = match groups.as_slice() {
        [] => {
            let comps = screen.components();
            let all = [
                ActionGroup::Click,
                ActionGroup::LongClick,
                ActionGroup::Type,
            ];
            let found = [p.full(), p.action.clone()].iter().find_map(|q| {
                match match_component(q, &comps, EventKind::Tap, cfg) {
                    ComponentMatch::Found(id) => group_from_component(screen.component(&id)?, &all),
                    _ => None,
                }
            });
            match found {
                Some(g) => g,
                None => {
                    return Err(Resolution::Mismatch {
                        constituents: vec![Constituent::Action],
                    })
                }
            }
        }
        [g] => *g,
        _ => match disambiguate(&groups, &p, screen, cfg) {
            Some(g) => g,
            None => {
                return Err(Resolution::MultipleMatch {
                    candidates: groups
                        .iter()
                        .map(|g| Candidate::Event { group: *g })
                        .collect(),
                })
            }
        },
    };
    Ok(group_event(group, &p, cfg))
}

fn failure(last: ComponentMatch, constituents: Vec<Constituent>) -> Resolution {
    match last {
        ComponentMatch::Multiple(candidates) => Resolution::MultipleMatch { candidates },
        _ => Resolution::Mismatch { constituents },
    }
}

fn has_literal(tokens: &[Token]) -> bool {
    tokens.iter().any(Token::is_literal)
}

/// Literal, or a placeholder such as "text" standing in for one.
fn input_slot(tokens: &[Token], cfg: &MatchConfig) -> bool {
    has_literal(tokens)
        || !tokens.is_empty()
            && token_terms(tokens)
                .iter()
                .all(|t| cfg.generic_input_words.contains(t))
}

fn queried(p: &Parts) -> Vec<Constituent> {
    let mut out = Vec::new();
    if !p.object.is_empty() {
        out.push(Constituent::Object);
    }
    if !p.object2.is_empty() {
        out.push(Constituent::Object2);
    }
    if out.is_empty() {
        out.push(Constituent::Action);
    }
    out
}

fn run_queries(
    p: &Parts,
    components: &[&GuiComponent],
    event: EventKind,
    cfg: &MatchConfig,
) -> Result<String, Resolution> {
    let action_object = [&p.action[..], &p.object].concat();
    let mut last = ComponentMatch::NoMatch;
    for q in [p.full(), p.object.clone(), p.object2.clone(), action_object] {
        if q.is_empty() {
            continue;
        }
        match match_component(&q, components, event, cfg) {
            ComponentMatch::Found(id) => return Ok(id),
            other => last = other,
        }
    }
    Err(failure(last, queried(p)))
}

/// Determines the component `event` acts on. `Ok(None)` for events that
/// take no component.
pub fn resolve_component(
    s2r: &S2r,
    event: EventKind,
    screen: &ScreenInstance,
    cfg: &MatchConfig,
) -> Result<Option<String>, Resolution> {
    if !event.needs_component() {
        return Ok(None);
    }
    let p = Parts::of(s2r);
    let comps = screen.components();
    if event != EventKind::Type {
        let space: Vec<&GuiComponent> = if cfg.is_selection_verb(&s2r.action) {
            comps
                .iter()
                .copied()
                .filter(|c| c.flags.checkable || c.flags.pickable)
                .collect()
        } else {
            comps
        };
        return run_queries(&p, &space, event, cfg).map(Some);
    }

    let prep = s2r.preposition.as_ref().map(|t| t.lemma.as_str());
    let in_list = |list: &[String]| prep.is_some_and(|p| list.iter().any(|x| x == p));
    let obj_literal = input_slot(&s2r.object, cfg);
    let obj2_literal = input_slot(&s2r.object2, cfg);
    let single = |q: &[String], c: Constituent| match match_component(q, &comps, event, cfg) {
        ComponentMatch::Found(id) => Ok(Some(id)),
        other => Err(failure(other, vec![c])),
    };
    if obj_literal
        && !s2r.object2.is_empty()
        && !obj2_literal
        && in_list(&cfg.type_object2_prepositions)
    {
        return single(&p.object2, Constituent::Object2);
    }
    if !s2r.object.is_empty()
        && !obj_literal
        && obj2_literal
        && in_list(&cfg.type_object_prepositions)
    {
        return single(&p.object, Constituent::Object);
    }
    if obj_literal && prep.is_none() && s2r.object2.is_empty() {
        return match screen.focused() {
            Some(c) => Ok(Some(c.id.clone())),
            None => Err(Resolution::Mismatch {
                constituents: vec![Constituent::Object],
            }),
        };
    }
    let typeable: Vec<&GuiComponent> = comps.iter().copied().filter(|c| c.flags.typeable).collect();
    run_queries(&p, &typeable, event, cfg).map(Some)
}

/// Text to type for a type event: a literal from the object or second
/// object, else the next counter value. The flag tells whether the value
/// was generated.
pub fn resolve_input(s2r: &S2r, counter: &InputCounter) -> (String, bool) {
    let literal = s2r
        .object
        .iter()
        .chain(&s2r.object2)
        .find(|t| t.is_literal());
    match literal {
        Some(t) => (t.literal_value().to_string(), false),
        None => (counter.peek().to_string(), true),
    }
}

/// Resolves one S2R on one screen. The counter is only read; the caller
/// advances it once a generated input is actually used.
pub fn resolve_step(
    s2r: &S2r,
    screen: &ScreenInstance,
    cfg: &MatchConfig,
    counter: &InputCounter,
) -> Resolution {
    let event = match resolve_event(s2r, screen, cfg) {
        Ok(e) => e,
        Err(failed) => return failed,
    };
    let component = match resolve_component(s2r, event, screen, cfg) {
        Ok(c) => c,
        Err(failed) => return failed,
    };
    let (input, generated_input) = if event == EventKind::Type {
        let (value, generated) = resolve_input(s2r, counter);
        (Some(value), generated)
    } else {
        (None, false)
    };
    Resolution::Resolved(ResolvedInteraction {
        event,
        component,
        input,
        generated_input,
    })
}

#[cfg(test)]
mod tests;
