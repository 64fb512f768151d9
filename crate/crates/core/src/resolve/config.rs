use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::appsim::ComponentType;

pub const MATCH_CONFIG_VERSION: u32 = 1;
const DEFAULT_CONFIG: &str = include_str!("../../data/match_config.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ActionGroup {
    Open,
    LongClick,
    Click,
    Swipe,
    Type,
    Rotate,
}

impl ActionGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            ActionGroup::Open => "OPEN",
            ActionGroup::LongClick => "LONG_CLICK",
            ActionGroup::Click => "CLICK",
            ActionGroup::Swipe => "SWIPE",
            ActionGroup::Type => "TYPE",
            ActionGroup::Rotate => "ROTATE",
        }
    }
}

impl fmt::Display for ActionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynonymEntry {
    pub term: String,
    pub replacements: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionKeywords {
    pub up: Vec<String>,
    pub down: Vec<String>,
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub landscape: Vec<String>,
    pub portrait: Vec<String>,
}

/// Vocabulary and threshold used by step resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MatchConfig {
    pub version: u32,
    pub similarity_threshold: f64,
    pub action_groups: BTreeMap<ActionGroup, Vec<String>>,
    pub selection_verbs: Vec<String>,
    pub back_keywords: Vec<String>,
    pub menu_keywords: Vec<String>,
    pub screen_keywords: Vec<String>,
    pub app_keywords: Vec<String>,
    pub direction_keywords: DirectionKeywords,
    pub rotate_keywords: Vec<String>,
    pub component_type_words: BTreeMap<String, ComponentType>,
    pub type_object2_prepositions: Vec<String>,
    pub type_object_prepositions: Vec<String>,
    pub generic_input_words: Vec<String>,
    pub synonyms: Vec<SynonymEntry>,
    /// Names the app under test goes by. Filled from the app model.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub app_names: Vec<String>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("malformed match config: {0}")]
    Malformed(String),
    #[error("unsupported match config version {0}")]
    UnknownVersion(u32),
    #[error("similarity threshold must lie in (0, 1], got {0}")]
    BadThreshold(f64),
    #[error("verb `{verb}` appears in both {a} and {b}")]
    ForbiddenOverlap {
        verb: String,
        a: ActionGroup,
        b: ActionGroup,
    },
}

impl Default for MatchConfig {
    fn default() -> MatchConfig {
        MatchConfig::from_json(DEFAULT_CONFIG).expect("shipped match config is valid")
    }
}

impl MatchConfig {
    pub fn from_json(text: &str) -> Result<MatchConfig, ConfigError> {
        let cfg: MatchConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::Malformed(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.version != MATCH_CONFIG_VERSION {
            return Err(ConfigError::UnknownVersion(self.version));
        }
        let t = self.similarity_threshold;
        if !(t > 0.0 && t <= 1.0) {
            return Err(ConfigError::BadThreshold(t));
        }
        let may_share = [ActionGroup::Type, ActionGroup::Click, ActionGroup::Rotate];
        let groups: Vec<(&ActionGroup, &Vec<String>)> = self.action_groups.iter().collect();
        for (i, (a, va)) in groups.iter().enumerate() {
            for (b, vb) in &groups[i + 1..] {
                if may_share.contains(a) && may_share.contains(b) {
                    continue;
                }
                if let Some(verb) = va.iter().find(|v| vb.contains(v)) {
                    return Err(ConfigError::ForbiddenOverlap {
                        verb: verb.clone(),
                        a: **a,
                        b: **b,
                    });
                }
            }
        }
        Ok(())
    }

    /// Groups whose lexicon contains `verb`, in group order.
    pub fn groups_for(&self, verb: &str) -> Vec<ActionGroup> {
        self.action_groups
            .iter()
            .filter(|(_, verbs)| verbs.iter().any(|v| v == verb))
            .map(|(g, _)| *g)
            .collect()
    }

    /// This config with the app's name and synonyms as app keywords.
    pub fn for_app(&self, name: &str, synonyms: &[String]) -> MatchConfig {
        let mut cfg = self.clone();
        cfg.app_names = std::iter::once(name.to_string())
            .chain(synonyms.iter().cloned())
            .collect();
        cfg
    }

    pub fn is_selection_verb(&self, verb: &str) -> bool {
        self.selection_verbs.iter().any(|v| v == verb)
    }
}
