use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ComponentType {
    Button,
    TextField,
    TextView,
    ImageView,
    Layout,
    List,
    Checkbox,
    DropDown,
    MenuItem,
}

impl ComponentType {
    pub const ALL: [ComponentType; 9] = [
        ComponentType::Button,
        ComponentType::TextField,
        ComponentType::TextView,
        ComponentType::ImageView,
        ComponentType::Layout,
        ComponentType::List,
        ComponentType::Checkbox,
        ComponentType::DropDown,
        ComponentType::MenuItem,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ComponentType::Button => "Button",
            ComponentType::TextField => "TextField",
            ComponentType::TextView => "TextView",
            ComponentType::ImageView => "ImageView",
            ComponentType::Layout => "Layout",
            ComponentType::List => "List",
            ComponentType::Checkbox => "Checkbox",
            ComponentType::DropDown => "DropDown",
            ComponentType::MenuItem => "MenuItem",
        }
    }
}

impl fmt::Display for ComponentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Bounds {
    pub x: i32,
    pub y: i32,
    pub width: i32,
    pub height: i32,
}

impl Bounds {
    pub fn contains(&self, other: &Bounds) -> bool {
        other.x >= self.x
            && other.y >= self.y
            && other.x + other.width <= self.x + self.width
            && other.y + other.height <= self.y + self.height
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Flags {
    #[serde(default)]
    pub tappable: bool,
    #[serde(default)]
    pub long_tappable: bool,
    #[serde(default)]
    pub typeable: bool,
    #[serde(default)]
    pub checkable: bool,
    #[serde(default)]
    pub pickable: bool,
    #[serde(default)]
    pub focused: bool,
    #[serde(default = "yes")]
    pub enabled: bool,
}

impl Default for Flags {
    fn default() -> Flags {
        Flags {
            tappable: false,
            long_tappable: false,
            typeable: false,
            checkable: false,
            pickable: false,
            focused: false,
            enabled: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GuiComponent {
    #[serde(rename = "type")]
    pub comp_type: ComponentType,
    pub id: String,
    #[serde(default)]
    pub label: String,
    #[serde(default)]
    pub description: String,
    pub bounds: Bounds,
    #[serde(default)]
    pub flags: Flags,
    /// Current text of a typeable component.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub text: String,
    /// Current state of a checkable component.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub checked: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<GuiComponent>,
}

impl GuiComponent {
    /// Pre-order traversal with the parent index of each component.
    pub fn walk(&self) -> Vec<(Option<usize>, &GuiComponent)> {
        let mut out = Vec::new();
        fn go<'a>(
            c: &'a GuiComponent,
            parent: Option<usize>,
            out: &mut Vec<(Option<usize>, &'a GuiComponent)>,
        ) {
            let me = out.len();
            out.push((parent, c));
            for child in &c.children {
                go(child, Some(me), out);
            }
        }
        go(self, None, &mut out);
        out
    }

    pub fn find(&self, id: &str) -> Option<&GuiComponent> {
        if self.id == id {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(id))
    }

    pub fn find_mut(&mut self, id: &str) -> Option<&mut GuiComponent> {
        if self.id == id {
            return Some(self);
        }
        self.children.iter_mut().find_map(|c| c.find_mut(id))
    }
}

/// One concrete screen: a component hierarchy plus the state tags that
/// distinguish data variants of it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScreenInstance {
    pub name: String,
    pub root: GuiComponent,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub state_tags: BTreeSet<String>,
}

impl ScreenInstance {
    /// Components in screen order: top to bottom, then left to right, with
    /// hierarchy order breaking ties.
    pub fn components(&self) -> Vec<&GuiComponent> {
        let mut all: Vec<&GuiComponent> = self.root.walk().into_iter().map(|(_, c)| c).collect();
        all.sort_by_key(|c| (c.bounds.y, c.bounds.x));
        all
    }

    pub fn component(&self, id: &str) -> Option<&GuiComponent> {
        self.root.find(id)
    }

    pub fn focused(&self) -> Option<&GuiComponent> {
        self.components().into_iter().find(|c| c.flags.focused)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EventKind {
    Tap,
    LongTap,
    OpenApp,
    TapBack,
    TapMenu,
    Type,
    SwipeUp,
    SwipeDown,
    SwipeLeft,
    SwipeRight,
    RotateLandscape,
    RotatePortrait,
}

impl EventKind {
    pub fn needs_component(self) -> bool {
        matches!(
            self,
            EventKind::Tap | EventKind::LongTap | EventKind::TapMenu | EventKind::Type
        )
    }

    /// Kind used when comparing interactions: a tap on the menu button is a
    /// tap on the component that opens the menu.
    pub fn edge_kind(self) -> EventKind {
        match self {
            EventKind::TapMenu => EventKind::Tap,
            k => k,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Tap => "tap",
            EventKind::LongTap => "longTap",
            EventKind::OpenApp => "openApp",
            EventKind::TapBack => "tapBack",
            EventKind::TapMenu => "tapMenu",
            EventKind::Type => "type",
            EventKind::SwipeUp => "swipeUp",
            EventKind::SwipeDown => "swipeDown",
            EventKind::SwipeLeft => "swipeLeft",
            EventKind::SwipeRight => "swipeRight",
            EventKind::RotateLandscape => "rotateLandscape",
            EventKind::RotatePortrait => "rotatePortrait",
        }
    }

    /// Imperative phrase for humans ("tap", "long tap", ...).
    pub fn verb(self) -> &'static str {
        match self {
            EventKind::Tap => "Tap",
            EventKind::LongTap => "Long tap",
            EventKind::OpenApp => "Open the app",
            EventKind::TapBack => "Tap the back button",
            EventKind::TapMenu => "Tap the menu button",
            EventKind::Type => "Type",
            EventKind::SwipeUp => "Swipe up",
            EventKind::SwipeDown => "Swipe down",
            EventKind::SwipeLeft => "Swipe left",
            EventKind::SwipeRight => "Swipe right",
            EventKind::RotateLandscape => "Rotate to landscape",
            EventKind::RotatePortrait => "Rotate to portrait",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Class of a typed input, used to select data-dependent transitions.
pub fn input_class(input: &str) -> &'static str {
    let t = input.trim();
    if t.is_empty() {
        "empty"
    } else if t.parse::<f64>().is_ok() {
        "numeric"
    } else {
        "text"
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Transition {
    pub screen: String,
    pub event: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component_id: Option<String>,
    /// `empty`, `numeric`, `text`, or `=literal` for an exact input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_class: Option<String>,
    pub target: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenSize {
    pub width: i32,
    pub height: i32,
}

impl Default for ScreenSize {
    fn default() -> ScreenSize {
        ScreenSize {
            width: 360,
            height: 640,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScreenDef {
    pub name: String,
    #[serde(default)]
    pub state_tags: BTreeSet<String>,
    pub components: Vec<GuiComponent>,
}

/// The app-model document as written on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AppModelDoc {
    pub version: u32,
    pub app_name: String,
    #[serde(default)]
    pub synonyms: Vec<String>,
    pub initial_screen: String,
    #[serde(default)]
    pub screen_size: ScreenSize,
    pub screens: Vec<ScreenDef>,
    #[serde(default)]
    pub transitions: Vec<Transition>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("malformed app model: {0}")]
    Malformed(String),
    #[error("unsupported app model version {0}")]
    UnknownVersion(u32),
    #[error("initial screen `{0}` is not defined")]
    MissingInitialScreen(String),
    #[error("screen `{0}` is defined twice")]
    DuplicateScreen(String),
    #[error("screen `{0}` must have exactly one root Layout")]
    BadRoot(String),
    #[error("screen `{screen}`: duplicate component id `{id}`")]
    DuplicateComponentId { screen: String, id: String },
    #[error("screen `{screen}`: component `{id}` lies outside its screen")]
    OutOfBounds { screen: String, id: String },
    #[error("screen `{0}` has more than one focused component")]
    MultipleFocused(String),
    #[error("transition from unknown screen `{0}`")]
    UnknownSource(String),
    #[error("transition from `{screen}` targets unknown screen `{target}`")]
    DanglingTarget { screen: String, target: String },
    #[error("transition from `{screen}` names unknown component `{id}`")]
    UnknownComponent { screen: String, id: String },
    #[error("transition from `{screen}` on {event} must name a component")]
    MissingComponent { screen: String, event: EventKind },
    #[error("transition from `{screen}`: bad input class `{class}`")]
    BadInputClass { screen: String, class: String },
}

/// A validated app model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppModel {
    doc: AppModelDoc,
    screens: BTreeMap<String, ScreenInstance>,
}

impl AppModel {
    pub fn from_json(text: &str) -> Result<AppModel, ModelError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ModelError::Malformed(e.to_string()))?;
        if let Some(v) = value.get("version").and_then(|v| v.as_u64()) {
            if v != MODEL_VERSION as u64 {
                return Err(ModelError::UnknownVersion(v as u32));
            }
        }
        let doc: AppModelDoc =
            serde_json::from_value(value).map_err(|e| ModelError::Malformed(e.to_string()))?;
        AppModel::from_doc(doc)
    }

    pub fn from_doc(doc: AppModelDoc) -> Result<AppModel, ModelError> {
        if doc.version != MODEL_VERSION {
            return Err(ModelError::UnknownVersion(doc.version));
        }
        let frame = Bounds {
            x: 0,
            y: 0,
            width: doc.screen_size.width,
            height: doc.screen_size.height,
        };
        let mut screens = BTreeMap::new();
        for def in &doc.screens {
            if screens.contains_key(&def.name) {
                return Err(ModelError::DuplicateScreen(def.name.clone()));
            }
            let [root] = def.components.as_slice() else {
                return Err(ModelError::BadRoot(def.name.clone()));
            };
            if root.comp_type != ComponentType::Layout {
                return Err(ModelError::BadRoot(def.name.clone()));
            }
            let mut ids = HashSet::new();
            let mut focused = 0;
            for (_, c) in root.walk() {
                if !ids.insert(c.id.as_str()) {
                    return Err(ModelError::DuplicateComponentId {
                        screen: def.name.clone(),
                        id: c.id.clone(),
                    });
                }
                if !frame.contains(&c.bounds) {
                    return Err(ModelError::OutOfBounds {
                        screen: def.name.clone(),
                        id: c.id.clone(),
                    });
                }
                focused += usize::from(c.flags.focused);
            }
            if focused > 1 {
                return Err(ModelError::MultipleFocused(def.name.clone()));
            }
            screens.insert(
                def.name.clone(),
                ScreenInstance {
                    name: def.name.clone(),
                    root: root.clone(),
                    state_tags: def.state_tags.clone(),
                },
            );
        }
        if !screens.contains_key(&doc.initial_screen) {
            return Err(ModelError::MissingInitialScreen(doc.initial_screen.clone()));
        }
        for t in &doc.transitions {
            let Some(src) = screens.get(&t.screen) else {
                return Err(ModelError::UnknownSource(t.screen.clone()));
            };
            if !screens.contains_key(&t.target) {
                return Err(ModelError::DanglingTarget {
                    screen: t.screen.clone(),
                    target: t.target.clone(),
                });
            }
            match &t.component_id {
                Some(id) if src.component(id).is_none() => {
                    return Err(ModelError::UnknownComponent {
                        screen: t.screen.clone(),
                        id: id.clone(),
                    })
                }
                None if t.event.needs_component() => {
                    return Err(ModelError::MissingComponent {
                        screen: t.screen.clone(),
                        event: t.event,
                    })
                }
                _ => {}
            }
            if let Some(class) = &t.input_class {
                let known = matches!(class.as_str(), "empty" | "numeric" | "text")
                    || class.starts_with('=');
                if !known || t.event != EventKind::Type {
                    return Err(ModelError::BadInputClass {
                        screen: t.screen.clone(),
                        class: class.clone(),
                    });
                }
            }
        }
        Ok(AppModel { doc, screens })
    }

    pub fn doc(&self) -> &AppModelDoc {
        &self.doc
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(&self.doc).expect("model serializes");
        serde_json::to_string_pretty(&value).expect("model serializes")
    }

    pub fn app_name(&self) -> &str {
        &self.doc.app_name
    }

    pub fn synonyms(&self) -> &[String] {
        &self.doc.synonyms
    }

    pub fn initial_screen(&self) -> &str {
        &self.doc.initial_screen
    }

    pub fn screen_size(&self) -> ScreenSize {
        self.doc.screen_size
    }

    pub fn screen(&self, name: &str) -> Option<&ScreenInstance> {
        self.screens.get(name)
    }

    pub fn screen_names(&self) -> impl Iterator<Item = &str> {
        self.doc.screens.iter().map(|s| s.name.as_str())
    }

    /// Target of the first transition that applies, trying an exact-input
    /// transition, then the input class, then a class-free one.
    pub fn transition(
        &self,
        screen: &str,
        event: EventKind,
        component: Option<&str>,
        input: Option<&str>,
    ) -> Option<&str> {
        let candidates: Vec<&Transition> = self
            .doc
            .transitions
            .iter()
            .filter(|t| {
                t.screen == screen && t.event == event && t.component_id.as_deref() == component
            })
            .collect();
        if let Some(input) = input {
            let exact = format!("={input}");
            let class = input_class(input);
            for wanted in [exact.as_str(), class] {
                if let Some(t) = candidates
                    .iter()
                    .find(|t| t.input_class.as_deref() == Some(wanted))
                {
                    return Some(&t.target);
                }
            }
        }
        candidates
            .iter()
            .find(|t| t.input_class.is_none())
            .map(|t| t.target.as_str())
    }
}

/// The pseudo-screen shown before the app is launched.
pub fn launcher_screen(size: ScreenSize) -> ScreenInstance {
    ScreenInstance {
        name: LAUNCHER.to_string(),
        root: GuiComponent {
            comp_type: ComponentType::Layout,
            id: "launcher".to_string(),
            label: String::new(),
            description: "device home screen".to_string(),
            bounds: Bounds {
                x: 0,
                y: 0,
                width: size.width,
                height: size.height,
            },
            flags: Flags::default(),
            text: String::new(),
            checked: false,
            children: Vec::new(),
        },
        state_tags: BTreeSet::new(),
    }
}

pub const LAUNCHER: &str = "<launcher>";
