use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::{launcher_screen, AppModel, EventKind, ScreenInstance};

static NEXT_SESSION: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("illegal {event} on {}: {reason}", component.as_deref().unwrap_or("screen"))]
    IllegalEvent {
        event: EventKind,
        component: Option<String>,
        reason: &'static str,
    },
    #[error("checkpoint belongs to another session")]
    ForeignCheckpoint,
}

fn illegal(event: EventKind, component: Option<&str>, reason: &'static str) -> SimError {
    SimError::IllegalEvent {
        event,
        component: component.map(str::to_string),
        reason,
    }
}

/// One executed event, as recorded in the session history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Executed {
    pub from: String,
    pub event: EventKind,
    pub component: Option<String>,
    pub input: Option<String>,
    pub to: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct State {
    current: Option<String>,
    back_stack: Vec<String>,
    /// (screen, component) -> typed text
    values: BTreeMap<(String, String), String>,
    /// (screen, component) -> checked
    checked: BTreeMap<(String, String), bool>,
    history: Vec<Executed>,
}

/// Snapshot of a session's full state.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    session: u64,
    state: State,
}

/// A running instance of the simulated app.
#[derive(Debug)]
pub struct DeviceSession<'m> {
    model: &'m AppModel,
    id: u64,
    state: State,
}

impl<'m> DeviceSession<'m> {
    /// A session sitting on the device home screen, app not yet launched.
    pub fn new(model: &'m AppModel) -> DeviceSession<'m> {
        DeviceSession {
            model,
            id: NEXT_SESSION.fetch_add(1, Ordering::Relaxed),
            state: State::default(),
        }
    }

    pub fn model(&self) -> &'m AppModel {
        self.model
    }

    pub fn is_launched(&self) -> bool {
        self.state.current.is_some()
    }

    pub fn history(&self) -> &[Executed] {
        &self.state.history
    }

    pub fn current_name(&self) -> Option<&str> {
        self.state.current.as_deref()
    }

    /// The screen currently shown, with typed text and toggle state applied.
    pub fn current_screen(&self) -> ScreenInstance {
        let Some(name) = &self.state.current else {
            return launcher_screen(self.model.screen_size());
        };
        let mut screen = self
            .model
            .screen(name)
            .expect("session only visits model screens")
            .clone();
        for ((s, id), text) in &self.state.values {
            if s == name {
                if let Some(c) = screen.root.find_mut(id) {
                    c.text = text.clone();
                }
            }
        }
        for ((s, id), on) in &self.state.checked {
            if s == name {
                if let Some(c) = screen.root.find_mut(id) {
                    c.checked = *on;
                }
                if *on {
                    screen.state_tags.insert(format!("checked:{id}"));
                }
            }
        }
        screen
    }

    pub fn execute(
        &mut self,
        event: EventKind,
        component: Option<&str>,
        input: Option<&str>,
    ) -> Result<ScreenInstance, SimError> {
        self.apply(event, component, input)?;
        #[cfg(test)]
        debug_assert!(
            self.replays_to_current(),
            "session state diverged from its history"
        );
        Ok(self.current_screen())
    }

    fn apply(
        &mut self,
        event: EventKind,
        component: Option<&str>,
        input: Option<&str>,
    ) -> Result<(), SimError> {
        if input.is_some() != (event == EventKind::Type) {
            return Err(illegal(
                event,
                component,
                "input is required for type events only",
            ));
        }
        if event == EventKind::OpenApp {
            if component.is_some() {
                return Err(illegal(event, component, "open app takes no component"));
            }
            let from = self
                .state
                .current
                .clone()
                .unwrap_or_else(|| super::model::LAUNCHER.to_string());
            let to = self.model.initial_screen().to_string();
            let mut history = std::mem::take(&mut self.state.history);
            history.push(Executed {
                from,
                event,
                component: None,
                input: None,
                to: to.clone(),
            });
            self.state = State {
                current: Some(to),
                history,
                ..State::default()
            };
            return Ok(());
        }
        let Some(current) = self.state.current.clone() else {
            return Err(illegal(event, component, "app is not running"));
        };
        let screen = self.current_screen();
        // taps on components that do not react to them leave the screen as is
        let mut inert = false;
        if event.needs_component() {
            let Some(id) = component else {
                return Err(illegal(event, component, "a component is required"));
            };
            let Some(c) = screen.component(id) else {
                return Err(illegal(
                    event,
                    component,
                    "no such component on this screen",
                ));
            };
            if !c.flags.enabled {
                return Err(illegal(event, component, "component is disabled"));
            }
            if event == EventKind::Type && !c.flags.typeable {
                return Err(illegal(event, component, "component does not accept text"));
            }
            inert = match event {
                EventKind::Tap | EventKind::TapMenu => !c.flags.tappable,
                EventKind::LongTap => !c.flags.long_tappable,
                _ => false,
            };
            if matches!(event, EventKind::Tap | EventKind::TapMenu) && c.flags.checkable && !inert {
                let key = (current.clone(), id.to_string());
                let on = self.state.checked.get(&key).copied().unwrap_or(c.checked);
                self.state.checked.insert(key, !on);
            }
            if event == EventKind::Type {
                self.state.values.insert(
                    (current.clone(), id.to_string()),
                    input.unwrap_or_default().to_string(),
                );
            }
        } else if component.is_some() {
            return Err(illegal(event, component, "event takes no component"));
        }

        let target = match event {
            _ if inert => None,
            EventKind::TapBack => match self.model.transition(&current, event, None, None) {
                Some(t) => {
                    self.state.back_stack.pop();
                    Some(t.to_string())
                }
                None => self.state.back_stack.pop(),
            },
            EventKind::TapMenu => self
                .model
                .transition(&current, event, component, None)
                .or_else(|| {
                    self.model
                        .transition(&current, EventKind::Tap, component, None)
                })
                .map(str::to_string),
            _ => self
                .model
                .transition(&current, event, component, input)
                .map(str::to_string),
        };
        let to = target.unwrap_or_else(|| current.clone());
        if to != current && event != EventKind::TapBack {
            self.state.back_stack.push(current.clone());
        }
        self.state.history.push(Executed {
            from: current,
            event,
            component: component.map(str::to_string),
            input: input.map(str::to_string),
            to: to.clone(),
        });
        self.state.current = Some(to);
        Ok(())
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            session: self.id,
            state: self.state.clone(),
        }
    }

    pub fn restore(&mut self, checkpoint: &Checkpoint) -> Result<(), SimError> {
        if checkpoint.session != self.id {
            return Err(SimError::ForeignCheckpoint);
        }
        self.state = checkpoint.state.clone();
        Ok(())
    }

    /// Whether replaying the history on a fresh session reproduces the
    /// current state.
    pub fn replays_to_current(&self) -> bool {
        let mut fresh = DeviceSession {
            model: self.model,
            id: 0,
            state: State::default(),
        };
        for e in &self.state.history {
            if fresh
                .apply(e.event, e.component.as_deref(), e.input.as_deref())
                .is_err()
            {
                return false;
            }
        }
        fresh.state == self.state
    }
}
