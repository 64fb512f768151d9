use std::collections::HashSet;

use super::{signature, ScreenSignature, TraceStep};
use crate::appsim::{AppModel, DeviceSession, EventKind};

/// Text typed into fields during systematic exploration.
pub const GENERATED_EXPLORATION_INPUT: &str = "1";

struct Explorer<'m> {
    session: DeviceSession<'m>,
    budget: usize,
    trace: Vec<TraceStep>,
    visited: HashSet<ScreenSignature>,
}

impl Explorer<'_> {
    fn exhausted(&self) -> bool {
        self.trace.len() >= self.budget
    }

    fn step(&mut self, event: EventKind, component: Option<&str>, input: Option<&str>) -> bool {
        let from = self.session.current_screen();
        let Ok(to) = self.session.execute(event, component, input) else {
            return false;
        };
        let fresh = self.visited.insert(signature(&to));
        self.trace.push(TraceStep {
            from,
            event,
            component: component.map(str::to_string),
            input: input.map(str::to_string),
            to,
        });
        fresh
    }

    fn dfs(&mut self) {
        let screen = self.session.current_screen();
        let checkpoint = self.session.checkpoint();
        for c in screen.components() {
            if !c.flags.enabled {
                continue;
            }
            let mut actions = Vec::new();
            if c.flags.tappable {
                actions.push((EventKind::Tap, None));
            }
            if c.flags.long_tappable {
                actions.push((EventKind::LongTap, None));
            }
            if c.flags.typeable {
                actions.push((EventKind::Type, Some(GENERATED_EXPLORATION_INPUT)));
            }
            for (event, input) in actions {
                if self.exhausted() {
                    return;
                }
                if self.step(event, Some(&c.id), input) {
                    self.dfs();
                }
                self.session
                    .restore(&checkpoint)
                    .expect("checkpoint taken from this session");
            }
        }
    }
}

/// Depth-first systematic exploration. From each newly discovered screen,
/// every enabled component is exercised in screen order (tap, then long
/// tap, then type), restoring the screen after each event. Screens whose
/// signature was already seen are not expanded again. The trace, launch
/// included, holds at most `budget` steps.
pub fn systematic_explore(model: &AppModel, budget: usize) -> Vec<TraceStep> {
    let mut ex = Explorer {
        session: DeviceSession::new(model),
        budget: budget.max(1),
        trace: Vec::new(),
        visited: HashSet::new(),
    };
    ex.step(EventKind::OpenApp, None, None);
    ex.dfs();
    ex.trace
}
