//! Deterministic simulated GUI application.
//!
//! An app model declares screens (component hierarchies) and a transition
//! table keyed by `(screen, event, component, input class)`. A
//! [`DeviceSession`] plays events against the model the way a device would,
//! with checkpoint/restore for exploration.

mod model;
mod session;
mod wireframe;

pub use model::{
    input_class, launcher_screen, AppModel, AppModelDoc, Bounds, ComponentType, EventKind, Flags,
    GuiComponent, ModelError, ScreenDef, ScreenInstance, ScreenSize, Transition, LAUNCHER,
    MODEL_VERSION,
};
pub use session::{Checkpoint, DeviceSession, Executed, SimError};
pub(crate) use wireframe::escape;
pub use wireframe::{render_wireframe, wireframe_ref};
