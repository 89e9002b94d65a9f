//! Collaborative layout-recreation dialogs between a director, who sees a
//! hidden reference layout, and a designer, who edits a canvas.

pub mod agents;
pub mod analytics;
pub mod dialog;
pub mod dispatch;
pub mod layout;
pub mod nlu;
