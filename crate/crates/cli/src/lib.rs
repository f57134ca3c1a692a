//! File formats, scripts and rendering for contact surgery diagrams.

pub mod format;
pub mod render;
pub mod script;
