//! Morphology-driven tagging, expression matching and relation extraction.

pub mod actions;
pub mod analysis;
pub mod document;
pub mod formula;
pub mod io;
pub mod morphology;
pub mod number;
pub mod pipeline;
pub mod regex;
pub mod relations;
pub mod synk;
