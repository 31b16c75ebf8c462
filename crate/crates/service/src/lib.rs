//! Pipeline driver and HTTP API for aspect-wise similarity exploration.

pub mod api;
pub mod artifacts;
pub mod cli;
pub mod commands;
pub mod engine;
