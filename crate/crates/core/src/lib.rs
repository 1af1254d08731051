//! Multi-shot answer set programming with a monotone overgrounded cache.
//!
//! A [`engine::Session`] keeps one ground program across shots: each shot's
//! facts only ever add rules, and a per-shot projection simplifies the cache
//! against the current facts before solving.

pub mod bench;
pub mod cli;
pub mod engine;
pub mod grounder;
pub mod model;
pub mod solver;
pub mod syntax;
