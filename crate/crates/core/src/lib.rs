//! Pairwise readability assessment toolkit.
//!
//! Turns readability corpora into ordered "which text is harder?" pairs,
//! renders them into text-to-text prompt formats for sequence-to-sequence
//! fine-tuning, and scores predictions (from a model or the Flesch-Kincaid
//! baseline) into accuracy reports.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod formulas;
pub mod io;
pub mod prompts;

pub use error::{Error, Result};
