//! Grammatical error correction for L2 Russian driven by an n-gram language
//! model.

pub mod beam;
pub mod chains;
pub mod cli;
pub mod config;
pub mod lexicon;
pub mod lm;
pub mod m2;
pub mod masked;
pub mod morph;
pub mod phonetic;
pub mod pipeline;
pub mod rules;
pub mod text;
