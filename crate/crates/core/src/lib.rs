//! Low-latency phonetic decoding with truncated Viterbi search.
//!
//! The crate covers the whole experimental loop: network topologies built
//! per utterance, full and bounded look-ahead Viterbi decoding, frame and
//! symbol-level scoring, an entropy confidence measure, a seeded synthetic
//! corpus generator standing in for neural posterior estimators, and the
//! ANOVA/Tukey analysis used to compare look-ahead conditions.

pub mod confidence;
pub mod decoder;
pub mod harness;
pub mod hmm;
pub mod scoring;
pub mod stats;
pub mod synth;
pub mod topology;
