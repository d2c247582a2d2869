//! Document formats, canonical JSON and command implementations behind the
//! `weakhopf` binary.

pub mod canonical;
pub mod commands;
pub mod docs;
pub mod examples;
