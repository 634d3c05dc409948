//! File formats, caches, synthetic data and experiment recipes on top of
//! `cnpmi-core`. The `cnpmi` binary is a thin front-end over this crate.

pub mod cache;
pub mod config;
pub mod experiments;
pub mod formats;
pub mod layout;
pub mod parallel;
pub mod report;
pub mod synthetic;
