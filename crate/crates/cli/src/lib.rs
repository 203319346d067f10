//! Command-line driver: configuration loading, task runners, CSV/JSON
//! artifacts and the self-check battery.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod format;
pub mod output;
pub mod tasks;
