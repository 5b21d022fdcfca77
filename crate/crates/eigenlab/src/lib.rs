//! File formats, caches, reports and command-line pipelines for [`eigenlab_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod cli;
pub mod config;
pub mod lock;
pub mod pipeline;
pub mod polygon_file;
pub mod report;
pub mod suites;

pub use eigenlab_core as core;
