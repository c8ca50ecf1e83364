//! File formats, corpus loading, the resumable pipeline and the annotation
//! service built on top of `scenesal-core`.

pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod formats;
pub mod fsio;
pub mod ops;
pub mod pipeline;
pub mod reports;
pub mod service;

pub use error::{Result, ToolkitError};
