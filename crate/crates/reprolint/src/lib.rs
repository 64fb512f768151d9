//! Command-line and HTTP front ends for reprolint: runs assessments, keeps
//! app models, execution graphs and reports in a content-addressed store,
//! and serves them over a versioned JSON API.

pub mod http;
pub mod pipeline;
pub mod settings;
pub mod store;
