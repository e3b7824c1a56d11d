//! File formats, remote lookup and stage orchestration for the refmap
//! pipeline. The algorithms live in `refmap-core`.

pub mod config;
pub mod error;
pub mod io;
pub mod manifest;
pub mod pipeline;
pub mod remote;
pub mod report;
pub mod sankey;

pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use pipeline::Stage;
