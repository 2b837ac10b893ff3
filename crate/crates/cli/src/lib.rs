//! IO, file formats, and pipeline orchestration around `medalign-core`.

pub mod formats;
pub mod manifest;
pub mod pipeline;
pub mod rrf;
