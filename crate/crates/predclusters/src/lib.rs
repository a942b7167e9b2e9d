//! Dataset loading, experiment orchestration, result files, SVG charts and
//! the command-line interface around `predclusters-core`.

pub mod cli;
pub mod data;
pub mod experiments;
pub mod plot;
pub mod results;
pub mod synthetic;
