//! CSV tables reproducing the published results, SVG rendering, and the
//! command implementations used by the `covert-cusum` binary.

pub mod commands;
pub mod svg;
pub mod table;

pub use table::{Column, CurveTable};
