//! File formats, figures and the command-line front end.

pub mod certfile;
#[cfg(feature = "cli")]
pub mod cli;
pub mod graph6;
pub mod svg;

pub use certfile::CertificateFile;
pub use graph6::{emit_graph6, parse_graph6, MalformedGraph6};
pub use svg::{render_svg, write_svg};

/// Environment variable holding the worker-thread count for parallel commands.
pub const WORKERS_ENV: &str = "CURVEGRAPH_WORKERS";
