//! File formats and text rendering: spec documents, CSV trajectories,
//! order files, symbolic matrix reports, and plot scripts.

pub mod csv;
pub mod format;
pub mod plot;
pub mod render;
pub mod spec_file;

pub use csv::{
    parse_order, read_samples, read_trajectory, write_matrix, write_order, write_trajectory,
    CsvError,
};
pub use format::fmt_g17;
pub use plot::plot_script;
pub use render::{render_lifting, render_symbolic};
pub use spec_file::{parse_spec, render_spec, Category, Diagnostic, SimDefaults, SpecDocument};
