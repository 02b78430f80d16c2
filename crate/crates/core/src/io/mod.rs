//! Plain-text instance files and CSV traces. Every number is written
//! exactly as an integer or `p/q`.

mod format;
mod trace;

pub use format::{parse_instance, render_general, render_instance, GeneralSystem, ParsedInstance};
pub use trace::{
    diameter_rows, parse_trace, solver_rows, walk_rows, write_trace, write_trace_string, TraceRow, TRACE_HEADER,
};
