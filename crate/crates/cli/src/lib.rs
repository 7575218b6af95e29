//! Figure reproduction, parameter sweeps and the verification suite.

pub mod error;
pub mod figures;
pub mod parse;
pub mod runtime;
pub mod sweep;
pub mod table;
pub mod verify;

pub use error::{CliError, CliResult};
pub use figures::{figure_table, write_figure, FigureId};
pub use sweep::{run_sweep, sweep_table, Scheme, SweepConfig};
pub use table::{Cell, Table};
pub use verify::{run_verify, VerifyHooks, VerifyReport};
