//! Scenario documents, sweeps, and the CSV/SVG outputs.

mod csv_io;
mod phase;
mod scenario;
mod svg;
mod sweep;

pub use csv_io::{fmt_num, read_csv_table, write_trajectory_csv, CsvTable};
pub use phase::{phase_portrait, FieldSample, PhaseGrid, PhasePortrait, PhaseTrajectory};
pub use scenario::{load_scenario, run_scenario, ChaosBlock, ControlBlock, Scenario};
pub use svg::{render_svg, render_svg_labeled, Series};
pub use sweep::{run_sweep, sweep_csv, SweepParam, SweepRow, SweepSpec};
