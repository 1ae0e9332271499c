//! Sweeps, fits, reports and figure dumps behind the command-line tool.

pub mod config;
pub mod dump;
pub mod fit;
pub mod reports;
pub mod sweep;

pub use config::ExperimentConfig;
pub use dump::dump_figures;
pub use fit::{fit_decay_rate, fit_sweep, ColumnFit, DecayFit};
pub use reports::{asymptotics_reports, reduce_reports, spectrum_reports};
pub use sweep::{load_sweep, run_sweep, save_sweep, SweepRow};
