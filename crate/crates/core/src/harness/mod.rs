//! Scenario runner: single simulations, propeller-speed sweeps and their
//! CSV/SVG outputs.

pub mod output;
pub mod scenario;

use std::path::Path;

use crate::error::Result;
use crate::spectral::Spectrum;

pub use output::{emit_csv, emit_plot, parse_csv, read_csv, CSV_HEADER};
pub use scenario::{
    fp_grid, run_single, sweep_fp, BlindSpotPolicy, Execution, FpSummary, RunResult,
    ScenarioConfig, Stages, SweepResult,
};

/// Writes a spectrum as `freq_hz,re,im,mag_db` CSV.
pub fn dump_spectrum(spec: &Spectrum, path: &Path) -> Result<()> {
    spec.dump_csv(path)
}
