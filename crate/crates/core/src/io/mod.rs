//! File formats, run configuration, Monte Carlo error bands and report output.

mod config;
mod matrix_file;
mod montecarlo;
mod report;

pub use config::{LoadedState, RunConfig, StateSource, StateSpec};
pub use matrix_file::{
    inline_path, parse_matrix_file, project_to_physical, read_matrix_file, write_matrix_file,
    Deviations, MatrixFile, ParsedMatrix, MAX_PROJECTION_DISTANCE,
};
pub use montecarlo::{
    monte_carlo_bands, resample, Band, BandRow, MonteCarloBands, MonteCarloConfig, DEFAULT_SAMPLES,
};
pub use report::{
    bands_csv, emit_report, format_sig, report_csv, to_json, verification_csv, write_text, Emit,
    Format, BANDS_CSV_HEADER, CSV_HEADER,
};
