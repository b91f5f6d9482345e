//! Peak detection, harmonic-structure classification, and comparison of
//! simulated spectra against measurement files.

mod harmonics;
mod measurement;
mod peaks;

pub use harmonics::{classify, Classification, HarmonicMatch, HarmonicReport, Sideband};
pub use measurement::{
    compare_measurement, parse_measurement, read_measurement, read_metadata, CompareOptions,
    ComparisonReport, MeasurementFile, MeasurementMetadata, RelativePeak, SharedPeak,
    DEFAULT_NOTCH_HZ,
};
pub use peaks::{detect_peaks, Peak, PeakList};

use thiserror::Error;

/// Default peak floor relative to the strongest non-DC bin.
pub const DEFAULT_FLOOR_DB: f64 = -40.0;

/// Default frequency-matching tolerance: two bins, and never under 2 Hz.
pub fn default_tolerance(bin_width: f64) -> f64 {
    f64::max(2.0 * bin_width, 2.0)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("empty spectrum")]
    EmptySpectrum,
    #[error("peak floor must be negative dB, got {0}")]
    InvalidFloor(f64),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("mismatched units: {0}")]
    MismatchedUnits(String),
    #[error("{0}")]
    Io(String),
}
