//! Simulation of the vibration a single-focal-point mid-air ultrasound
//! Tacton induces on a 2D skin plane.
//!
//! The model moves one focal point along a trajectory, attenuates it with a
//! radial falloff and a height gain, multiplies by the temporal modulation,
//! and analyses the resulting waveform at any skin point.

pub mod analysis;
pub mod export;
pub mod field;
pub mod pipeline;
pub mod presets;
pub mod synthesis;
pub mod tacton;
pub mod trajectory;

pub use analysis::{
    classify, compare_measurement, detect_peaks, Classification, ComparisonReport, HarmonicReport,
    MeasurementFile, PeakList,
};
pub use field::{falloff, height_gain, intensity_at, FalloffProfile, FieldModel, HeightCurve};
pub use synthesis::{
    command_signal, field_grid, modulation_value, skin_signal, spectrum, FieldGrid, Spectrum,
    Waveform, WaveformKind,
};
pub use tacton::{
    drawing_frequency, perimeter, Shape, SpatioTemporalConfig, Tacton, TactonDocument,
    TemporalConfig, ValidatedTacton, ValidationError,
};
pub use trajectory::{position_at, sample_trajectory, Point2D, PointSeries};
