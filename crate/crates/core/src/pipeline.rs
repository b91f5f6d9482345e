//! Skin-point simulation chained with spectral analysis, shared by the CLI
//! and the HTTP service so both produce the same numbers.

use serde::Serialize;

use crate::analysis::{
    classify, default_tolerance, detect_peaks, AnalysisError, HarmonicReport, PeakList,
};
use crate::field::{height_gain, FieldModel};
use crate::synthesis::{skin_signal, spectrum, Spectrum, SynthesisError, Waveform};
use crate::tacton::{perimeter, ValidatedTacton};
use crate::trajectory::Point2D;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisSettings {
    pub floor_db: f64,
    /// `None` picks two bins or 2 Hz, whichever is larger.
    pub tol_hz: Option<f64>,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        AnalysisSettings {
            floor_db: crate::analysis::DEFAULT_FLOOR_DB,
            tol_hz: None,
        }
    }
}

/// Quantities derived from the Tacton parameters alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Derived {
    /// `None` for a static point.
    pub drawing_frequency_hz: Option<f64>,
    pub perimeter_mm: f64,
    pub height_gain: f64,
}

pub fn derived(tacton: &ValidatedTacton, model: &FieldModel) -> Result<Derived, SynthesisError> {
    Ok(Derived {
        drawing_frequency_hz: tacton.drawing_frequency(),
        perimeter_mm: perimeter(tacton.spatial.shape, tacton.spatial.size),
        height_gain: height_gain(tacton.spatial.height, &model.height_curve)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSimulation {
    pub point: Point2D,
    pub waveform: Waveform,
    pub spectrum: Spectrum,
    pub peaks: PeakList,
    pub report: HarmonicReport,
}

/// Simulates one skin point and classifies its spectrum.
pub fn simulate_point(
    tacton: &ValidatedTacton,
    model: &FieldModel,
    point: Point2D,
    sample_rate: f64,
    settings: AnalysisSettings,
) -> Result<PointSimulation, PipelineError> {
    let waveform = skin_signal(tacton, model, point, sample_rate)?;
    let spectrum = spectrum(&waveform)?;
    let peaks = detect_peaks(&spectrum, settings.floor_db)?;
    let tol = settings.tol_hz.map_or_else(
        || default_tolerance(spectrum.bin_width()),
        |t| t.max(2.0 * spectrum.bin_width()),
    );
    let report = classify(
        &peaks,
        tacton.temporal.dominant_am_frequency(),
        tacton.drawing_frequency_hz(),
        tol,
    );
    Ok(PointSimulation {
        point,
        waveform,
        spectrum,
        peaks,
        report,
    })
}
