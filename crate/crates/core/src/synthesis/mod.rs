//! Commanded and skin-point signals, their spectra, and the 2D field grid.

mod grid;
mod spectrum;

pub use grid::{field_grid, FieldAggregate, FieldGrid, MAX_GRID_SPACING_MM, MIN_GRID_SPACING_MM};
pub use spectrum::{spectrum, Spectrum};

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{height_gain, FieldError, FieldModel};
use crate::tacton::{TemporalConfig, ValidatedTacton};
use crate::trajectory::{position_at, sample_count, Point2D};

/// Ultrasound carrier frequency, in Hz.
pub const CARRIER_HZ: f64 = 40_000.0;
/// Default sample rate for skin-point signals.
pub const DEFAULT_SKIN_RATE_HZ: f64 = 20_000.0;
/// Default (and minimum) sample rate for carrier-resolved command signals.
pub const DEFAULT_CARRIER_RATE_HZ: f64 = 320_000.0;
/// Skin points must lie within this many mm of the origin on each axis.
pub const PLANE_HALF_EXTENT_MM: f64 = 60.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthesisError {
    #[error("sample rate {sample_rate} Hz too low (need at least {required} Hz)")]
    RateTooLow { sample_rate: f64, required: f64 },
    #[error("carrier sample rate {sample_rate} Hz too low (need at least 320000 Hz)")]
    CarrierRateTooLow { sample_rate: f64 },
    #[error("empty waveform")]
    EmptyWaveform,
    #[error("grid spacing {0} mm out of range [0.25, 5]")]
    SpacingOutOfRange(f64),
    #[error("skin point ({x}, {y}) mm outside the +/-60 mm plane")]
    SkinPointOutOfRange { x: f64, y: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveformKind {
    /// Commanded signal including the 40 kHz carrier.
    CommandCarrier,
    /// Stimulation at a skin point, carrier replaced by constant pressure.
    SkinPoint,
}

/// Uniformly sampled signal in normalized pressure units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waveform {
    pub sample_rate: f64,
    pub samples: Vec<f64>,
    pub kind: WaveformKind,
}

impl Waveform {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn time_at(&self, index: usize) -> f64 {
        index as f64 / self.sample_rate
    }

    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        (self.samples.iter().map(|s| s * s).sum::<f64>() / self.samples.len() as f64).sqrt()
    }
}

/// Sinusoid at `frequency`, or the constant 1 when the frequency is 0 Hz.
#[inline]
fn sinusoid_or_one(frequency: f64, t: f64) -> f64 {
    if frequency == 0.0 {
        1.0
    } else {
        // Reduce the phase first so long durations keep full precision.
        let cycles = frequency * t;
        (TAU * (cycles - cycles.floor())).sin()
    }
}

/// Weighted AM term times the envelope: {w1·M1(t) + w2·M2(t)}·E(t).
pub fn modulation_value(temporal: &TemporalConfig, t: f64) -> f64 {
    let (w1, w2) = temporal.superposition_weights;
    let mut am = 0.0;
    for (&f, w) in temporal.am_frequencies.iter().zip([w1, w2]) {
        if w != 0.0 {
            am += w * sinusoid_or_one(f, t);
        }
    }
    am * sinusoid_or_one(temporal.envelope_frequency, t)
}

/// Commanded signal A·U(t)·M(t)·E(t) with a 40 kHz carrier.
pub fn command_signal(
    tacton: &ValidatedTacton,
    carrier_rate: f64,
) -> Result<Waveform, SynthesisError> {
    if !(carrier_rate >= DEFAULT_CARRIER_RATE_HZ && carrier_rate.is_finite()) {
        return Err(SynthesisError::CarrierRateTooLow {
            sample_rate: carrier_rate,
        });
    }
    let temporal = &tacton.temporal;
    let n = sample_count(temporal.total_duration, carrier_rate);
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / carrier_rate;
            temporal.amplitude * sinusoid_or_one(CARRIER_HZ, t) * modulation_value(temporal, t)
        })
        .collect();
    Ok(Waveform {
        sample_rate: carrier_rate,
        samples,
        kind: WaveformKind::CommandCarrier,
    })
}

/// Lowest skin-signal sample rate accepted for a given drawing frequency.
pub fn min_skin_rate(drawing_frequency: f64) -> f64 {
    2.0 * f64::max(1000.0, 20.0 * drawing_frequency)
}

/// Per-sample quantities shared by every skin point of one Tacton.
pub(crate) struct SignalBasis {
    pub positions: Vec<Point2D>,
    /// amplitude · height gain · modulation, per sample.
    pub drive: Vec<f64>,
}

impl SignalBasis {
    pub(crate) fn new(
        tacton: &ValidatedTacton,
        model: &FieldModel,
        sample_rate: f64,
    ) -> Result<Self, SynthesisError> {
        let required = min_skin_rate(tacton.drawing_frequency_hz());
        if !(sample_rate >= required && sample_rate.is_finite()) {
            return Err(SynthesisError::RateTooLow {
                sample_rate,
                required,
            });
        }
        let gain = height_gain(tacton.spatial.height, &model.height_curve)?;
        let scale = tacton.temporal.amplitude * gain;
        let n = sample_count(tacton.temporal.total_duration, sample_rate);
        let (positions, drive) = (0..n)
            .map(|i| {
                let t = i as f64 / sample_rate;
                (
                    position_at(&tacton.spatial, t),
                    scale * modulation_value(&tacton.temporal, t),
                )
            })
            .unzip();
        Ok(SignalBasis { positions, drive })
    }

    #[inline]
    pub(crate) fn sample(&self, model: &FieldModel, i: usize, skin: Point2D) -> f64 {
        let s = model.falloff.eval(self.positions[i].distance(skin));
        if s == 0.0 {
            0.0
        } else {
            s * self.drive[i]
        }
    }
}

fn check_skin_point(p: Point2D) -> Result<(), SynthesisError> {
    let ok = |v: f64| v.is_finite() && v.abs() <= PLANE_HALF_EXTENT_MM;
    if ok(p.x) && ok(p.y) {
        Ok(())
    } else {
        Err(SynthesisError::SkinPointOutOfRange { x: p.x, y: p.y })
    }
}

/// Stimulation at `skin_point`: A(x(t), a)·1·{modulation}(t).
pub fn skin_signal(
    tacton: &ValidatedTacton,
    model: &FieldModel,
    skin_point: Point2D,
    sample_rate: f64,
) -> Result<Waveform, SynthesisError> {
    check_skin_point(skin_point)?;
    let basis = SignalBasis::new(tacton, model, sample_rate)?;
    let samples = (0..basis.drive.len())
        .map(|i| basis.sample(model, i, skin_point))
        .collect();
    Ok(Waveform {
        sample_rate,
        samples,
        kind: WaveformKind::SkinPoint,
    })
}
