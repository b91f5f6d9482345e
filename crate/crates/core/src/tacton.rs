//! Tacton parameters: five temporal and three spatiotemporal design knobs
//! (plus device height), validated into immutable values.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldModel;

/// Largest AM or envelope frequency accepted, in Hz.
pub const MAX_FREQUENCY_HZ: f64 = 1000.0;
/// Longest Tacton accepted, in seconds.
pub const MAX_DURATION_S: f64 = 10.0;
/// Largest trajectory size (line length, circle diameter, polygon side), in mm.
pub const MAX_SIZE_MM: f64 = 60.0;
/// Highest focal plane above the device, in mm.
pub const MAX_HEIGHT_MM: f64 = 600.0;
/// Height at which the default relative intensity peaks, in mm.
pub const DEFAULT_HEIGHT_MM: f64 = 200.0;

/// The five mixing ratios offered for two superposed AM sinusoids.
pub const SUPERPOSITION_RATIOS: [(f64, f64); 5] = [
    (1.0, 0.0),
    (0.75, 0.25),
    (0.5, 0.5),
    (0.25, 0.75),
    (0.0, 1.0),
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("{field} out of range: {value} (allowed {allowed})")]
    OutOfRange {
        field: String,
        value: f64,
        allowed: &'static str,
    },
    #[error("inconsistent superposition: {0}")]
    InconsistentSuperposition(String),
    #[error("a static point without AM produces no stimulation")]
    DegenerateNoStimulation,
}

impl ValidationError {
    pub(crate) fn out_of_range(
        field: impl Into<String>,
        value: f64,
        allowed: &'static str,
    ) -> Self {
        ValidationError::OutOfRange {
            field: field.into(),
            value,
            allowed,
        }
    }

    /// Stable machine-readable error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            ValidationError::OutOfRange { .. } => "OutOfRange",
            ValidationError::InconsistentSuperposition(_) => "InconsistentSuperposition",
            ValidationError::DegenerateNoStimulation => "DegenerateNoStimulation",
        }
    }

    /// Field the error refers to, when there is one.
    pub fn field(&self) -> Option<&str> {
        match self {
            ValidationError::OutOfRange { field, .. } => Some(field),
            ValidationError::InconsistentSuperposition(_) => Some("superposition_weights"),
            ValidationError::DegenerateNoStimulation => None,
        }
    }
}

fn default_weights() -> (f64, f64) {
    (1.0, 0.0)
}

fn default_height() -> f64 {
    DEFAULT_HEIGHT_MM
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalConfig {
    /// Commanded amplitude as a fraction of the device maximum.
    pub amplitude: f64,
    /// One AM frequency, or two when a superposition ratio is used. 0 Hz means no AM.
    pub am_frequencies: Vec<f64>,
    #[serde(default = "default_weights")]
    pub superposition_weights: (f64, f64),
    /// 0 Hz means a constant envelope.
    #[serde(default)]
    pub envelope_frequency: f64,
    #[serde(rename = "total_duration_s")]
    pub total_duration: f64,
}

impl TemporalConfig {
    /// Plain AM at one frequency, constant envelope, no superposition.
    pub fn am(amplitude: f64, am_frequency: f64, total_duration: f64) -> Self {
        TemporalConfig {
            amplitude,
            am_frequencies: vec![am_frequency],
            superposition_weights: (1.0, 0.0),
            envelope_frequency: 0.0,
            total_duration,
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        in_closed(self.amplitude, 0.0, 1.0, "amplitude", "[0, 1]")?;
        if !(self.total_duration > 0.0 && self.total_duration <= MAX_DURATION_S) {
            return Err(ValidationError::out_of_range(
                "total_duration_s",
                self.total_duration,
                "(0, 10]",
            ));
        }
        if self.am_frequencies.is_empty() || self.am_frequencies.len() > 2 {
            return Err(ValidationError::InconsistentSuperposition(format!(
                "expected 1 or 2 AM frequencies, got {}",
                self.am_frequencies.len()
            )));
        }
        for (i, &f) in self.am_frequencies.iter().enumerate() {
            in_closed(
                f,
                0.0,
                MAX_FREQUENCY_HZ,
                format!("am_frequencies[{i}]"),
                "[0, 1000]",
            )?;
        }
        in_closed(
            self.envelope_frequency,
            0.0,
            MAX_FREQUENCY_HZ,
            "envelope_frequency",
            "[0, 1000]",
        )?;

        let w = self.superposition_weights;
        if !SUPERPOSITION_RATIOS.contains(&w) {
            return Err(ValidationError::InconsistentSuperposition(format!(
                "ratio {}:{} is not one of 1:0, 0.75:0.25, 0.5:0.5, 0.25:0.75, 0:1",
                w.0, w.1
            )));
        }
        if w != (1.0, 0.0) && self.am_frequencies.len() != 2 {
            return Err(ValidationError::InconsistentSuperposition(format!(
                "ratio {}:{} needs exactly 2 AM frequencies",
                w.0, w.1
            )));
        }
        Ok(())
    }

    /// Whether any AM sinusoid is active.
    pub fn has_am(&self) -> bool {
        self.am_frequencies.iter().any(|&f| f > 0.0)
    }

    /// AM frequency carrying the largest weight (first one on ties).
    pub fn dominant_am_frequency(&self) -> f64 {
        let (w1, w2) = self.superposition_weights;
        match self.am_frequencies.as_slice() {
            [_, f2] if w2 > w1 => *f2,
            [f1, ..] => *f1,
            [] => 0.0,
        }
    }
}

fn in_closed(
    value: f64,
    lo: f64,
    hi: f64,
    field: impl Into<String>,
    allowed: &'static str,
) -> Result<(), ValidationError> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(ValidationError::out_of_range(field, value, allowed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Point,
    HorizontalLine,
    Circle,
    RegularTriangle,
    Square,
}

impl Shape {
    pub const ALL: [Shape; 5] = [
        Shape::Point,
        Shape::HorizontalLine,
        Shape::Circle,
        Shape::RegularTriangle,
        Shape::Square,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Point => "point",
            Shape::HorizontalLine => "horizontal_line",
            Shape::Circle => "circle",
            Shape::RegularTriangle => "regular_triangle",
            Shape::Square => "square",
        }
    }

    /// What the size parameter measures for this shape.
    pub fn size_meaning(self) -> &'static str {
        match self {
            Shape::Point => "none",
            Shape::HorizontalLine => "length",
            Shape::Circle => "diameter",
            Shape::RegularTriangle | Shape::Square => "side length",
        }
    }

    /// Human-readable perimeter formula in terms of the size `d`.
    pub fn perimeter_formula(self) -> &'static str {
        match self {
            Shape::Point => "0",
            Shape::HorizontalLine => "2*d",
            Shape::Circle => "pi*d",
            Shape::RegularTriangle => "3*d",
            Shape::Square => "4*d",
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Shape::ALL
            .into_iter()
            .find(|shape| shape.name() == s)
            .ok_or_else(|| format!("unknown shape {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatioTemporalConfig {
    pub shape: Shape,
    #[serde(rename = "size_mm")]
    pub size: f64,
    /// Focal point speed along the trajectory, in m/s.
    #[serde(rename = "drawing_speed_mps", default)]
    pub drawing_speed: f64,
    /// Focal plane height above the device, in mm.
    #[serde(rename = "height_mm", default = "default_height")]
    pub height: f64,
    /// Where on the trajectory the focal point starts, as a fraction of the perimeter.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub start_phase: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

impl SpatioTemporalConfig {
    pub fn point() -> Self {
        SpatioTemporalConfig {
            shape: Shape::Point,
            size: 0.0,
            drawing_speed: 0.0,
            height: DEFAULT_HEIGHT_MM,
            start_phase: 0.0,
        }
    }

    pub fn new(shape: Shape, size_mm: f64, speed_mps: f64) -> Self {
        SpatioTemporalConfig {
            shape,
            size: size_mm,
            drawing_speed: speed_mps,
            height: DEFAULT_HEIGHT_MM,
            start_phase: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        in_closed(self.size, 0.0, MAX_SIZE_MM, "size_mm", "[0, 60]")?;
        match self.shape {
            Shape::Point if self.size != 0.0 => {
                return Err(ValidationError::out_of_range(
                    "size_mm",
                    self.size,
                    "0 for a point",
                ))
            }
            Shape::Point => {}
            _ if self.size <= 0.0 => {
                return Err(ValidationError::out_of_range(
                    "size_mm",
                    self.size,
                    "(0, 60] for a trajectory",
                ))
            }
            _ => {}
        }
        if !(self.drawing_speed.is_finite() && self.drawing_speed >= 0.0) {
            return Err(ValidationError::out_of_range(
                "drawing_speed_mps",
                self.drawing_speed,
                ">= 0",
            ));
        }
        if !(self.height > 0.0 && self.height <= MAX_HEIGHT_MM) {
            return Err(ValidationError::out_of_range(
                "height_mm",
                self.height,
                "(0, 600]",
            ));
        }
        if !(self.start_phase >= 0.0 && self.start_phase < 1.0) {
            return Err(ValidationError::out_of_range(
                "start_phase",
                self.start_phase,
                "[0, 1)",
            ));
        }
        Ok(())
    }

    /// Whether the focal point actually moves.
    pub fn is_moving(&self) -> bool {
        self.shape != Shape::Point && self.drawing_speed > 0.0
    }

    /// Drawing speed in mm/s.
    pub fn speed_mm_per_s(&self) -> f64 {
        self.drawing_speed * 1000.0
    }
}

/// Length of one trajectory completion, in mm.
///
/// The open horizontal line completes by going out and back, so its
/// perimeter is twice its length.
pub fn perimeter(shape: Shape, size_mm: f64) -> f64 {
    match shape {
        Shape::Point => 0.0,
        Shape::HorizontalLine => 2.0 * size_mm,
        Shape::Circle => PI * size_mm,
        Shape::RegularTriangle => 3.0 * size_mm,
        Shape::Square => 4.0 * size_mm,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("drawing frequency is undefined for a static point")]
pub struct UndefinedForPoint;

/// Trajectory completions per second: speed over perimeter.
pub fn drawing_frequency(spatial: &SpatioTemporalConfig) -> Result<f64, UndefinedForPoint> {
    if spatial.shape == Shape::Point {
        return Err(UndefinedForPoint);
    }
    let p = perimeter(spatial.shape, spatial.size);
    if p <= 0.0 {
        return Err(UndefinedForPoint);
    }
    Ok(spatial.speed_mm_per_s() / p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tacton {
    #[serde(flatten)]
    pub temporal: TemporalConfig,
    #[serde(flatten)]
    pub spatial: SpatioTemporalConfig,
}

impl Tacton {
    pub fn new(temporal: TemporalConfig, spatial: SpatioTemporalConfig) -> Self {
        Tacton { temporal, spatial }
    }

    pub fn validate(self) -> Result<ValidatedTacton, ValidationError> {
        self.temporal.validate()?;
        self.spatial.validate()?;
        if self.spatial.shape == Shape::Point
            && self.temporal.am_frequencies.iter().all(|&f| f == 0.0)
        {
            return Err(ValidationError::DegenerateNoStimulation);
        }
        Ok(ValidatedTacton(self))
    }

    /// Drawing frequency, or `None` when the focal point is static.
    pub fn drawing_frequency(&self) -> Option<f64> {
        drawing_frequency(&self.spatial).ok()
    }
}

/// A Tacton whose invariants have been checked. Immutable.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ValidatedTacton(Tacton);

impl ValidatedTacton {
    pub fn into_inner(self) -> Tacton {
        self.0
    }

    /// Drawing frequency in Hz; zero for a static point or zero speed.
    pub fn drawing_frequency_hz(&self) -> f64 {
        self.0.drawing_frequency().unwrap_or(0.0)
    }
}

impl Deref for ValidatedTacton {
    type Target = Tacton;

    fn deref(&self) -> &Tacton {
        &self.0
    }
}

/// A Tacton as exchanged in JSON, with optional model overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TactonDocument {
    #[serde(flatten)]
    pub tacton: Tacton,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<FieldModel>,
}

impl TactonDocument {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json_pretty(&self) -> String {
        // Plain data with string keys always serializes.
        serde_json::to_string_pretty(self).expect("tacton document serializes")
    }

    /// Validates the Tacton and the model overrides together.
    pub fn validate(self) -> Result<(ValidatedTacton, FieldModel), ValidationError> {
        let model = self.model.unwrap_or_default();
        model.validate()?;
        Ok((self.tacton.validate()?, model))
    }
}

impl From<Tacton> for TactonDocument {
    fn from(tacton: Tacton) -> Self {
        TactonDocument {
            tacton,
            model: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_tacton() -> Tacton {
        Tacton::new(
            TemporalConfig::am(0.8, 140.0, 1.0),
            SpatioTemporalConfig::new(Shape::Circle, 20.0, 12.0),
        )
    }

    #[test]
    fn measurement_tacton_is_valid() {
        let t = sample_tacton();
        assert_eq!(t.clone().validate().unwrap().into_inner(), t);
    }

    #[test]
    fn long_duration_rejected() {
        let mut t = sample_tacton();
        t.temporal.total_duration = 12.0;
        let err = t.validate().unwrap_err();
        assert_eq!(err.kind(), "OutOfRange");
        assert_eq!(err.field(), Some("total_duration_s"));
    }

    #[test]
    fn static_point_without_am_is_degenerate() {
        let t = Tacton::new(
            TemporalConfig::am(1.0, 0.0, 1.0),
            SpatioTemporalConfig::point(),
        );
        assert_eq!(
            t.validate().unwrap_err(),
            ValidationError::DegenerateNoStimulation
        );
    }

    #[test]
    fn superposition_needs_two_frequencies() {
        let mut t = sample_tacton();
        t.temporal.superposition_weights = (0.5, 0.5);
        assert!(matches!(
            t.clone().validate(),
            Err(ValidationError::InconsistentSuperposition(_))
        ));
        t.temporal.am_frequencies = vec![80.0, 140.0];
        assert!(t.validate().is_ok());
    }

    #[test]
    fn unknown_ratio_rejected() {
        let mut t = sample_tacton();
        t.temporal.am_frequencies = vec![80.0, 140.0];
        t.temporal.superposition_weights = (0.6, 0.4);
        assert!(matches!(
            t.validate(),
            Err(ValidationError::InconsistentSuperposition(_))
        ));
    }

    #[test]
    fn range_checks() {
        let mut t = sample_tacton();
        t.temporal.amplitude = 1.5;
        assert_eq!(t.validate().unwrap_err().field(), Some("amplitude"));

        let mut t = sample_tacton();
        t.temporal.am_frequencies = vec![1200.0];
        assert_eq!(t.validate().unwrap_err().field(), Some("am_frequencies[0]"));

        let mut t = sample_tacton();
        t.spatial.size = 61.0;
        assert_eq!(t.validate().unwrap_err().field(), Some("size_mm"));

        let mut t = sample_tacton();
        t.spatial.size = 0.0;
        assert_eq!(t.validate().unwrap_err().field(), Some("size_mm"));

        let mut t = sample_tacton();
        t.spatial.height = 0.0;
        assert_eq!(t.validate().unwrap_err().field(), Some("height_mm"));

        let mut t = sample_tacton();
        t.spatial.drawing_speed = -1.0;
        assert_eq!(t.validate().unwrap_err().field(), Some("drawing_speed_mps"));

        let mut t = sample_tacton();
        t.temporal.envelope_frequency = f64::NAN;
        assert_eq!(
            t.validate().unwrap_err().field(),
            Some("envelope_frequency")
        );
    }

    #[test]
    fn point_ignores_speed() {
        let mut spatial = SpatioTemporalConfig::point();
        spatial.drawing_speed = 5.0;
        let t = Tacton::new(TemporalConfig::am(1.0, 140.0, 1.0), spatial);
        let v = t.validate().unwrap();
        assert_eq!(v.drawing_frequency_hz(), 0.0);
    }

    #[test]
    fn perimeters() {
        assert!((perimeter(Shape::Circle, 20.0) - 62.83).abs() < 0.005);
        assert_eq!(perimeter(Shape::Square, 20.0), 80.0);
        assert_eq!(perimeter(Shape::HorizontalLine, 20.0), 2.0 * 20.0);
        assert_eq!(perimeter(Shape::RegularTriangle, 20.0), 60.0);
        assert_eq!(perimeter(Shape::Point, 0.0), 0.0);
    }

    #[test]
    fn drawing_frequencies() {
        let f = drawing_frequency(&SpatioTemporalConfig::new(Shape::Circle, 20.0, 12.0)).unwrap();
        assert!((f - 190.99).abs() < 0.005, "{f}");
        let f10 = drawing_frequency(&SpatioTemporalConfig::new(Shape::Circle, 10.0, 6.0)).unwrap();
        assert!((f10 - 190.99).abs() < 0.005);
        let sq = drawing_frequency(&SpatioTemporalConfig::new(Shape::Square, 20.0, 12.0)).unwrap();
        assert!((sq - 150.0).abs() < 1e-12);
        assert_eq!(
            drawing_frequency(&SpatioTemporalConfig::point()),
            Err(UndefinedForPoint)
        );
    }

    #[test]
    fn json_uses_canonical_names() {
        let doc = TactonDocument::from(sample_tacton());
        let value: serde_json::Value = serde_json::from_str(&doc.to_json_pretty()).unwrap();
        let obj = value.as_object().unwrap();
        for key in [
            "amplitude",
            "am_frequencies",
            "superposition_weights",
            "envelope_frequency",
            "total_duration_s",
            "shape",
            "size_mm",
            "drawing_speed_mps",
            "height_mm",
        ] {
            assert!(obj.contains_key(key), "missing {key}");
        }
        assert_eq!(obj["shape"], "circle");
        let back = TactonDocument::from_json(&doc.to_json_pretty()).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn json_defaults() {
        let doc = TactonDocument::from_json(
            r#"{"amplitude":1,"am_frequencies":[140],"total_duration_s":1,"shape":"point","size_mm":0}"#,
        )
        .unwrap();
        assert_eq!(doc.tacton.spatial.height, 200.0);
        assert_eq!(doc.tacton.temporal.superposition_weights, (1.0, 0.0));
        assert!(doc.validate().is_ok());
    }

    proptest! {
        #[test]
        fn equal_speed_to_size_ratio_gives_equal_frequency(d in 1.0f64..60.0, k in 0.01f64..2.0) {
            let a = drawing_frequency(&SpatioTemporalConfig::new(Shape::Circle, d, k * d)).unwrap();
            let b = drawing_frequency(&SpatioTemporalConfig::new(Shape::Circle, 20.0, k * 20.0)).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn perimeter_is_linear(d in 0.0f64..60.0, s in 0.0f64..1.0) {
            for shape in Shape::ALL {
                let lhs = perimeter(shape, s * d);
                let rhs = s * perimeter(shape, d);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
            }
        }

        #[test]
        fn validate_is_idempotent(
            a in 0.0f64..=1.0,
            f in 0.0f64..1000.0,
            d in 0.0f64..60.0,
            v in 0.0f64..20.0,
            circle in any::<bool>(),
        ) {
            let spatial = if circle && d > 0.0 {
                SpatioTemporalConfig::new(Shape::Circle, d, v)
            } else {
                SpatioTemporalConfig::point()
            };
            let t = Tacton::new(TemporalConfig::am(a, f, 1.0), spatial);
            let once = t.validate();
            if let Ok(valid) = once.clone() {
                prop_assert_eq!(valid.into_inner().validate(), once);
            }
        }
    }
}
