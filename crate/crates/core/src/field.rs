//! Spatial intensity of a single focal point: radial falloff around the
//! focus and relative intensity versus device height.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tacton::{ValidationError, DEFAULT_HEIGHT_MM, MAX_HEIGHT_MM};
use crate::trajectory::Point2D;

/// Default focal spot width: one 40 kHz wavelength in air.
pub const DEFAULT_FWHM_MM: f64 = 8.6;
/// Default support radius of the focal spot.
pub const DEFAULT_CUTOFF_MM: f64 = 10.0;
/// Half-width of the default quadratic height curve (gain reaches 0 this far from the peak).
pub const DEFAULT_HEIGHT_HALF_WIDTH_MM: f64 = 280.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum FieldError {
    #[error("negative distance {0} mm")]
    NegativeDistance(f64),
    #[error("height {0} mm out of range (0, 600]")]
    HeightOutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FalloffKind {
    Gaussian,
    RaisedCosine,
    Tabulated,
}

/// Normalized intensity S(D) as a function of distance from the focal point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalloffProfile {
    pub kind: FalloffKind,
    #[serde(rename = "fwhm_mm", default = "default_fwhm")]
    pub fwhm: f64,
    #[serde(rename = "cutoff_radius_mm", default = "default_cutoff")]
    pub cutoff_radius: f64,
    /// (distance mm, value) pairs for `Tabulated`, sorted by distance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<(f64, f64)>>,
}

fn default_fwhm() -> f64 {
    DEFAULT_FWHM_MM
}

fn default_cutoff() -> f64 {
    DEFAULT_CUTOFF_MM
}

impl Default for FalloffProfile {
    fn default() -> Self {
        FalloffProfile::gaussian(DEFAULT_FWHM_MM, DEFAULT_CUTOFF_MM)
    }
}

impl FalloffProfile {
    pub fn gaussian(fwhm: f64, cutoff_radius: f64) -> Self {
        FalloffProfile {
            kind: FalloffKind::Gaussian,
            fwhm,
            cutoff_radius,
            table: None,
        }
    }

    pub fn raised_cosine(fwhm: f64, cutoff_radius: f64) -> Self {
        FalloffProfile {
            kind: FalloffKind::RaisedCosine,
            fwhm,
            cutoff_radius,
            table: None,
        }
    }

    pub fn tabulated(table: Vec<(f64, f64)>, cutoff_radius: f64) -> Self {
        let fwhm = half_max_distance(&table).map_or(cutoff_radius, |d| 2.0 * d);
        FalloffProfile {
            kind: FalloffKind::Tabulated,
            fwhm,
            cutoff_radius,
            table: Some(table),
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        if !(self.cutoff_radius > 0.0 && self.cutoff_radius.is_finite()) {
            return Err(ValidationError::out_of_range(
                "model.falloff.cutoff_radius_mm",
                self.cutoff_radius,
                "> 0",
            ));
        }
        if self.kind != FalloffKind::Tabulated
            && !(self.fwhm > 0.0 && self.fwhm < 2.0 * self.cutoff_radius)
        {
            return Err(ValidationError::out_of_range(
                "model.falloff.fwhm_mm",
                self.fwhm,
                "(0, 2*cutoff_radius)",
            ));
        }
        if self.kind == FalloffKind::Tabulated {
            let table = self.table.as_deref().unwrap_or_default();
            validate_table(table, "model.falloff.table", |prev, cur| cur.1 <= prev.1)?;
            if table[0] != (0.0, 1.0) {
                return Err(ValidationError::out_of_range(
                    "model.falloff.table[0]",
                    table[0].1,
                    "first entry (0, 1)",
                ));
            }
        }
        Ok(())
    }

    fn sigma(&self) -> f64 {
        self.fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt())
    }

    /// S(D) without the sign check; `distance` must be non-negative.
    #[inline]
    pub(crate) fn eval(&self, distance: f64) -> f64 {
        if distance >= self.cutoff_radius {
            return 0.0;
        }
        match self.kind {
            FalloffKind::Gaussian => {
                let sigma = self.sigma();
                (-(distance * distance) / (2.0 * sigma * sigma)).exp()
            }
            // Half maximum at fwhm/2, zero from fwhm outward.
            FalloffKind::RaisedCosine => {
                if distance >= self.fwhm {
                    0.0
                } else {
                    0.5 * (1.0 + (std::f64::consts::PI * distance / self.fwhm).cos())
                }
            }
            FalloffKind::Tabulated => {
                interpolate(self.table.as_deref().unwrap_or_default(), distance)
            }
        }
    }
}

fn validate_table(
    table: &[(f64, f64)],
    field: &'static str,
    ordered: impl Fn((f64, f64), (f64, f64)) -> bool,
) -> Result<(), ValidationError> {
    if table.len() < 2 {
        return Err(ValidationError::out_of_range(
            field,
            table.len() as f64,
            "at least 2 entries",
        ));
    }
    for (i, &(x, v)) in table.iter().enumerate() {
        if !(x.is_finite() && (0.0..=1.0).contains(&v)) {
            return Err(ValidationError::out_of_range(field, v, "values in [0, 1]"));
        }
        if i > 0 {
            let prev = table[i - 1];
            if x <= prev.0 {
                return Err(ValidationError::out_of_range(
                    field,
                    x,
                    "strictly increasing abscissae",
                ));
            }
            if !ordered(prev, (x, v)) {
                return Err(ValidationError::out_of_range(field, v, "monotone values"));
            }
        }
    }
    Ok(())
}

/// Piecewise-linear interpolation, holding the end values outside the table.
fn interpolate(table: &[(f64, f64)], x: f64) -> f64 {
    let Some(&(x0, v0)) = table.first() else {
        return 0.0;
    };
    if x <= x0 {
        return v0;
    }
    for w in table.windows(2) {
        let ((xa, va), (xb, vb)) = (w[0], w[1]);
        if x <= xb {
            return va + (vb - va) * (x - xa) / (xb - xa);
        }
    }
    table[table.len() - 1].1
}

fn half_max_distance(table: &[(f64, f64)]) -> Option<f64> {
    table.windows(2).find_map(|w| {
        let ((xa, va), (xb, vb)) = (w[0], w[1]);
        (va >= 0.5 && vb <= 0.5 && va != vb).then(|| xa + (va - 0.5) / (va - vb) * (xb - xa))
    })
}

/// S(D): normalized intensity at `distance` mm from the focal point.
pub fn falloff(distance: f64, profile: &FalloffProfile) -> Result<f64, FieldError> {
    if distance < 0.0 || distance.is_nan() {
        return Err(FieldError::NegativeDistance(distance));
    }
    Ok(profile.eval(distance))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeightCurve {
    /// `1 - ((h - peak) / half_width)^2`, clamped to [0, 1].
    Quadratic {
        #[serde(rename = "peak_height_mm", default = "default_peak")]
        peak_height: f64,
        #[serde(rename = "half_width_mm", default = "default_half_width")]
        half_width: f64,
    },
    /// Measured (height mm, gain) pairs, interpolated linearly.
    Tabulated { table: Vec<(f64, f64)> },
}

fn default_peak() -> f64 {
    DEFAULT_HEIGHT_MM
}

fn default_half_width() -> f64 {
    DEFAULT_HEIGHT_HALF_WIDTH_MM
}

impl Default for HeightCurve {
    fn default() -> Self {
        HeightCurve::Quadratic {
            peak_height: DEFAULT_HEIGHT_MM,
            half_width: DEFAULT_HEIGHT_HALF_WIDTH_MM,
        }
    }
}

impl HeightCurve {
    pub fn peak_height(&self) -> f64 {
        match self {
            HeightCurve::Quadratic { peak_height, .. } => *peak_height,
            HeightCurve::Tabulated { table } => {
                table
                    .iter()
                    .copied()
                    .fold((f64::NAN, f64::NEG_INFINITY), |best, (h, g)| {
                        if g > best.1 {
                            (h, g)
                        } else {
                            best
                        }
                    })
                    .0
            }
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        match self {
            HeightCurve::Quadratic {
                peak_height,
                half_width,
            } => {
                if !(*peak_height > 0.0 && *peak_height <= MAX_HEIGHT_MM) {
                    return Err(ValidationError::out_of_range(
                        "model.height_curve.peak_height_mm",
                        *peak_height,
                        "(0, 600]",
                    ));
                }
                if !(*half_width > 0.0 && half_width.is_finite()) {
                    return Err(ValidationError::out_of_range(
                        "model.height_curve.half_width_mm",
                        *half_width,
                        "> 0",
                    ));
                }
            }
            HeightCurve::Tabulated { table } => {
                validate_table(table, "model.height_curve.table", |_, _| true)?;
                let peak = table.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
                if peak != 1.0 {
                    return Err(ValidationError::out_of_range(
                        "model.height_curve.table",
                        peak,
                        "maximum gain exactly 1",
                    ));
                }
                let top = table.iter().position(|e| e.1 == 1.0).unwrap_or(0);
                let rising = table[..=top].windows(2).all(|w| w[1].1 >= w[0].1);
                let falling = table[top..].windows(2).all(|w| w[1].1 <= w[0].1);
                if !(rising && falling) {
                    return Err(ValidationError::out_of_range(
                        "model.height_curve.table",
                        peak,
                        "single-peaked gain",
                    ));
                }
            }
        }
        Ok(())
    }

    #[inline]
    fn eval(&self, height: f64) -> f64 {
        match self {
            HeightCurve::Quadratic {
                peak_height,
                half_width,
            } => {
                let u = (height - peak_height) / half_width;
                (1.0 - u * u).clamp(0.0, 1.0)
            }
            HeightCurve::Tabulated { table } => interpolate(table, height),
        }
    }
}

/// Relative intensity of the commanded amplitude at `height` mm above the device.
pub fn height_gain(height: f64, curve: &HeightCurve) -> Result<f64, FieldError> {
    if !(height > 0.0 && height <= MAX_HEIGHT_MM) {
        return Err(FieldError::HeightOutOfRange(height));
    }
    Ok(curve.eval(height))
}

/// Falloff profile and height curve used for a simulation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldModel {
    #[serde(default)]
    pub falloff: FalloffProfile,
    #[serde(default)]
    pub height_curve: HeightCurve,
}

impl FieldModel {
    pub fn validate(&self) -> Result<(), ValidationError> {
        self.falloff.validate()?;
        self.height_curve.validate()
    }
}

/// A(x(t), a) extended by the height gain: amplitude · gain(h) · S(|focal − skin|).
pub fn intensity_at(
    focal: Point2D,
    skin: Point2D,
    amplitude: f64,
    height: f64,
    profile: &FalloffProfile,
    curve: &HeightCurve,
) -> Result<f64, FieldError> {
    let gain = height_gain(height, curve)?;
    let s = falloff(focal.distance(skin), profile)?;
    Ok(amplitude * gain * s)
}
