use serde::{Deserialize, Serialize};

use super::peaks::{Peak, PeakList};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Peaks at multiples of the AM frequency only.
    PureAMLike,
    /// Peaks at multiples of the drawing frequency only.
    PureSTMLike,
    /// The AM frequency plus sidebands at multiples of the drawing frequency ± AM.
    AMSTMLike,
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sideband {
    None,
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicMatch {
    /// Multiple of the base frequency (0 for the bare AM component of an AM+STM template).
    pub order: u32,
    pub sideband: Sideband,
    pub expected_hz: f64,
    pub frequency_hz: f64,
    pub deviation_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicReport {
    pub base_frequency: f64,
    pub matched: Vec<HarmonicMatch>,
    pub unmatched_peaks: Vec<Peak>,
    pub classification: Classification,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Template {
    AmMultiples { f_am: f64 },
    DrawingMultiples { f_d: f64 },
    Sidebands { f_am: f64, f_d: f64 },
}

impl Template {
    fn classification(self) -> Classification {
        match self {
            Template::AmMultiples { .. } => Classification::PureAMLike,
            Template::DrawingMultiples { .. } => Classification::PureSTMLike,
            Template::Sidebands { .. } => Classification::AMSTMLike,
        }
    }

    fn base_frequency(self) -> f64 {
        match self {
            Template::AmMultiples { f_am } => f_am,
            Template::DrawingMultiples { f_d } | Template::Sidebands { f_d, .. } => f_d,
        }
    }

    /// Closest template member to `f`.
    fn nearest(self, f: f64) -> HarmonicMatch {
        let multiple = |base: f64| {
            let order = (f / base).round().max(1.0);
            (order as u32, Sideband::None, order * base)
        };
        let (order, sideband, expected_hz) = match self {
            Template::AmMultiples { f_am } => multiple(f_am),
            Template::DrawingMultiples { f_d } => multiple(f_d),
            Template::Sidebands { f_am, f_d } => {
                let mut best = (0, Sideband::None, f_am);
                let top = ((f + f_am) / f_d).ceil() as u32 + 1;
                for n in 1..=top {
                    let center = n as f64 * f_d;
                    for (side, expected) in [
                        (Sideband::Lower, (center - f_am).abs()),
                        (Sideband::Upper, center + f_am),
                    ] {
                        if (expected - f).abs() < (best.2 - f).abs() {
                            best = (n, side, expected);
                        }
                    }
                }
                best
            }
        };
        HarmonicMatch {
            order,
            sideband,
            expected_hz,
            frequency_hz: f,
            deviation_hz: (f - expected_hz).abs(),
        }
    }

    fn fit(self, peaks: &PeakList, tol: f64) -> HarmonicReport {
        let mut matched = Vec::new();
        let mut unmatched_peaks = Vec::new();
        for p in &peaks.peaks {
            let m = self.nearest(p.frequency);
            if m.deviation_hz <= tol {
                matched.push(m);
            } else {
                unmatched_peaks.push(*p);
            }
        }
        matched.sort_by(|a, b| a.frequency_hz.total_cmp(&b.frequency_hz));
        let classification = if unmatched_peaks.is_empty() && !matched.is_empty() {
            self.classification()
        } else {
            Classification::Unclassified
        };
        HarmonicReport {
            base_frequency: self.base_frequency(),
            matched,
            unmatched_peaks,
            classification,
        }
    }
}

/// Matches peaks against the AM, drawing-frequency and sideband templates,
/// simplest first, and reports the first template covering every peak.
///
/// A zero `f_am` or `f_d` disables the templates that need it. When nothing
/// fits, the report is `Unclassified` and lists the peaks left over by the
/// template the inputs call for.
pub fn classify(peaks: &PeakList, f_am: f64, f_d: f64, tol: f64) -> HarmonicReport {
    let mut templates = Vec::new();
    if f_am > 0.0 {
        templates.push(Template::AmMultiples { f_am });
    }
    if f_d > 0.0 {
        templates.push(Template::DrawingMultiples { f_d });
    }
    if f_am > 0.0 && f_d > 0.0 {
        templates.push(Template::Sidebands { f_am, f_d });
    }
    let Some(&expected) = templates.last() else {
        return HarmonicReport {
            base_frequency: 0.0,
            matched: Vec::new(),
            unmatched_peaks: peaks.peaks.clone(),
            classification: Classification::Unclassified,
        };
    };
    templates
        .iter()
        .map(|t| t.fit(peaks, tol))
        .find(|r| r.classification != Classification::Unclassified)
        .unwrap_or_else(|| expected.fit(peaks, tol))
}
