use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::synthesis::Spectrum;

/// Non-DC content below this fraction of the overall maximum is treated as
/// numerical noise of a constant signal.
const NOISE_RATIO: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    #[serde(rename = "frequency_hz")]
    pub frequency: f64,
    pub magnitude: f64,
    pub bin: usize,
}

/// Spectral peaks sorted by descending magnitude.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PeakList {
    pub peaks: Vec<Peak>,
}

impl PeakList {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn strongest(&self) -> Option<&Peak> {
        self.peaks.first()
    }

    /// Peak frequencies in ascending order.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut f: Vec<f64> = self.peaks.iter().map(|p| p.frequency).collect();
        f.sort_by(f64::total_cmp);
        f
    }
}

/// Local maxima above `floor_db` (relative to the largest non-DC bin),
/// excluding DC, with peaks in adjacent bins merged into the larger one.
pub fn detect_peaks(s: &Spectrum, floor_db: f64) -> Result<PeakList, AnalysisError> {
    if s.is_empty() {
        return Err(AnalysisError::EmptySpectrum);
    }
    if floor_db.is_nan() || floor_db >= 0.0 {
        return Err(AnalysisError::InvalidFloor(floor_db));
    }
    let m = &s.magnitudes;
    let overall = m.iter().copied().fold(0.0, f64::max);
    let reference = m[1..].iter().copied().fold(0.0, f64::max);
    if reference <= 0.0 || reference <= NOISE_RATIO * overall {
        return Ok(PeakList::default());
    }
    let threshold = reference * 10f64.powf(floor_db / 20.0);

    let mut kept: Vec<Peak> = Vec::new();
    for k in 1..m.len() {
        let v = m[k];
        let left = m[k - 1];
        let right = m.get(k + 1).copied().unwrap_or(f64::NEG_INFINITY);
        if v <= threshold || v < left || v < right {
            continue;
        }
        let peak = Peak {
            frequency: s.frequencies[k],
            magnitude: v,
            bin: k,
        };
        match kept.last_mut() {
            Some(prev) if k - prev.bin <= 1 => {
                if v > prev.magnitude {
                    *prev = peak;
                }
            }
            _ => kept.push(peak),
        }
    }
    kept.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude).then(a.bin.cmp(&b.bin)));
    Ok(PeakList { peaks: kept })
}
