//! Vibrometer measurement files and simulation-versus-measurement comparison.
//!
//! A measurement is a CSV with either a `t_s,displacement_um` time series or
//! a pre-computed `f_hz,magnitude` spectrum. Simulated waveform exports
//! (`t_s,p`) are accepted as time series too, so simulation output can be
//! compared with itself. Displacements are never calibrated against the
//! normalized simulation units; only peak frequencies and relative
//! magnitudes are compared.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::peaks::{detect_peaks, Peak};
use super::{default_tolerance, AnalysisError, DEFAULT_FLOOR_DB};
use crate::synthesis::{spectrum, Spectrum, Waveform, WaveformKind};
use crate::tacton::TactonDocument;

/// Mains frequency excluded from comparisons by default, with its harmonics.
pub const DEFAULT_NOTCH_HZ: f64 = 60.0;

#[derive(Debug, Clone, PartialEq)]
pub enum MeasurementFile {
    TimeSeries { sample_rate: f64, samples: Vec<f64> },
    Spectrum(Spectrum),
}

impl MeasurementFile {
    pub fn to_spectrum(&self) -> Result<Spectrum, AnalysisError> {
        match self {
            MeasurementFile::Spectrum(s) => Ok(s.clone()),
            MeasurementFile::TimeSeries {
                sample_rate,
                samples,
            } => spectrum(&Waveform {
                sample_rate: *sample_rate,
                samples: samples.clone(),
                kind: WaveformKind::SkinPoint,
            })
            .map_err(|_| AnalysisError::EmptySpectrum),
        }
    }
}

/// Sidecar `<stem>.json` next to a measurement CSV.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasurementMetadata {
    #[serde(default)]
    pub tacton: Option<TactonDocument>,
    #[serde(default)]
    pub skin_point_mm: Option<(f64, f64)>,
    #[serde(default)]
    pub notes: Option<String>,
}

#[derive(Clone, Copy)]
enum Layout {
    Time,
    Frequency,
}

fn header_layout(first: &str, second: &str) -> Result<Layout, AnalysisError> {
    let mismatch = |col: &str, want: &str| {
        Err(AnalysisError::MismatchedUnits(format!(
            "column {col:?} (expected {want:?})"
        )))
    };
    let layout = match first {
        "t_s" => Layout::Time,
        "f_hz" => Layout::Frequency,
        c if c.starts_with("t_") => return mismatch(c, "t_s"),
        c if c.starts_with("f_") => return mismatch(c, "f_hz"),
        c => {
            return Err(AnalysisError::Parse {
                line: 1,
                message: format!("unrecognized header column {c:?}"),
            })
        }
    };
    match (layout, second) {
        (Layout::Time, "displacement_um" | "p") | (Layout::Frequency, "magnitude") => Ok(layout),
        (Layout::Time, c) if c.starts_with("displacement_") => mismatch(c, "displacement_um"),
        (_, c) => Err(AnalysisError::Parse {
            line: 1,
            message: format!("unrecognized header column {c:?}"),
        }),
    }
}

/// Parses a measurement (or exported simulation) CSV.
pub fn parse_measurement(text: &str) -> Result<MeasurementFile, AnalysisError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        None => {
            return Err(AnalysisError::Parse {
                line: 1,
                message: "empty file".into(),
            })
        }
        Some(r) => r.map_err(|e| csv_error(&e, 1))?,
    };
    let header_line = header.position().map_or(1, |p| p.line() as usize);
    if header.len() != 2 {
        return Err(AnalysisError::Parse {
            line: header_line,
            message: format!("expected 2 header columns, found {}", header.len()),
        });
    }
    let layout = header_layout(&header[0], &header[1])?;

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for record in records {
        let record = record.map_err(|e| csv_error(&e, header_line))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 2 {
            return Err(AnalysisError::Parse {
                line,
                message: format!("expected 2 columns, found {}", record.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| AnalysisError::Parse {
                    line,
                    message: format!("not a finite number: {s:?}"),
                })
        };
        xs.push((parse(&record[0])?, line));
        ys.push(parse(&record[1])?);
    }
    if xs.len() < 2 {
        return Err(AnalysisError::Parse {
            line: header_line + xs.len() + 1,
            message: "need at least 2 data rows".into(),
        });
    }

    let step = uniform_step(&xs)?;
    match layout {
        Layout::Time => Ok(MeasurementFile::TimeSeries {
            sample_rate: 1.0 / step,
            samples: ys,
        }),
        Layout::Frequency => {
            if ys.iter().any(|&m| m < 0.0) {
                return Err(AnalysisError::Parse {
                    line: header_line,
                    message: "negative magnitude".into(),
                });
            }
            Ok(MeasurementFile::Spectrum(Spectrum {
                frequencies: xs.iter().map(|x| x.0).collect(),
                magnitudes: ys,
            }))
        }
    }
}

fn csv_error(e: &csv::Error, fallback_line: usize) -> AnalysisError {
    AnalysisError::Parse {
        line: e.position().map_or(fallback_line, |p| p.line() as usize),
        message: e.to_string(),
    }
}

/// Checks that the abscissae are evenly spaced and returns the spacing.
fn uniform_step(xs: &[(f64, usize)]) -> Result<f64, AnalysisError> {
    let n = xs.len();
    let step = (xs[n - 1].0 - xs[0].0) / (n - 1) as f64;
    if step.is_nan() || step <= 0.0 {
        return Err(AnalysisError::Parse {
            line: xs[1].1,
            message: "first column must increase".into(),
        });
    }
    for (i, &(x, line)) in xs.iter().enumerate() {
        let expected = xs[0].0 + i as f64 * step;
        if (x - expected).abs() > 1e-3 * step {
            return Err(AnalysisError::Parse {
                line,
                message: format!("non-uniform spacing: {x} (expected {expected})"),
            });
        }
    }
    Ok(step)
}

pub fn read_measurement(path: &Path) -> Result<MeasurementFile, AnalysisError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AnalysisError::Io(format!("{}: {e}", path.display())))?;
    parse_measurement(&text)
}

pub fn read_metadata(path: &Path) -> Result<MeasurementMetadata, AnalysisError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AnalysisError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| AnalysisError::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    /// Matching tolerance in Hz; raised to 2 bins of the coarser spectrum when smaller.
    pub tol_hz: Option<f64>,
    pub floor_db: f64,
    /// Base frequencies whose multiples are excluded from both sides.
    pub notches: Vec<f64>,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            tol_hz: None,
            floor_db: DEFAULT_FLOOR_DB,
            notches: vec![DEFAULT_NOTCH_HZ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativePeak {
    pub frequency_hz: f64,
    /// Magnitude relative to the strongest compared peak on the same side.
    pub relative_magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharedPeak {
    pub sim: RelativePeak,
    pub measured: RelativePeak,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub tolerance_hz: f64,
    pub floor_db: f64,
    pub shared: Vec<SharedPeak>,
    pub sim_only: Vec<RelativePeak>,
    pub measurement_only: Vec<RelativePeak>,
    /// Peaks dropped on either side because they sit on a notch frequency.
    pub notched_hz: Vec<f64>,
    /// Fraction of measured peaks that have a simulated peak within tolerance.
    pub explained_fraction: f64,
}

impl ComparisonReport {
    pub fn is_perfect(&self) -> bool {
        self.sim_only.is_empty() && self.measurement_only.is_empty()
    }
}

fn near_notch(f: f64, notches: &[f64], tol: f64) -> bool {
    notches.iter().filter(|&&b| b > 0.0).any(|&b| {
        let n = (f / b).round().max(1.0);
        (f - n * b).abs() <= tol
    })
}

/// Compares peak structure of a simulated spectrum with a measurement.
pub fn compare_measurement(
    sim: &Spectrum,
    measured: &MeasurementFile,
    options: &CompareOptions,
) -> Result<ComparisonReport, AnalysisError> {
    let measured = measured.to_spectrum()?;
    let coarse_bin = sim.bin_width().max(measured.bin_width());
    let tol = match options.tol_hz {
        Some(t) => t.max(2.0 * coarse_bin),
        None => default_tolerance(coarse_bin),
    };

    let mut notched = Vec::new();
    let mut keep = |peaks: Vec<Peak>| -> Vec<Peak> {
        peaks
            .into_iter()
            .filter(|p| {
                let hit = near_notch(p.frequency, &options.notches, tol);
                if hit {
                    notched.push(p.frequency);
                }
                !hit
            })
            .collect()
    };
    let sim_peaks = keep(detect_peaks(sim, options.floor_db)?.peaks);
    let meas_peaks = keep(detect_peaks(&measured, options.floor_db)?.peaks);
    notched.sort_by(f64::total_cmp);
    notched.dedup();

    let relative = |peaks: &[Peak]| {
        let top = peaks.iter().map(|p| p.magnitude).fold(0.0, f64::max);
        move |p: &Peak| RelativePeak {
            frequency_hz: p.frequency,
            relative_magnitude: if top > 0.0 { p.magnitude / top } else { 0.0 },
        }
    };
    let rel_sim = relative(&sim_peaks);
    let rel_meas = relative(&meas_peaks);
    let nearest = |f: f64, pool: &[Peak]| {
        pool.iter()
            .filter(|p| (p.frequency - f).abs() <= tol)
            .min_by(|a, b| (a.frequency - f).abs().total_cmp(&(b.frequency - f).abs()))
            .copied()
    };

    let mut shared = Vec::new();
    let mut measurement_only = Vec::new();
    for m in &meas_peaks {
        match nearest(m.frequency, &sim_peaks) {
            Some(s) => shared.push(SharedPeak {
                sim: rel_sim(&s),
                measured: rel_meas(m),
            }),
            None => measurement_only.push(rel_meas(m)),
        }
    }
    let sim_only: Vec<RelativePeak> = sim_peaks
        .iter()
        .filter(|s| nearest(s.frequency, &meas_peaks).is_none())
        .map(&rel_sim)
        .collect();

    let by_freq = |a: &RelativePeak, b: &RelativePeak| a.frequency_hz.total_cmp(&b.frequency_hz);
    shared.sort_by(|a, b| by_freq(&a.measured, &b.measured));
    measurement_only.sort_by(by_freq);
    let mut sim_only = sim_only;
    sim_only.sort_by(by_freq);

    let explained_fraction = if meas_peaks.is_empty() {
        1.0
    } else {
        shared.len() as f64 / meas_peaks.len() as f64
    };
    Ok(ComparisonReport {
        tolerance_hz: tol,
        floor_db: options.floor_db,
        shared,
        sim_only,
        measurement_only,
        notched_hz: notched,
        explained_fraction,
    })
}
