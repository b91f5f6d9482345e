//! Batch commands: simulate Tactons, reproduce the measurement grid, and
//! compare simulated spectra with measurement files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use tacton_sim::analysis::{
    compare_measurement, read_measurement, read_metadata, AnalysisError, Classification,
    CompareOptions, ComparisonReport, MeasurementFile, MeasurementMetadata,
};
use tacton_sim::export::{field_grid_json, fmt_sig9, point_series_csv, spectrum_csv, waveform_csv};
use tacton_sim::pipeline::{derived, simulate_point, AnalysisSettings, Derived, PointSimulation};
use tacton_sim::presets::{measurement_grid, STANDARD_POINTS_MM};
use tacton_sim::synthesis::{
    command_signal, field_grid, FieldAggregate, DEFAULT_CARRIER_RATE_HZ, DEFAULT_SKIN_RATE_HZ,
};
use tacton_sim::tacton::{perimeter, Shape, MAX_SIZE_MM};
use tacton_sim::trajectory::sample_trajectory;
use tacton_sim::{FieldModel, Point2D, TactonDocument, ValidatedTacton};

use crate::error::CliError;
use crate::output::{write_atomic, write_json};

/// Everything a `simulate` run needs.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub tactons: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub sample_rate: f64,
    pub grid_spacing: Option<f64>,
    pub grid_aggregate: FieldAggregate,
    pub points: Vec<Point2D>,
    pub settings: AnalysisSettings,
    /// Also write the carrier-resolved command waveform.
    pub command: bool,
    /// Also write the sampled focal-point trajectory.
    pub trajectory: bool,
}

impl RunManifest {
    pub fn new(tactons: Vec<PathBuf>, out_dir: PathBuf) -> Self {
        RunManifest {
            tactons,
            out_dir,
            sample_rate: DEFAULT_SKIN_RATE_HZ,
            grid_spacing: None,
            grid_aggregate: FieldAggregate::Rms,
            points: Vec::new(),
            settings: AnalysisSettings::default(),
            command: false,
            trajectory: false,
        }
    }

    fn check(&self) -> Result<(), CliError> {
        if self.tactons.is_empty() {
            return Err(CliError::Usage("no Tacton file given".into()));
        }
        if self.points.is_empty() && self.grid_spacing.is_none() {
            return Err(CliError::Usage(
                "nothing to simulate: give --points and/or --grid".into(),
            ));
        }
        Ok(())
    }
}

/// Parses `x,y;x,y;...` (millimeters).
pub fn parse_points(text: &str) -> Result<Vec<Point2D>, CliError> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (x, y) = pair
                .split_once(',')
                .ok_or_else(|| CliError::Usage(format!("point {pair:?} is not x,y")))?;
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("bad coordinate {s:?} in {pair:?}")))
            };
            Ok(Point2D::new(num(x)?, num(y)?))
        })
        .collect()
}

pub fn load_tacton(path: &Path) -> Result<(ValidatedTacton, FieldModel), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let doc = TactonDocument::from_json(&text)
        .map_err(|e| CliError::Usage(format!("{}: invalid Tacton JSON: {e}", path.display())))?;
    doc.validate().map_err(|source| CliError::Validation {
        path: path.to_owned(),
        source,
    })
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "tacton".into())
}

#[derive(Debug, Serialize)]
struct PointAnalysis {
    index: usize,
    point_mm: Point2D,
    classification: Classification,
    peak_frequencies_hz: Vec<String>,
}

#[derive(Debug, Serialize)]
struct TactonAnalysis {
    derived: Derived,
    points: Vec<PointAnalysis>,
}

fn point_analysis(index: usize, sim: &PointSimulation) -> PointAnalysis {
    PointAnalysis {
        index,
        point_mm: sim.point,
        classification: sim.report.classification,
        peak_frequencies_hz: sim.peaks.frequencies().into_iter().map(fmt_sig9).collect(),
    }
}

fn write_point_files(
    dir: &Path,
    prefix: &str,
    index: usize,
    sim: &PointSimulation,
) -> Result<Vec<PathBuf>, CliError> {
    let wave = dir.join(format!("{prefix}_p{index}_waveform.csv"));
    let spec = dir.join(format!("{prefix}_p{index}_spectrum.csv"));
    write_atomic(&wave, waveform_csv(&sim.waveform).as_bytes())?;
    write_atomic(&spec, spectrum_csv(&sim.spectrum).as_bytes())?;
    Ok(vec![wave, spec])
}

/// Runs the `simulate` command and returns the files written.
pub fn simulate(manifest: &RunManifest) -> Result<Vec<PathBuf>, CliError> {
    manifest.check()?;
    let mut written = Vec::new();
    for path in &manifest.tactons {
        let (tacton, model) = load_tacton(path)?;
        let stem = file_stem(path);
        let out = &manifest.out_dir;

        let sims = manifest
            .points
            .par_iter()
            .map(|&p| simulate_point(&tacton, &model, p, manifest.sample_rate, manifest.settings))
            .collect::<Result<Vec<_>, _>>()?;
        let mut points = Vec::new();
        for (i, sim) in sims.iter().enumerate() {
            written.extend(write_point_files(out, &stem, i, sim)?);
            points.push(point_analysis(i, sim));
        }

        if let Some(spacing) = manifest.grid_spacing {
            let grid = field_grid(
                &tacton,
                &model,
                spacing,
                manifest.sample_rate,
                manifest.grid_aggregate,
            )?;
            let p = out.join(format!("{stem}_grid.json"));
            write_atomic(&p, field_grid_json(&grid).as_bytes())?;
            written.push(p);
        }
        if manifest.command {
            let w = command_signal(&tacton, DEFAULT_CARRIER_RATE_HZ)?;
            let p = out.join(format!("{stem}_command.csv"));
            write_atomic(&p, waveform_csv(&w).as_bytes())?;
            written.push(p);
        }
        if manifest.trajectory {
            let series = sample_trajectory(
                &tacton.spatial,
                manifest.sample_rate,
                tacton.temporal.total_duration,
            )
            .map_err(|e| CliError::Usage(e.to_string()))?;
            let p = out.join(format!("{stem}_trajectory.csv"));
            write_atomic(&p, point_series_csv(&series).as_bytes())?;
            written.push(p);
        }

        let p = out.join(format!("{stem}_analysis.json"));
        write_json(
            &p,
            &TactonAnalysis {
                derived: derived(&tacton, &model)?,
                points,
            },
        )?;
        written.push(p);
    }
    Ok(written)
}

/// One row of the measurement-grid summary.
#[derive(Debug, Clone, Serialize)]
pub struct GridRow {
    pub name: String,
    pub am_frequency_hz: f64,
    pub size_mm: f64,
    pub speed_mps: f64,
    pub drawing_frequency_hz: Option<f64>,
    pub expected: Classification,
    /// Classification at the on-trajectory standard point.
    pub classification: Classification,
    pub on_trajectory_point_mm: Point2D,
    pub peak_frequencies_hz: Vec<f64>,
    /// Classification at each of the five standard points.
    pub point_classifications: Vec<Classification>,
}

impl GridRow {
    pub fn consistent(&self) -> bool {
        self.classification == self.expected
    }
}

/// Classification a grid cell should produce from its parameters alone.
pub fn expected_classification(am_frequency: f64, size_mm: f64) -> Classification {
    match (am_frequency > 0.0, size_mm > 0.0) {
        (true, false) => Classification::PureAMLike,
        (false, true) => Classification::PureSTMLike,
        (true, true) => Classification::AMSTMLike,
        (false, false) => Classification::Unclassified,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSummary {
    pub sample_rate_hz: f64,
    pub rows: Vec<GridRow>,
}

/// Runs the `paper-grid` command: writes the 15 Tacton files, their
/// simulations at the five standard points and a classification summary.
pub fn paper_grid(
    out_dir: &Path,
    sample_rate: f64,
    settings: AnalysisSettings,
    grid_spacing: Option<f64>,
) -> Result<GridSummary, CliError> {
    let model = FieldModel::default();
    let cells = measurement_grid();
    let tacton_dir = out_dir.join("tactons");
    let sim_dir = out_dir.join("sim");

    let rows = cells
        .par_iter()
        .map(|cell| -> Result<GridRow, CliError> {
            let doc = TactonDocument::from(cell.tacton.clone());
            let mut json = doc.to_json_pretty();
            json.push('\n');
            write_atomic(
                &tacton_dir.join(format!("{}.json", cell.name)),
                json.as_bytes(),
            )?;

            let tacton = cell
                .tacton
                .clone()
                .validate()
                .map_err(|source| CliError::Validation {
                    path: PathBuf::from(&cell.name),
                    source,
                })?;
            let on_track = cell.on_trajectory_point();
            let mut point_classifications = Vec::new();
            let mut on_track_sim = None;
            for (i, &p) in STANDARD_POINTS_MM.iter().enumerate() {
                let sim = simulate_point(&tacton, &model, p, sample_rate, settings)?;
                write_point_files(&sim_dir, &cell.name, i, &sim)?;
                point_classifications.push(sim.report.classification);
                if p == on_track {
                    on_track_sim = Some(sim);
                }
            }
            let sim = on_track_sim.expect("on-trajectory point is a standard point");
            if let Some(spacing) = grid_spacing {
                let grid = field_grid(&tacton, &model, spacing, sample_rate, FieldAggregate::Rms)?;
                write_atomic(
                    &sim_dir.join(format!("{}_grid.json", cell.name)),
                    field_grid_json(&grid).as_bytes(),
                )?;
            }
            Ok(GridRow {
                name: cell.name.clone(),
                am_frequency_hz: cell.am_frequency,
                size_mm: cell.size_mm,
                speed_mps: cell.speed_mps,
                drawing_frequency_hz: tacton.drawing_frequency(),
                expected: expected_classification(cell.am_frequency, cell.size_mm),
                classification: sim.report.classification,
                on_trajectory_point_mm: on_track,
                peak_frequencies_hz: sim.peaks.frequencies(),
                point_classifications,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let summary = GridSummary {
        sample_rate_hz: sample_rate,
        rows,
    };
    write_json(&out_dir.join("summary.json"), &summary)?;
    write_atomic(
        &out_dir.join("summary.md"),
        grid_markdown(&summary).as_bytes(),
    )?;
    Ok(summary)
}

fn grid_markdown(summary: &GridSummary) -> String {
    let mut md = String::from(
        "| Tacton | f_AM (Hz) | d (mm) | v (m/s) | f_d (Hz) | expected | on-trajectory | consistent | peaks (Hz) |\n\
         |---|---|---|---|---|---|---|---|---|\n",
    );
    for r in &summary.rows {
        let f_d = r.drawing_frequency_hz.map_or_else(|| "-".into(), fmt_sig9);
        let peaks: Vec<String> = r.peak_frequencies_hz.iter().map(|&f| fmt_sig9(f)).collect();
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {} | {:?} | {:?} | {} | {} |",
            r.name,
            fmt_sig9(r.am_frequency_hz),
            fmt_sig9(r.size_mm),
            fmt_sig9(r.speed_mps),
            f_d,
            r.expected,
            r.classification,
            if r.consistent() { "yes" } else { "NO" },
            peaks.join(" ")
        );
    }
    md
}

fn csv_stems(dir: &Path) -> Result<BTreeMap<String, PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            out.insert(file_stem(&path), path);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    pub stem: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metadata: Option<MeasurementMetadata>,
    pub report: ComparisonReport,
}

/// Runs the `compare` command: one report per measurement CSV that has a
/// simulation CSV with the same stem, plus an aggregate markdown table.
pub fn compare(
    sim_dir: &Path,
    measured_dir: &Path,
    out_dir: &Path,
    options: &CompareOptions,
) -> Result<Vec<PairReport>, CliError> {
    let measured = csv_stems(measured_dir)?;
    if measured.is_empty() {
        return Err(CliError::UnmatchedStems(vec![format!(
            "(no measurement CSV in {})",
            measured_dir.display()
        )]));
    }
    let sims = csv_stems(sim_dir)?;
    let missing: Vec<String> = measured
        .keys()
        .filter(|k| !sims.contains_key(*k))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(CliError::UnmatchedStems(missing));
    }

    let load = |path: &Path| -> Result<MeasurementFile, String> {
        read_measurement(path).map_err(|e| format!("{}: {e}", path.display()))
    };
    let results: Vec<Result<PairReport, String>> = measured
        .par_iter()
        .map(|(stem, meas_path)| {
            let sim = load(&sims[stem])?;
            let meas = load(meas_path)?;
            let sim_spectrum = sim
                .to_spectrum()
                .map_err(|e| format!("{}: {e}", sims[stem].display()))?;
            let sidecar = meas_path.with_extension("json");
            let metadata = if sidecar.exists() {
                Some(read_metadata(&sidecar).map_err(|e| format!("{}: {e}", sidecar.display()))?)
            } else {
                None
            };
            let report = compare_measurement(&sim_spectrum, &meas, options)
                .map_err(|e: AnalysisError| format!("{stem}: {e}"))?;
            Ok(PairReport {
                stem: stem.clone(),
                metadata,
                report,
            })
        })
        .collect();

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(r) => reports.push(r),
            Err(e) => failures.push(e),
        }
    }
    if !failures.is_empty() {
        return Err(CliError::Parse(failures));
    }

    for r in &reports {
        write_json(&out_dir.join(format!("{}.comparison.json", r.stem)), r)?;
    }
    write_atomic(
        &out_dir.join("comparison.md"),
        compare_markdown(&reports).as_bytes(),
    )?;
    Ok(reports)
}

fn compare_markdown(reports: &[PairReport]) -> String {
    let mut md = String::from(
        "| stem | explained | shared | sim-only (Hz) | measurement-only (Hz) |\n|---|---|---|---|---|\n",
    );
    let list = |peaks: &[tacton_sim::analysis::RelativePeak]| {
        peaks
            .iter()
            .map(|p| fmt_sig9(p.frequency_hz))
            .collect::<Vec<_>>()
            .join(" ")
    };
    for r in reports {
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {} |",
            r.stem,
            fmt_sig9(r.report.explained_fraction),
            r.report.shared.len(),
            list(&r.report.sim_only),
            list(&r.report.measurement_only)
        );
    }
    md
}

/// Static description of one trajectory shape.
#[derive(Debug, Clone, Serialize)]
pub struct ShapeInfo {
    pub name: &'static str,
    pub size_meaning: &'static str,
    pub perimeter_formula: &'static str,
    pub min_size_mm: f64,
    pub max_size_mm: f64,
    /// Perimeter of a 1 mm shape, i.e. the perimeter per mm of size.
    pub perimeter_per_mm: f64,
}

pub fn shape_catalog() -> Vec<ShapeInfo> {
    Shape::ALL
        .into_iter()
        .map(|s| {
            let fixed = s == Shape::Point;
            ShapeInfo {
                name: s.name(),
                size_meaning: s.size_meaning(),
                perimeter_formula: s.perimeter_formula(),
                min_size_mm: 0.0,
                max_size_mm: if fixed { 0.0 } else { MAX_SIZE_MM },
                perimeter_per_mm: perimeter(s, 1.0),
            }
        })
        .collect()
}
