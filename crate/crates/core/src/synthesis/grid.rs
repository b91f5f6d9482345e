use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{SignalBasis, SynthesisError};
use crate::field::FieldModel;
use crate::tacton::ValidatedTacton;
use crate::trajectory::{bounding_box, Point2D};

pub const MIN_GRID_SPACING_MM: f64 = 0.25;
pub const MAX_GRID_SPACING_MM: f64 = 5.0;

/// How each cell's time series is reduced to one value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldAggregate {
    #[default]
    Rms,
    Peak,
}

/// Stimulation intensity over the skin plane, sampled at cell centers.
///
/// `values[row * cols + col]` is the cell centered at
/// `(origin.x + col * spacing, origin.y + row * spacing)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    #[serde(rename = "origin_mm")]
    pub origin: Point2D,
    #[serde(rename = "spacing_mm")]
    pub spacing: f64,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl FieldGrid {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn cell_center(&self, row: usize, col: usize) -> Point2D {
        Point2D::new(
            self.origin.x + col as f64 * self.spacing,
            self.origin.y + row as f64 * self.spacing,
        )
    }

    /// Row and column of the largest value (first one on ties).
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        (best / self.cols, best % self.cols)
    }
}

/// Aggregated skin stimulation over a grid covering the trajectory plus the
/// falloff support. Cells are evaluated in parallel; each cell sums in time
/// order, so results do not depend on the thread count.
pub fn field_grid(
    tacton: &ValidatedTacton,
    model: &FieldModel,
    spacing: f64,
    sample_rate: f64,
    aggregate: FieldAggregate,
) -> Result<FieldGrid, SynthesisError> {
    if !(MIN_GRID_SPACING_MM..=MAX_GRID_SPACING_MM).contains(&spacing) {
        return Err(SynthesisError::SpacingOutOfRange(spacing));
    }
    let basis = SignalBasis::new(tacton, model, sample_rate)?;
    let margin = model.falloff.cutoff_radius;
    let (lo, hi) = bounding_box(&tacton.spatial);
    let lo = Point2D::new(lo.x - margin, lo.y - margin);
    let hi = Point2D::new(hi.x + margin, hi.y + margin);
    // Snap the origin to the spacing lattice so symmetric shapes give symmetric grids.
    let origin = Point2D::new(
        (lo.x / spacing).floor() * spacing,
        (lo.y / spacing).floor() * spacing,
    );
    let cols = ((hi.x - origin.x) / spacing).ceil() as usize + 1;
    let rows = ((hi.y - origin.y) / spacing).ceil() as usize + 1;

    let n = basis.drive.len();
    let values = (0..rows * cols)
        .into_par_iter()
        .map(|cell| {
            let center = Point2D::new(
                origin.x + (cell % cols) as f64 * spacing,
                origin.y + (cell / cols) as f64 * spacing,
            );
            if n == 0 || outside_support(center, lo, hi) {
                return 0.0;
            }
            match aggregate {
                FieldAggregate::Rms => {
                    let mut acc = 0.0;
                    for i in 0..n {
                        let s = basis.sample(model, i, center);
                        acc += s * s;
                    }
                    (acc / n as f64).sqrt()
                }
                FieldAggregate::Peak => (0..n)
                    .map(|i| basis.sample(model, i, center).abs())
                    .fold(0.0, f64::max),
            }
        })
        .collect();

    Ok(FieldGrid {
        origin,
        spacing,
        rows,
        cols,
        values,
    })
}

fn outside_support(p: Point2D, lo: Point2D, hi: Point2D) -> bool {
    p.x < lo.x || p.x > hi.x || p.y < lo.y || p.y > hi.y
}
