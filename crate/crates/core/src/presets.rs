//! The 15-Tacton measurement set: AM frequency crossed with circle
//! size/speed pairs of equal drawing frequency, plus the five standard
//! skin points.

use crate::tacton::{Shape, SpatioTemporalConfig, Tacton, TemporalConfig};
use crate::trajectory::Point2D;

pub const GRID_AM_FREQUENCIES_HZ: [f64; 4] = [0.0, 80.0, 140.0, 210.0];
/// (size mm, speed m/s); (0, 0) is a static point.
pub const GRID_SIZE_SPEED: [(f64, f64); 4] = [(0.0, 0.0), (10.0, 6.0), (20.0, 12.0), (30.0, 18.0)];
pub const GRID_DURATION_S: f64 = 1.0;
pub const GRID_AMPLITUDE: f64 = 1.0;

/// Measurement points on the horizontal axis, 5 mm apart.
pub const STANDARD_POINTS_MM: [Point2D; 5] = [
    Point2D::new(0.0, 0.0),
    Point2D::new(5.0, 0.0),
    Point2D::new(10.0, 0.0),
    Point2D::new(15.0, 0.0),
    Point2D::new(20.0, 0.0),
];

#[derive(Debug, Clone, PartialEq)]
pub struct GridTacton {
    pub name: String,
    pub am_frequency: f64,
    pub size_mm: f64,
    pub speed_mps: f64,
    pub tacton: Tacton,
}

impl GridTacton {
    /// The standard point lying on the trajectory (the focus itself for a static point).
    pub fn on_trajectory_point(&self) -> Point2D {
        Point2D::new(self.size_mm / 2.0, 0.0)
    }
}

/// All valid cells of the grid, in (AM frequency, size) order. The static
/// point without AM stimulates nothing and is left out.
pub fn measurement_grid() -> Vec<GridTacton> {
    let mut out = Vec::with_capacity(15);
    for &f_am in &GRID_AM_FREQUENCIES_HZ {
        for &(d, v) in &GRID_SIZE_SPEED {
            if f_am == 0.0 && d == 0.0 {
                continue;
            }
            let spatial = if d == 0.0 {
                SpatioTemporalConfig::point()
            } else {
                SpatioTemporalConfig::new(Shape::Circle, d, v)
            };
            out.push(GridTacton {
                name: format!("am{f_am}_d{d}_v{v}"),
                am_frequency: f_am,
                size_mm: d,
                speed_mps: v,
                tacton: Tacton::new(
                    TemporalConfig::am(GRID_AMPLITUDE, f_am, GRID_DURATION_S),
                    spatial,
                ),
            });
        }
    }
    out
}
