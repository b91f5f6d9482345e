//! Focal-point position on the skin plane as a function of time.
//!
//! Every moving shape is traversed at constant speed by arc length. Closed
//! polygons run counterclockwise from the vertex with the largest x (ties
//! broken by the largest y), centroid at the origin. The horizontal line is
//! traversed out and back starting from its right end.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tacton::{drawing_frequency, Shape, SpatioTemporalConfig};

/// Fewest samples per trajectory revolution before sampling is rejected as aliased.
pub const MIN_SAMPLES_PER_REVOLUTION: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2D { x, y }
    }

    pub fn distance(self, other: Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    fn lerp(self, other: Point2D, s: f64) -> Point2D {
        Point2D::new(
            self.x + (other.x - self.x) * s,
            self.y + (other.y - self.y) * s,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSeries {
    pub sample_rate: f64,
    pub points: Vec<Point2D>,
}

impl PointSeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn time_at(&self, index: usize) -> f64 {
        index as f64 / self.sample_rate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum TrajectoryError {
    #[error("sample rate {sample_rate} Hz gives {per_revolution:.2} samples per revolution (need at least 8)")]
    RateTooLow {
        sample_rate: f64,
        per_revolution: f64,
    },
    #[error("invalid sampling request: sample rate {sample_rate} Hz, duration {duration} s")]
    InvalidSampling { sample_rate: f64, duration: f64 },
}

/// Polygon vertices in traversal order, starting vertex first.
fn polygon_vertices(shape: Shape, side: f64) -> Vec<Point2D> {
    let h = side / 2.0;
    match shape {
        Shape::Square => vec![
            Point2D::new(h, h),
            Point2D::new(-h, h),
            Point2D::new(-h, -h),
            Point2D::new(h, -h),
        ],
        Shape::RegularTriangle => {
            // Apex up; circumradius side/sqrt(3), base at -circumradius/2.
            let r = side / 3f64.sqrt();
            vec![
                Point2D::new(h, -r / 2.0),
                Point2D::new(0.0, r),
                Point2D::new(-h, -r / 2.0),
            ]
        }
        _ => Vec::new(),
    }
}

/// Fraction of the current revolution completed at time `t`, in [0, 1).
fn revolution_fraction(spatial: &SpatioTemporalConfig, t: f64) -> f64 {
    let f_d = drawing_frequency(spatial).unwrap_or(0.0);
    let cycles = f_d * t + spatial.start_phase;
    cycles - cycles.floor()
}

/// Position at arc-length fraction `frac` of one completion.
fn position_at_fraction(shape: Shape, size: f64, frac: f64) -> Point2D {
    match shape {
        Shape::Point => Point2D::ORIGIN,
        Shape::Circle => {
            let angle = 2.0 * PI * frac;
            Point2D::new(size / 2.0 * angle.cos(), size / 2.0 * angle.sin())
        }
        Shape::HorizontalLine => {
            let s = frac * 2.0 * size;
            let x = if s <= size {
                size / 2.0 - s
            } else {
                -size / 2.0 + (s - size)
            };
            Point2D::new(x, 0.0)
        }
        Shape::RegularTriangle | Shape::Square => {
            let vertices = polygon_vertices(shape, size);
            let n = vertices.len();
            let s = frac * n as f64;
            let edge = (s.floor() as usize).min(n - 1);
            let along = s - edge as f64;
            vertices[edge].lerp(vertices[(edge + 1) % n], along)
        }
    }
}

/// Focal-point position at time `t` (seconds).
pub fn position_at(spatial: &SpatioTemporalConfig, t: f64) -> Point2D {
    if spatial.shape == Shape::Point {
        return Point2D::ORIGIN;
    }
    let frac = revolution_fraction(spatial, t);
    position_at_fraction(spatial.shape, spatial.size, frac)
}

/// Number of samples covering `duration` seconds at `sample_rate`.
pub fn sample_count(duration: f64, sample_rate: f64) -> usize {
    (duration * sample_rate).round() as usize
}

/// Samples the trajectory at `sample_rate` for `duration` seconds.
pub fn sample_trajectory(
    spatial: &SpatioTemporalConfig,
    sample_rate: f64,
    duration: f64,
) -> Result<PointSeries, TrajectoryError> {
    if !(sample_rate > 0.0 && sample_rate.is_finite() && duration >= 0.0 && duration.is_finite()) {
        return Err(TrajectoryError::InvalidSampling {
            sample_rate,
            duration,
        });
    }
    if let Ok(f_d) = drawing_frequency(spatial) {
        if f_d > 0.0 {
            let per_revolution = sample_rate / f_d;
            if per_revolution < MIN_SAMPLES_PER_REVOLUTION {
                return Err(TrajectoryError::RateTooLow {
                    sample_rate,
                    per_revolution,
                });
            }
        }
    }
    let n = sample_count(duration, sample_rate);
    let points = (0..n)
        .map(|i| position_at(spatial, i as f64 / sample_rate))
        .collect();
    Ok(PointSeries {
        sample_rate,
        points,
    })
}

/// Axis-aligned bounding box of the whole trajectory: (min corner, max corner).
pub fn bounding_box(spatial: &SpatioTemporalConfig) -> (Point2D, Point2D) {
    let h = spatial.size / 2.0;
    match spatial.shape {
        Shape::Point => (Point2D::ORIGIN, Point2D::ORIGIN),
        Shape::Circle => (Point2D::new(-h, -h), Point2D::new(h, h)),
        Shape::HorizontalLine => (Point2D::new(-h, 0.0), Point2D::new(h, 0.0)),
        Shape::RegularTriangle | Shape::Square => {
            let vertices = polygon_vertices(spatial.shape, spatial.size);
            let fold = |f: fn(f64, f64) -> f64, init: f64, pick: fn(&Point2D) -> f64| {
                vertices.iter().map(pick).fold(init, f)
            };
            (
                Point2D::new(
                    fold(f64::min, f64::INFINITY, |p| p.x),
                    fold(f64::min, f64::INFINITY, |p| p.y),
                ),
                Point2D::new(
                    fold(f64::max, f64::NEG_INFINITY, |p| p.x),
                    fold(f64::max, f64::NEG_INFINITY, |p| p.y),
                ),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn circle() -> SpatioTemporalConfig {
        SpatioTemporalConfig::new(Shape::Circle, 20.0, 12.0)
    }

    fn close(a: Point2D, b: Point2D, tol: f64) -> bool {
        a.distance(b) <= tol
    }

    /// Walks the closed polygon edge by edge, accumulating arc length, with
    /// no reference to revolution fractions.
    fn arc_walk(vertices: &[Point2D], distance: f64) -> Point2D {
        let total: f64 = (0..vertices.len())
            .map(|i| vertices[i].distance(vertices[(i + 1) % vertices.len()]))
            .sum();
        let mut remaining = distance % total;
        for i in 0..vertices.len() {
            let (a, b) = (vertices[i], vertices[(i + 1) % vertices.len()]);
            let len = a.distance(b);
            if remaining <= len {
                return a.lerp(b, remaining / len);
            }
            remaining -= len;
        }
        vertices[0]
    }

    #[test]
    fn circle_start_and_quarter() {
        let s = circle();
        assert!(close(position_at(&s, 0.0), Point2D::new(10.0, 0.0), 1e-12));
        let f_d = drawing_frequency(&s).unwrap();
        let quarter = position_at(&s, 1.0 / (4.0 * f_d));
        assert!(close(quarter, Point2D::new(0.0, 10.0), 1e-9), "{quarter:?}");
    }

    #[test]
    fn square_returns_to_start_after_one_period() {
        let s = SpatioTemporalConfig::new(Shape::Square, 20.0, 12.0);
        let start = position_at(&s, 0.0);
        assert_eq!(start, Point2D::new(10.0, 10.0));
        let back = position_at(&s, 1.0 / 150.0);
        assert!(close(back, start, 1e-9), "{back:?}");
    }

    #[test]
    fn square_matches_arc_walk() {
        let s = SpatioTemporalConfig::new(Shape::Square, 20.0, 12.0);
        let vertices = [
            Point2D::new(10.0, 10.0),
            Point2D::new(-10.0, 10.0),
            Point2D::new(-10.0, -10.0),
            Point2D::new(10.0, -10.0),
        ];
        for k in 0..97 {
            let t = k as f64 * 1.3e-4;
            let expected = arc_walk(&vertices, 12_000.0 * t);
            assert!(close(position_at(&s, t), expected, 1e-9), "t={t}");
        }
    }

    #[test]
    fn triangle_matches_arc_walk_and_centroid() {
        let s = SpatioTemporalConfig::new(Shape::RegularTriangle, 30.0, 9.0);
        let r = 30.0 / 3f64.sqrt();
        let vertices = [
            Point2D::new(15.0, -r / 2.0),
            Point2D::new(0.0, r),
            Point2D::new(-15.0, -r / 2.0),
        ];
        let cy: f64 = vertices.iter().map(|p| p.y).sum::<f64>() / 3.0;
        assert!(cy.abs() < 1e-12);
        for w in 0..3 {
            assert!((vertices[w].distance(vertices[(w + 1) % 3]) - 30.0).abs() < 1e-12);
        }
        for k in 0..50 {
            let t = k as f64 * 2.1e-4;
            let expected = arc_walk(&vertices, 9_000.0 * t);
            assert!(close(position_at(&s, t), expected, 1e-9), "t={t}");
        }
    }

    #[test]
    fn line_goes_out_and_back() {
        let s = SpatioTemporalConfig::new(Shape::HorizontalLine, 20.0, 4.0);
        // 40 mm per completion at 4000 mm/s: 100 Hz.
        assert_eq!(position_at(&s, 0.0), Point2D::new(10.0, 0.0));
        assert!(close(position_at(&s, 0.0025), Point2D::new(0.0, 0.0), 1e-9));
        assert!(close(
            position_at(&s, 0.005),
            Point2D::new(-10.0, 0.0),
            1e-9
        ));
        assert!(close(position_at(&s, 0.0075), Point2D::new(0.0, 0.0), 1e-9));
        assert!(close(position_at(&s, 0.01), Point2D::new(10.0, 0.0), 1e-9));
    }

    #[test]
    fn start_phase_shifts_along_perimeter() {
        let mut s = SpatioTemporalConfig::new(Shape::Square, 20.0, 12.0);
        s.start_phase = 0.25;
        assert!(close(
            position_at(&s, 0.0),
            Point2D::new(-10.0, 10.0),
            1e-12
        ));
    }

    #[test]
    fn point_series() {
        let p = sample_trajectory(&SpatioTemporalConfig::point(), 1000.0, 1.0).unwrap();
        assert_eq!(p.len(), 1000);
        assert!(p.points.iter().all(|&q| q == Point2D::ORIGIN));

        let c = sample_trajectory(&circle(), 20_000.0, 1.0).unwrap();
        assert_eq!(c.len(), 20_000);
        assert!(c.points.iter().all(|q| (q.norm() - 10.0).abs() <= 1e-9));
    }

    #[test]
    fn undersampled_circle_is_rejected() {
        let err = sample_trajectory(&circle(), 1000.0, 1.0).unwrap_err();
        match err {
            TrajectoryError::RateTooLow { per_revolution, .. } => {
                assert!((per_revolution - 1000.0 / 190.985_931_7).abs() < 1e-6)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bounding_boxes() {
        let (lo, hi) = bounding_box(&SpatioTemporalConfig::new(Shape::Square, 20.0, 1.0));
        assert_eq!(
            (lo, hi),
            (Point2D::new(-10.0, -10.0), Point2D::new(10.0, 10.0))
        );
        let (lo, hi) = bounding_box(&SpatioTemporalConfig::new(
            Shape::RegularTriangle,
            30.0,
            1.0,
        ));
        assert!((hi.y - 30.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((lo.x + 15.0).abs() < 1e-12);
    }

    fn shapes() -> impl Strategy<Value = Shape> {
        prop_oneof![
            Just(Shape::HorizontalLine),
            Just(Shape::Circle),
            Just(Shape::RegularTriangle),
            Just(Shape::Square),
        ]
    }

    proptest! {
        #[test]
        fn periodic_over_one_revolution(shape in shapes(), d in 1.0f64..60.0, v in 0.5f64..20.0, t in 0.0f64..10.0) {
            let s = SpatioTemporalConfig::new(shape, d, v);
            let period = 1.0 / drawing_frequency(&s).unwrap();
            let a = position_at(&s, t);
            let b = position_at(&s, t + period);
            prop_assert!(a.distance(b) <= 1e-9, "{a:?} vs {b:?}");
        }

        #[test]
        fn central_difference_speed_matches(shape in shapes(), d in 5.0f64..60.0, v in 1.0f64..20.0, t in 0.0f64..1.0) {
            let s = SpatioTemporalConfig::new(shape, d, v);
            let delta = 1e-7;
            // Skip instants within a step of a vertex or line end.
            let f_d = drawing_frequency(&s).unwrap();
            let corners = match shape {
                Shape::Circle => 0.0,
                Shape::HorizontalLine => 2.0,
                Shape::RegularTriangle => 3.0,
                _ => 4.0,
            };
            if corners > 0.0 {
                let pos = (f_d * t).fract() * corners;
                let margin = 2.0 * delta * f_d * corners;
                prop_assume!((pos - pos.round()).abs() > margin);
            }
            let speed = position_at(&s, t + delta).distance(position_at(&s, t - delta)) / (2.0 * delta);
            let expected = v * 1000.0;
            prop_assert!((speed - expected).abs() <= 1e-3 * expected, "{speed} vs {expected}");
        }

        #[test]
        fn circle_radius_is_exact(d in 1.0f64..60.0, v in 0.5f64..20.0, t in 0.0f64..10.0) {
            let s = SpatioTemporalConfig::new(Shape::Circle, d, v);
            prop_assert!((position_at(&s, t).norm() - d / 2.0).abs() <= 1e-9);
        }
    }
}
