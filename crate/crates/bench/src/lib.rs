//! Fixtures shared by the engine benchmarks.

use tacton_sim::presets::measurement_grid;
use tacton_sim::{Shape, SpatioTemporalConfig, Tacton, TemporalConfig, ValidatedTacton};

/// AM+STM measurement Tacton: 140 Hz on a 20 mm circle at 12 m/s.
pub fn am_stm_tacton() -> ValidatedTacton {
    Tacton::new(
        TemporalConfig::am(1.0, 140.0, 1.0),
        SpatioTemporalConfig::new(Shape::Circle, 20.0, 12.0),
    )
    .validate()
    .expect("valid fixture")
}

/// Every Tacton of the 15-cell measurement grid, validated.
pub fn grid_tactons() -> Vec<(String, ValidatedTacton)> {
    measurement_grid()
        .into_iter()
        .map(|g| (g.name, g.tacton.validate().expect("grid tactons are valid")))
        .collect()
}
