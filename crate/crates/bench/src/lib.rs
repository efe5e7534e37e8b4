//! Fixtures shared by the benchmarks.

use nugap::{DelayRationalPlant, PlantInput};

/// `e^{-sT}(s - a)/(s - b)`.
pub fn zero_family(t: f64, b: f64, a: f64) -> PlantInput {
    DelayRationalPlant::from_coeffs(t, &[-a, 1.0], &[-b, 1.0])
        .expect("admissible plant")
        .into()
}
