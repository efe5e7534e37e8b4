//! Polynomials, delay-rational plants and disk/half-plane transport.

mod conformal;
mod plant;
mod polynomial;

pub use conformal::{
    axis_to_disk, circle_samples, disk_on_circle, halfplane_on_circle, halfplane_to_disk,
    mobius_to_halfplane,
};
pub(crate) use conformal::check_radius;
pub use plant::{common_roots, delay_factor, DelayRationalPlant, POLE_FLOOR, ROOT_PAIRING_TOLERANCE};
pub use polynomial::{Polynomial, TRIM_TOLERANCE};

/// Complex point in either coordinate system.
pub type ComplexPoint = num_complex::Complex64;
