//! Transport between the unit disk and the open right half-plane.
//!
//! Plant data lives in `s`; contours are circles `|z| = r` in the disk and
//! reach the half-plane through `s = (1 + z) / (1 - z)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `z -> (1 + z) / (1 - z)`.
pub fn mobius_to_halfplane(z: Complex64) -> Result<Complex64> {
    if !z.is_finite() {
        return Err(Error::NonFinite(format!("disk point {z}")));
    }
    if z == Complex64::new(1.0, 0.0) {
        return Err(Error::SingularPoint);
    }
    Ok((1.0 + z) / (1.0 - z))
}

/// Inverse map `s -> (s - 1) / (s + 1)`.
pub fn halfplane_to_disk(s: Complex64) -> Result<Complex64> {
    if !s.is_finite() {
        return Err(Error::NonFinite(format!("half-plane point {s}")));
    }
    if s == Complex64::new(-1.0, 0.0) {
        return Err(Error::SingularPoint);
    }
    Ok((s - 1.0) / (s + 1.0))
}

/// Boundary point of the disk corresponding to `s = i omega`.
pub fn axis_to_disk(omega: f64) -> Complex64 {
    let s = Complex64::new(0.0, omega);
    (s - 1.0) / (s + 1.0)
}

/// `n` equally spaced points `r e^{i 2 pi k / n}`, starting at `r`.
pub fn circle_samples(r: f64, n: usize) -> Result<Vec<Complex64>> {
    check_radius(r)?;
    if n == 0 {
        return Err(Error::InvalidArgument("circle needs at least one sample".into()));
    }
    Ok((0..n)
        .map(|k| disk_on_circle(r, 2.0 * PI * k as f64 / n as f64))
        .collect())
}

pub fn disk_on_circle(r: f64, theta: f64) -> Complex64 {
    Complex64::from_polar(r, theta)
}

/// Image of `r e^{i theta}` under the Mobius map, computed without the
/// cancellation in `1 - z` that appears as `r -> 1` and `theta -> 0`.
pub fn halfplane_on_circle(r: f64, theta: f64) -> Complex64 {
    let half = (0.5 * theta).sin();
    let gap = 1.0 - r;
    let denom = gap * gap + 4.0 * r * half * half;
    Complex64::new(gap * (1.0 + r) / denom, 2.0 * r * theta.sin() / denom)
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius {r} is not in (0, 1)")))
    }
}
