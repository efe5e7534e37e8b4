//! Winding numbers on circles `|z| = r`, the limiting index as `r -> 1`,
//! and the invertibility probe on near-boundary annuli.
//!
//! Contours are always disk circles. A function that lives in the
//! half-plane is evaluated at the Mobius image of each sample.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{BoundaryFunction, CMatrix};
use crate::plantcore::check_radius;

pub const DEFAULT_INITIAL_N: usize = 1024;
/// Hard cap on samples per circle.
pub const SAMPLE_BUDGET: usize = 1 << 22;
/// Every consecutive phase increment must stay below this.
pub const MAX_PHASE_STEP: f64 = PI / 2.0;
/// Accumulated argument must be this close to a multiple of `2 pi`.
pub const INTEGER_TOLERANCE: f64 = 0.1;
/// Below this modulus the winding number is undefined.
pub const DEGENERACY_FLOOR: f64 = 1e-300;
pub const DEFAULT_DELTA: f64 = 1e-2;
pub const DEFAULT_LEVELS: usize = 14;
pub const DEFAULT_STABILIZATION: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub winding: i64,
    pub min_modulus: f64,
    pub samples_used: usize,
    pub converged: bool,
}

/// Increasing radii approaching the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusSchedule {
    radii: Vec<f64>,
    stabilization_count: usize,
}

impl RadiusSchedule {
    pub fn new(radii: Vec<f64>, stabilization_count: usize) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidArgument("radius schedule is empty".into()));
        }
        for &r in &radii {
            check_radius(r)?;
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("radii must be strictly increasing".into()));
        }
        if radii[radii.len() - 1] < 0.99 {
            return Err(Error::InvalidArgument(format!(
                "last radius {} is below 0.99",
                radii[radii.len() - 1]
            )));
        }
        if stabilization_count == 0 || stabilization_count > radii.len() {
            return Err(Error::InvalidArgument(format!(
                "stabilization count {stabilization_count} must be in 1..={}",
                radii.len()
            )));
        }
        Ok(Self { radii, stabilization_count })
    }

    /// `r_k = 1 - 2^{-(k+1)}` for `k = 1..=levels`.
    pub fn geometric(levels: usize, stabilization_count: usize) -> Result<Self> {
        let radii = (1..=levels).map(|k| 1.0 - 0.5 * 2f64.powi(-(k as i32))).collect();
        Self::new(radii, stabilization_count)
    }

    /// Shortest geometric schedule whose last radius reaches `r_max`.
    pub fn reaching(r_max: f64, stabilization_count: usize) -> Result<Self> {
        if !(0.99..1.0).contains(&r_max) {
            return Err(Error::InvalidArgument(format!("r_max {r_max} must lie in [0.99, 1)")));
        }
        let mut levels = 1;
        while 1.0 - 0.5 * 2f64.powi(-(levels as i32)) < r_max {
            levels += 1;
            if levels > 50 {
                return Err(Error::InvalidArgument(format!("r_max {r_max} is too close to 1")));
            }
        }
        Self::geometric(levels, stabilization_count)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn stabilization_count(&self) -> usize {
        self.stabilization_count
    }

    pub fn tail(&self) -> &[f64] {
        &self.radii[self.radii.len() - self.stabilization_count..]
    }

    pub fn last(&self) -> f64 {
        self.radii[self.radii.len() - 1]
    }
}

impl Default for RadiusSchedule {
    fn default() -> Self {
        Self::geometric(DEFAULT_LEVELS, DEFAULT_STABILIZATION).expect("default schedule is valid")
    }
}

/// Per-radius outcome of a contour scan; one row of the margin dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusReport {
    pub r: f64,
    /// Absent when the function vanishes on the contour or sampling did not converge.
    pub winding: Option<i64>,
    pub min_modulus: f64,
    pub samples_used: usize,
    pub converged: bool,
}

struct CircleScan {
    winding: i64,
    min_modulus: f64,
    samples: usize,
    converged: bool,
    degenerate: bool,
}

fn scan_circle(f: &BoundaryFunction, r: f64, initial_n: usize) -> Result<CircleScan> {
    let eval = |k: usize, n: usize| f.eval_on_circle(r, 2.0 * PI * k as f64 / n as f64);
    let mut n = initial_n;
    let mut values: Vec<Complex64> = (0..n).into_par_iter().map(|k| eval(k, n)).collect();
    loop {
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "contour value at r = {r}, theta = {}",
                2.0 * PI * bad as f64 / n as f64
            )));
        }
        let min_modulus = values.iter().fold(f64::INFINITY, |m, v| m.min(v.norm()));
        if min_modulus < DEGENERACY_FLOOR {
            return Ok(CircleScan { winding: 0, min_modulus, samples: n, converged: false, degenerate: true });
        }
        let mut total = 0.0;
        let mut worst_step = 0.0_f64;
        for k in 0..n {
            let step = (values[(k + 1) % n] / values[k]).arg();
            total += step;
            worst_step = worst_step.max(step.abs());
        }
        let winding = (total / (2.0 * PI)).round();
        let converged = worst_step < MAX_PHASE_STEP
            && (total - 2.0 * PI * winding).abs() < INTEGER_TOLERANCE;
        if converged || 2 * n > SAMPLE_BUDGET {
            return Ok(CircleScan {
                winding: winding as i64,
                min_modulus,
                samples: n,
                converged,
                degenerate: false,
            });
        }
        let fresh: Vec<Complex64> = (0..n).into_par_iter().map(|k| eval(2 * k + 1, 2 * n)).collect();
        let mut merged = Vec::with_capacity(2 * n);
        for (old, new) in values.into_iter().zip(fresh) {
            merged.push(old);
            merged.push(new);
        }
        values = merged;
        n *= 2;
    }
}

fn require_scalar(f: &BoundaryFunction) -> Result<()> {
    if f.is_scalar() {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!(
            "winding needs a scalar function, got {:?}",
            f.shape()
        )))
    }
}

/// Winding number of `f` along `|z| = r`, with sample doubling until every
/// phase step is below `pi / 2` or the budget runs out.
pub fn winding_on_circle(f: &BoundaryFunction, r: f64, initial_n: usize) -> Result<WindingResult> {
    require_scalar(f)?;
    check_radius(r)?;
    if initial_n < 8 {
        return Err(Error::InvalidArgument("at least 8 initial samples are required".into()));
    }
    let scan = scan_circle(f, r, initial_n)?;
    if scan.degenerate {
        return Err(Error::ZeroOnContour { radius: r, min_modulus: scan.min_modulus });
    }
    Ok(WindingResult {
        winding: scan.winding,
        min_modulus: scan.min_modulus,
        samples_used: scan.samples,
        converged: scan.converged,
    })
}

/// Scans every radius; degenerate or unconverged circles report no winding.
pub fn survey(f: &BoundaryFunction, radii: &[f64], initial_n: usize) -> Result<Vec<RadiusReport>> {
    require_scalar(f)?;
    if initial_n < 8 {
        return Err(Error::InvalidArgument("at least 8 initial samples are required".into()));
    }
    radii
        .par_iter()
        .map(|&r| {
            check_radius(r)?;
            let scan = scan_circle(f, r, initial_n)?;
            Ok(RadiusReport {
                r,
                winding: (scan.converged && !scan.degenerate).then_some(scan.winding),
                min_modulus: scan.min_modulus,
                samples_used: scan.samples,
                converged: scan.converged,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitIndex {
    pub index: i64,
    pub sequence: Vec<RadiusReport>,
}

/// Common winding of the reports, or the disagreement as an error.
pub fn index_from_reports(tail: &[RadiusReport]) -> Result<i64> {
    let windings: Vec<Option<i64>> = tail.iter().map(|r| r.winding).collect();
    match windings.first() {
        Some(Some(w)) if windings.iter().all(|x| *x == Some(*w)) => Ok(*w),
        _ => Err(Error::NotStabilized(windings)),
    }
}

/// Stabilized winding number over the tail of the schedule.
#[allow(non_snake_case)]
pub fn limit_index_W(f: &BoundaryFunction, schedule: &RadiusSchedule, initial_n: usize) -> Result<LimitIndex> {
    let sequence = survey(f, schedule.radii(), initial_n)?;
    let tail = &sequence[sequence.len() - schedule.stabilization_count()..];
    let index = index_from_reports(tail)?;
    Ok(LimitIndex { index, sequence })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvertibilityReport {
    pub invertible: bool,
    /// Smallest modulus seen on the assessed circles.
    pub margin: f64,
    pub delta: f64,
    /// `(r, min_modulus)` for every scanned radius.
    pub margin_curve: Vec<(f64, f64)>,
}

/// Verdict from precomputed reports: the assessed circles are `tail`.
pub fn probe_from_reports(all: &[RadiusReport], tail: &[RadiusReport], delta: f64) -> InvertibilityReport {
    let margin = tail.iter().fold(f64::INFINITY, |m, r| m.min(r.min_modulus));
    InvertibilityReport {
        invertible: margin >= delta,
        margin,
        delta,
        margin_curve: all.iter().map(|r| (r.r, r.min_modulus)).collect(),
    }
}

/// Whether `f` stays at least `delta` away from zero on the schedule tail.
pub fn invertibility_probe(
    f: &BoundaryFunction,
    schedule: &RadiusSchedule,
    delta: f64,
) -> Result<InvertibilityReport> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let reports = survey(f, schedule.radii(), DEFAULT_INITIAL_N)?;
    let tail = &reports[reports.len() - schedule.stabilization_count()..];
    Ok(probe_from_reports(&reports, tail, delta))
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(m: &CMatrix) -> Complex64 {
    let n = m.nrows();
    let mut a = m.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .unwrap_or(col);
        if a[(pivot, col)] == Complex64::new(0.0, 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap_rows(pivot, col);
            det = -det;
        }
        let p = a[(col, col)];
        det *= p;
        for row in col + 1..n {
            let factor = a[(row, col)] / p;
            for k in col + 1..n {
                let sub = factor * a[(col, k)];
                a[(row, k)] -= sub;
            }
        }
    }
    det
}

/// Pointwise determinant of a square matrix function.
pub fn det_boundary(f: &BoundaryFunction) -> Result<BoundaryFunction> {
    let (rows, cols) = f.shape();
    if rows != cols {
        return Err(Error::ShapeMismatch(format!("determinant of a {rows}x{cols} function")));
    }
    if rows == 1 {
        return Ok(f.clone());
    }
    let inner = f.clone();
    Ok(BoundaryFunction::scalar(f.coordinate(), move |p| determinant(&inner.eval(p)))
        .with_conjugate_symmetry(f.is_conjugate_symmetric()))
}

/// Delimiter-separated dump: `r,winding,min_modulus,samples_used`.
pub fn margin_table(reports: &[RadiusReport]) -> String {
    let mut out = String::from("r,winding,min_modulus,samples_used\n");
    for r in reports {
        let w = r.winding.map(|w| w.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{}\n", r.r, w, r.min_modulus, r.samples_used));
    }
    out
}
