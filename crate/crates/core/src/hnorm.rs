//! Boundary sup-norms of scalar and matrix functions.
//!
//! The norm is located by a log-spaced frequency scan followed by
//! golden-section refinement of every promising local maximum. For
//! delay-rational compositions the behaviour beyond the scan comes from the
//! function's [`Asymptote`](crate::function::Asymptote).

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{BoundaryFunction, CMatrix, Coordinate};
use crate::ncf::log_space;

pub const DEFAULT_OMEGA_MAX: f64 = 1e6;
pub const DEFAULT_COARSE_N: usize = 2048;
pub const MIN_COARSE_N: usize = 64;
/// Lower end of the log-spaced part of the scan.
pub const OMEGA_MIN: f64 = 1e-4;
/// Relative bracket width at which golden-section refinement stops.
pub const REFINE_TOLERANCE: f64 = 1e-10;
pub const MAX_BRACKETS: usize = 8;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Largest singular value, from the top eigenvalue of the smaller Gram matrix.
pub fn sigma_max(m: &CMatrix) -> f64 {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    if rows == 1 && cols == 1 {
        return m[(0, 0)].norm();
    }
    let gram = if cols <= rows { m.adjoint() * m } else { m * m.adjoint() };
    let top = gram
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0_f64, |acc, &l| acc.max(l));
    top.max(0.0).sqrt()
}

/// Outcome of a sup-norm search along the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSearchResult {
    pub value: f64,
    /// Frequency of the maximum; `+inf` when the tail limit dominates.
    #[serde(with = "extended_float")]
    pub argmax_omega: f64,
    /// Every `(omega, sigma_max)` evaluated during the scan and refinement.
    pub trace: Vec<(f64, f64)>,
    pub refined: bool,
    /// Limit superior as `|omega| -> infinity`, when known.
    pub tail_limit: Option<f64>,
}

/// Sup over `s = i omega` of `sigma_max(F(s))`.
pub fn hinf_norm(f: &BoundaryFunction, omega_max: f64, coarse_n: usize) -> Result<NormSearchResult> {
    if coarse_n < MIN_COARSE_N {
        return Err(Error::InvalidArgument(format!(
            "coarse grid needs at least {MIN_COARSE_N} points, got {coarse_n}"
        )));
    }
    if !(omega_max.is_finite() && omega_max > OMEGA_MIN) {
        return Err(Error::InvalidArgument(format!("omega_max {omega_max} must exceed {OMEGA_MIN}")));
    }
    let gain = |omega: f64| -> Result<f64> {
        let v = sigma_max(&f.eval_on_axis(omega));
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("sigma_max at omega = {omega}")))
        }
    };

    let positive: Vec<f64> = log_space(OMEGA_MIN, omega_max, coarse_n / 2).collect();
    let symmetric = f.is_conjugate_symmetric();
    let mut grid: Vec<f64> = Vec::with_capacity(coarse_n + 1);
    if !symmetric {
        grid.extend(positive.iter().rev().map(|w| -w));
    }
    grid.push(0.0);
    grid.extend(&positive);

    let values: Vec<f64> = grid.par_iter().map(|&w| gain(w)).collect::<Result<_>>()?;
    let mut trace: Vec<(f64, f64)> = grid.iter().copied().zip(values.iter().copied()).collect();

    let brackets = local_max_brackets(&grid, &values, symmetric);
    let refined: Vec<Vec<(f64, f64)>> = brackets
        .par_iter()
        .map(|&(lo, hi)| golden_maximize(&gain, lo, hi))
        .collect::<Result<_>>()?;
    let any_refined = !refined.is_empty();
    for part in refined {
        trace.extend(part);
    }

    let tail_limit = match f.coordinate() {
        Coordinate::HalfPlane => f.asymptote().map(|a| a.limsup()),
        Coordinate::Disk => Some(sigma_max(&f.eval(Complex64::new(1.0, 0.0)))).filter(|v| v.is_finite()),
    };

    let (mut argmax_omega, mut value) = trace
        .iter()
        .copied()
        .fold((0.0, f64::NEG_INFINITY), |best, (w, v)| if v > best.1 { (w, v) } else { best });
    if let Some(t) = tail_limit {
        if t > value {
            value = t;
            argmax_omega = f64::INFINITY;
        }
    }
    Ok(NormSearchResult { value, argmax_omega, trace, refined: any_refined, tail_limit })
}

/// Brackets around the largest strict local maxima of the scan.
fn local_max_brackets(grid: &[f64], values: &[f64], mirrored_at_zero: bool) -> Vec<(f64, f64)> {
    let n = grid.len();
    let mut peaks: Vec<(usize, f64)> = Vec::new();
    for i in 0..n {
        let left = if i > 0 { Some(values[i - 1]) } else if mirrored_at_zero && n > 1 { Some(values[1]) } else { None };
        let right = values.get(i + 1).copied();
        let rises = left.is_none_or(|l| values[i] > l) || (i == 0 && mirrored_at_zero);
        let holds = right.is_none_or(|r| values[i] >= r);
        if rises && holds {
            peaks.push((i, values[i]));
        }
    }
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    peaks.truncate(MAX_BRACKETS);
    peaks.sort_by_key(|p| p.0);
    peaks
        .into_iter()
        .map(|(i, _)| {
            let lo = if i > 0 { grid[i - 1] } else if mirrored_at_zero && n > 1 { -grid[1] } else { grid[i] };
            let hi = if i + 1 < n { grid[i + 1] } else { grid[i] };
            (lo, hi)
        })
        .filter(|(lo, hi)| hi > lo)
        .collect()
}

fn golden_maximize<F>(f: &F, mut a: f64, mut b: f64) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut trace = Vec::new();
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    trace.push((x1, f1));
    trace.push((x2, f2));
    for _ in 0..300 {
        if b - a <= REFINE_TOLERANCE * (a.abs() + b.abs()) + 1e-14 {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
            trace.push((x1, f1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
            trace.push((x2, f2));
        }
    }
    Ok(trace)
}

/// Maximum of `sigma_max(F)` over the circle `|z| = r`, sampled at `n`
/// angles and refined around the best sample.
pub fn contour_max(f: &BoundaryFunction, r: f64, n: usize) -> Result<(f64, f64)> {
    crate::plantcore::check_radius(r)?;
    if n < 8 {
        return Err(Error::InvalidArgument("contour_max needs at least 8 samples".into()));
    }
    let step = 2.0 * PI / n as f64;
    let gain = |theta: f64| -> Result<f64> {
        let v = sigma_max(&f.eval(f.contour_point(r, theta)));
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("contour value at r = {r}, theta = {theta}")))
        }
    };
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| gain(k as f64 * step))
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut best = (values[order[0]], order[0] as f64 * step);
    for &k in order.iter().take(4) {
        let centre = k as f64 * step;
        for (theta, v) in golden_maximize(&gain, centre - step, centre + step)? {
            if v > best.0 {
                best = (v, theta);
            }
        }
    }
    Ok(best)
}

/// Serializes non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod extended_float {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("unexpected float text {other:?}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Asymptote;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sigma_max_scalar() {
        let m = CMatrix::from_element(1, 1, c(3.0, -4.0));
        assert_eq!(sigma_max(&m), 5.0);
    }

    #[test]
    fn sigma_max_diagonal() {
        let m = CMatrix::from_row_slice(2, 2, &[c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)]);
        assert!((sigma_max(&m) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn sigma_max_nilpotent() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!((sigma_max(&m) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sigma_max_rectangular() {
        // rank one: u v^* with |u| = sqrt(2), |v| = 5
        let m = CMatrix::from_row_slice(3, 2, &[
            c(3.0, 0.0), c(0.0, 4.0),
            c(0.0, 3.0), c(-4.0, 0.0),
            c(0.0, 0.0), c(0.0, 0.0),
        ]);
        assert!((sigma_max(&m) - 5.0 * 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn first_order_lag_peaks_at_zero() {
        let f = BoundaryFunction::scalar(Coordinate::HalfPlane, |s| 1.0 / (s + 1.0))
            .with_conjugate_symmetry(true)
            .with_asymptote(Asymptote::zero());
        let res = hinf_norm(&f, DEFAULT_OMEGA_MAX, 256).unwrap();
        assert!((res.value - 1.0).abs() < 1e-15);
        assert_eq!(res.argmax_omega, 0.0);
        assert!(res.trace.iter().all(|&(_, v)| v <= res.value));
    }

    #[test]
    fn constant_norm() {
        let f = BoundaryFunction::constant(Coordinate::HalfPlane, c(0.0, -2.5));
        let res = hinf_norm(&f, 1e3, 64).unwrap();
        assert_eq!(res.value, 2.5);
    }

    #[test]
    fn interior_peak_is_refined() {
        // |1 / (s^2 + 0.2 s + 1)| peaks near omega = sqrt(1 - 2 * 0.1^2)
        let f = BoundaryFunction::scalar(Coordinate::HalfPlane, |s| 1.0 / (s * s + 0.2 * s + 1.0))
            .with_conjugate_symmetry(true)
            .with_asymptote(Asymptote::zero());
        let res = hinf_norm(&f, 1e3, 128).unwrap();
        let zeta: f64 = 0.1;
        let want = 1.0 / (2.0 * zeta * (1.0 - zeta * zeta).sqrt());
        assert!((res.value - want).abs() < 1e-12, "{} vs {want}", res.value);
        assert!((res.argmax_omega - (1.0 - 2.0 * zeta * zeta).sqrt()).abs() < 1e-5);
        assert!(res.refined);
    }

    #[test]
    fn tail_limit_can_dominate() {
        // (2s + 1)/(s + 1) increases toward 2
        let f = BoundaryFunction::scalar(Coordinate::HalfPlane, |s| (2.0 * s + 1.0) / (s + 1.0))
            .with_conjugate_symmetry(true)
            .with_asymptote(Asymptote::constant(c(2.0, 0.0)));
        let res = hinf_norm(&f, 1e3, 64).unwrap();
        assert_eq!(res.value, 2.0);
        assert_eq!(res.argmax_omega, f64::INFINITY);
    }

    #[test]
    fn asymmetric_function_scans_negative_frequencies() {
        // peak at omega = -3 only
        let f = BoundaryFunction::scalar(Coordinate::HalfPlane, |s| 1.0 / (s + c(0.1, 3.0)));
        let res = hinf_norm(&f, 1e3, 256).unwrap();
        assert!((res.value - 10.0).abs() < 1e-9);
        assert!((res.argmax_omega + 3.0).abs() < 1e-6);
    }

    #[test]
    fn non_finite_is_an_error() {
        let f = BoundaryFunction::scalar(Coordinate::HalfPlane, |s| 1.0 / s).with_conjugate_symmetry(true);
        assert!(matches!(hinf_norm(&f, 1e3, 64), Err(Error::NonFinite(_))));
    }

    #[test]
    fn small_grid_rejected() {
        let f = BoundaryFunction::constant(Coordinate::HalfPlane, c(1.0, 0.0));
        assert!(hinf_norm(&f, 1e3, 10).is_err());
    }

    #[test]
    fn disk_coordinate_uses_unit_circle() {
        // 1 / (2 - z) attains 1 at z = 1
        let f = BoundaryFunction::scalar(Coordinate::Disk, |z| 1.0 / (2.0 - z));
        let res = hinf_norm(&f, 1e3, 128).unwrap();
        assert!((res.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contour_max_below_boundary_sup() {
        let f = BoundaryFunction::scalar(Coordinate::HalfPlane, |s| 1.0 / (s + 1.0));
        let (v, _) = contour_max(&f, 0.9, 256).unwrap();
        // attained at z = -0.9, s = 0.1 / 1.9
        assert!((v - 1.0 / (1.0 + 0.1 / 1.9)).abs() < 1e-12);
    }

    #[test]
    fn extended_float_round_trip() {
        #[derive(Serialize, Deserialize)]
        struct W(#[serde(with = "extended_float")] f64);
        let text = serde_json::to_string(&W(f64::INFINITY)).unwrap();
        assert_eq!(text, "\"inf\"");
        assert_eq!(serde_json::from_str::<W>(&text).unwrap().0, f64::INFINITY);
        let v = 0.1 + 0.2;
        assert_eq!(serde_json::from_str::<W>(&serde_json::to_string(&W(v)).unwrap()).unwrap().0, v);
    }
}
