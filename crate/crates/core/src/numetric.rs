//! The nu-metric between two plants: winding/invertibility decision on
//! `det(G1* G2)`, then the sup of `Gtilde2 G1` on the boundary.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{BoundaryFunction, CMatrix};
use crate::hnorm::{hinf_norm, NormSearchResult, DEFAULT_COARSE_N, DEFAULT_OMEGA_MAX};
use crate::ncf::{normalized_coprime_factorization, validate_normalization, validation_grid, CoprimePair};
use crate::plantcore::{halfplane_on_circle, DelayRationalPlant};
use crate::windex::{
    det_boundary, index_from_reports, probe_from_reports, survey, RadiusReport, RadiusSchedule,
    DEFAULT_DELTA, DEFAULT_INITIAL_N,
};

/// Largest normalization residual accepted for user-supplied pairs.
pub const PAIR_NORMALIZATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuOptions {
    pub schedule: RadiusSchedule,
    pub initial_n: usize,
    pub delta: f64,
    pub omega_max: f64,
    pub coarse_n: usize,
    pub normalization_tolerance: f64,
}

impl Default for NuOptions {
    fn default() -> Self {
        Self {
            schedule: RadiusSchedule::default(),
            initial_n: DEFAULT_INITIAL_N,
            delta: DEFAULT_DELTA,
            omega_max: DEFAULT_OMEGA_MAX,
            coarse_n: DEFAULT_COARSE_N,
            normalization_tolerance: PAIR_NORMALIZATION_TOLERANCE,
        }
    }
}

impl NuOptions {
    fn check(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::InvalidArgument(format!("delta must be positive, got {}", self.delta)));
        }
        if self.normalization_tolerance.is_nan() || self.normalization_tolerance <= 0.0 {
            return Err(Error::InvalidArgument("normalization tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Either a plant to factorize or an already factorized pair.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum PlantInput {
    Plant(DelayRationalPlant),
    Pair(CoprimePair),
}

impl From<DelayRationalPlant> for PlantInput {
    fn from(p: DelayRationalPlant) -> Self {
        Self::Plant(p)
    }
}

impl From<CoprimePair> for PlantInput {
    fn from(p: CoprimePair) -> Self {
        Self::Pair(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    NormBranch,
    UnityBranch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    LimitRoute,
    FixedRhoRoute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuResult {
    pub value: f64,
    pub branch: Branch,
    pub invertible: bool,
    pub winding: Option<i64>,
    /// Smallest `|f|` over the assessed circles.
    pub margin: f64,
    pub margin_curve: Vec<(f64, f64)>,
    pub radius_reports: Vec<RadiusReport>,
    pub norm_search: Option<NormSearchResult>,
    pub route: Route,
    pub rho: Option<f64>,
}

fn resolve(input: &PlantInput, opts: &NuOptions) -> Result<CoprimePair> {
    match input {
        PlantInput::Plant(p) => normalized_coprime_factorization(p),
        PlantInput::Pair(pair) => {
            let residual = validate_normalization(pair, &validation_grid(1001))?;
            if residual > opts.normalization_tolerance {
                return Err(Error::NotNormalized(residual));
            }
            Ok(pair.clone())
        }
    }
}

fn check_compatible(a: &CoprimePair, b: &CoprimePair) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::ShapeMismatch(format!(
            "plants have shapes {:?} and {:?}",
            a.dims(),
            b.dims()
        )));
    }
    if a.coordinate() != b.coordinate() {
        return Err(Error::ShapeMismatch("factor pairs use different coordinates".into()));
    }
    Ok(())
}

/// `s -> G1(s)* G2(s)`, conjugating `G1` pointwise.
pub fn cross_gram(pair1: &CoprimePair, pair2: &CoprimePair) -> Result<BoundaryFunction> {
    check_compatible(pair1, pair2)?;
    let symmetric = pair1.is_conjugate_symmetric() && pair2.is_conjugate_symmetric();
    let coord = pair1.coordinate();
    if let (Some(a), Some(b)) = (pair1.siso(), pair2.siso()) {
        let (a, b) = (a.clone(), b.clone());
        return Ok(BoundaryFunction::scalar(coord, move |s| {
            a.n.eval(s).conj() * b.n.eval(s) + a.d.eval(s).conj() * b.d.eval(s)
        })
        .with_conjugate_symmetry(symmetric));
    }
    let m = pair1.dims().1;
    let (a, b) = (pair1.clone(), pair2.clone());
    Ok(BoundaryFunction::matrix(coord, m, m, move |s| a.g(s).adjoint() * b.g(s))
        .with_conjugate_symmetry(symmetric))
}

/// `s -> Gtilde2(s) G1(s) = -Dtilde2 N1 + Ntilde2 D1`.
pub fn parallel_residual(pair1: &CoprimePair, pair2: &CoprimePair) -> Result<BoundaryFunction> {
    check_compatible(pair1, pair2)?;
    let symmetric = pair1.is_conjugate_symmetric() && pair2.is_conjugate_symmetric();
    let coord = pair1.coordinate();
    if let (Some(a), Some(b)) = (pair1.siso(), pair2.siso()) {
        let asymptote = match (a.n.asymptote(), a.d.asymptote(), b.n.asymptote(), b.d.asymptote()) {
            (Some(n1), Some(d1), Some(n2), Some(d2)) => Some(n2.mul(&d1).add(&d2.mul(&n1).neg())),
            _ => None,
        };
        let (a, b) = (a.clone(), b.clone());
        let f = BoundaryFunction::scalar(coord, move |s| {
            b.n.eval(s) * a.d.eval(s) - b.d.eval(s) * a.n.eval(s)
        })
        .with_conjugate_symmetry(symmetric);
        return Ok(match asymptote {
            Some(t) => f.with_asymptote(t),
            None => f,
        });
    }
    let (p, m) = pair1.dims();
    let (a, b) = (pair1.clone(), pair2.clone());
    Ok(BoundaryFunction::matrix(coord, p, m, move |s| b.gtilde(s) * a.g(s))
        .with_conjugate_symmetry(symmetric))
}

/// Minimum moduli strictly decreasing towards the boundary.
fn strictly_decreasing(reports: &[RadiusReport]) -> bool {
    reports.len() > 1 && reports.windows(2).all(|w| w[1].min_modulus < w[0].min_modulus)
}

fn decide(
    pair1: &CoprimePair,
    pair2: &CoprimePair,
    reports: Vec<RadiusReport>,
    assessed: usize,
    opts: &NuOptions,
    route: Route,
    rho: Option<f64>,
) -> Result<NuResult> {
    let tail = &reports[reports.len() - assessed..];
    let probe = probe_from_reports(&reports, tail, opts.delta);
    let index = index_from_reports(tail);
    let mut result = NuResult {
        value: 1.0,
        branch: Branch::UnityBranch,
        invertible: probe.invertible,
        winding: index.as_ref().ok().copied(),
        margin: probe.margin,
        margin_curve: probe.margin_curve,
        radius_reports: reports.clone(),
        norm_search: None,
        route,
        rho,
    };
    if !probe.invertible {
        return Ok(result);
    }
    if probe.margin < 2.0 * opts.delta && strictly_decreasing(tail) {
        return Err(Error::Inconclusive(format!(
            "margin {:e} is within a factor 2 of delta {:e} and still falling",
            probe.margin, opts.delta
        )));
    }
    let winding = index.map_err(|e| Error::Inconclusive(format!("invertibility probe passed but {e}")))?;
    if winding != 0 {
        return Ok(result);
    }
    let search = hinf_norm(&parallel_residual(pair1, pair2)?, opts.omega_max, opts.coarse_n)?;
    result.value = search.value.clamp(0.0, 1.0);
    result.branch = Branch::NormBranch;
    result.norm_search = Some(search);
    Ok(result)
}

fn prepare(
    p1: &PlantInput,
    p2: &PlantInput,
    opts: &NuOptions,
) -> Result<(CoprimePair, CoprimePair, BoundaryFunction)> {
    opts.check()?;
    let pair1 = resolve(p1, opts)?;
    let pair2 = resolve(p2, opts)?;
    let f = det_boundary(&cross_gram(&pair1, &pair2)?)?;
    Ok((pair1, pair2, f))
}

/// Limit route: invertibility and index judged on the schedule tail.
pub fn nu_metric(p1: &PlantInput, p2: &PlantInput, opts: &NuOptions) -> Result<NuResult> {
    let (pair1, pair2, f) = prepare(p1, p2, opts)?;
    let reports = survey(&f, opts.schedule.radii(), opts.initial_n)?;
    decide(&pair1, &pair2, reports, opts.schedule.stabilization_count(), opts, Route::LimitRoute, None)
}

/// Fixed-rho route: every schedule circle with `r > rho` must pass.
pub fn nu_metric_fixed_rho(p1: &PlantInput, p2: &PlantInput, rho: f64, opts: &NuOptions) -> Result<NuResult> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidArgument(format!("rho {rho} must lie in (0, 1)")));
    }
    if rho >= opts.schedule.last() {
        return Err(Error::InvalidArgument(format!(
            "rho {rho} is not below the largest schedule radius {}",
            opts.schedule.last()
        )));
    }
    let (pair1, pair2, f) = prepare(p1, p2, opts)?;
    let radii: Vec<f64> = opts.schedule.radii().iter().copied().filter(|&r| r > rho).collect();
    let reports = survey(&f, &radii, opts.initial_n)?;
    let n = reports.len();
    decide(&pair1, &pair2, reports, n, opts, Route::FixedRhoRoute, Some(rho))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    Case1,
    Case2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormCase {
    /// `(a1^2 - b^2)(a2^2 - b^2) - 4 b^4`.
    pub discriminant: f64,
    pub case: CaseKind,
}

/// Closed-form distance for `e^{-sT}(s - a_i)/(s - b)` with nearby `a_1`, `a_2`.
pub fn closed_form_zero_uncertainty(t: f64, b: f64, a1: f64, a2: f64) -> Result<(f64, ClosedFormCase)> {
    if !(t.is_finite() && b.is_finite() && t > 0.0 && b > 0.0) {
        return Err(Error::InvalidArgument(format!("T = {t} and b = {b} must be positive")));
    }
    if !a1.is_finite() || !a2.is_finite() || a1 == b || a2 == b {
        return Err(Error::InvalidArgument(format!("a1 = {a1}, a2 = {a2} must be finite and differ from b = {b}")));
    }
    let (u1, u2) = (a1 * a1 - b * b, a2 * a2 - b * b);
    let discriminant = u1 * u2 - 4.0 * b.powi(4);
    let gap = (a1 - a2).abs();
    if discriminant >= 0.0 {
        let value = gap / (2f64.sqrt() * (u1.sqrt() + u2.sqrt()));
        Ok((value, ClosedFormCase { discriminant, case: CaseKind::Case1 }))
    } else {
        let value = b * gap / ((a1 * a1 + b * b).sqrt() * (a2 * a2 + b * b).sqrt());
        Ok((value, ClosedFormCase { discriminant, case: CaseKind::Case2 }))
    }
}

/// Closed-form distance for `e^{-sT} s/(s - a_i)`, `a_i > 0`.
pub fn closed_form_pole_uncertainty(a1: f64, a2: f64) -> Result<f64> {
    if !(a1.is_finite() && a2.is_finite() && a1 > 0.0 && a2 > 0.0) {
        return Err(Error::InvalidArgument(format!("a1 = {a1}, a2 = {a2} must be positive")));
    }
    Ok((a1 - a2).abs() / (2f64.sqrt() * (a1 + a2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub holds: bool,
    pub m_observed: f64,
}

/// `(|s - b|^2 e^{-2 Re(s) T} + (conj s - a1)(s - a2)) / ((sqrt2 conj s + c1)(sqrt2 s + c2))`.
pub fn lemma_cross_gram(t: f64, b: f64, a1: f64, a2: f64, s: Complex64) -> Complex64 {
    let sb = s.conj();
    let c1 = (a1 * a1 + b * b).sqrt();
    let c2 = (a2 * a2 + b * b).sqrt();
    let num = (sb - b) * (s - b) * (-2.0 * s.re * t).exp() + (sb - a1) * (s - a2);
    num / ((2f64.sqrt() * sb + c1) * (2f64.sqrt() * s + c2))
}

/// Minimum of `Re f` over the grid; holds when it is positive.
pub fn lemma_positivity_check(t: f64, b: f64, a1: f64, a2: f64, grid: &[Complex64]) -> LemmaCheck {
    let m_observed = grid
        .iter()
        .map(|&s| lemma_cross_gram(t, b, a1, a2, s).re)
        .fold(f64::INFINITY, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.min(v) });
    LemmaCheck { holds: !grid.is_empty() && m_observed > 0.0, m_observed }
}

/// Imaginary-axis samples plus half-plane images of the schedule circles.
pub fn lemma_grid(axis_points: usize, schedule: &RadiusSchedule, per_circle: usize) -> Vec<Complex64> {
    let mut grid: Vec<Complex64> = validation_grid(axis_points)
        .into_iter()
        .map(|w| Complex64::new(0.0, w))
        .collect();
    for &r in schedule.radii() {
        grid.extend((0..per_circle).map(|k| {
            halfplane_on_circle(r, 2.0 * std::f64::consts::PI * k as f64 / per_circle as f64)
        }));
    }
    grid
}

/// 20001 axis points and 6000 per default-schedule circle.
pub fn default_lemma_grid() -> Vec<Complex64> {
    lemma_grid(20001, &RadiusSchedule::default(), 6000)
}

/// Matrix form of [`cross_gram`] values for diagnostics.
pub fn cross_gram_at(pair1: &CoprimePair, pair2: &CoprimePair, s: Complex64) -> CMatrix {
    pair1.g(s).adjoint() * pair2.g(s)
}
